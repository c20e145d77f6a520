// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <functional>
#include <set>
#include <sstream>

#include "motifauto/compile.hpp"
#include "motifauto/distributions.hpp"
#include "motifauto/genfunc.hpp"
#include "motifauto/oracle.hpp"
#include "property_cases.hpp"
#include "support.hpp"

using namespace motifauto;
using testsupport::interpolate;
using testsupport::interpolate_in_p;
using testsupport::R;

namespace {

/// Collects the first failure of a criterion.
struct Check {
  bool ok = true;
  std::string why;
  void expect(bool cond, const std::string& what) {
    if (!cond && ok) why = what;
    ok = ok && cond;
  }
};

MarkovEmbedding keyword_chain(const std::vector<std::string>& words, const Alphabet& al) {
  return embed(aho_corasick(KeywordSet(words, al)), al);
}

MarkovEmbedding correlated_sooner_chain() {
  const auto al = Alphabet::binary(R(1, 2));
  return embed(compile_pattern("1a#...b1", al, default_rules(al), Variant::Sooner).dfa, al);
}

std::string str(const Rational& r) { return r.get_str(); }

// ---------------------------------------------------------------------------

Check sooner_time() {
  Check c;
  const auto half = sooner_time_pmf(keyword_chain({"ba", "abba"}, Alphabet::binary(R(1, 2))), {"*"}, 20);
  for (unsigned n = 2; n <= 20; ++n)
    c.expect(half.at(n) == Rational(n - 1) / pow(Rational(2), n), "p=1/2, n=" + std::to_string(n));
  for (const auto& p : {R(1, 3), R(2, 3)}) {
    const Rational q = 1 - p;
    const auto pmf = sooner_time_pmf(keyword_chain({"ba", "abba"}, Alphabet::binary(p)), {"*"}, 20);
    for (unsigned n = 2; n <= 20; ++n)
      c.expect(pmf.at(n) == (q * pow(p, n) - p * pow(q, n)) / (p - q), "p=" + str(p) + ", n=" + std::to_string(n));
  }
  return c;
}

Check which_first() {
  Check c;
  const auto p = testsupport::P(), q = testsupport::Q();
  auto split = [](const Rational& x, const char* key) {
    return first_pattern_split(keyword_chain({"ba", "abba"}, Alphabet::binary(x)), {"ba", "abba"}).at(key);
  };
  const auto ba_first = interpolate_in_p([&](const Rational& x) { return split(x, "ba"); }, 7);
  const auto tie = interpolate_in_p([&](const Rational& x) { return split(x, "ba+abba"); }, 7);
  c.expect(ba_first == testsupport::C(1) - p * p * q, "ba strictly first");
  c.expect(tie == p * p * q, "simultaneous");
  return c;
}

JointPmf six_letter_law(const Rational& p) {
  return count_joint_pmf(keyword_chain({"ba", "abba"}, Alphabet::binary(p)), {"ba", "abba"}, 6);
}

Check count_laws() {
  Check c;
  const auto p = testsupport::P(), q = testsupport::Q();
  const std::map<CountVector, RationalPoly> joint = {
      {{0, 0}, p.pow(3) * q.pow(3) + p.pow(6) + p.pow(5) * q + p.pow(4) * q.pow(2) + p.pow(2) * q.pow(4) +
                   p * q.pow(5) + q.pow(6)},
      {{1, 0}, p.pow(3) * q.pow(3) * R(7) + p.pow(2) * q.pow(4) * R(7) + p * q.pow(5) * R(5) +
                   p.pow(4) * q.pow(2) * R(5) + p.pow(5) * q * R(5)},
      {{2, 0}, p.pow(3) * q.pow(3) * R(5) + p.pow(2) * q.pow(4) * R(4) + p.pow(4) * q.pow(2) * R(6)},
      {{3, 0}, p.pow(3) * q.pow(3)},
      {{1, 1}, p.pow(3) * q.pow(3) * R(2) + p.pow(2) * q.pow(4) + p.pow(4) * q.pow(2) * R(3)},
      {{2, 1}, p.pow(2) * q.pow(4) * R(2) + p.pow(3) * q.pow(3) * R(4)},
  };
  // degree 6 in p, so 9 points over-determine each fit
  const auto ps = testsupport::sample_ps(9);
  std::vector<JointPmf> laws;
  for (const auto& x : ps) laws.push_back(six_letter_law(x));
  for (const auto& law : laws) c.expect(law.entries.size() == joint.size(), "support is not the six listed pairs");
  for (const auto& [m, poly] : joint) {
    std::vector<Rational> ys;
    for (const auto& law : laws) ys.push_back(law.at(m));
    c.expect(interpolate(ps, ys) == poly, "joint law at (" + std::to_string(m[0]) + "," + std::to_string(m[1]) + ")");
  }

  // P(S1 = k | S2 = 0) * d(p) for k = 1, 2, 3
  const RationalPoly d({R(1), R(0), R(-3), R(6), R(-3)});
  const std::vector<RationalPoly> conditional = {
      RationalPoly({R(0), R(5), R(-18), R(29), R(-24), R(13), R(-5)}),
      RationalPoly({R(0), R(0), R(4), R(-11), R(15), R(-13), R(5)}),
      RationalPoly({R(0), R(0), R(0), R(1), R(-3), R(3), R(-1)}),
  };
  for (unsigned k = 1; k <= 3; ++k) {
    std::vector<Rational> ys;
    for (std::size_t i = 0; i < ps.size(); ++i) ys.push_back(conditional_pmf(laws[i], 0, {{1, 0}}).at(k) * d(ps[i]));
    c.expect(interpolate(ps, ys) == conditional[k - 1], "conditional law at k=" + std::to_string(k));
  }
  return c;
}

Check generating_functions() {
  Check c;
  for (const auto& p : testsupport::sample_ps(4)) {
    const Rational q = 1 - p;
    const auto one = Polynomial::constant(3, 1), x = Polynomial::variable(3, 0);
    const auto y1 = Polynomial::variable(3, 1), y2 = Polynomial::variable(3, 2);
    const auto f = resolvent_gf(keyword_chain({"ba", "abba"}, Alphabet::binary(p)), {"ba", "abba"});
    const Polynomial num = p * q * q * q * y1 * (one - y2) * x.pow(4) + p * q * (y1 - one) * x.pow(2) + x;
    const Polynomial den = p * q * q * q * y1 * (y2 - one) * x.pow(4) + p * q * q * y1 * (one - y2) * x.pow(3) +
                           p * q * (one - y1) * x.pow(2) - x + one;
    c.expect(f.equals(num, den), "two-keyword resolvent at p=" + str(p));

    const auto al = Alphabet::binary(p);
    const auto one2 = Polynomial::constant(2, 1), x2 = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
    const auto g = resolvent_gf(embed(compile_pattern("aa#...ba", al, {}, Variant::Renewal).dfa, al), {"*"});
    const Polynomial gn = x2 * (p * p * p * q * y * x2.pow(4) + p * p * q * x2.pow(3) - q * x2 + one2);
    const Polynomial gd = one2 - (p + 2 * q) * x2 + q * x2.pow(2) + p * p * q * x2.pow(3) -
                          p * p * q * q * x2.pow(4) - p * p * p * q * y * x2.pow(5);
    c.expect(g.equals(gn, gd), "NC(aa#...ba) resolvent at p=" + str(p));

    const auto one1 = Polynomial::constant(1, 1), z = Polynomial::variable(1, 0);
    const auto s = sooner_gf(keyword_chain({"ba", "abba"}, al), {"*"});
    c.expect(s.equals(p * q * z * z, (one1 - p * z) * (one1 - q * z)), "sooner GF at p=" + str(p));
  }
  const auto one = Polynomial::constant(1, 1), x = Polynomial::variable(1, 0);
  const auto f = sooner_gf(correlated_sooner_chain(), {"*"});
  const Polynomial num = x.pow(5) * (R(2) * x.pow(4) - R(3) * x.pow(3) + R(3) * x.pow(2) - R(2) * x + R(16) * one);
  const Polynomial den = R(16) * (R(2) * one - x).pow(3);
  c.expect(f.equals(num, den), "1a#...b1 sooner GF at p=1/2");
  return c;
}

Check clt_rates() {
  Check c;
  for (const auto& p : testsupport::sample_ps(14)) {
    const Rational q = 1 - p;
    const auto r = clt_params(keyword_chain({"ba", "abba"}, Alphabet::binary(p)), {"ba", "abba"});
    const std::string at = " at p=" + str(p);
    c.expect(r.mean_rate[0] == p * q && r.mean_rate[1] == p * p * q * q, "mean rates" + at);
    c.expect(r.cov_rate(0, 0) == p * q * (1 - 3 * p * q), "ba variance rate" + at);
    c.expect(r.cov_rate(1, 1) == p * p * q * q * (1 - 11 * p * q * q + 13 * p * pow(q, 3) + 6 * p * p * q * q),
             "abba variance rate" + at);
    c.expect(r.cov_rate(0, 1) == p * p * q * q / 2 * (7 * p - p * q - 5 + 9 * q * q), "covariance rate" + at);
    c.expect(r.det_sigma == pow(p, 3) * pow(q, 3) *
                                (1 - 5 * p + 14 * p * p - 25 * pow(p, 3) + 28 * pow(p, 4) - 16 * pow(p, 5) +
                                 4 * pow(p, 6)),
             "det Sigma" + at);
  }
  const auto half = clt_params(keyword_chain({"ba", "abba"}, Alphabet::binary(R(1, 2))), {"ba", "abba"});
  c.expect(half.cov_rate(0, 0) == R(1, 16) && half.cov_rate(0, 1) == R(1, 64) && half.cov_rate(1, 0) == R(1, 64) &&
               half.cov_rate(1, 1) == R(13, 256),
           "Sigma at p=1/2");
  return c;
}

Check product_size() {
  Check c;
  const auto al = Alphabet::uniform("ab");
  const auto cp = compile_pattern("1a#...b1", al, default_rules(al), Variant::Sooner);
  c.expect(cp.raw_states == 36, "raw states " + std::to_string(cp.raw_states));
  c.expect(cp.accessible_states == 25, "accessible states " + std::to_string(cp.accessible_states));
  c.expect(embed(cp.dfa, al).P.rows() == 25, "chain size");
  return c;
}

Check dominant_pole() {
  Check c;
  const auto f = sooner_gf(correlated_sooner_chain(), {"*"});
  const std::vector<unsigned> ns = {50, 75, 100, 125, 150, 175, 200};
  const auto a = coeff_asymptotics(f, ns);
  c.expect(a.unique && a.exact && a.dominant.front().value == 2 && a.order == 3, "dominant pole is not 2 of order 3");
  if (!c.ok) return c;
  const auto coeffs = series_rational(f, 200);
  const Rational fitted = fit_leading_constant(coeffs, R(2), 3, 150, 200);
  c.expect(Rational(abs(fitted - 4)) <= R(1, 100) * 4, "fitted c = " + str(fitted));
  c.expect(Rational(abs(a.constant - 4)) <= R(1, 100) * 4, "pole constant c = " + str(a.constant));
  for (std::size_t i = 1; i < a.relative_error.size(); ++i)
    c.expect(a.relative_error[i].second < a.relative_error[i - 1].second,
             "relative error not decreasing at n=" + std::to_string(a.relative_error[i].first));
  return c;
}

Check oracle_equivalence() {
  Check c;
  const auto cases = testsupport::generate_cases(20240601, 4);
  c.expect(cases.size() >= 20, "fewer than 20 cases");
  for (const auto& pc : cases) {
    const auto r = testsupport::check_case(pc);
    c.expect(r.ok, r.detail);
  }
  return c;
}

Check autocorrelation_avoidance() {
  Check c;
  const auto aut = autocorrelation("abbab");
  c.expect(aut.bits == "01001", "Aut[abbab] = " + aut.bits);
  c.expect(aut.poly == RationalPoly({R(0), R(1), R(0), R(0), R(1)}), "autocorrelation polynomial");
  for (const char* w : {"aa", "ab"}) {
    const auto av = avoidance_gf(w, 2, 16);
    std::vector<Integer> brute(17, 0);
    for (unsigned n = 0; n <= 16; ++n)
      for_each_text(Alphabet::uniform("ab"), n, [&](const std::string& t, const Rational&) {
        if (t.find(w) == std::string::npos) ++brute[n];
      });
    c.expect(av.counts == brute, std::string("avoidance counts for ") + w);
  }
  const auto fib = avoidance_gf("aa", 2, 16).counts;
  c.expect(fib[0] == 1 && fib[1] == 2, "Fibonacci start");
  for (std::size_t n = 2; n < fib.size(); ++n) c.expect(fib[n] == fib[n - 1] + fib[n - 2], "Fibonacci recurrence");
  return c;
}

// ---------------------------------------------------------------------------
// Automaton properties over every binary text of length <= 10.

void for_all_texts(unsigned max_len, const std::function<void(const std::string&)>& fn) {
  std::vector<std::string> layer{""};
  for (unsigned n = 0; n <= max_len; ++n) {
    std::vector<std::string> next;
    for (const auto& t : layer) {
      fn(t);
      next.push_back(t + 'a');
      next.push_back(t + 'b');
    }
    layer = std::move(next);
  }
}

std::string state_word(const Dfa& d, StateIndex s) {
  return d.labels[s] == std::string(kEmptyWord) ? std::string() : d.labels[s];
}

bool ends_with(const std::string& u, const std::string& w) {
  return u.size() >= w.size() && u.compare(u.size() - w.size(), w.size(), w) == 0;
}

Check automaton_theorems() {
  Check c;
  const auto ab = Alphabet::uniform("ab");
  const std::vector<std::vector<std::string>> corpus = {
      {"ba", "abba"}, {"aa"}, {"ab", "aabb"}, {"aba", "bab", "bb"}, {"a", "bab"}, {"abab", "bab", "b"}, {"aaa", "aab"}};
  std::vector<Dfa> automata;
  for (const auto& words : corpus) {
    const KeywordSet ks(words, ab);
    const auto d = aho_corasick(ks);
    automata.push_back(d);
    std::set<std::string> v;
    for (const auto& w : words)
      for (std::size_t k = 0; k <= w.size(); ++k) v.insert(w.substr(0, k));
    const std::string name = d.name;

    // suffix-reduced exactly when every keyword's terminal class within W is {w}
    bool all_singletons = true;
    for (const auto& w : ks.words()) {
      std::set<std::string> tw;
      for (const auto& u : ks.words())
        if (ends_with(u, w)) tw.insert(u);
      all_singletons = all_singletons && tw == std::set<std::string>{w};
    }
    c.expect(all_singletons == ks.suffix_reduced(), name + ": suffix-reduced vs singleton classes");

    for_all_texts(10, [&](const std::string& x) {
      if (!c.ok) return;
      // longest-suffix lemma
      std::string longest;
      for (std::size_t k = 0; k <= x.size(); ++k)
        if (v.count(x.substr(x.size() - k))) longest = x.substr(x.size() - k);
      c.expect(state_word(d, delta_star(d, d.initial, x)) == longest, name + ": lemma fails on '" + x + "'");
      // class visits equal end positions
      for (const auto& w : ks.words()) {
        unsigned visits = 0, ends = 0;
        StateIndex s = d.initial;
        for (std::size_t i = 0; i < x.size(); ++i) {
          s = d.next(s, d.symbol_index(x[i]));
          visits += d.in_class(w, s);
          ends += ends_with(x.substr(0, i + 1), w);
        }
        c.expect(visits == ends, name + ": visits to class " + w + " on '" + x + "'");
      }
    });
  }

  // modular automata: "*" visits equal matcher end positions
  for (const char* pat : {"aa#...ba", "ba#...bb", "a#_2...b", "ab#...a#...b"}) {
    const auto expr = parse_pattern(pat, ab, {});
    const auto m = split_modules(expr, ab);
    const auto d = concat_modular(m.modules, m.gaps);
    automata.push_back(d);
    const NaiveMatcher matcher(expr, {});
    for_all_texts(10, [&](const std::string& x) {
      if (!c.ok) return;
      unsigned visits = 0, ends = 0;
      StateIndex s = d.initial;
      for (std::size_t i = 0; i < x.size(); ++i) {
        s = d.next(s, d.symbol_index(x[i]));
        visits += d.in_class("*", s);
        ends += matcher.ends_at(x, i + 1);
      }
      c.expect(visits == ends, d.name + ": visits on '" + x + "'");
    });
  }

  // product: each coordinate runs its factor, so lifted classes equal factor membership
  for (std::size_t i = 0; i + 1 < automata.size() && c.ok; ++i) {
    const std::vector<Dfa> factors = {automata[i], make_absorbing(automata[i + 1], "*")};
    const auto prod = product_accessible(factors);
    c.expect(isomorphic(prod, prune_accessible(product(factors))), prod.name + ": accessible part");
    for_all_texts(10, [&](const std::string& x) {
      if (!c.ok) return;
      const StateIndex s = delta_star(prod, prod.initial, x);
      for (std::size_t f = 0; f < factors.size(); ++f) {
        const StateIndex fs = delta_star(factors[f], factors[f].initial, x);
        for (const auto& [label, members] : factors[f].classes)
          c.expect(prod.in_class(std::to_string(f + 1) + ":" + label, s) == factors[f].in_class(label, fs),
                   prod.name + ": class " + label + " of factor " + std::to_string(f + 1) + " on '" + x + "'");
      }
    });
  }
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"sooner time of {ba,abba}", sooner_time},
      {"which-first probabilities", which_first},
      {"joint and conditional count laws", count_laws},
      {"generating function closed forms", generating_functions},
      {"asymptotic mean and covariance rates", clt_rates},
      {"product automaton size for 1a#...b1", product_size},
      {"dominant-pole asymptotics", dominant_pole},
      {"engine vs brute-force enumeration", oracle_equivalence},
      {"autocorrelation and avoidance counts", autocorrelation_avoidance},
      {"automaton properties on all binary texts <= 10", automaton_theorems},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.why = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %2zu. %s%s%s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                c.ok ? "" : ": ", c.why.c_str());
    failed += !c.ok;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
