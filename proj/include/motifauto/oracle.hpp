#pragma once

// Brute-force ground truth: exhaustive enumeration of texts with exact weights,
// naive scanning, and a seeded sampler. Nothing here uses the automata.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "motifauto/alphabet.hpp"
#include "motifauto/dfa.hpp"
#include "motifauto/distributions.hpp"
#include "motifauto/errors.hpp"
#include "motifauto/pattern.hpp"

namespace motifauto {

enum class CountMode { Overlap, Renewal };

inline std::string to_string(CountMode m) { return m == CountMode::Overlap ? "overlap" : "renewal"; }

inline CountMode parse_count_mode(std::string_view s) {
  if (s == "overlap" || s == "Overlap") return CountMode::Overlap;
  if (s == "renewal" || s == "Renewal") return CountMode::Renewal;
  throw InvalidArgumentError("unknown counting mode '" + std::string(s) + "'");
}

struct TextSample {
  std::string text;
  Rational weight = 1;
};

inline constexpr std::uint64_t kDefaultTextBudget = 1ull << 24;

/// Occurrence count of each keyword (in the set's order). Overlap counts every end
/// position; Renewal scans left to right and, at the earliest position where some
/// keyword ends after the last reset, credits every such keyword and resets there.
inline std::vector<unsigned> scan_text(std::string_view text, const KeywordSet& keywords, CountMode mode) {
  const auto& words = keywords.words();
  std::vector<unsigned> counts(words.size(), 0);
  std::size_t reset = 0;
  for (std::size_t end = 1; end <= text.size(); ++end) {
    bool hit = false;
    for (std::size_t w = 0; w < words.size(); ++w) {
      const auto len = words[w].size();
      if (len > end - (mode == CountMode::Renewal ? reset : 0)) continue;
      if (text.substr(end - len, len) == words[w]) {
        ++counts[w];
        hit = true;
      }
    }
    if (hit) reset = end;
  }
  return counts;
}

/// Backtracking matcher for pattern trees, correlations included.
class NaiveMatcher {
 public:
  NaiveMatcher(PatternExpr expr, std::vector<CorrelationRule> rules)
      : expr_(std::move(expr)), rules_(std::move(rules)) {}

  /// True when text[begin, end) is a word of the pattern.
  bool matches(std::string_view text, std::size_t begin, std::size_t end) const {
    bool found = false;
    run(expr_, text.substr(0, end), begin, Bindings{}, [&](std::size_t p, const Bindings&) {
      if (p == end) found = true;
    });
    return found;
  }

  /// True when some occurrence ends exactly at `end` and starts at or after `from`.
  bool ends_at(std::string_view text, std::size_t end, std::size_t from = 0) const {
    for (std::size_t b = from; b < end; ++b)
      if (matches(text, b, end)) return true;
    return false;
  }

  unsigned count(std::string_view text, CountMode mode) const {
    unsigned n = 0;
    std::size_t reset = 0;
    for (std::size_t end = 1; end <= text.size(); ++end) {
      if (ends_at(text, end, mode == CountMode::Renewal ? reset : 0)) {
        ++n;
        reset = end;
      }
    }
    return n;
  }

 private:
  using Bindings = std::array<char, 10>;
  using Cont = std::function<void(std::size_t, const Bindings&)>;

  const std::string* allowed(int id, char first) const {
    for (const auto& r : rules_) {
      if (r.id != id) continue;
      auto it = r.allowed.find(first);
      return it == r.allowed.end() ? nullptr : &it->second;
    }
    throw InvalidArgumentError("no correlation rule for id " + std::to_string(id));
  }

  void run_seq(const std::vector<PatternExpr>& items, std::size_t idx, std::string_view t, std::size_t pos,
               const Bindings& b, const Cont& k) const {
    if (idx == items.size()) {
      k(pos, b);
      return;
    }
    run(items[idx], t, pos, b, [&](std::size_t p, const Bindings& nb) { run_seq(items, idx + 1, t, p, nb, k); });
  }

  void run(const PatternExpr& e, std::string_view t, std::size_t pos, Bindings b, const Cont& k) const {
    if (e.is<Literal>()) {
      const auto& s = e.as<Literal>().text;
      if (pos + s.size() <= t.size() && t.substr(pos, s.size()) == s) k(pos + s.size(), b);
    } else if (e.is<CharClass>()) {
      if (pos < t.size() && e.as<CharClass>().chars.find(t[pos]) != std::string::npos) k(pos + 1, b);
    } else if (e.is<CorrelRef>()) {
      if (pos >= t.size()) return;
      const auto& r = e.as<CorrelRef>();
      if (!r.primed) {
        if (!allowed(r.id, t[pos])) return;
        b[static_cast<std::size_t>(r.id)] = t[pos];
        k(pos + 1, b);
      } else {
        const std::string* set = allowed(r.id, b[static_cast<std::size_t>(r.id)]);
        if (set && set->find(t[pos]) != std::string::npos) k(pos + 1, b);
      }
    } else if (e.is<GapExact>()) {
      if (pos + e.as<GapExact>().k <= t.size()) k(pos + e.as<GapExact>().k, b);
    } else if (e.is<GapAtLeast>()) {
      for (std::size_t p = pos + e.as<GapAtLeast>().k; p <= t.size(); ++p) k(p, b);
    } else if (e.is<Seq>()) {
      run_seq(e.as<Seq>().items, 0, t, pos, b, k);
    } else {
      for (const auto& br : e.as<Union>().branches) run(br, t, pos, b, k);
    }
  }

  PatternExpr expr_;
  std::vector<CorrelationRule> rules_;
};

namespace detail {

inline void check_budget(std::size_t symbols, unsigned n, std::uint64_t budget) {
  long double total = 1;
  for (unsigned i = 0; i < n; ++i) total *= static_cast<long double>(symbols);
  if (total > static_cast<long double>(budget))
    throw CapExceededError("cap-texts", std::to_string(symbols) + "^" + std::to_string(n) +
                                            " texts exceed the enumeration budget of " + std::to_string(budget));
}

inline void for_each_text_rec(const Alphabet& al, unsigned n, std::string& text, std::vector<Rational>& weight,
                              const std::function<void(const std::string&, const Rational&)>& fn) {
  if (text.size() == n) {
    fn(text, weight.back());
    return;
  }
  for (std::size_t a = 0; a < al.size(); ++a) {
    text.push_back(al.symbol(a));
    weight.push_back(weight.back() * al.prob(a));
    for_each_text_rec(al, n, text, weight, fn);
    weight.pop_back();
    text.pop_back();
  }
}

}  // namespace detail

/// Calls fn(text, probability) for every text of length n.
inline void for_each_text(const Alphabet& alphabet, unsigned n,
                          const std::function<void(const std::string&, const Rational&)>& fn,
                          std::uint64_t budget = kDefaultTextBudget) {
  detail::check_budget(alphabet.size(), n, budget);
  std::string text;
  std::vector<Rational> weight{Rational(1)};
  detail::for_each_text_rec(alphabet, n, text, weight, fn);
}

/// Joint law of per-keyword counts, by scanning every text.
inline JointPmf enumerate_count_pmf(const Alphabet& alphabet, const KeywordSet& keywords, unsigned n, CountMode mode,
                                    std::uint64_t budget = kDefaultTextBudget) {
  JointPmf out;
  out.n = n;
  out.mark_labels = keywords.words();
  for_each_text(
      alphabet, n,
      [&](const std::string& t, const Rational& w) { out.entries[scan_text(t, keywords, mode)] += w; }, budget);
  return out;
}

/// Joint law of class-visit counts along the automaton path of every text.
inline JointPmf enumerate_count_pmf(const Alphabet& alphabet, const Dfa& dfa, const std::vector<std::string>& classes,
                                    unsigned n, std::uint64_t budget = kDefaultTextBudget) {
  JointPmf out;
  out.n = n;
  out.mark_labels = classes;
  for_each_text(
      alphabet, n,
      [&](const std::string& t, const Rational& w) {
        CountVector m(classes.size(), 0);
        StateIndex s = dfa.initial;
        for (char c : t) {
          s = dfa.next(s, dfa.symbol_index(c));
          for (std::size_t j = 0; j < classes.size(); ++j)
            if (dfa.in_class(classes[j], s)) ++m[j];
        }
        out.entries[m] += w;
      },
      budget);
  return out;
}

/// Law of the occurrence count of a pattern, by naive matching on every text.
inline JointPmf enumerate_count_pmf(const Alphabet& alphabet, const PatternExpr& expr,
                                    const std::vector<CorrelationRule>& rules, unsigned n, CountMode mode,
                                    std::uint64_t budget = kDefaultTextBudget) {
  const NaiveMatcher matcher(expr, rules);
  JointPmf out;
  out.n = n;
  out.mark_labels = {std::string(kMatchClass)};
  for_each_text(
      alphabet, n, [&](const std::string& t, const Rational& w) { out.entries[{matcher.count(t, mode)}] += w; },
      budget);
  return out;
}

using StopPredicate = std::function<bool(std::string_view)>;

/// Prob[T = n] for n = 1..n_max, T being the length of the shortest prefix for which
/// `stops` holds. Walks the prefix tree and prunes completed branches; the budget
/// bounds the number of visited prefixes.
inline Pmf enumerate_sooner_pmf(const Alphabet& alphabet, const StopPredicate& stops, unsigned n_max,
                                std::uint64_t budget = kDefaultTextBudget) {
  Pmf out;
  for (unsigned t = 1; t <= n_max; ++t) {
    out.support.push_back(t);
    out.prob.push_back(0);
  }
  std::uint64_t visited = 0;
  std::string text;
  std::function<void(const Rational&)> walk = [&](const Rational& w) {
    for (std::size_t a = 0; a < alphabet.size(); ++a) {
      if (++visited > budget)
        throw CapExceededError("cap-texts", "prefix tree exceeds the enumeration budget of " + std::to_string(budget));
      text.push_back(alphabet.symbol(a));
      const Rational wa = w * alphabet.prob(a);
      if (stops(text))
        out.prob[text.size() - 1] += wa;
      else if (text.size() < n_max)
        walk(wa);
      text.pop_back();
    }
  };
  walk(Rational(1));
  Rational acc = 0;
  for (const auto& p : out.prob) acc += p;
  out.tail_mass = 1 - acc;
  return out;
}

/// Stop when the text ends with one of the words.
inline StopPredicate ends_with_any(std::vector<std::string> words) {
  return [words = std::move(words)](std::string_view t) {
    for (const auto& w : words)
      if (t.size() >= w.size() && t.substr(t.size() - w.size()) == w) return true;
    return false;
  };
}

/// Stop when an occurrence of the pattern ends at the last character.
inline StopPredicate ends_with_pattern(const PatternExpr& expr, const std::vector<CorrelationRule>& rules) {
  auto m = std::make_shared<NaiveMatcher>(expr, rules);
  return [m](std::string_view t) { return m->ends_at(t, t.size()); };
}

/// Random text drawn from `rng`; the weight is its exact probability.
inline TextSample sample_text(const Alphabet& alphabet, unsigned n, std::mt19937_64& rng) {
  std::vector<double> w;
  for (const auto& p : alphabet.probs()) w.push_back(p.get_d());
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  TextSample out;
  for (unsigned i = 0; i < n; ++i) {
    const std::size_t a = pick(rng);
    out.text.push_back(alphabet.symbol(a));
    out.weight *= alphabet.prob(a);
  }
  return out;
}

/// Deterministic given the seed.
inline TextSample sample_text(const Alphabet& alphabet, unsigned n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_text(alphabet, n, rng);
}

}  // namespace motifauto
