#pragma once

// Batch jobs: a JSON configuration in, a JSON report out.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "motifauto/compile.hpp"
#include "motifauto/distributions.hpp"
#include "motifauto/embedding.hpp"
#include "motifauto/errors.hpp"
#include "motifauto/genfunc.hpp"
#include "motifauto/oracle.hpp"

namespace motifauto {

using Json = nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitBadConfig = 2;
inline constexpr int kExitCapExceeded = 3;

/// Invalid configuration; `field()` is the offending path, e.g. "alphabet.probs[1]".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what) : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

inline const std::vector<std::string> kTasks = {"compile", "sooner", "counts", "first",
                                                "gf",      "asymptotics", "clt", "oracle-check"};

struct JobConfig {
  std::string task;
  std::string symbols;
  std::vector<Rational> probs;
  std::vector<std::string> patterns;
  std::vector<std::pair<int, std::string>> rules;  // id -> rule name
  CountMode mode = CountMode::Overlap;
  std::vector<std::string> marks;  // empty: defaults
  std::optional<unsigned> n;
  std::optional<unsigned> n_max;
  std::size_t cap_states = kDefaultGfStateCap;
  std::uint64_t cap_texts = kDefaultTextBudget;
  std::uint64_t seed = 1;
  std::string dot_out;
  std::string format = "structured";
  bool timing = false;
};

namespace detail {

inline unsigned long long json_uint(const Json& v, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<unsigned long long>();
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(field, "expected a non-negative integer");
  return static_cast<unsigned long long>(v.get<long long>());
}

inline std::string json_string(const Json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected a string");
  return v.get<std::string>();
}

}  // namespace detail

/// Validates a configuration document. Unknown fields are rejected.
inline JobConfig parse_config(const Json& doc) {
  using detail::json_string;
  using detail::json_uint;
  if (!doc.is_object()) throw ConfigError("(root)", "expected an object");
  JobConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (key == "task") {
      c.task = json_string(value, key);
      if (std::find(kTasks.begin(), kTasks.end(), c.task) == kTasks.end())
        throw ConfigError(key, "unknown task '" + c.task + "'");
    } else if (key == "alphabet") {
      if (!value.is_object()) throw ConfigError(key, "expected an object with symbols and probs");
      for (const auto& [k, v] : value.items()) {
        const std::string f = "alphabet." + k;
        if (k == "symbols") {
          c.symbols = json_string(v, f);
        } else if (k == "probs") {
          if (!v.is_array()) throw ConfigError(f, "expected an array of \"a/b\" strings");
          for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string fi = f + "[" + std::to_string(i) + "]";
            try {
              c.probs.push_back(parse_rational(json_string(v[i], fi), false));
            } catch (const ConfigError&) {
              throw;
            } catch (const Error& e) {
              throw ConfigError(fi, e.what());
            }
          }
        } else {
          throw ConfigError(f, "unknown field");
        }
      }
    } else if (key == "pattern") {
      c.patterns = {json_string(value, key)};
    } else if (key == "patterns") {
      if (!value.is_array() || value.empty()) throw ConfigError(key, "expected a non-empty array of strings");
      for (std::size_t i = 0; i < value.size(); ++i)
        c.patterns.push_back(json_string(value[i], key + "[" + std::to_string(i) + "]"));
    } else if (key == "rules") {
      if (!value.is_object()) throw ConfigError(key, "expected an object mapping ids to rule names");
      for (const auto& [k, v] : value.items()) {
        const std::string f = "rules." + k;
        if (k.size() != 1 || k[0] < '1' || k[0] > '9') throw ConfigError(f, "correlation ids are 1..9");
        c.rules.emplace_back(k[0] - '0', json_string(v, f));
      }
    } else if (key == "mode") {
      try {
        c.mode = parse_count_mode(json_string(value, key));
      } catch (const InvalidArgumentError& e) {
        throw ConfigError(key, e.what());
      }
    } else if (key == "marks") {
      if (!value.is_array()) throw ConfigError(key, "expected an array of class labels");
      for (std::size_t i = 0; i < value.size(); ++i)
        c.marks.push_back(json_string(value[i], key + "[" + std::to_string(i) + "]"));
    } else if (key == "n") {
      c.n = static_cast<unsigned>(json_uint(value, key));
    } else if (key == "n_max") {
      c.n_max = static_cast<unsigned>(json_uint(value, key));
    } else if (key == "cap_states") {
      c.cap_states = json_uint(value, key);
    } else if (key == "cap_texts") {
      c.cap_texts = json_uint(value, key);
    } else if (key == "seed") {
      c.seed = json_uint(value, key);
    } else if (key == "dot_out") {
      c.dot_out = json_string(value, key);
    } else if (key == "format") {
      c.format = json_string(value, key);
      if (c.format != "structured" && c.format != "plain") throw ConfigError(key, "expected structured or plain");
    } else if (key == "timing") {
      if (!value.is_boolean()) throw ConfigError(key, "expected true or false");
      c.timing = value.get<bool>();
    } else {
      throw ConfigError(key, "unknown field");
    }
  }
  if (c.task.empty()) throw ConfigError("task", "missing");
  if (c.symbols.empty()) throw ConfigError("alphabet.symbols", "missing");
  if (c.patterns.empty()) throw ConfigError("pattern", "missing");
  if (c.probs.empty()) {
    for (std::size_t i = 0; i < c.symbols.size(); ++i) c.probs.emplace_back(1, c.symbols.size());
    for (auto& p : c.probs) p.canonicalize();
  }
  if (c.probs.size() != c.symbols.size())
    throw ConfigError("alphabet.probs", "need one probability per symbol");
  const bool needs_n = c.task == "counts" || c.task == "oracle-check";
  if (needs_n && !c.n) throw ConfigError("n", "required by task " + c.task);
  if (c.n && *c.n < 1) throw ConfigError("n", "must be at least 1");
  if (c.task == "sooner" && !c.n_max) throw ConfigError("n_max", "required by task sooner");
  if (c.n_max && *c.n_max < 1) throw ConfigError("n_max", "must be at least 1");
  return c;
}

// ---------------------------------------------------------------------------
// Report rendering helpers.

inline Json exact_json(const Rational& r) { return {{"exact", to_string(r)}, {"decimal", to_decimal(r)}}; }

inline Json poly_json(const Polynomial& p, const std::vector<std::string>& names) {
  Json terms = Json::array();
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it)
    terms.push_back({{"exp", it->first}, {"coef", to_string(it->second)}});
  return {{"vars", names}, {"terms", terms}, {"text", p.to_string(names)}};
}

inline Json rf_json(const RationalFunction& rf) {
  return {{"num", poly_json(rf.num(), rf.names())}, {"den", poly_json(rf.den(), rf.names())}};
}

inline Json pmf_json(const Pmf& pmf, const std::string& key) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < pmf.support.size(); ++i) {
    Json row = exact_json(pmf.prob[i]);
    row[key] = pmf.support[i];
    rows.push_back(row);
  }
  return {{"pmf", rows}, {"tail_mass", exact_json(pmf.tail_mass)}};
}

inline Json joint_json(const JointPmf& j) {
  Json rows = Json::array();
  for (const auto& [m, p] : j.entries) {
    Json row = exact_json(p);
    row["counts"] = m;
    rows.push_back(row);
  }
  return rows;
}

inline Json vector_json(const RationalVector& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(exact_json(x));
  return out;
}

inline Json matrix_json(const RationalMatrix& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(exact_json(m(i, j)));
    out.push_back(row);
  }
  return out;
}

inline Json pole_json(const PoleTerm& t) {
  Json out{{"location", t.location.to_string()}, {"kind", t.location.exact ? "exact" : "numeric"},
           {"multiplicity", t.location.multiplicity}, {"order", t.order}};
  if (t.location.exact) {
    out["coefficient"] = exact_json(t.coefficient);
  } else {
    out["coefficient"] = {{"re", t.coefficient_num.real()}, {"im", t.coefficient_num.imag()}};
  }
  return out;
}

/// "a.b[2].c = value" lines, one per leaf.
inline void flatten(const Json& j, const std::string& prefix, std::ostringstream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out << prefix << " = " << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

inline std::string render_report(const Json& report, const std::string& format) {
  if (format == "plain") {
    std::ostringstream out;
    flatten(report, "", out);
    return out.str();
  }
  return report.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Execution.

struct Report {
  Json doc;
  int exit_code = kExitOk;
};

namespace detail {

struct JobAutomaton {
  CompiledPattern compiled;
  std::vector<std::string> default_marks;
};

inline JobAutomaton build_automaton(const std::vector<PatternExpr>& exprs, const Alphabet& al,
                                    const std::vector<CorrelationRule>& rules, Variant v) {
  JobAutomaton out;
  if (exprs.size() == 1) {
    out.compiled = compile_pattern(exprs.front(), al, rules, v);
    out.default_marks = out.compiled.keyword_classes.empty() ? std::vector<std::string>{std::string(kMatchClass)}
                                                             : out.compiled.keyword_classes;
    return out;
  }
  std::vector<Dfa> parts;
  out.compiled.raw_states = 1;
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    auto cp = compile_pattern(exprs[i], al, rules, v);
    out.compiled.raw_states *= cp.raw_states;
    parts.push_back(std::move(cp.dfa));
    out.default_marks.push_back(std::to_string(i + 1) + ":" + std::string(kMatchClass));
  }
  out.compiled.dfa = product_accessible(parts);
  out.compiled.pruned_states = out.compiled.dfa.size();
  out.compiled.accessible_states = count_true(reachable_by_nonempty(out.compiled.dfa));
  return out;
}

inline Json automaton_json(const CompiledPattern& cp, std::size_t chain_states) {
  return {{"name", cp.dfa.name},
          {"raw_states", cp.raw_states},
          {"accessible_states", cp.accessible_states},
          {"pruned_states", cp.pruned_states},
          {"chain_states", chain_states}};
}

inline Variant counting_variant(CountMode m) { return m == CountMode::Overlap ? Variant::Detect : Variant::Renewal; }

}  // namespace detail

/// Runs one job. Errors become a report with a non-zero exit code.
inline Report execute(const JobConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  Json& doc = rep.doc;
  doc["task"] = c.task;
  {
    Json probs = Json::array();
    for (const auto& p : c.probs) probs.push_back(to_string(p));
    doc["config"] = {{"alphabet", {{"symbols", c.symbols}, {"probs", probs}}},
                     {"patterns", c.patterns},
                     {"mode", to_string(c.mode)}};
    if (c.n) doc["config"]["n"] = *c.n;
    if (c.n_max) doc["config"]["n_max"] = *c.n_max;
  }
  try {
    const Alphabet al(c.symbols, c.probs);
    std::vector<CorrelationRule> overrides;
    for (const auto& [id, name] : c.rules) overrides.push_back(rules::by_name(name, id, al));
    const auto rules = default_rules(al, overrides);
    std::vector<PatternExpr> exprs;
    for (std::size_t i = 0; i < c.patterns.size(); ++i) {
      try {
        exprs.push_back(parse_pattern(c.patterns[i], al, rules));
      } catch (const PatternSyntaxError& e) {
        throw ConfigError("patterns[" + std::to_string(i) + "]",
                          std::string(e.what()) + " at offset " + std::to_string(e.position()));
      }
    }
    Json& res = doc["result"];
    auto automaton = [&](Variant v) { return detail::build_automaton(exprs, al, rules, v); };
    auto marks_for = [&](const detail::JobAutomaton& ja) { return c.marks.empty() ? ja.default_marks : c.marks; };
    auto write_dot = [&](const Dfa& d) {
      if (c.dot_out.empty()) return;
      std::ofstream f(c.dot_out);
      if (!f) throw ConfigError("dot_out", "cannot write '" + c.dot_out + "'");
      f << to_dot(d);
    };

    if (c.task == "compile") {
      const Variant v = c.mode == CountMode::Overlap ? Variant::Detect : Variant::Renewal;
      Json variants = Json::object();
      for (const auto& [name, var] : std::vector<std::pair<std::string, Variant>>{
               {to_string(c.mode), v}, {"sooner", Variant::Sooner}}) {
        const auto ja = automaton(var);
        const auto emb = embed(ja.compiled.dfa, al);
        Json a = detail::automaton_json(ja.compiled, emb.size());
        a["states"] = ja.compiled.dfa.labels;
        Json classes = Json::object();
        for (const auto& [label, members] : ja.compiled.dfa.classes) {
          Json ls = Json::array();
          for (auto s : members) ls.push_back(ja.compiled.dfa.labels[s]);
          classes[label] = ls;
        }
        a["classes"] = classes;
        a["default_marks"] = ja.default_marks;
        if (emb.size() <= c.cap_states) {
          Json mu = Json::array();
          for (const auto& x : emb.mu) mu.push_back(to_string(x));
          Json p = Json::array();
          for (std::size_t i = 0; i < emb.size(); ++i) {
            Json row = Json::array();
            for (std::size_t j = 0; j < emb.size(); ++j) row.push_back(to_string(emb.P(i, j)));
            p.push_back(row);
          }
          a["chain"] = {{"states", emb.state_labels}, {"mu", mu}, {"P", p}};
        }
        variants[name] = a;
        if (var == v) write_dot(ja.compiled.dfa);
      }
      res = variants;
      doc["diagnostics"] = {{"raw_states", variants["sooner"]["raw_states"]},
                            {"accessible_states", variants["sooner"]["accessible_states"]},
                            {"pruned_states", variants["sooner"]["pruned_states"]}};
    } else if (c.task == "sooner") {
      const auto ja = automaton(Variant::Sooner);
      write_dot(ja.compiled.dfa);
      const auto emb = embed(ja.compiled.dfa, al);
      res = pmf_json(sooner_time_pmf(emb, {std::string(kMatchClass)}, *c.n_max), "n");
      doc["diagnostics"] = detail::automaton_json(ja.compiled, emb.size());
    } else if (c.task == "first") {
      const auto ja = automaton(Variant::Sooner);
      write_dot(ja.compiled.dfa);
      const auto emb = embed(ja.compiled.dfa, al);
      Json out = Json::object();
      for (const auto& [label, p] : first_pattern_split(emb, marks_for(ja))) out[label] = exact_json(p);
      res = {{"partition", marks_for(ja)}, {"outcomes", out}};
      doc["diagnostics"] = detail::automaton_json(ja.compiled, emb.size());
    } else if (c.task == "counts") {
      const auto ja = automaton(detail::counting_variant(c.mode));
      write_dot(ja.compiled.dfa);
      const auto emb = embed(ja.compiled.dfa, al);
      const auto marks = marks_for(ja);
      const auto joint = count_joint_pmf(emb, marks, *c.n);
      const auto mom = exact_moments(joint);
      Json marginals = Json::object();
      for (std::size_t i = 0; i < marks.size(); ++i) marginals[marks[i]] = pmf_json(joint.marginal(i), "count")["pmf"];
      res = {{"marks", marks},           {"n", *c.n},
             {"joint", joint_json(joint)}, {"marginals", marginals},
             {"mean", vector_json(mom.mean)}, {"cov", matrix_json(mom.cov)}};
      doc["diagnostics"] = detail::automaton_json(ja.compiled, emb.size());
    } else if (c.task == "gf") {
      const auto ja = automaton(detail::counting_variant(c.mode));
      write_dot(ja.compiled.dfa);
      const auto emb = embed(ja.compiled.dfa, al);
      const auto so = automaton(Variant::Sooner);
      const auto semb = embed(so.compiled.dfa, al);
      res = {{"marks", marks_for(ja)},
             {"resolvent", rf_json(resolvent_gf(emb, marks_for(ja), c.cap_states))},
             {"sooner", rf_json(sooner_gf(semb, {std::string(kMatchClass)}, c.cap_states))}};
      doc["diagnostics"] = detail::automaton_json(ja.compiled, emb.size());
    } else if (c.task == "asymptotics") {
      const unsigned n_max = c.n_max.value_or(200);
      const auto ja = automaton(Variant::Sooner);
      write_dot(ja.compiled.dfa);
      const auto emb = embed(ja.compiled.dfa, al);
      const auto gf = sooner_gf(emb, {std::string(kMatchClass)}, c.cap_states);
      const auto pf = partial_fractions(gf);
      Json poles = Json::array();
      for (const auto& t : pf.terms) poles.push_back(pole_json(t));
      Json poly = Json::array();
      for (const auto& x : pf.polynomial_part.coeffs()) poly.push_back(to_string(x));
      std::vector<unsigned> at;
      for (unsigned n : {n_max / 4, n_max / 2, n_max})
        if (n >= 1 && (at.empty() || at.back() != n)) at.push_back(n);
      const auto asym = coeff_asymptotics(gf, at);
      Json a = {{"unique_dominant_pole", asym.unique}};
      if (asym.unique) {
        const auto& rho = asym.dominant.front();
        a["pole"] = rho.to_string();
        a["order"] = asym.order;
        a["leading"] = "c * n^" + std::to_string(asym.order - 1) + " * pole^(-n)";
        if (asym.exact) {
          a["constant"] = exact_json(asym.constant);
          const auto coeffs = series_rational(gf, n_max);
          if (n_max / 4 + asym.order <= n_max)
            a["fitted_constant"] = exact_json(fit_leading_constant(coeffs, rho.value, asym.order, n_max / 4, n_max));
        } else {
          a["constant"] = {{"re", asym.constant_num.real()}, {"im", asym.constant_num.imag()}};
        }
        Json errs = Json::array();
        for (const auto& [n, e] : asym.relative_error) errs.push_back({{"n", n}, {"relative_error", e}});
        a["relative_error"] = errs;
      } else {
        Json tied = Json::array();
        for (const auto& p : asym.dominant) tied.push_back(p.to_string());
        a["tied_poles"] = tied;
      }
      res = {{"gf", rf_json(gf)},
             {"partial_fractions", {{"polynomial_part", poly}, {"poles", poles}, {"exact", pf.exact}}},
             {"asymptotics", a}};
      doc["diagnostics"] = detail::automaton_json(ja.compiled, emb.size());
    } else if (c.task == "clt") {
      const auto ja = automaton(detail::counting_variant(c.mode));
      write_dot(ja.compiled.dfa);
      const auto emb = embed(ja.compiled.dfa, al);
      const auto p = clt_params(emb, marks_for(ja), c.cap_states);
      res = {{"marks", marks_for(ja)},
             {"mean_rate", vector_json(p.mean_rate)},
             {"cov_rate", matrix_json(p.cov_rate)},
             {"det_sigma", exact_json(p.det_sigma)},
             {"positive_semidefinite", p.positive_semidefinite}};
      doc["diagnostics"] = detail::automaton_json(ja.compiled, emb.size());
    } else if (c.task == "oracle-check") {
      const unsigned n = *c.n;
      // Engine: per-pattern occurrence counts and the sooner-time law.
      const auto ja = automaton(detail::counting_variant(c.mode));
      write_dot(ja.compiled.dfa);
      const auto emb = embed(ja.compiled.dfa, al);
      std::vector<std::string> marks;
      if (exprs.size() == 1)
        marks = {std::string(kMatchClass)};
      else
        marks = ja.default_marks;
      const auto engine = count_joint_pmf(emb, marks, n);
      const auto so = automaton(Variant::Sooner);
      const auto engine_sooner = sooner_time_pmf(embed(so.compiled.dfa, al), {std::string(kMatchClass)}, n);

      // Oracle: naive matching on every text.
      std::vector<NaiveMatcher> matchers;
      for (const auto& e : exprs) matchers.emplace_back(e, rules);
      JointPmf brute;
      brute.n = n;
      brute.mark_labels = marks;
      for_each_text(
          al, n,
          [&](const std::string& t, const Rational& w) {
            CountVector m;
            for (const auto& mt : matchers) m.push_back(mt.count(t, c.mode));
            brute.entries[m] += w;
          },
          c.cap_texts);
      const auto brute_sooner = enumerate_sooner_pmf(
          al,
          [&](std::string_view t) {
            for (const auto& mt : matchers)
              if (mt.ends_at(t, t.size())) return true;
            return false;
          },
          n, c.cap_texts);
      const bool counts_ok = engine == brute;
      const bool sooner_ok = engine_sooner == brute_sooner;

      // Monte Carlo sanity check of the mean total count at the same length.
      const unsigned samples = 1000;
      std::mt19937_64 rng(c.seed);
      double sum = 0, sum2 = 0;
      for (unsigned s = 0; s < samples; ++s) {
        const auto t = sample_text(al, n, rng);
        double k = 0;
        for (const auto& mt : matchers) k += mt.count(t.text, c.mode);
        sum += k;
        sum2 += k * k;
      }
      Rational exact_mean = 0;
      for (const auto& [m, p] : engine.entries) {
        unsigned k = 0;
        for (auto x : m) k += x;
        exact_mean += p * k;
      }
      const double mean = sum / samples;
      const double se = std::sqrt(std::max(0.0, sum2 / samples - mean * mean) / samples);

      res = {{"match", counts_ok && sooner_ok ? "exact" : "mismatch"},
             {"counts", {{"match", counts_ok ? "exact" : "mismatch"},
                         {"engine", joint_json(engine)},
                         {"oracle", joint_json(brute)}}},
             {"sooner", {{"match", sooner_ok ? "exact" : "mismatch"},
                         {"engine", pmf_json(engine_sooner, "n")},
                         {"oracle", pmf_json(brute_sooner, "n")}}},
             {"monte_carlo", {{"seed", c.seed},
                              {"samples", samples},
                              {"exact_mean", exact_json(exact_mean)},
                              {"empirical_mean", mean},
                              {"standard_error", se}}}};
      doc["diagnostics"] = detail::automaton_json(ja.compiled, emb.size());
    }
  } catch (const CapExceededError& e) {
    rep.exit_code = kExitCapExceeded;
    doc.erase("result");
    doc["error"] = {{"kind", "cap-exceeded"}, {"cap", e.cap()}, {"message", e.what()}};
  } catch (const ConfigError& e) {
    rep.exit_code = kExitBadConfig;
    doc.erase("result");
    doc["error"] = {{"kind", "bad-config"}, {"field", e.field()}, {"message", e.what()}};
  } catch (const Error& e) {
    rep.exit_code = kExitBadConfig;
    doc.erase("result");
    doc["error"] = {{"kind", "bad-config"}, {"message", e.what()}};
  }
  if (c.timing) {
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    doc["diagnostics"]["elapsed_ms"] = ms;
  }
  return rep;
}

/// Parses and runs a configuration document.
inline Report execute(const Json& doc) {
  try {
    return execute(parse_config(doc));
  } catch (const ConfigError& e) {
    Report rep;
    rep.exit_code = kExitBadConfig;
    rep.doc = {{"error", {{"kind", "bad-config"}, {"field", e.field()}, {"message", e.what()}}}};
    return rep;
  }
}

}  // namespace motifauto
