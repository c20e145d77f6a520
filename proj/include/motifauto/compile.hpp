#pragma once

// Pattern trees to automata. Finite branches share one Aho-Corasick automaton;
// every branch with an unbounded gap gets a chained modular automaton, and the
// pieces are combined by an accessible product.

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "motifauto/alphabet.hpp"
#include "motifauto/dfa.hpp"
#include "motifauto/pattern.hpp"

namespace motifauto {

enum class Variant {
  Detect,   // overlapping occurrences
  Sooner,   // first occurrence: detecting states absorb
  Renewal,  // non-overlapping occurrences: scanning restarts after a match
};

struct CompiledPattern {
  Dfa dfa;
  std::size_t raw_states = 0;         // full Cartesian product size
  std::size_t accessible_states = 0;  // states reachable by a non-empty word
  std::size_t pruned_states = 0;      // states reachable from the initial state
  std::vector<std::string> keyword_classes;  // one class per keyword when the pattern is a finite literal set
};

namespace detail {

inline void collect_branches(const PatternExpr& e, std::vector<PatternExpr>& out) {
  if (e.is<Union>()) {
    for (const auto& b : e.as<Union>().branches) collect_branches(b, out);
  } else {
    out.push_back(e);
  }
}

inline bool literal_only(const PatternExpr& e) {
  if (e.is<Literal>()) return true;
  if (e.is<Union>()) {
    for (const auto& b : e.as<Union>().branches)
      if (!literal_only(b)) return false;
    return true;
  }
  return false;
}

/// Detection automata for the expansion of `expr`: first the shared keyword
/// automaton (if any finite branch exists), then one per modular branch.
inline std::vector<Dfa> detection_factors(const PatternExpr& expr, const Alphabet& alphabet,
                                          const std::vector<CorrelationRule>& rules, std::size_t cap) {
  std::vector<PatternExpr> branches;
  for (const auto& e : expand_correlations(expr, alphabet, rules)) collect_branches(e, branches);
  std::vector<std::string> words;
  std::vector<Dfa> modular;
  for (const auto& b : branches) {
    if (has_unbounded_gap(b)) {
      const auto mp = split_modules(b, alphabet, cap);
      modular.push_back(concat_modular(mp.modules, mp.gaps));
    } else {
      const KeywordSet ks = expand_to_keywords(b, alphabet, cap);
      for (const auto& w : ks.words()) {
        words.push_back(w);
        if (words.size() > cap) throw ExpansionTooLargeError("more than " + std::to_string(cap) + " keywords");
      }
    }
  }
  std::vector<Dfa> out;
  if (!words.empty()) out.push_back(aho_corasick(KeywordSet(words, alphabet)));
  for (auto& d : modular) out.push_back(std::move(d));
  return out;
}

inline std::size_t count_true(const std::vector<bool>& v) {
  return static_cast<std::size_t>(std::count(v.begin(), v.end(), true));
}

}  // namespace detail

/// Compiles one pattern. The class "*" always marks detecting states.
inline CompiledPattern compile_pattern(const PatternExpr& expr, const Alphabet& alphabet,
                                       const std::vector<CorrelationRule>& rules, Variant variant,
                                       std::size_t expansion_cap = kDefaultExpansionCap,
                                       std::size_t product_cap = kDefaultProductCap) {
  const std::string match(kMatchClass);
  auto factors = detail::detection_factors(expr, alphabet, rules, expansion_cap);
  if (variant == Variant::Sooner)
    for (auto& f : factors) f = make_absorbing(f, match);
  CompiledPattern out;
  out.raw_states = 1;
  for (const auto& f : factors) out.raw_states *= f.size();
  if (factors.size() == 1) {
    out.dfa = factors.front();
  } else {
    out.dfa = product_accessible(factors, product_cap);
  }
  if (variant == Variant::Renewal) out.dfa = prune_accessible(make_renewal(out.dfa, match));
  out.pruned_states = prune_accessible(out.dfa).size();
  out.accessible_states = detail::count_true(reachable_by_nonempty(out.dfa));
  if (detail::literal_only(expr)) out.keyword_classes = expand_to_keywords(expr, alphabet).words();
  return out;
}

/// Convenience overload parsing the pattern first.
inline CompiledPattern compile_pattern(std::string_view text, const Alphabet& alphabet,
                                       const std::vector<CorrelationRule>& rules, Variant variant) {
  return compile_pattern(parse_pattern(text, alphabet, rules), alphabet, rules, variant);
}

/// Identity rules for every id, replaced by the given overrides.
inline std::vector<CorrelationRule> default_rules(const Alphabet& alphabet,
                                                  const std::vector<CorrelationRule>& overrides = {}) {
  std::vector<CorrelationRule> out;
  for (int id = 1; id <= 9; ++id) {
    const CorrelationRule* r = detail::find_rule(overrides, id);
    out.push_back(r ? *r : rules::identity(id, alphabet));
  }
  return out;
}

}  // namespace motifauto
