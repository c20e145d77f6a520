#pragma once

// Deterministic finite automata over a fixed ordered alphabet: Aho-Corasick
// construction, synchronized products, modular chains and the absorbing /
// renewal rewirings used for sooner-time and non-overlapping counts.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "motifauto/errors.hpp"
#include "motifauto/pattern.hpp"

namespace motifauto {

using StateIndex = std::size_t;

/// Label of the class holding every detecting state.
inline constexpr std::string_view kMatchClass = "*";
/// Rendering of the empty word in state labels.
inline constexpr std::string_view kEmptyWord = "\xCE\xB5";  // U+03B5

struct Dfa {
  std::string symbols;              // alphabet, in order
  std::vector<std::string> labels;  // one per state, unique
  StateIndex initial = 0;
  std::vector<StateIndex> delta;  // row-major, size() x symbols.size()
  std::map<std::string, std::vector<StateIndex>> classes;  // sorted index sets
  std::string name;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t arity() const noexcept { return symbols.size(); }

  StateIndex next(StateIndex s, std::size_t symbol) const { return delta[s * symbols.size() + symbol]; }
  StateIndex& next(StateIndex s, std::size_t symbol) { return delta[s * symbols.size() + symbol]; }

  std::size_t symbol_index(char c) const {
    auto pos = symbols.find(c);
    if (pos == std::string::npos) throw UnknownCharacterError(c);
    return pos;
  }

  const std::vector<StateIndex>& terminal_class(const std::string& label) const {
    auto it = classes.find(label);
    if (it == classes.end()) throw UnknownClassError(label);
    return it->second;
  }

  bool in_class(const std::string& label, StateIndex s) const {
    const auto& c = terminal_class(label);
    return std::binary_search(c.begin(), c.end(), s);
  }

  StateIndex state(std::string_view label) const {
    for (StateIndex i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return i;
    throw InvalidArgumentError("no state labelled '" + std::string(label) + "'");
  }

  /// Throws if the table is not total or classes reference missing states.
  void validate() const {
    if (labels.empty()) throw InvalidArgumentError("automaton has no states");
    if (initial >= labels.size()) throw InvalidArgumentError("initial state out of range");
    if (delta.size() != labels.size() * symbols.size())
      throw InvalidArgumentError("transition table is not total");
    for (StateIndex t : delta)
      if (t >= labels.size()) throw InvalidArgumentError("transition target out of range");
    std::set<std::string> unique(labels.begin(), labels.end());
    if (unique.size() != labels.size()) throw InvalidArgumentError("state labels are not unique");
    for (const auto& [label, members] : classes)
      for (StateIndex s : members)
        if (s >= labels.size()) throw InvalidArgumentError("class '" + label + "' references a missing state");
  }
};

/// Folds the transition function over `x`.
inline StateIndex delta_star(const Dfa& dfa, StateIndex from, std::string_view x) {
  StateIndex s = from;
  for (char c : x) s = dfa.next(s, dfa.symbol_index(c));
  return s;
}

namespace detail {

inline std::string word_label(const std::string& w) { return w.empty() ? std::string(kEmptyWord) : w; }

inline void sort_classes(Dfa& dfa) {
  for (auto& [label, members] : dfa.classes) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
  }
}

}  // namespace detail

/// Aho-Corasick automaton: states are ε and every prefix of a keyword, ordered by
/// length then alphabet order; delta(u, α) is the longest state that is a suffix of uα.
///
/// Class `w` holds every state having keyword w as a suffix, so visits to it count
/// the end positions of w. Class "*" is the union over all keywords.
inline Dfa aho_corasick(const KeywordSet& words) {
  const std::string& symbols = words.symbols();
  const std::size_t k = symbols.size();
  auto rank = [&](char c) { return symbols.find(c); };

  std::vector<std::string> prefixes{""};
  for (const auto& w : words.words())
    for (std::size_t len = 1; len <= w.size(); ++len) prefixes.push_back(w.substr(0, len));
  std::sort(prefixes.begin(), prefixes.end(), [&](const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return rank(a[i]) < rank(b[i]);
    return false;
  });
  prefixes.erase(std::unique(prefixes.begin(), prefixes.end()), prefixes.end());

  std::unordered_map<std::string, StateIndex> index;
  for (StateIndex i = 0; i < prefixes.size(); ++i) index.emplace(prefixes[i], i);

  Dfa dfa;
  dfa.symbols = symbols;
  dfa.initial = 0;
  dfa.delta.assign(prefixes.size() * k, 0);
  std::vector<StateIndex> fail(prefixes.size(), 0);
  for (StateIndex u = 0; u < prefixes.size(); ++u) {
    const std::string& word = prefixes[u];
    if (word.size() >= 2) {
      StateIndex parent = index.at(word.substr(0, word.size() - 1));
      fail[u] = dfa.next(fail[parent], rank(word.back()));
    }
    for (std::size_t a = 0; a < k; ++a) {
      auto it = index.find(word + symbols[a]);
      if (it != index.end())
        dfa.next(u, a) = it->second;
      else
        dfa.next(u, a) = u == 0 ? 0 : dfa.next(fail[u], a);
    }
  }
  for (const auto& p : prefixes) dfa.labels.push_back(detail::word_label(p));

  auto& all = dfa.classes[std::string(kMatchClass)];
  for (const auto& w : words.words()) {
    auto& members = dfa.classes[w];
    for (StateIndex u = 0; u < prefixes.size(); ++u) {
      const auto& p = prefixes[u];
      if (p.size() >= w.size() && p.compare(p.size() - w.size(), w.size(), w) == 0) {
        members.push_back(u);
        all.push_back(u);
      }
    }
  }
  detail::sort_classes(dfa);
  std::string name = "AC({";
  for (std::size_t i = 0; i < words.size(); ++i) name += (i ? "," : "") + words.words()[i];
  dfa.name = name + "})";
  return dfa;
}

/// Keeps the states reachable from the initial state, renumbered in breadth-first
/// order (symbols visited in alphabet order).
inline Dfa prune_accessible(const Dfa& dfa) {
  std::vector<StateIndex> order{dfa.initial};
  std::vector<StateIndex> renumber(dfa.size(), dfa.size());
  renumber[dfa.initial] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (std::size_t a = 0; a < dfa.arity(); ++a) {
      StateIndex t = dfa.next(order[head], a);
      if (renumber[t] == dfa.size()) {
        renumber[t] = order.size();
        order.push_back(t);
      }
    }
  }
  Dfa out;
  out.symbols = dfa.symbols;
  out.name = dfa.name;
  out.initial = 0;
  out.delta.resize(order.size() * dfa.arity());
  for (StateIndex i = 0; i < order.size(); ++i) {
    out.labels.push_back(dfa.labels[order[i]]);
    for (std::size_t a = 0; a < dfa.arity(); ++a) out.next(i, a) = renumber[dfa.next(order[i], a)];
  }
  for (const auto& [label, members] : dfa.classes) {
    auto& m = out.classes[label];
    for (StateIndex s : members)
      if (renumber[s] != dfa.size()) m.push_back(renumber[s]);
  }
  detail::sort_classes(out);
  return out;
}

namespace detail {

inline void check_same_alphabet(const std::vector<Dfa>& dfas) {
  if (dfas.empty()) throw InvalidArgumentError("product of an empty list of automata");
  for (const auto& d : dfas)
    if (d.symbols != dfas.front().symbols)
      throw AlphabetMismatchError("automata in a product must share the alphabet");
}

inline std::string tuple_label(const std::vector<Dfa>& dfas, const std::vector<StateIndex>& coords) {
  std::string label = "(";
  for (std::size_t i = 0; i < coords.size(); ++i) label += (i ? "," : "") + dfas[i].labels[coords[i]];
  return label + ")";
}

// Class "i:c" for each factor class; "*" holds tuples with some coordinate in its factor's "*".
inline void lift_classes(const std::vector<Dfa>& dfas, const std::vector<std::vector<StateIndex>>& tuples,
                         Dfa& out) {
  const std::string match(kMatchClass);
  for (std::size_t i = 0; i < dfas.size(); ++i)
    for (const auto& [label, members] : dfas[i].classes) out.classes[std::to_string(i + 1) + ":" + label];
  out.classes[match];
  for (StateIndex s = 0; s < tuples.size(); ++s) {
    bool any = false;
    for (std::size_t i = 0; i < dfas.size(); ++i) {
      for (const auto& [label, members] : dfas[i].classes) {
        if (std::binary_search(members.begin(), members.end(), tuples[s][i])) {
          out.classes[std::to_string(i + 1) + ":" + label].push_back(s);
          if (label == match) any = true;
        }
      }
    }
    if (any) out.classes[match].push_back(s);
  }
  sort_classes(out);
}

inline std::string product_name(const std::vector<Dfa>& dfas) {
  std::string name;
  for (std::size_t i = 0; i < dfas.size(); ++i) name += (i ? " x " : "") + dfas[i].name;
  return name;
}

}  // namespace detail

inline constexpr std::size_t kDefaultProductCap = 1u << 20;

/// Full synchronized automaton over the Cartesian product of the state sets,
/// enumerated with the first factor most significant.
inline Dfa product(const std::vector<Dfa>& dfas, std::size_t cap = kDefaultProductCap) {
  detail::check_same_alphabet(dfas);
  std::size_t total = 1;
  for (const auto& d : dfas) {
    if (total > cap / std::max<std::size_t>(d.size(), 1))
      throw CapExceededError("product-cap", "product has more than " + std::to_string(cap) + " states");
    total *= d.size();
  }
  const std::size_t k = dfas.front().arity();
  std::vector<std::vector<StateIndex>> tuples(total, std::vector<StateIndex>(dfas.size()));
  for (std::size_t s = 0; s < total; ++s) {
    std::size_t rest = s;
    for (std::size_t i = dfas.size(); i-- > 0;) {
      tuples[s][i] = rest % dfas[i].size();
      rest /= dfas[i].size();
    }
  }
  auto encode = [&](const std::vector<StateIndex>& coords) {
    std::size_t s = 0;
    for (std::size_t i = 0; i < dfas.size(); ++i) s = s * dfas[i].size() + coords[i];
    return s;
  };
  Dfa out;
  out.symbols = dfas.front().symbols;
  out.delta.resize(total * k);
  std::vector<StateIndex> init;
  for (const auto& d : dfas) init.push_back(d.initial);
  out.initial = encode(init);
  std::vector<StateIndex> coords(dfas.size());
  for (std::size_t s = 0; s < total; ++s) {
    out.labels.push_back(detail::tuple_label(dfas, tuples[s]));
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t i = 0; i < dfas.size(); ++i) coords[i] = dfas[i].next(tuples[s][i], a);
      out.next(s, a) = encode(coords);
    }
  }
  detail::lift_classes(dfas, tuples, out);
  out.name = detail::product_name(dfas);
  return out;
}

/// Synchronized automaton restricted to states reachable from the initial tuple,
/// materialized breadth-first; equal to prune_accessible(product(dfas)).
inline Dfa product_accessible(const std::vector<Dfa>& dfas, std::size_t cap = kDefaultProductCap) {
  detail::check_same_alphabet(dfas);
  const std::size_t k = dfas.front().arity();
  std::map<std::vector<StateIndex>, StateIndex> index;
  std::vector<std::vector<StateIndex>> tuples;
  std::vector<StateIndex> init;
  for (const auto& d : dfas) init.push_back(d.initial);
  index.emplace(init, 0);
  tuples.push_back(init);
  Dfa out;
  out.symbols = dfas.front().symbols;
  out.initial = 0;
  for (std::size_t head = 0; head < tuples.size(); ++head) {
    for (std::size_t a = 0; a < k; ++a) {
      std::vector<StateIndex> coords(dfas.size());
      for (std::size_t i = 0; i < dfas.size(); ++i) coords[i] = dfas[i].next(tuples[head][i], a);
      auto [it, inserted] = index.emplace(coords, tuples.size());
      if (inserted) {
        if (tuples.size() >= cap)
          throw CapExceededError("product-cap", "product has more than " + std::to_string(cap) + " states");
        tuples.push_back(coords);
      }
      out.delta.push_back(it->second);
    }
  }
  for (const auto& t : tuples) out.labels.push_back(detail::tuple_label(dfas, t));
  detail::lift_classes(dfas, tuples, out);
  out.name = detail::product_name(dfas);
  return out;
}

/// Chains Aho-Corasick automata for `modules` so that the result recognizes
/// A* m1 A^{k1} A* m2 ... mr. From every detecting state of module i, k_i - 1
/// forced gap states lead, on any character, into module i+1's initial state.
inline Dfa concat_modular(const std::vector<KeywordSet>& modules, const std::vector<unsigned>& gaps) {
  if (modules.empty()) throw InvalidArgumentError("concat_modular: no modules");
  if (gaps.size() + 1 != modules.size())
    throw InvalidArgumentError("concat_modular: need exactly one gap between consecutive modules");
  for (unsigned g : gaps)
    if (g < 1) throw InvalidArgumentError("concat_modular: gaps must be at least 1");
  if (modules.size() == 1) return aho_corasick(modules.front());

  const std::string symbols = modules.front().symbols();
  const std::size_t k = symbols.size();
  const std::string match(kMatchClass);
  Dfa out;
  out.symbols = symbols;
  out.initial = 0;

  std::vector<Dfa> parts;
  std::vector<StateIndex> offset;
  std::vector<StateIndex> gap_offset;
  StateIndex next = 0;
  for (std::size_t m = 0; m < modules.size(); ++m) {
    if (modules[m].symbols() != symbols) throw AlphabetMismatchError("modules must share the alphabet");
    parts.push_back(aho_corasick(modules[m]));
    offset.push_back(next);
    next += parts.back().size();
    gap_offset.push_back(next);
    if (m + 1 < modules.size()) next += gaps[m] - 1;
  }
  out.labels.resize(next);
  out.delta.assign(next * k, 0);
  for (std::size_t m = 0; m < modules.size(); ++m) {
    const Dfa& part = parts[m];
    const std::string tag = std::to_string(m + 1) + ".";
    const bool last = m + 1 == modules.size();
    const StateIndex after = last ? 0 : (gaps[m] > 1 ? gap_offset[m] : offset[m + 1]);
    for (StateIndex s = 0; s < part.size(); ++s) {
      out.labels[offset[m] + s] = tag + part.labels[s];
      const bool detecting = part.in_class(match, s);
      for (std::size_t a = 0; a < k; ++a)
        out.next(offset[m] + s, a) = (detecting && !last) ? after : offset[m] + part.next(s, a);
      if (detecting && last) out.classes[match].push_back(offset[m] + s);
    }
    if (!last) {
      for (unsigned g = 1; g < gaps[m]; ++g) {
        const StateIndex s = gap_offset[m] + g - 1;
        out.labels[s] = tag + "#" + std::to_string(g);
        const StateIndex target = g + 1 < gaps[m] ? s + 1 : offset[m + 1];
        for (std::size_t a = 0; a < k; ++a) out.next(s, a) = target;
      }
    }
  }
  detail::sort_classes(out);
  out.name = "AC(";
  for (std::size_t m = 0; m < modules.size(); ++m) {
    if (m) out.name += gaps[m - 1] == 1 ? "#..." : "#_" + std::to_string(gaps[m - 1]) + "...";
    const auto& ws = modules[m].words();
    if (ws.size() == 1) {
      out.name += ws.front();
    } else {
      out.name += "{";
      for (std::size_t i = 0; i < ws.size(); ++i) out.name += (i ? "," : "") + ws[i];
      out.name += "}";
    }
  }
  out.name += ")";
  return out;
}

namespace detail {

inline std::string transform_name(const std::string& prefix, const std::string& name) {
  if (name.rfind("AC(", 0) == 0) return prefix + name.substr(2);
  return prefix + "(" + name + ")";
}

}  // namespace detail

/// ST transform: every state of the class becomes a sink.
inline Dfa make_absorbing(const Dfa& dfa, const std::string& label) {
  Dfa out = dfa;
  for (StateIndex t : dfa.terminal_class(label))
    for (std::size_t a = 0; a < dfa.arity(); ++a) out.next(t, a) = t;
  out.name = detail::transform_name("ST", dfa.name);
  return out;
}

/// NC transform: every state of the class takes the initial state's transitions,
/// so scanning restarts after each detection (non-overlapping counts).
inline Dfa make_renewal(const Dfa& dfa, const std::string& label) {
  Dfa out = dfa;
  for (StateIndex t : dfa.terminal_class(label))
    for (std::size_t a = 0; a < dfa.arity(); ++a) out.next(t, a) = dfa.next(dfa.initial, a);
  out.name = detail::transform_name("NC", dfa.name);
  return out;
}

/// States reachable from the initial state by a non-empty word (the embedded chain's state space).
inline std::vector<bool> reachable_by_nonempty(const Dfa& dfa) {
  std::vector<bool> seen(dfa.size(), false);
  std::deque<StateIndex> queue;
  for (std::size_t a = 0; a < dfa.arity(); ++a) {
    StateIndex t = dfa.next(dfa.initial, a);
    if (!seen[t]) {
      seen[t] = true;
      queue.push_back(t);
    }
  }
  while (!queue.empty()) {
    StateIndex s = queue.front();
    queue.pop_front();
    for (std::size_t a = 0; a < dfa.arity(); ++a) {
      StateIndex t = dfa.next(s, a);
      if (!seen[t]) {
        seen[t] = true;
        queue.push_back(t);
      }
    }
  }
  return seen;
}

/// Isomorphism preserving the initial state, every labelled edge and the family of
/// class state-sets (class names are not compared). Decided by canonical breadth-first
/// numbering; only the accessible parts are compared, and total state counts must match.
inline bool isomorphic(const Dfa& a, const Dfa& b) {
  if (a.symbols != b.symbols || a.size() != b.size()) return false;
  const Dfa ca = prune_accessible(a);
  const Dfa cb = prune_accessible(b);
  if (ca.size() != cb.size() || ca.delta != cb.delta) return false;
  auto family = [](const Dfa& d) {
    std::set<std::vector<StateIndex>> f;
    for (const auto& [label, members] : d.classes) f.insert(members);
    return f;
  };
  return family(ca) == family(cb);
}

/// Graphviz rendering: one edge per (state, character); classes as node annotations.
inline std::string to_dot(const Dfa& dfa) {
  std::ostringstream out;
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '\n') {
        q += "\\n";
        continue;
      }
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    return q + "\"";
  };
  out << "digraph " << quote(dfa.name.empty() ? "dfa" : dfa.name) << " {\n  rankdir=LR;\n";
  out << "  __start [shape=point];\n  __start -> s" << dfa.initial << ";\n";
  for (StateIndex s = 0; s < dfa.size(); ++s) {
    std::string note;
    for (const auto& [label, members] : dfa.classes)
      if (std::binary_search(members.begin(), members.end(), s)) note += (note.empty() ? "" : " ") + label;
    const bool detecting = dfa.classes.count(std::string(kMatchClass)) && dfa.in_class(std::string(kMatchClass), s);
    out << "  s" << s << " [label=" << quote(note.empty() ? dfa.labels[s] : dfa.labels[s] + "\n[" + note + "]")
        << (detecting ? ", shape=doublecircle" : ", shape=circle") << "];\n";
  }
  for (StateIndex s = 0; s < dfa.size(); ++s)
    for (std::size_t a = 0; a < dfa.arity(); ++a)
      out << "  s" << s << " -> s" << dfa.next(s, a) << " [label=" << quote(std::string(1, dfa.symbols[a]))
          << "];\n";
  out << "}\n";
  return out.str();
}

}  // namespace motifauto
