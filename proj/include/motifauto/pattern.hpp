#pragma once

// Pattern language: literals, character classes, correlated positions and gaps.
//
//   pattern  := branch ('|' branch)*
//   branch   := element+
//   element  := letter+ | '{' letter (',' letter)* '}' | digit ['\''] | gap
//   gap      := '#' ['_' number] ['...']
//
// A digit 1-9 names a correlated position; its second occurrence (or an explicit
// trailing quote) is the paired position whose character is constrained by the
// correlation rule for that id. `#` is one free character, `#_k` exactly k,
// `#_k...` at least k.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "motifauto/alphabet.hpp"
#include "motifauto/errors.hpp"

namespace motifauto {

struct PatternExpr;

struct Literal {
  std::string text;
  bool operator==(const Literal&) const = default;
};
struct CharClass {
  std::string chars;  // alphabet order, no duplicates
  bool operator==(const CharClass&) const = default;
};
struct CorrelRef {
  int id = 0;
  bool primed = false;
  bool operator==(const CorrelRef&) const = default;
};
struct GapExact {
  unsigned k = 1;
  bool operator==(const GapExact&) const = default;
};
struct GapAtLeast {
  unsigned k = 1;
  bool operator==(const GapAtLeast&) const = default;
};
struct Seq {
  std::vector<PatternExpr> items;
  bool operator==(const Seq&) const;
};
struct Union {
  std::vector<PatternExpr> branches;
  bool operator==(const Union&) const;
};

struct PatternExpr {
  std::variant<Literal, CharClass, CorrelRef, GapExact, GapAtLeast, Seq, Union> node;

  PatternExpr() = default;
  template <typename T>
    requires(!std::is_same_v<std::decay_t<T>, PatternExpr> && std::is_class_v<std::decay_t<T>> &&
             std::is_constructible_v<decltype(node), T>)
  PatternExpr(T n) : node(std::move(n)) {}  // NOLINT(google-explicit-constructor)

  template <typename T>
  bool is() const { return std::holds_alternative<T>(node); }
  template <typename T>
  const T& as() const { return std::get<T>(node); }

  bool operator==(const PatternExpr&) const = default;
};

inline bool Seq::operator==(const Seq& o) const { return items == o.items; }
inline bool Union::operator==(const Union& o) const { return branches == o.branches; }

/// Allowed characters at the paired position, keyed by the character at the first position.
/// Characters absent from `allowed` may not appear at the first position.
struct CorrelationRule {
  int id = 1;
  std::map<char, std::string> allowed;

  void validate(const Alphabet& alphabet) const {
    if (id < 1 || id > 9) throw InvalidArgumentError("correlation id must be 1..9");
    for (const auto& [c, targets] : allowed) {
      if (!alphabet.contains(c)) throw UnknownCharacterError(c);
      if (targets.empty())
        throw InvalidArgumentError("correlation rule " + std::to_string(id) + ": '" + std::string(1, c) +
                                   "' maps to an empty set");
      for (char t : targets)
        if (!alphabet.contains(t)) throw UnknownCharacterError(t);
    }
  }
};

namespace rules {

/// Paired position repeats the first character.
inline CorrelationRule identity(int id, const Alphabet& alphabet) {
  CorrelationRule r{id, {}};
  for (char c : alphabet.symbols()) r.allowed[c] = std::string(1, c);
  return r;
}

inline CorrelationRule dna_complement(int id) {
  return {id, {{'A', "T"}, {'C', "G"}, {'G', "C"}, {'T', "A"}}};
}

inline CorrelationRule rna_complement(int id) {
  return {id, {{'A', "U"}, {'C', "G"}, {'G', "C"}, {'U', "A"}}};
}

/// Watson-Crick pairs plus G-U wobble pairs.
inline CorrelationRule rna_wobble(int id) {
  return {id, {{'A', "U"}, {'C', "G"}, {'G', "CU"}, {'U', "AG"}}};
}

/// Built-in rule by name: identity, dna-complement, rna-complement, rna-wobble.
inline CorrelationRule by_name(std::string_view name, int id, const Alphabet& alphabet) {
  if (name == "identity") return identity(id, alphabet);
  if (name == "dna-complement") return dna_complement(id);
  if (name == "rna-complement") return rna_complement(id);
  if (name == "rna-wobble") return rna_wobble(id);
  throw InvalidArgumentError("unknown correlation rule '" + std::string(name) + "'");
}

}  // namespace rules

namespace detail {

inline void append_item(std::vector<PatternExpr>& items, PatternExpr e) {
  if (e.is<Seq>()) {
    for (auto& child : std::get<Seq>(e.node).items) append_item(items, std::move(child));
    return;
  }
  if (e.is<Literal>() && !items.empty() && items.back().is<Literal>()) {
    std::get<Literal>(items.back().node).text += e.as<Literal>().text;
    return;
  }
  if (e.is<Literal>() && e.as<Literal>().text.empty()) return;
  items.push_back(std::move(e));
}

inline const CorrelationRule* find_rule(const std::vector<CorrelationRule>& rules, int id) {
  for (const auto& r : rules)
    if (r.id == id) return &r;
  return nullptr;
}

}  // namespace detail

/// Canonical form: nested sequences flattened, adjacent literals merged,
/// single-element sequences and single-branch unions unwrapped.
inline PatternExpr canonicalize(const PatternExpr& e) {
  if (e.is<Seq>()) {
    std::vector<PatternExpr> items;
    for (const auto& child : e.as<Seq>().items) detail::append_item(items, canonicalize(child));
    if (items.size() == 1) return items.front();
    if (items.empty()) return Literal{};
    return Seq{std::move(items)};
  }
  if (e.is<Union>()) {
    std::vector<PatternExpr> branches;
    for (const auto& b : e.as<Union>().branches) {
      PatternExpr c = canonicalize(b);
      if (c.is<Union>())
        for (auto& inner : std::get<Union>(c.node).branches) branches.push_back(std::move(inner));
      else
        branches.push_back(std::move(c));
    }
    if (branches.size() == 1) return branches.front();
    return Union{std::move(branches)};
  }
  return e;
}

/// Canonical textual rendering; parse_pattern(render(e)) == e.
inline std::string render(const PatternExpr& e) {
  struct Visitor {
    std::string operator()(const Literal& l) const { return l.text; }
    std::string operator()(const CharClass& c) const {
      std::string out = "{";
      for (std::size_t i = 0; i < c.chars.size(); ++i) {
        if (i) out += ',';
        out += c.chars[i];
      }
      return out + "}";
    }
    std::string operator()(const CorrelRef& r) const {
      return std::to_string(r.id) + (r.primed ? "'" : "");
    }
    std::string operator()(const GapExact& g) const {
      return g.k == 1 ? "#" : "#_" + std::to_string(g.k);
    }
    std::string operator()(const GapAtLeast& g) const {
      return (g.k == 1 ? std::string("#") : "#_" + std::to_string(g.k)) + "...";
    }
    std::string operator()(const Seq& s) const {
      std::string out;
      for (const auto& child : s.items) out += render(child);
      return out;
    }
    std::string operator()(const Union& u) const {
      std::string out;
      for (std::size_t i = 0; i < u.branches.size(); ++i) {
        if (i) out += '|';
        out += render(u.branches[i]);
      }
      return out;
    }
  };
  return std::visit(Visitor{}, e.node);
}

/// Parses pattern text. Every correlation id must have a rule in `rules`.
inline PatternExpr parse_pattern(std::string_view text, const Alphabet& alphabet,
                                 const std::vector<CorrelationRule>& rules) {
  if (text.empty()) throw PatternSyntaxError("empty pattern", 0);
  for (const auto& r : rules) r.validate(alphabet);

  std::vector<PatternExpr> branches;
  std::vector<PatternExpr> items;
  std::vector<std::size_t> item_pos;
  std::map<int, int> seen;  // id -> occurrences so far
  std::size_t i = 0;

  auto parse_number = [&](std::size_t& pos) {
    const std::size_t start = pos;
    unsigned long value = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      value = value * 10 + static_cast<unsigned long>(text[pos] - '0');
      if (value > 1000000) throw PatternSyntaxError("gap length too large", start);
      ++pos;
    }
    if (pos == start) throw PatternSyntaxError("expected a number", start);
    return static_cast<unsigned>(value);
  };

  auto close_branch = [&](std::size_t pos) {
    if (items.empty()) throw PatternSyntaxError("empty branch", pos);
    if (items.front().is<GapAtLeast>())
      throw PatternSyntaxError("unbounded gap cannot start a pattern", item_pos.front());
    if (items.back().is<GapAtLeast>())
      throw PatternSyntaxError("unbounded gap cannot end a pattern", item_pos.back());
    std::vector<PatternExpr> merged;
    for (auto& it : items) detail::append_item(merged, std::move(it));
    branches.push_back(merged.size() == 1 ? std::move(merged.front()) : PatternExpr(Seq{std::move(merged)}));
    items.clear();
    item_pos.clear();
  };

  while (i < text.size()) {
    const char c = text[i];
    const std::size_t start = i;
    if (c == '|') {
      close_branch(i);
      ++i;
    } else if (c == '{') {
      ++i;
      std::set<std::size_t> members;
      bool expect_letter = true;
      while (true) {
        if (i >= text.size()) throw PatternSyntaxError("unterminated character class", start);
        const char d = text[i];
        if (expect_letter) {
          if (!alphabet.contains(d)) {
            if (kReservedCharacters.find(d) != std::string_view::npos)
              throw PatternSyntaxError(std::string("unexpected '") + d + "' in character class", i);
            throw UnknownCharacterError(d);
          }
          members.insert(alphabet.index(d));
          expect_letter = false;
        } else if (d == ',') {
          expect_letter = true;
        } else if (d == '}') {
          ++i;
          break;
        } else {
          throw PatternSyntaxError("expected ',' or '}' in character class", i);
        }
        ++i;
      }
      std::string chars;
      for (auto m : members) chars += alphabet.symbol(m);
      items.push_back(CharClass{chars});
      item_pos.push_back(start);
    } else if (c >= '1' && c <= '9') {
      const int id = c - '0';
      ++i;
      bool explicit_prime = false;
      if (i < text.size() && text[i] == '\'') {
        explicit_prime = true;
        ++i;
      }
      int& count = seen[id];
      if (explicit_prime && count == 0)
        throw PatternSyntaxError("paired position " + std::to_string(id) + "' has no earlier occurrence", start);
      if (count >= 2)
        throw PatternSyntaxError("correlation id " + std::to_string(id) + " used more than twice", start);
      if (!detail::find_rule(rules, id))
        throw PatternSyntaxError("no correlation rule for id " + std::to_string(id), start);
      items.push_back(CorrelRef{id, count == 1});
      item_pos.push_back(start);
      ++count;
    } else if (c == '#') {
      ++i;
      unsigned k = 1;
      if (i < text.size() && text[i] == '_') {
        ++i;
        k = parse_number(i);
        if (k == 0) throw PatternSyntaxError("gap length must be at least 1", start);
      }
      bool at_least = false;
      if (text.substr(i, 3) == "...") {
        at_least = true;
        i += 3;
      }
      if (at_least)
        items.push_back(GapAtLeast{k});
      else
        items.push_back(GapExact{k});
      item_pos.push_back(start);
    } else if (alphabet.contains(c)) {
      std::string lit;
      while (i < text.size() && alphabet.contains(text[i])) lit += text[i++];
      items.push_back(Literal{lit});
      item_pos.push_back(start);
    } else if (kReservedCharacters.find(c) != std::string_view::npos ||
               std::isspace(static_cast<unsigned char>(c))) {
      throw PatternSyntaxError(std::string("unexpected '") + c + "'", i);
    } else {
      throw UnknownCharacterError(c);
    }
  }
  close_branch(text.size());
  return branches.size() == 1 ? std::move(branches.front()) : PatternExpr(Union{std::move(branches)});
}

/// True when no CorrelRef remains in the tree.
inline bool correlation_free(const PatternExpr& e) {
  if (e.is<CorrelRef>()) return false;
  if (e.is<Seq>())
    return std::all_of(e.as<Seq>().items.begin(), e.as<Seq>().items.end(), correlation_free);
  if (e.is<Union>())
    return std::all_of(e.as<Union>().branches.begin(), e.as<Union>().branches.end(), correlation_free);
  return true;
}

/// True when the tree contains an unbounded gap.
inline bool has_unbounded_gap(const PatternExpr& e) {
  if (e.is<GapAtLeast>()) return true;
  if (e.is<Seq>())
    return std::any_of(e.as<Seq>().items.begin(), e.as<Seq>().items.end(), has_unbounded_gap);
  if (e.is<Union>())
    return std::any_of(e.as<Union>().branches.begin(), e.as<Union>().branches.end(), has_unbounded_gap);
  return false;
}

namespace detail {

inline void collect_ids(const PatternExpr& e, std::vector<int>& ids, std::map<int, bool>& primed) {
  if (e.is<CorrelRef>()) {
    const auto& r = e.as<CorrelRef>();
    if (std::find(ids.begin(), ids.end(), r.id) == ids.end()) ids.push_back(r.id);
    if (r.primed) primed[r.id] = true;
  } else if (e.is<Seq>()) {
    for (const auto& c : e.as<Seq>().items) collect_ids(c, ids, primed);
  } else if (e.is<Union>()) {
    for (const auto& c : e.as<Union>().branches) collect_ids(c, ids, primed);
  }
}

inline PatternExpr substitute(const PatternExpr& e, const std::map<int, std::pair<char, char>>& assign) {
  if (e.is<CorrelRef>()) {
    const auto& r = e.as<CorrelRef>();
    const auto& [first, second] = assign.at(r.id);
    return Literal{std::string(1, r.primed ? second : first)};
  }
  if (e.is<Seq>()) {
    Seq out;
    for (const auto& c : e.as<Seq>().items) out.items.push_back(substitute(c, assign));
    return out;
  }
  if (e.is<Union>()) {
    Union out;
    for (const auto& c : e.as<Union>().branches) out.branches.push_back(substitute(c, assign));
    return out;
  }
  return e;
}

}  // namespace detail

/// One correlation-free tree per admissible assignment, in lexicographic order of the
/// assignment (ids by first appearance, characters in alphabet order).
inline std::vector<PatternExpr> expand_correlations(const PatternExpr& expr, const Alphabet& alphabet,
                                                    const std::vector<CorrelationRule>& rules) {
  std::vector<int> ids;
  std::map<int, bool> primed;
  detail::collect_ids(expr, ids, primed);
  if (ids.empty()) return {expr};

  std::vector<std::vector<std::pair<char, char>>> choices;
  for (int id : ids) {
    const CorrelationRule* rule = detail::find_rule(rules, id);
    if (!rule) throw InvalidArgumentError("no correlation rule for id " + std::to_string(id));
    std::vector<std::pair<char, char>> options;
    for (char c : alphabet.symbols()) {
      auto it = rule->allowed.find(c);
      if (it == rule->allowed.end()) continue;
      if (!primed[id]) {
        options.emplace_back(c, c);
        continue;
      }
      for (char t : alphabet.symbols())
        if (it->second.find(t) != std::string::npos) options.emplace_back(c, t);
    }
    if (options.empty())
      throw InvalidArgumentError("correlation rule " + std::to_string(id) + " admits no character");
    choices.push_back(std::move(options));
  }

  std::vector<PatternExpr> out;
  std::vector<std::size_t> odometer(ids.size(), 0);
  while (true) {
    std::map<int, std::pair<char, char>> assign;
    for (std::size_t k = 0; k < ids.size(); ++k) assign[ids[k]] = choices[k][odometer[k]];
    out.push_back(canonicalize(detail::substitute(expr, assign)));
    std::size_t k = ids.size();
    while (k > 0) {
      --k;
      if (++odometer[k] < choices[k].size()) break;
      odometer[k] = 0;
      if (k == 0) return out;
    }
  }
}

/// Finite non-empty set of non-empty words with precomputed reduction flags.
class KeywordSet {
 public:
  KeywordSet(std::vector<std::string> words, const Alphabet& alphabet) : symbols_(alphabet.symbols()) {
    if (words.empty()) throw InvalidArgumentError("keyword set is empty");
    for (const auto& w : words) {
      if (w.empty()) throw InvalidArgumentError("keyword set contains the empty word");
      for (char c : w) alphabet.index(c);
    }
    auto less = [&alphabet](const std::string& a, const std::string& b) {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [&](char x, char y) {
        return alphabet.index(x) < alphabet.index(y);
      });
    };
    std::sort(words.begin(), words.end(), less);
    words.erase(std::unique(words.begin(), words.end()), words.end());
    words_ = std::move(words);
    reduced_ = suffix_reduced_ = true;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      for (std::size_t j = 0; j < words_.size(); ++j) {
        if (i == j) continue;
        const auto& a = words_[i];
        const auto& b = words_[j];
        if (b.find(a) != std::string::npos) reduced_ = false;
        if (b.size() >= a.size() && b.compare(b.size() - a.size(), a.size(), a) == 0) suffix_reduced_ = false;
      }
    }
  }

  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::string& symbols() const noexcept { return symbols_; }
  std::size_t size() const noexcept { return words_.size(); }
  /// No word is a substring of another.
  bool reduced() const noexcept { return reduced_; }
  /// No word is a suffix of another.
  bool suffix_reduced() const noexcept { return suffix_reduced_; }

 private:
  std::string symbols_;
  std::vector<std::string> words_;
  bool reduced_ = true;
  bool suffix_reduced_ = true;
};

inline constexpr std::size_t kDefaultExpansionCap = 100000;

namespace detail {

inline std::vector<std::string> expand_words(const PatternExpr& e, const Alphabet& alphabet, std::size_t cap) {
  auto check = [cap](std::size_t n) {
    if (n > cap)
      throw ExpansionTooLargeError("expansion would produce more than " + std::to_string(cap) + " words");
  };
  if (e.is<Literal>()) return {e.as<Literal>().text};
  if (e.is<CharClass>()) {
    std::vector<std::string> out;
    for (char c : e.as<CharClass>().chars) out.emplace_back(1, c);
    return out;
  }
  if (e.is<GapExact>()) {
    std::vector<std::string> out{""};
    for (unsigned step = 0; step < e.as<GapExact>().k; ++step) {
      check(out.size() * alphabet.size());
      std::vector<std::string> next;
      for (const auto& w : out)
        for (char c : alphabet.symbols()) next.push_back(w + c);
      out = std::move(next);
    }
    return out;
  }
  if (e.is<GapAtLeast>()) throw UnboundedPatternError();
  if (e.is<CorrelRef>()) throw InvalidArgumentError("expand correlations before expanding to keywords");
  if (e.is<Seq>()) {
    std::vector<std::string> out{""};
    for (const auto& child : e.as<Seq>().items) {
      auto part = expand_words(child, alphabet, cap);
      check(out.size() * part.size());
      std::vector<std::string> next;
      next.reserve(out.size() * part.size());
      for (const auto& w : out)
        for (const auto& s : part) next.push_back(w + s);
      out = std::move(next);
    }
    return out;
  }
  std::vector<std::string> out;
  for (const auto& b : e.as<Union>().branches) {
    auto part = expand_words(b, alphabet, cap);
    out.insert(out.end(), part.begin(), part.end());
    check(out.size());
  }
  return out;
}

}  // namespace detail

/// Exact finite word set denoted by a correlation-free expression without unbounded gaps.
inline KeywordSet expand_to_keywords(const PatternExpr& expr, const Alphabet& alphabet,
                                     std::size_t cap = kDefaultExpansionCap) {
  if (has_unbounded_gap(expr)) throw UnboundedPatternError();
  return KeywordSet(detail::expand_words(expr, alphabet, cap), alphabet);
}

/// A correlation-free branch split at its unbounded gaps: module_1 #_{gap_1}... module_2 ...
struct ModularPattern {
  std::vector<KeywordSet> modules;
  std::vector<unsigned> gaps;  // minimum gap between module i and i+1
};

inline ModularPattern split_modules(const PatternExpr& branch, const Alphabet& alphabet,
                                    std::size_t cap = kDefaultExpansionCap) {
  if (branch.is<Union>()) throw InvalidArgumentError("split_modules expects a single branch");
  std::vector<PatternExpr> items;
  if (branch.is<Seq>())
    items = branch.as<Seq>().items;
  else
    items = {branch};
  ModularPattern out;
  std::vector<PatternExpr> segment;
  unsigned pending_gap = 0;
  for (const auto& it : items) {
    if (it.is<GapAtLeast>()) {
      if (!segment.empty()) {
        out.modules.push_back(expand_to_keywords(canonicalize(Seq{segment}), alphabet, cap));
        segment.clear();
        if (out.modules.size() > 1) out.gaps.push_back(pending_gap);
        pending_gap = 0;
      }
      pending_gap += it.as<GapAtLeast>().k;
    } else {
      segment.push_back(it);
    }
  }
  if (segment.empty() || (out.modules.empty() && pending_gap > 0))
    throw InvalidArgumentError("unbounded gap at a pattern boundary");
  out.modules.push_back(expand_to_keywords(canonicalize(Seq{segment}), alphabet, cap));
  if (out.modules.size() > 1) out.gaps.push_back(pending_gap);
  return out;
}

}  // namespace motifauto
