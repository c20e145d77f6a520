#pragma once

// Markov chain embedding of a memoryless text in an automaton: the state
// sequence f(q, X1...Xn) is a homogeneous chain on the states reachable by a
// non-empty word, with P = sum over characters of Prob(c) * G_c.

#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "motifauto/alphabet.hpp"
#include "motifauto/dfa.hpp"
#include "motifauto/matrix.hpp"

namespace motifauto {

struct MarkovEmbedding {
  std::vector<std::string> state_labels;
  std::vector<StateIndex> dfa_state;  // chain index -> automaton state
  RationalVector mu;
  RationalMatrix P;
  std::map<std::string, std::vector<std::size_t>> classes;  // chain indices, sorted

  std::size_t size() const noexcept { return state_labels.size(); }

  const std::vector<std::size_t>& terminal_class(const std::string& label) const {
    auto it = classes.find(label);
    if (it == classes.end()) throw UnknownClassError(label);
    return it->second;
  }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t i = 0; i < state_labels.size(); ++i)
      if (state_labels[i] == label) return i;
    throw InvalidArgumentError("no chain state labelled '" + label + "'");
  }
};

/// 0/1 incidence matrix of the edges labelled `c`, over all automaton states.
inline Matrix<int> char_incidence(const Dfa& dfa, char c) {
  const std::size_t a = dfa.symbol_index(c);
  Matrix<int> g(dfa.size(), dfa.size(), 0);
  for (StateIndex s = 0; s < dfa.size(); ++s) g(s, dfa.next(s, a)) = 1;
  return g;
}

/// Embeds `alphabet`'s memoryless source in `dfa`. The chain's states are those
/// reachable by a non-empty word, kept in automaton order; the initial state is
/// dropped when no non-empty word leads back to it.
inline MarkovEmbedding embed(const Dfa& dfa, const Alphabet& alphabet) {
  if (dfa.symbols != alphabet.symbols())
    throw AlphabetMismatchError("automaton alphabet '" + dfa.symbols + "' differs from source alphabet '" +
                                alphabet.symbols() + "'");
  const auto keep = reachable_by_nonempty(dfa);
  std::vector<std::size_t> chain_index(dfa.size(), dfa.size());
  MarkovEmbedding emb;
  for (StateIndex s = 0; s < dfa.size(); ++s) {
    if (!keep[s]) continue;
    chain_index[s] = emb.dfa_state.size();
    emb.dfa_state.push_back(s);
    emb.state_labels.push_back(dfa.labels[s]);
  }
  const std::size_t n = emb.size();
  emb.mu.assign(n, Rational(0));
  emb.P = RationalMatrix(n, n, Rational(0));
  for (std::size_t a = 0; a < alphabet.size(); ++a) {
    emb.mu[chain_index[dfa.next(dfa.initial, a)]] += alphabet.prob(a);
    for (std::size_t i = 0; i < n; ++i) emb.P(i, chain_index[dfa.next(emb.dfa_state[i], a)]) += alphabet.prob(a);
  }
  for (const auto& [label, members] : dfa.classes) {
    auto& out = emb.classes[label];
    for (StateIndex s : members)
      if (keep[s]) out.push_back(chain_index[s]);
  }
  return emb;
}

/// Text dump of mu and P with exact "num/den" entries, one row per line.
inline std::string dump(const MarkovEmbedding& emb) {
  std::ostringstream out;
  out << "states:";
  for (const auto& l : emb.state_labels) out << ' ' << l;
  out << "\nmu:";
  for (const auto& v : emb.mu) out << ' ' << to_string(v);
  out << "\nP:\n";
  for (std::size_t i = 0; i < emb.size(); ++i) {
    for (std::size_t j = 0; j < emb.size(); ++j) out << (j ? " " : "") << to_string(emb.P(i, j));
    out << '\n';
  }
  return out.str();
}

}  // namespace motifauto
