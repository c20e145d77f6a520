#pragma once

// Exact finite-n distributions computed by iterating the embedded chain.

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "motifauto/embedding.hpp"
#include "motifauto/errors.hpp"
#include "motifauto/matrix.hpp"
#include "motifauto/polynomial.hpp"

namespace motifauto {

struct Pmf {
  std::vector<unsigned> support;
  std::vector<Rational> prob;
  Rational tail_mass = 0;

  Rational at(unsigned k) const {
    for (std::size_t i = 0; i < support.size(); ++i)
      if (support[i] == k) return prob[i];
    return 0;
  }
  Rational total() const {
    Rational s = tail_mass;
    for (const auto& p : prob) s += p;
    return s;
  }
  bool operator==(const Pmf& o) const = default;
};

using CountVector = std::vector<unsigned>;

struct JointPmf {
  std::map<CountVector, Rational> entries;  // only non-zero probabilities
  unsigned n = 0;
  std::vector<std::string> mark_labels;

  Rational at(const CountVector& m) const {
    auto it = entries.find(m);
    return it == entries.end() ? Rational(0) : it->second;
  }
  Rational total() const {
    Rational s = 0;
    for (const auto& [m, p] : entries) s += p;
    return s;
  }
  /// Distribution of one component.
  Pmf marginal(std::size_t index) const {
    std::map<unsigned, Rational> acc;
    for (const auto& [m, p] : entries) acc[m.at(index)] += p;
    Pmf out;
    for (const auto& [k, p] : acc) {
      out.support.push_back(k);
      out.prob.push_back(p);
    }
    return out;
  }
  bool operator==(const JointPmf& o) const { return n == o.n && entries == o.entries; }
};

namespace detail {

inline std::vector<bool> class_union(const MarkovEmbedding& emb, const std::vector<std::string>& labels) {
  if (labels.empty()) throw InvalidArgumentError("no stop classes given");
  std::vector<bool> in(emb.size(), false);
  for (const auto& l : labels)
    for (std::size_t i : emb.terminal_class(l)) in[i] = true;
  return in;
}

/// Exponent vector of each chain state: component j is 1 when the state lies in class j.
inline std::vector<Exponents> mark_exponents(const MarkovEmbedding& emb, const std::vector<std::string>& marked) {
  std::vector<Exponents> out(emb.size(), Exponents(marked.size(), 0));
  for (std::size_t j = 0; j < marked.size(); ++j)
    for (std::size_t i : emb.terminal_class(marked[j])) out[i][j] = 1;
  return out;
}

}  // namespace detail

/// Prob[T = n] for n = 1..n_max, T being the first time the chain enters the stop set.
inline Pmf sooner_time_pmf(const MarkovEmbedding& emb, const std::vector<std::string>& stop_classes,
                           unsigned n_max) {
  if (n_max < 1) throw InvalidArgumentError("n_max must be at least 1");
  const auto stop = detail::class_union(emb, stop_classes);
  const std::size_t n = emb.size();
  Pmf out;
  Rational acc = 0;
  RationalVector v(n, Rational(0));  // mass on non-stop states at time t
  Rational first = 0;
  for (std::size_t i = 0; i < n; ++i) (stop[i] ? first : v[i]) += emb.mu[i];
  out.support.push_back(1);
  out.prob.push_back(first);
  acc += first;
  for (unsigned t = 2; t <= n_max; ++t) {
    RationalVector w(n, Rational(0));
    Rational hit = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (stop[i] || v[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (emb.P(i, j) == 0) continue;
        (stop[j] ? hit : w[j]) += v[i] * emb.P(i, j);
      }
    }
    out.support.push_back(t);
    out.prob.push_back(hit);
    acc += hit;
    v = std::move(w);
  }
  out.tail_mass = 1 - acc;
  return out;
}

/// Probability of each way the stop set can first be entered. Outcome labels join,
/// with '+', the partition classes containing the entered state, so a state in
/// several classes yields a "simultaneous" outcome of its own.
inline std::map<std::string, Rational> first_pattern_split(const MarkovEmbedding& emb,
                                                           const std::vector<std::string>& partition) {
  const auto stop = detail::class_union(emb, partition);
  const std::size_t n = emb.size();
  std::vector<std::string> outcome(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!stop[i]) continue;
    for (const auto& l : partition) {
      const auto& members = emb.terminal_class(l);
      if (std::binary_search(members.begin(), members.end(), i)) outcome[i] += (outcome[i].empty() ? "" : "+") + l;
    }
  }
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i)
    if (!stop[i]) free.push_back(i);

  // Expected visits x to transient states: x (I - Q) = nu.
  const std::size_t m = free.size();
  RationalMatrix a(m, m, Rational(0));
  RationalVector nu(m);
  for (std::size_t r = 0; r < m; ++r) {
    nu[r] = emb.mu[free[r]];
    for (std::size_t c = 0; c < m; ++c) a(c, r) = (r == c ? Rational(1) : Rational(0)) - emb.P(free[r], free[c]);
  }
  RationalVector visits;
  try {
    visits = m ? solve(a, nu) : RationalVector{};
  } catch (const SingularSystemError&) {
    throw SingularSystemError("stop set is not reached with certainty (I - Q is singular)");
  }

  std::map<std::string, Rational> out;
  for (std::size_t i = 0; i < n; ++i)
    if (stop[i]) out[outcome[i]] += emb.mu[i];
  for (std::size_t r = 0; r < m; ++r) {
    if (visits[r] == 0) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (stop[j] && emb.P(free[r], j) != 0) out[outcome[j]] += visits[r] * emb.P(free[r], j);
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

/// Joint law of the numbers of visits to each marked class during the first n steps.
inline JointPmf count_joint_pmf(const MarkovEmbedding& emb, const std::vector<std::string>& marked, unsigned n) {
  if (n < 1) throw InvalidArgumentError("n must be at least 1");
  const std::size_t k = marked.size();
  const std::size_t s = emb.size();
  const auto marks = detail::mark_exponents(emb, marked);
  std::vector<Polynomial> v(s, Polynomial(k));
  for (std::size_t i = 0; i < s; ++i) v[i] = Polynomial::monomial(marks[i], emb.mu[i]);
  for (unsigned t = 1; t < n; ++t) {
    std::vector<Polynomial> w(s, Polynomial(k));
    for (std::size_t j = 0; j < s; ++j) {
      Polynomial acc(k);
      for (std::size_t i = 0; i < s; ++i)
        if (emb.P(i, j) != 0 && !v[i].is_zero()) acc += v[i] * emb.P(i, j);
      w[j] = acc * Polynomial::monomial(marks[j], 1);
    }
    v = std::move(w);
  }
  Polynomial total(k);
  for (const auto& p : v) total += p;
  JointPmf out;
  out.n = n;
  out.mark_labels = marked;
  for (const auto& [e, c] : total.terms()) out.entries.emplace(e, c);
  return out;
}

/// Law of component `target` given that the components in `fix` take the stated values.
inline Pmf conditional_pmf(const JointPmf& joint, std::size_t target, const std::map<std::size_t, unsigned>& fix) {
  std::map<unsigned, Rational> acc;
  Rational mass = 0;
  for (const auto& [m, p] : joint.entries) {
    bool keep = true;
    for (const auto& [idx, val] : fix)
      if (m.at(idx) != val) keep = false;
    if (!keep) continue;
    acc[m.at(target)] += p;
    mass += p;
  }
  if (mass == 0) throw InvalidArgumentError("conditioning event has probability zero");
  Pmf out;
  for (const auto& [k, p] : acc) {
    out.support.push_back(k);
    out.prob.push_back(p / mass);
  }
  return out;
}

struct Moments {
  RationalVector mean;
  RationalMatrix cov;
};

inline Moments exact_moments(const JointPmf& joint) {
  const std::size_t k = joint.mark_labels.size();
  Moments out{RationalVector(k, Rational(0)), RationalMatrix(k, k, Rational(0))};
  RationalMatrix second(k, k, Rational(0));
  for (const auto& [m, p] : joint.entries) {
    for (std::size_t i = 0; i < k; ++i) {
      out.mean[i] += p * m[i];
      for (std::size_t j = 0; j < k; ++j) second(i, j) += p * (m[i] * m[j]);
    }
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) out.cov(i, j) = second(i, j) - out.mean[i] * out.mean[j];
  return out;
}

}  // namespace motifauto
