#include <gtest/gtest.h>

#include "motifauto/compile.hpp"
#include "motifauto/embedding.hpp"
#include "support.hpp"

using namespace motifauto;
using testsupport::R;

namespace {

RationalVector step(const RationalVector& v, const RationalMatrix& p) {
  RationalVector out(v.size(), Rational(0));
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[j] += v[i] * p(i, j);
  return out;
}

Rational mass_on(const RationalVector& v, const std::vector<std::size_t>& cls) {
  Rational s = 0;
  for (auto i : cls) s += v[i];
  return s;
}

void expect_stochastic(const MarkovEmbedding& emb) {
  Rational total = 0;
  for (const auto& m : emb.mu) {
    EXPECT_GE(m, 0);
    total += m;
  }
  EXPECT_EQ(total, 1);
  for (std::size_t i = 0; i < emb.size(); ++i) {
    Rational row = 0;
    for (std::size_t j = 0; j < emb.size(); ++j) {
      EXPECT_GE(emb.P(i, j), 0);
      row += emb.P(i, j);
    }
    EXPECT_EQ(row, 1) << "row " << i;
  }
}

}  // namespace

TEST(Embedding, KeywordChainDropsUnreachableInitial) {
  const Rational p = R(1, 3), q = 1 - p;
  const auto al = Alphabet::binary(p);
  const auto emb = embed(aho_corasick(KeywordSet({"ba", "abba"}, al)), al);
  EXPECT_EQ(emb.state_labels, (std::vector<std::string>{"a", "b", "ab", "ba", "abb", "abba"}));
  EXPECT_EQ(emb.mu, (RationalVector{p, q, 0, 0, 0, 0}));
  // rows: a, b, ab, ba, abb, abba
  const std::vector<std::vector<Rational>> expect = {
      {p, 0, q, 0, 0, 0}, {0, q, 0, p, 0, 0}, {0, 0, 0, p, q, 0},
      {p, 0, q, 0, 0, 0}, {0, q, 0, 0, 0, p}, {p, 0, q, 0, 0, 0}};
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(emb.P(i, j), expect[i][j]) << i << "," << j;
  EXPECT_EQ(emb.terminal_class("ba"), (std::vector<std::size_t>{3, 5}));
  EXPECT_EQ(emb.terminal_class("abba"), (std::vector<std::size_t>{5}));
  expect_stochastic(emb);
}

TEST(Embedding, RenewalModularChain) {
  const Rational p = R(2, 7), q = 1 - p;
  const auto al = Alphabet::binary(p);
  const auto cp = compile_pattern("aa#...ba", al, {}, Variant::Renewal);
  const auto emb = embed(cp.dfa, al);
  const std::string e(kEmptyWord);
  ASSERT_EQ(emb.state_labels, (std::vector<std::string>{"1." + e, "1.a", "1.aa", "2." + e, "2.b", "2.ba"}));
  EXPECT_EQ(emb.mu, (RationalVector{q, p, 0, 0, 0, 0}));
  const std::vector<std::vector<Rational>> expect = {
      {q, p, 0, 0, 0, 0}, {q, 0, p, 0, 0, 0}, {0, 0, 0, 1, 0, 0},
      {0, 0, 0, p, q, 0}, {0, 0, 0, 0, q, p}, {q, p, 0, 0, 0, 0}};
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(emb.P(i, j), expect[i][j]) << i << "," << j;
  EXPECT_NE(dump(emb).find("mu: 5/7 2/7 0 0 0 0"), std::string::npos);
}

TEST(Embedding, StochasticAcrossAutomata) {
  const auto al = Alphabet("abc", {R(1, 2), R(1, 3), R(1, 6)});
  const auto rules = default_rules(al);
  for (const char* pat : {"ab|bca|c", "a#...b", "1b#_2...c1", "{a,b}c|aa#...cc", "1a1|bb"})
    for (auto v : {Variant::Detect, Variant::Sooner, Variant::Renewal})
      expect_stochastic(embed(compile_pattern(pat, al, rules, v).dfa, al));
}

// Expected visits to class w over n steps equal the expected number of occurrences of w.
TEST(Embedding, ExpectedClassVisitsMatchOccurrenceMeans) {
  const auto al = Alphabet::binary(R(3, 5));
  const std::vector<std::string> words = {"aba", "bb", "abab"};
  const auto emb = embed(aho_corasick(KeywordSet(words, al)), al);
  const unsigned n = 12;
  for (const auto& w : words) {
    Rational visits = 0;
    RationalVector v = emb.mu;
    for (unsigned t = 1; t <= n; ++t) {
      visits += mass_on(v, emb.terminal_class(w));
      v = step(v, emb.P);
    }
    EXPECT_EQ(visits, Rational(n - w.size() + 1) * al.word_prob(w)) << w;
  }
}

TEST(Embedding, RejectsAlphabetMismatch) {
  const auto d = aho_corasick(KeywordSet({"ab"}, Alphabet::uniform("ab")));
  EXPECT_THROW(embed(d, Alphabet::uniform("abc")), AlphabetMismatchError);
  EXPECT_THROW(embed(d, Alphabet::uniform("ab")).terminal_class("x"), UnknownClassError);
}
