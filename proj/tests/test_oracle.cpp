#include <gtest/gtest.h>

#include <cmath>

#include "motifauto/compile.hpp"
#include "motifauto/distributions.hpp"
#include "motifauto/genfunc.hpp"
#include "motifauto/oracle.hpp"
#include "support.hpp"

using namespace motifauto;
using testsupport::R;

namespace {
const Alphabet kDna = Alphabet::uniform("ACGT");
}

TEST(Scan, OverlapAndRenewalExamples) {
  const std::string text = "ATATATATATA";
  EXPECT_EQ(scan_text(text, KeywordSet({"TATA", "ATA"}, kDna), CountMode::Overlap),
            (std::vector<unsigned>{5, 4}));  // words are sorted: ATA, TATA
  EXPECT_EQ(scan_text(text, KeywordSet({"TATA"}, kDna), CountMode::Renewal), (std::vector<unsigned>{2}));
  EXPECT_EQ(scan_text(text, KeywordSet({"ATA"}, kDna), CountMode::Renewal), (std::vector<unsigned>{3}));
  EXPECT_EQ(scan_text("", KeywordSet({"ATA", "C"}, kDna), CountMode::Overlap), (std::vector<unsigned>{0, 0}));
}

TEST(Scan, ModularRenewalExample) {
  const auto expr = parse_pattern("TA#...TATA", kDna, {});
  const NaiveMatcher m(expr, {});
  EXPECT_EQ(m.count("ATATATATATA", CountMode::Renewal), 1u);
  // overlap counts end positions (9 and 11), not the three distinct windows
  EXPECT_EQ(m.count("ATATATATATA", CountMode::Overlap), 2u);
  // the NC automaton agrees on the same text
  const auto cp = compile_pattern(expr, kDna, {}, Variant::Renewal);
  unsigned visits = 0;
  StateIndex s = cp.dfa.initial;
  for (char c : std::string("ATATATATATA")) {
    s = cp.dfa.next(s, cp.dfa.symbol_index(c));
    visits += cp.dfa.in_class("*", s);
  }
  EXPECT_EQ(visits, 1u);
}

TEST(Matcher, CorrelationsAndGaps) {
  const auto al = Alphabet::uniform("ACGU");
  const std::vector<CorrelationRule> rules{rules::rna_wobble(1)};
  const NaiveMatcher m(parse_pattern("1A#_2U1", al, rules), rules);
  EXPECT_TRUE(m.matches("GACCUC", 0, 6));
  EXPECT_TRUE(m.matches("GACCUU", 0, 6));
  EXPECT_FALSE(m.matches("GACCUA", 0, 6));
  EXPECT_FALSE(m.matches("GACUC", 0, 5));
  EXPECT_TRUE(m.ends_at("AAGACCUC", 8));
  EXPECT_FALSE(m.ends_at("AAGACCUC", 8, 3));
}

TEST(Enumerate, WeightsSumToOne) {
  const Alphabet al("abc", {R(1, 7), R(2, 7), R(4, 7)});
  Rational total = 0;
  std::size_t texts = 0;
  for_each_text(al, 6, [&](const std::string& t, const Rational& w) {
    total += w;
    ++texts;
    EXPECT_EQ(w, al.word_prob(t));
  });
  EXPECT_EQ(total, 1);
  EXPECT_EQ(texts, 729u);
  EXPECT_THROW(for_each_text(al, 6, [](const std::string&, const Rational&) {}, 100), CapExceededError);
}

TEST(Enumerate, ShortTextsGiveZeroCounts) {
  const auto law = enumerate_count_pmf(kDna, KeywordSet({"AC", "GGT"}, kDna), 1, CountMode::Overlap);
  EXPECT_EQ(law.entries.size(), 1u);
  EXPECT_EQ(law.at({0, 0}), 1);
}

TEST(Enumerate, PathCountsMatchScanning) {
  const auto al = Alphabet::binary(R(3, 7));
  const std::vector<std::string> words = {"ab", "bab", "bb"};
  const KeywordSet ks(words, al);
  const auto d = aho_corasick(ks);
  for (unsigned n : {0u, 3u, 9u}) {
    const auto scanned = enumerate_count_pmf(al, ks, n, CountMode::Overlap);
    const auto path = enumerate_count_pmf(al, d, ks.words(), n);
    EXPECT_EQ(scanned, path) << n;
    if (n > 0) {
      EXPECT_EQ(path, count_joint_pmf(embed(d, al), ks.words(), n)) << n;
    }
  }
}

TEST(Enumerate, RenewalModularAgreesForAllLengths) {
  const auto al = Alphabet::binary(R(1, 3));
  const auto expr = parse_pattern("aa#...ba", al, {});
  const auto nc = compile_pattern(expr, al, {}, Variant::Renewal).dfa;
  for (unsigned n = 1; n <= 12; ++n)
    EXPECT_EQ(enumerate_count_pmf(al, nc, {"*"}, n), enumerate_count_pmf(al, expr, {}, n, CountMode::Renewal)) << n;
}

TEST(EnumerateSooner, TwoKeywordsAtHalf) {
  const auto pmf = enumerate_sooner_pmf(Alphabet::binary(R(1, 2)), ends_with_any({"ba", "abba"}), 16);
  EXPECT_EQ(pmf.at(1), 0);
  for (unsigned n = 2; n <= 16; ++n) EXPECT_EQ(pmf.at(n), Rational(n - 1) / pow(Rational(2), n)) << n;
}

TEST(EnumerateSooner, CorrelatedModularMatchesGfSeries) {
  const auto al = Alphabet::binary(R(1, 2));
  const auto rules = default_rules(al);
  const auto expr = parse_pattern("1a#...b1", al, rules);
  const auto oracle = enumerate_sooner_pmf(al, ends_with_pattern(expr, rules), 16);
  const auto f = sooner_gf(embed(compile_pattern(expr, al, rules, Variant::Sooner).dfa, al), {"*"});
  const auto coeffs = series_rational(f, 16);
  for (unsigned n = 1; n <= 16; ++n) EXPECT_EQ(oracle.at(n), coeffs[n]) << n;
}

TEST(EnumerateSooner, ImmediateStop) {
  const auto pmf = enumerate_sooner_pmf(Alphabet::uniform("ab"), ends_with_any({"a", "b"}), 5);
  EXPECT_EQ(pmf.at(1), 1);
  EXPECT_EQ(pmf.tail_mass, 0);
  EXPECT_THROW(enumerate_sooner_pmf(Alphabet::uniform("ab"), ends_with_any({"aaaaaaaa"}), 30, 1000),
               CapExceededError);
}

TEST(Sampler, DeterministicAndWeighted) {
  const Alphabet al("abc", {R(1, 2), R(1, 3), R(1, 6)});
  const auto s1 = sample_text(al, 50, 42);
  const auto s2 = sample_text(al, 50, 42);
  EXPECT_EQ(s1.text, s2.text);
  EXPECT_EQ(s1.weight, al.word_prob(s1.text));
  EXPECT_NE(sample_text(al, 50, 43).text, s1.text);
  const auto empty = sample_text(al, 0, 7);
  EXPECT_TRUE(empty.text.empty());
  EXPECT_EQ(empty.weight, 1);
}

// Mean overlap count of "ba" in 100 letters is 99 pq; 10^5 samples land within 3 standard errors.
TEST(Sampler, MonteCarloMeanOfBaCount) {
  const auto al = Alphabet::binary(R(1, 2));
  const KeywordSet ba({"ba"}, al);
  std::mt19937_64 rng(2024);
  const int samples = 100000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < samples; ++i) {
    const double c = scan_text(sample_text(al, 100, rng).text, ba, CountMode::Overlap)[0];
    sum += c;
    sum_sq += c * c;
  }
  const double mean = sum / samples;
  const double var = sum_sq / samples - mean * mean;
  EXPECT_LT(std::abs(mean - 99.0 / 4), 3 * std::sqrt(var / samples));
}

TEST(Properties, RenewalNeverExceedsOverlap) {
  const auto al = Alphabet::uniform("ab");
  const KeywordSet ks({"aba", "bb", "abab"}, al);
  const NaiveMatcher m(parse_pattern("a#...ba|bab", al, {}), {});
  for_each_text(al, 10, [&](const std::string& t, const Rational&) {
    const auto o = scan_text(t, ks, CountMode::Overlap), r = scan_text(t, ks, CountMode::Renewal);
    for (std::size_t i = 0; i < o.size(); ++i) ASSERT_LE(r[i], o[i]) << t;
    ASSERT_LE(m.count(t, CountMode::Renewal), m.count(t, CountMode::Overlap)) << t;
  });
}
