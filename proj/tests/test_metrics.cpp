#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ehrkit/errors.hpp"
#include "ehrkit/metrics.hpp"

using namespace ehrkit;

namespace {

TokenList toks(const std::string& spaced) {
  TokenList out;
  std::size_t start = 0;
  while (start <= spaced.size()) {
    const auto space = spaced.find(' ', start);
    const std::string word = spaced.substr(
        start, space == std::string::npos ? std::string::npos : space - start);
    if (!word.empty()) out.push_back(word);
    if (space == std::string::npos) break;
    start = space + 1;
  }
  return out;
}

// Exhaustive subsequence oracle for the LCS length (inputs <= ~12 tokens):
// enumerate every subsequence of the shorter list and test it against the
// longer one.
std::size_t brute_force_lcs(const TokenList& a, const TokenList& b) {
  const TokenList& small = a.size() <= b.size() ? a : b;
  const TokenList& large = a.size() <= b.size() ? b : a;
  std::size_t best = 0;
  for (std::size_t mask = 0; mask < (1ULL << small.size()); ++mask) {
    TokenList sub;
    for (std::size_t i = 0; i < small.size(); ++i) {
      if (mask & (1ULL << i)) sub.push_back(small[i]);
    }
    if (sub.size() <= best) continue;
    std::size_t j = 0;
    for (const std::string& t : large) {
      if (j < sub.size() && large.size() && t == sub[j]) ++j;
    }
    if (j == sub.size()) best = sub.size();
  }
  return best;
}

}  // namespace

TEST_CASE("bleu identity scores 1.0") {
  for (const std::string& s :
       {std::string("the"), std::string("the cat sat on the mat"),
        std::string("a b c d e f g h")}) {
    const BleuScore score = bleu(toks(s), {toks(s)});
    CHECK(score.score == 1.0);  // exact
    CHECK(score.brevity_penalty == 1.0);
  }
}

TEST_CASE("bleu clips n-gram counts per reference") {
  // hand count per the clipping rule: hyp 'the the the the' has four 'the';
  // the reference holds only one, so p1 = 1/4
  const BleuScore one_the = bleu(toks("the the the the"), {toks("the cat")}, 1);
  CHECK(one_the.precisions[0] == doctest::Approx(0.25).epsilon(1e-12));

  // with a second reference carrying two 'the', the clip rises to 2/4
  const BleuScore two_refs = bleu(
      toks("the the the the"), {toks("the cat"), toks("the cat the mat")}, 1);
  CHECK(two_refs.precisions[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("bleu brevity penalty follows the closest reference") {
  // hyp length 3, ref length 6: bp = exp(1 - 6/3) = e^-1; all precisions 1
  const BleuScore score =
      bleu(toks("the cat sat"), {toks("the cat sat on the mat")}, 3);
  CHECK(score.brevity_penalty ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(score.precisions[0] == doctest::Approx(1.0));
  CHECK(score.precisions[1] == doctest::Approx(1.0));
  CHECK(score.precisions[2] == doctest::Approx(1.0));
  CHECK(score.score == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));

  // ties between equally close references go to the shorter one
  const BleuScore tie =
      bleu(toks("a b c"), {toks("a b"), toks("a b c d")});  // lengths 2 and 4
  CHECK(tie.ref_length == 2);
  CHECK(tie.brevity_penalty == 1.0);  // c > r
}

TEST_CASE("bleu zero precision without smoothing zeroes the score") {
  const BleuScore score = bleu(toks("x y"), {toks("a b c")});
  CHECK(score.score == 0.0);
  const BleuScore smoothed =
      bleu(toks("x y"), {toks("a b c")}, 4, BleuSmoothing::add_one);
  // unigram precision stays unsmoothed and zero, so the score stays 0
  CHECK(smoothed.precisions[0] == 0.0);
  CHECK(smoothed.score == 0.0);

  // smoothing only lifts higher-order zeros
  const BleuScore partial =
      bleu(toks("a c b"), {toks("a b c")}, 2, BleuSmoothing::add_one);
  CHECK(partial.precisions[0] == doctest::Approx(1.0));
  CHECK(partial.precisions[1] == doctest::Approx(1.0 / 3.0));  // (0+1)/(2+1)
  CHECK(partial.score ==
        doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("bleu edge cases") {
  const BleuScore empty = bleu({}, {toks("a b")});
  CHECK(empty.score == 0.0);
  CHECK(empty.brevity_penalty == 0.0);
  CHECK(empty.hyp_length == 0);

  CHECK_THROWS_AS(bleu(toks("a"), {}), ArgumentError);
  CHECK_THROWS_AS(bleu(toks("a"), {toks("a")}, 0), ArgumentError);
}

TEST_CASE("bleu is invariant under alphabet relabeling") {
  std::mt19937 gen(4242);
  const std::vector<std::string> alphabet = {"a", "b", "c", "d", "e"};
  const std::vector<std::string> relabeled = {"v", "w", "x", "y", "z"};
  for (int round = 0; round < 50; ++round) {
    const auto sample = [&](std::size_t len) {
      TokenList plain, mapped;
      for (std::size_t i = 0; i < len; ++i) {
        const std::size_t pick = gen() % alphabet.size();
        plain.push_back(alphabet[pick]);
        mapped.push_back(relabeled[pick]);
      }
      return std::make_pair(plain, mapped);
    };
    const auto [hyp, hyp2] = sample(3 + gen() % 8);
    const auto [ref, ref2] = sample(3 + gen() % 8);
    const BleuScore s1 = bleu(hyp, {ref});
    const BleuScore s2 = bleu(hyp2, {ref2});
    CHECK(s1.score == doctest::Approx(s2.score).epsilon(1e-15));
    CHECK(s1.brevity_penalty == s2.brevity_penalty);
  }
}

TEST_CASE("bleu corpus-level aggregates statistics before the ratio") {
  const std::vector<BleuSegment> segments = {
      {toks("the cat"), {toks("the cat")}},
      {toks("a dog barks"), {toks("a dog barked loudly")}},
  };
  const BleuScore corpus = bleu_corpus(segments, 1);
  // unigram stats: (2 + 2) matches over (2 + 3) hyp tokens
  CHECK(corpus.precisions[0] == doctest::Approx(4.0 / 5.0));
  CHECK(corpus.hyp_length == 5);
  CHECK(corpus.ref_length == 6);
}

TEST_CASE("rouge_n hand examples") {
  const RougeScore identity = rouge_n(toks("a b c"), toks("a b c"), 1);
  CHECK(identity.precision == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(identity.recall == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(identity.f1 == doctest::Approx(1.0).epsilon(1e-12));

  const RougeScore partial = rouge_n(toks("the cat"), toks("the cat sat"), 1);
  CHECK(partial.precision == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(partial.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(partial.f1 == doctest::Approx(0.8).epsilon(1e-12));

  const RougeScore none = rouge_n(toks("x y z"), toks("a b c"), 2);
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);

  CHECK(rouge_n({}, toks("a"), 1).f1 == 0.0);
  CHECK(rouge_n(toks("a"), {}, 1).f1 == 0.0);
  CHECK_THROWS_AS(rouge_n(toks("a"), toks("a"), 0), ArgumentError);
}

TEST_CASE("rouge_n argument-swap duality") {
  std::mt19937 gen(7);
  const std::vector<std::string> alphabet = {"a", "b", "c", "d"};
  for (int round = 0; round < 100; ++round) {
    TokenList x, y;
    for (std::size_t i = 0, n = gen() % 10; i < n; ++i)
      x.push_back(alphabet[gen() % alphabet.size()]);
    for (std::size_t i = 0, n = gen() % 10; i < n; ++i)
      y.push_back(alphabet[gen() % alphabet.size()]);
    for (int n = 1; n <= 2; ++n) {
      const RougeScore xy = rouge_n(x, y, n);
      const RougeScore yx = rouge_n(y, x, n);
      CHECK(xy.precision == doctest::Approx(yx.recall).epsilon(1e-15));
      CHECK(xy.recall == doctest::Approx(yx.precision).epsilon(1e-15));
    }
  }
}

TEST_CASE("rouge_l hand examples") {
  const RougeScore identity = rouge_l(toks("a b c"), toks("a b c"));
  CHECK(identity.f1 == doctest::Approx(1.0).epsilon(1e-12));

  // LCS("a c e", "a b c d e") = 3
  const RougeScore score = rouge_l(toks("a c e"), toks("a b c d e"));
  CHECK(score.precision == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(score.recall == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(score.f1 == doctest::Approx(0.75).epsilon(1e-12));

  const RougeScore disjoint = rouge_l(toks("x y"), toks("a b"));
  CHECK(disjoint.precision == 0.0);
  CHECK(disjoint.recall == 0.0);
  CHECK(disjoint.f1 == 0.0);

  CHECK(rouge_l({}, toks("a")).f1 == 0.0);
}

TEST_CASE("rouge_l LCS equals brute-force subsequence search") {
  std::mt19937 gen(31337);
  const std::vector<std::string> alphabet = {"a", "b", "c"};
  for (int round = 0; round < 200; ++round) {
    TokenList x, y;
    for (std::size_t i = 0, n = 1 + gen() % 12; i < n; ++i)
      x.push_back(alphabet[gen() % alphabet.size()]);
    for (std::size_t i = 0, n = 1 + gen() % 12; i < n; ++i)
      y.push_back(alphabet[gen() % alphabet.size()]);
    const std::size_t lcs = brute_force_lcs(x, y);
    CHECK(lcs <= std::min(x.size(), y.size()));
    const RougeScore score = rouge_l(x, y);
    CHECK(score.precision ==
          doctest::Approx(static_cast<double>(lcs) / x.size()).epsilon(1e-12));
    CHECK(score.recall ==
          doctest::Approx(static_cast<double>(lcs) / y.size()).epsilon(1e-12));
  }
}

TEST_CASE("improvement report reproduces the published relative gains") {
  const ImprovementReport report = improvement_report({
      {"en-es", 0.3802, 0.4164},
      {"en-fr", 0.3302, 0.4372},
      {"en-ro", 0.4045, 0.4388},
  });
  REQUIRE(report.pairs.size() == 3);
  CHECK(report.pairs[0].relative_gain == doctest::Approx(9.52).epsilon(0.001));
  CHECK(report.pairs[1].relative_gain == doctest::Approx(32.40).epsilon(0.001));
  CHECK(report.pairs[2].relative_gain == doctest::Approx(8.48).epsilon(0.001));
  CHECK(report.average_gain == doctest::Approx(16.80).epsilon(0.001));
}

TEST_CASE("improvement report edge cases") {
  const ImprovementReport flat = improvement_report({{"x", 0.5, 0.5}});
  CHECK(flat.pairs[0].relative_gain == doctest::Approx(0.0));
  CHECK(flat.average_gain == doctest::Approx(0.0));

  CHECK_THROWS_WITH_AS(improvement_report({{"bad", 0.0, 0.4}}),
                       doctest::Contains("bad"), ArgumentError);
  CHECK_THROWS_AS(improvement_report({{"neg", -1.0, 0.4}}), ArgumentError);
  CHECK(improvement_report({}).pairs.empty());
}

TEST_CASE("metric_tokens lowercases the toolkit tokenizer output") {
  CHECK(metric_tokens("The CAT sat.") ==
        TokenList{"the", "cat", "sat", "."});
}
