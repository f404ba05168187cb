#include <doctest.h>

#include <cmath>
#include <random>

#include "finqa/error.hpp"
#include "finqa/metrics.hpp"
#include "oracles.hpp"

using namespace finqa;

TEST_CASE("term_sets applies the lexicon to all three texts") {
  const TermLexicon lex = TermLexicon::from_terms({"ebitda", "sales"});
  const TermSets ts = term_sets(lex, "Will EBITDA recover?", "sales drove it",
                                "sales and sales again");
  CHECK(ts.q == std::set<Term>{"ebitda"});
  CHECK(ts.ga == std::set<Term>{"sales"});
  CHECK(ts.ra == std::set<Term>{"sales"});

  const TermSets empty = term_sets(lex, "", "", "");
  CHECK(empty.q.empty());
  CHECK(empty.ga.empty());
  CHECK(empty.ra.empty());
}

TEST_CASE("term_ratios on the worked examples") {
  SUBCASE("identity") {
    const TermRatios r = term_ratios({{"a", "b"}, {"a", "b"}, {"a"}});
    CHECK(r.atr == 1.0);
    CHECK(r.acr == 1.0);
    CHECK(r.iir == 1.0);
  }
  SUBCASE("hand-enumerated set arithmetic") {
    const TermRatios r =
        term_ratios({{"sales", "revenue", "margin"}, {"sales", "margin"}, {"sales"}});
    CHECK(r.atr == 1.5);
    CHECK(r.acr == 1.0);
    CHECK(r.iir == 2.0);
  }
  SUBCASE("zero denominators stay absent") {
    const TermRatios r = term_ratios({{"a"}, {"b"}, {"c"}});  // ra n q empty
    CHECK(r.atr == 1.0);
    CHECK(!r.acr.has_value());
    CHECK(r.iir == 1.0);

    const TermRatios empty_ra = term_ratios({{"a"}, {}, {}});
    CHECK(!empty_ra.atr.has_value());
    CHECK(!empty_ra.acr.has_value());
    CHECK(!empty_ra.iir.has_value());
  }
}

TEST_CASE("term_ratios matches the brute-force oracle on random sets") {
  std::mt19937 rng(10);
  std::uniform_int_distribution<int> size(0, 20);
  std::uniform_int_distribution<int> universe(0, 39);
  const auto random_set = [&]() {
    std::set<std::string> out;
    const int n = size(rng);
    for (int i = 0; i < n; ++i) out.insert("t" + std::to_string(universe(rng)));
    return out;
  };
  for (int it = 0; it < 300; ++it) {
    const TermSets ts{random_set(), random_set(), random_set()};
    const TermRatios got = term_ratios(ts);
    const oracles::BruteRatios want = oracles::brute_term_ratios(ts.ga, ts.ra, ts.q);
    CHECK(got.atr == want.atr);
    CHECK(got.acr == want.acr);
    CHECK(got.iir == want.iir);
  }
}

TEST_CASE("aggregate_ratios reports macro means as percentages with exclusions") {
  SUBCASE("plain mean") {
    const RatioAggregate agg = aggregate_ratios({TermRatios{1.0, {}, {}}, TermRatios{0.5, {}, {}}});
    REQUIRE(agg.atr_pct.has_value());
    CHECK(*agg.atr_pct == doctest::Approx(75.0));
    CHECK(agg.atr_excluded == 0);
  }
  SUBCASE("undefined items are excluded, not coerced") {
    const RatioAggregate agg =
        aggregate_ratios({TermRatios{{}, 2.0, {}}, TermRatios{{}, std::nullopt, {}}});
    REQUIRE(agg.acr_pct.has_value());
    CHECK(*agg.acr_pct == doctest::Approx(200.0));
    CHECK(agg.acr_excluded == 1);
  }
  SUBCASE("all-undefined leaves the aggregate absent") {
    const RatioAggregate agg = aggregate_ratios({TermRatios{}, TermRatios{}});
    CHECK(!agg.atr_pct.has_value());
    CHECK(agg.atr_excluded == 2);
  }
}

TEST_CASE("tokenize_for_ngrams lowercases and splits on non-alphanumerics") {
  CHECK(tokenize_for_ngrams("The cat sat.") == std::vector<std::string>{"the", "cat", "sat"});
  CHECK(tokenize_for_ngrams("EBITDA: 24.5%") == std::vector<std::string>{"ebitda", "24", "5"});
  CHECK(tokenize_for_ngrams("").empty());
}

TEST_CASE("rouge_n on the hand-computed fixture") {
  const PRF r = rouge_n("the cat sat", "the cat", 1);
  CHECK(r.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.recall == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.f1 == doctest::Approx(0.8).epsilon(1e-12));

  const PRF same = rouge_n("sales grew a lot", "sales grew a lot", 2);
  CHECK(same.f1 == doctest::Approx(1.0));
  CHECK(rouge_n("alpha beta", "gamma delta", 1).f1 == 0.0);
  CHECK(rouge_n("", "the cat", 1).f1 == 0.0);
  CHECK_THROWS_AS(rouge_n("a", "b", 3), Error);
}

TEST_CASE("rouge_l on the hand-computed LCS fixture") {
  const PRF r = rouge_l("a b c d", "a c d b");
  CHECK(r.precision == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r.recall == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r.f1 == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(rouge_l("same text here", "same text here").f1 == doctest::Approx(1.0));
  CHECK(rouge_l("", "a b").f1 == 0.0);
}

namespace {

std::vector<std::string> random_tokens(std::mt19937& rng, int max_len, int vocab) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> word(0, vocab - 1);
  std::vector<std::string> out;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) out.push_back("w" + std::to_string(word(rng)));
  return out;
}

}  // namespace

TEST_CASE("rouge_n matches the enumeration oracle on random token lists") {
  std::mt19937 rng(42);
  for (int it = 0; it < 400; ++it) {
    const auto cand = random_tokens(rng, 30, 6);
    const auto ref = random_tokens(rng, 30, 6);
    for (int n = 1; n <= 2; ++n) {
      const PRF got = rouge_n(cand, ref, n);
      const auto [p, r, f] = oracles::brute_rouge_n(cand, ref, n);
      CHECK(got.precision == doctest::Approx(p).epsilon(1e-9));
      CHECK(got.recall == doctest::Approx(r).epsilon(1e-9));
      CHECK(got.f1 == doctest::Approx(f).epsilon(1e-9));
    }
  }
}

TEST_CASE("rouge_l matches the memoized-recursion oracle on random token lists") {
  std::mt19937 rng(43);
  for (int it = 0; it < 400; ++it) {
    const auto cand = random_tokens(rng, 15, 4);
    const auto ref = random_tokens(rng, 15, 4);
    const PRF got = rouge_l(cand, ref);
    const double lcs = static_cast<double>(oracles::lcs_memo(cand, ref));
    if (cand.empty() || ref.empty()) {
      CHECK(got.f1 == 0.0);
      continue;
    }
    CHECK(got.precision == doctest::Approx(lcs / static_cast<double>(cand.size())).epsilon(1e-9));
    CHECK(got.recall == doctest::Approx(lcs / static_cast<double>(ref.size())).epsilon(1e-9));
  }
}

TEST_CASE("bleu reproduces the pinned-variant hand computations") {
  // values computed by hand from the documented formula
  CHECK(bleu("the the the", "the cat") == doctest::Approx(0.38157141418444396).epsilon(1e-9));
  CHECK(bleu("a b c d e", "a b c d e") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bleu("", "the cat") == 0.0);
  CHECK(bleu("the cat sat on the mat", "the cat is on the mat") ==
        doctest::Approx(0.4204482076268573).epsilon(1e-9));
  CHECK(bleu("the cat", "the cat sat on the mat") ==
        doctest::Approx(0.1353352832366127).epsilon(1e-9));
  CHECK(bleu("sales", "sales growth") == doctest::Approx(0.36787944117144233).epsilon(1e-9));
  CHECK(bleu("a b c d", "x y z w") == 0.0);
  CHECK(bleu("revenue grew on strong sales and cash flow",
             "revenue grew on higher sales margins and free cash flow") ==
        doctest::Approx(0.24880469496253566).epsilon(1e-9));
}

TEST_CASE("identity scores one and scores stay in range on random inputs") {
  std::mt19937 rng(44);
  for (int it = 0; it < 200; ++it) {
    const auto tokens = random_tokens(rng, 20, 5);
    if (!tokens.empty()) {
      CHECK(rouge_n(tokens, tokens, 1).f1 == doctest::Approx(1.0));
      CHECK(rouge_l(tokens, tokens).f1 == doctest::Approx(1.0));
      CHECK(bleu(tokens, tokens) == doctest::Approx(1.0));
    }
    const auto other = random_tokens(rng, 20, 5);
    for (const double v :
         {rouge_n(tokens, other, 1).f1, rouge_n(tokens, other, 2).f1, rouge_l(tokens, other).f1,
          bleu(tokens, other)}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("n-gram scores are invariant under the tokenizer's case folding") {
  CHECK(rouge_n("The Cat Sat", "the cat sat", 1).f1 == doctest::Approx(1.0));
  CHECK(rouge_l("SALES, grew!", "sales grew").f1 == doctest::Approx(1.0));
  CHECK(bleu("Revenue GREW on STRONG sales", "revenue grew on strong sales") ==
        doctest::Approx(1.0));
}

TEST_CASE("pearson fixtures and error paths") {
  const std::vector<double> x{1, 2, 3}, y{2, 4, 6}, yr{3, 2, 1};
  CHECK(pearson(x, y) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pearson(x, yr) == doctest::Approx(-1.0).epsilon(1e-12));
  const std::vector<double> a{1, 2, 3, 4}, b{1, 3, 2, 4};
  CHECK(pearson(a, b) == doctest::Approx(0.8).epsilon(1e-12));

  const std::vector<double> shorter{1, 2};
  CHECK_THROWS_AS(pearson(a, shorter), Error);
  const std::vector<double> constant{2, 2, 2, 2};
  CHECK_THROWS_AS(pearson(a, constant), Error);
  const std::vector<double> one{1};
  CHECK_THROWS_AS(pearson(one, one), Error);
}

TEST_CASE("pearson is exactly 1 under positive affine maps") {
  std::mt19937 rng(45);
  std::uniform_real_distribution<double> value(-10, 10);
  std::uniform_real_distribution<double> slope(0.1, 5.0);
  for (int it = 0; it < 100; ++it) {
    std::vector<double> x(10), y(10);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = value(rng);
    const double a = slope(rng), b = value(rng);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
    CHECK(pearson(x, y) == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = -a * x[i] + b;
    CHECK(pearson(x, y) == doctest::Approx(-1.0).epsilon(1e-9));
  }
}

TEST_CASE("spearman fixtures") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y;
  for (const double v : x) y.push_back(std::exp(v));  // strictly increasing, nonlinear
  CHECK(spearman(x, y) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> rev(y.rbegin(), y.rend());
  CHECK(spearman(x, rev) == doctest::Approx(-1.0).epsilon(1e-12));

  const std::vector<double> tied{1, 2, 2, 3}, plain{1, 2, 3, 4};
  CHECK(spearman(tied, plain) == doctest::Approx(0.9486832980505138).epsilon(1e-12));
  CHECK(spearman(tied, plain) == doctest::Approx(oracles::brute_spearman(tied, plain)).epsilon(1e-12));
}

TEST_CASE("kendall fixtures") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> concordant{10, 20, 30, 40};
  CHECK(kendall_tau_b(x, concordant) == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<double> discordant{4, 3, 2, 1};
  CHECK(kendall_tau_b(x, discordant) == doctest::Approx(-1.0).epsilon(1e-12));
  const std::vector<double> y{1, 3, 2, 4};  // C=5, D=1 over the 6 pairs
  CHECK(kendall_tau_b(x, y) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  const std::vector<double> constant{7, 7, 7, 7};
  CHECK_THROWS_AS(kendall_tau_b(x, constant), Error);
}

namespace {

std::vector<double> random_vector(std::mt19937& rng, bool with_ties) {
  std::uniform_int_distribution<int> len(2, 50);
  const int n = len(rng);
  std::vector<double> out(static_cast<std::size_t>(n));
  if (with_ties) {
    std::uniform_int_distribution<int> small(0, 6);
    for (auto& v : out) v = small(rng);
  } else {
    std::uniform_real_distribution<double> real(-100, 100);
    for (auto& v : out) v = real(rng);
  }
  return out;
}

bool is_constant(const std::vector<double>& v) {
  for (const double x : v) {
    if (x != v[0]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("correlation coefficients match brute-force evaluation with ties") {
  std::mt19937 rng(46);
  std::bernoulli_distribution ties(0.5);
  int checked = 0;
  while (checked < 300) {
    const bool with_ties = ties(rng);
    std::vector<double> x = random_vector(rng, with_ties);
    std::vector<double> y = random_vector(rng, with_ties);
    y.resize(x.size(), 0.0);
    if (is_constant(x) || is_constant(y)) continue;
    ++checked;
    CHECK(pearson(x, y) == doctest::Approx(oracles::brute_pearson(x, y)).epsilon(1e-9));
    CHECK(spearman(x, y) == doctest::Approx(oracles::brute_spearman(x, y)).epsilon(1e-9));
    CHECK(kendall_tau_b(x, y) == doctest::Approx(oracles::brute_kendall(x, y)).epsilon(1e-9));
    for (const double v : {pearson(x, y), spearman(x, y), kendall_tau_b(x, y)}) {
      CHECK(v >= -1.0 - 1e-12);
      CHECK(v <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("spearman is invariant under strictly monotone transforms") {
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> coef(0.1, 2.0);
  for (int it = 0; it < 100; ++it) {
    std::vector<double> x = random_vector(rng, true);
    std::vector<double> y = random_vector(rng, false);
    y.resize(x.size(), 0.5);
    if (is_constant(x) || is_constant(y)) continue;
    const double a = coef(rng), b = coef(rng);
    std::vector<double> fy(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) fy[i] = a * y[i] * y[i] * y[i] + b * y[i];
    CHECK(spearman(x, fy) == doctest::Approx(spearman(x, y)).epsilon(1e-9));
  }
}

TEST_CASE("correlations bundles all three coefficients") {
  const std::vector<double> x{1, 2, 3, 4}, y{1, 3, 2, 4};
  const CorrelationReport rep = correlations(x, y);
  CHECK(rep.pearson == doctest::Approx(0.8));
  CHECK(rep.kendall == doctest::Approx(2.0 / 3.0));
  CHECK(rep.n == 4);
}
