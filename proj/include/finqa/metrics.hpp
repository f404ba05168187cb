#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finqa/lexicon.hpp"

namespace finqa {

struct TermSets {
  std::set<Term> ga;  // terms of the generated answer
  std::set<Term> ra;  // terms of the reference answer
  std::set<Term> q;   // terms of the question
};

TermSets term_sets(const TermLexicon& lex, std::string_view question,
                   std::string_view generated_answer, std::string_view reference_answer);

// Each ratio is absent when its denominator is zero; values may exceed 1.
//   atr = |ga| / |ra|
//   acr = |ga n q| / |ra n q|
//   iir = |ga \ q| / |ra \ q|
struct TermRatios {
  std::optional<double> atr;
  std::optional<double> acr;
  std::optional<double> iir;
};

TermRatios term_ratios(const TermSets& ts);

// Macro mean over defined items, times 100. Items with an undefined metric
// are excluded from that metric's mean and counted.
struct RatioAggregate {
  std::optional<double> atr_pct;
  std::optional<double> acr_pct;
  std::optional<double> iir_pct;
  int atr_excluded = 0;
  int acr_excluded = 0;
  int iir_excluded = 0;
  int items = 0;

  bool operator==(const RatioAggregate&) const = default;
};

RatioAggregate aggregate_ratios(const std::vector<TermRatios>& items);

// Lowercase; maximal runs of letters/digits are tokens, everything else is
// a separator ("EBITDA: 24.5%" -> [ebitda, 24, 5]).
std::vector<std::string> tokenize_for_ngrams(std::string_view text);

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

PRF rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference, int n);
PRF rouge_n(std::string_view candidate, std::string_view reference, int n);

PRF rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);
PRF rouge_l(std::string_view candidate, std::string_view reference);

// Sentence-level BLEU-4, uniform 1/4 weights. Clipped modified precisions;
// add-one smoothing on numerator and denominator for any order n >= 2 with
// zero matches; brevity penalty exp(1 - |ref|/|cand|) when |cand| < |ref|.
// Candidates shorter than 4 tokens use orders up to |cand| with uniform
// weights renormalized. Empty candidate scores 0.
double bleu(std::span<const std::string> candidate, std::span<const std::string> reference);
double bleu(std::string_view candidate, std::string_view reference);

struct NgramScores {
  double rouge1_f = 0.0;
  double rouge2_f = 0.0;
  double rougeL_f = 0.0;
  double bleu = 0.0;
};

NgramScores score_ngrams(std::string_view candidate, std::string_view reference);

double pearson(std::span<const double> x, std::span<const double> y);

// Average ranks: ties receive the mean of the rank positions they occupy.
std::vector<double> average_ranks(std::span<const double> v);

double spearman(std::span<const double> x, std::span<const double> y);

// Tau-b with tie corrections: (C - D) / sqrt((C + D + Tx)(C + D + Ty)).
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

struct CorrelationReport {
  double pearson = 0.0;
  double spearman = 0.0;
  double kendall = 0.0;
  int n = 0;
};

CorrelationReport correlations(std::span<const double> x, std::span<const double> y);

}  // namespace finqa
