#include "finqa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "finqa/error.hpp"
#include "finqa/text.hpp"

namespace finqa {

TermSets term_sets(const TermLexicon& lex, std::string_view question,
                   std::string_view generated_answer, std::string_view reference_answer) {
  return TermSets{lex.extract_terms(generated_answer), lex.extract_terms(reference_answer),
                  lex.extract_terms(question)};
}

namespace {

std::size_t intersection_size(const std::set<Term>& a, const std::set<Term>& b) {
  std::size_t n = 0;
  for (const Term& t : a) n += b.count(t);
  return n;
}

}  // namespace

TermRatios term_ratios(const TermSets& ts) {
  TermRatios r;
  if (!ts.ra.empty())
    r.atr = static_cast<double>(ts.ga.size()) / static_cast<double>(ts.ra.size());
  const std::size_t ga_q = intersection_size(ts.ga, ts.q);
  const std::size_t ra_q = intersection_size(ts.ra, ts.q);
  if (ra_q > 0) r.acr = static_cast<double>(ga_q) / static_cast<double>(ra_q);
  const std::size_t ga_not_q = ts.ga.size() - ga_q;
  const std::size_t ra_not_q = ts.ra.size() - ra_q;
  if (ra_not_q > 0) r.iir = static_cast<double>(ga_not_q) / static_cast<double>(ra_not_q);
  return r;
}

RatioAggregate aggregate_ratios(const std::vector<TermRatios>& items) {
  RatioAggregate agg;
  agg.items = static_cast<int>(items.size());
  double atr_sum = 0, acr_sum = 0, iir_sum = 0;
  int atr_n = 0, acr_n = 0, iir_n = 0;
  for (const TermRatios& r : items) {
    if (r.atr) {
      atr_sum += *r.atr;
      ++atr_n;
    } else {
      ++agg.atr_excluded;
    }
    if (r.acr) {
      acr_sum += *r.acr;
      ++acr_n;
    } else {
      ++agg.acr_excluded;
    }
    if (r.iir) {
      iir_sum += *r.iir;
      ++iir_n;
    } else {
      ++agg.iir_excluded;
    }
  }
  if (atr_n > 0) agg.atr_pct = 100.0 * atr_sum / atr_n;
  if (acr_n > 0) agg.acr_pct = 100.0 * acr_sum / acr_n;
  if (iir_n > 0) agg.iir_pct = 100.0 * iir_sum / iir_n;
  return agg;
}

std::vector<std::string> tokenize_for_ngrams(std::string_view text) {
  std::vector<std::string> out;
  for (WordToken& t : word_tokens(text)) out.push_back(std::move(t.norm));
  return out;
}

// ---------------------------------------------------------------------------
// ROUGE

namespace {

// n-grams as joined keys; '\x1f' cannot appear inside a token
std::unordered_map<std::string, int> ngram_counts(std::span<const std::string> tokens, int n) {
  std::unordered_map<std::string, int> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
    std::string key;
    for (int k = 0; k < n; ++k) {
      if (k > 0) key.push_back('\x1f');
      key += tokens[i + static_cast<std::size_t>(k)];
    }
    ++counts[key];
  }
  return counts;
}

PRF prf_from_overlap(double overlap, double cand_total, double ref_total) {
  PRF out;
  if (cand_total <= 0 || ref_total <= 0) return out;
  out.precision = overlap / cand_total;
  out.recall = overlap / ref_total;
  if (out.precision + out.recall > 0)
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

}  // namespace

PRF rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
            int n) {
  if (n != 1 && n != 2) throw Error("rouge_n supports n = 1 or 2");
  const auto cand = ngram_counts(candidate, n);
  const auto ref = ngram_counts(reference, n);
  double overlap = 0;
  double cand_total = 0, ref_total = 0;
  for (const auto& [g, c] : cand) {
    cand_total += c;
    auto it = ref.find(g);
    if (it != ref.end()) overlap += std::min(c, it->second);
  }
  for (const auto& [g, c] : ref) ref_total += c;
  return prf_from_overlap(overlap, cand_total, ref_total);
}

PRF rouge_n(std::string_view candidate, std::string_view reference, int n) {
  const auto c = tokenize_for_ngrams(candidate);
  const auto r = tokenize_for_ngrams(reference);
  return rouge_n(std::span<const std::string>(c), std::span<const std::string>(r), n);
}

namespace {

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1])
        cur[j] = prev[j - 1] + 1;
      else
        cur[j] = std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

PRF rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
  const double lcs = static_cast<double>(lcs_length(candidate, reference));
  return prf_from_overlap(lcs, static_cast<double>(candidate.size()),
                          static_cast<double>(reference.size()));
}

PRF rouge_l(std::string_view candidate, std::string_view reference) {
  const auto c = tokenize_for_ngrams(candidate);
  const auto r = tokenize_for_ngrams(reference);
  return rouge_l(std::span<const std::string>(c), std::span<const std::string>(r));
}

// ---------------------------------------------------------------------------
// BLEU

double bleu(std::span<const std::string> candidate, std::span<const std::string> reference) {
  if (candidate.empty()) return 0.0;
  const int max_order = std::min<int>(4, static_cast<int>(candidate.size()));
  const double weight = 1.0 / max_order;
  double log_sum = 0.0;
  for (int n = 1; n <= max_order; ++n) {
    const auto cand = ngram_counts(candidate, n);
    const auto ref = ngram_counts(reference, n);
    double matches = 0;
    for (const auto& [g, c] : cand) {
      auto it = ref.find(g);
      if (it != ref.end()) matches += std::min(c, it->second);
    }
    const double total = static_cast<double>(candidate.size()) - n + 1;
    double p;
    if (n >= 2 && matches == 0) {
      p = (matches + 1.0) / (total + 1.0);
    } else {
      if (matches == 0) return 0.0;  // unigram precision zero: no overlap at all
      p = matches / total;
    }
    log_sum += weight * std::log(p);
  }
  double bp = 1.0;
  if (candidate.size() < reference.size())
    bp = std::exp(1.0 - static_cast<double>(reference.size()) / static_cast<double>(candidate.size()));
  return bp * std::exp(log_sum);
}

double bleu(std::string_view candidate, std::string_view reference) {
  const auto c = tokenize_for_ngrams(candidate);
  const auto r = tokenize_for_ngrams(reference);
  return bleu(std::span<const std::string>(c), std::span<const std::string>(r));
}

NgramScores score_ngrams(std::string_view candidate, std::string_view reference) {
  const auto c = tokenize_for_ngrams(candidate);
  const auto r = tokenize_for_ngrams(reference);
  const std::span<const std::string> cs(c), rs(r);
  return NgramScores{rouge_n(cs, rs, 1).f1, rouge_n(cs, rs, 2).f1, rouge_l(cs, rs).f1,
                     bleu(cs, rs)};
}

// ---------------------------------------------------------------------------
// Correlations

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw Error("pearson: need at least 2 samples");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) throw Error("pearson: undefined for a constant vector");
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    // positions i..j (0-based) share the mean of ranks i+1..j+1
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("spearman: length mismatch");
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  try {
    return pearson(rx, ry);
  } catch (const Error&) {
    throw Error("spearman: undefined for a constant vector");
  }
}

namespace {

// counts pairs (i < j) with y[i] > y[j] via merge sort
std::uint64_t count_inversions(std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return 0;
  std::vector<double> buf(n);
  std::uint64_t inversions = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
      const std::size_t mid = lo + width;
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t a = lo, b = mid, o = lo;
      while (a < mid && b < hi) {
        if (v[a] <= v[b]) {
          buf[o++] = v[a++];
        } else {
          inversions += mid - a;
          buf[o++] = v[b++];
        }
      }
      while (a < mid) buf[o++] = v[a++];
      while (b < hi) buf[o++] = v[b++];
      std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
                buf.begin() + static_cast<std::ptrdiff_t>(hi),
                v.begin() + static_cast<std::ptrdiff_t>(lo));
    }
  }
  return inversions;
}

std::uint64_t tie_pair_count(std::span<const double> sorted_keys) {
  std::uint64_t pairs = 0;
  std::size_t i = 0;
  while (i < sorted_keys.size()) {
    std::size_t j = i;
    while (j + 1 < sorted_keys.size() && sorted_keys[j + 1] == sorted_keys[i]) ++j;
    const std::uint64_t run = j - i + 1;
    pairs += run * (run - 1) / 2;
    i = j + 1;
  }
  return pairs;
}

}  // namespace

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("kendall: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw Error("kendall: need at least 2 samples");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }

  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t n1 = tie_pair_count(xs);  // pairs tied in x (incl. tied in both)

  // pairs tied in both x and y
  std::uint64_t n3 = 0;
  {
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && xs[j + 1] == xs[i] && ys[j + 1] == ys[i]) ++j;
      const std::uint64_t run = j - i + 1;
      n3 += run * (run - 1) / 2;
      i = j + 1;
    }
  }

  std::vector<double> ys_for_ties = ys;
  std::sort(ys_for_ties.begin(), ys_for_ties.end());
  const std::uint64_t n2 = tie_pair_count(ys_for_ties);  // pairs tied in y (incl. both)

  std::vector<double> ys_merge = ys;
  const std::uint64_t discordant = count_inversions(ys_merge);

  // concordant + discordant = n0 - n1 - n2 + n3
  const double cd = static_cast<double>(n0) - static_cast<double>(n1) -
                    static_cast<double>(n2) + static_cast<double>(n3);
  const double numerator = cd - 2.0 * static_cast<double>(discordant);
  const double denom_x = static_cast<double>(n0) - static_cast<double>(n1);
  const double denom_y = static_cast<double>(n0) - static_cast<double>(n2);
  if (denom_x <= 0 || denom_y <= 0) throw Error("kendall: undefined for a constant vector");
  return numerator / std::sqrt(denom_x * denom_y);
}

CorrelationReport correlations(std::span<const double> x, std::span<const double> y) {
  return CorrelationReport{pearson(x, y), spearman(x, y), kendall_tau_b(x, y),
                           static_cast<int>(x.size())};
}

}  // namespace finqa
