#pragma once

// Test-side oracles, written independently of the library implementations
// they check: a window-scanning term matcher, count-based n-gram overlap,
// memoized LCS, textbook correlation formulas, and a full-scan retriever.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace oracles {

inline std::vector<std::string> tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    const bool word =
        (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
    if (word) {
      cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::string join(const std::vector<std::string>& words, std::size_t from, std::size_t len) {
  std::string out;
  for (std::size_t k = 0; k < len; ++k) {
    if (k > 0) out.push_back(' ');
    out += words[from + k];
  }
  return out;
}

// Tries every lexicon term against every word-aligned window; longest match
// wins, scanning resumes after a match.
inline std::set<std::string> naive_extract(const std::set<std::string>& lexicon,
                                           const std::string& text) {
  std::size_t max_words = 0;
  for (const std::string& term : lexicon) {
    const std::size_t words = 1 + static_cast<std::size_t>(std::count(term.begin(), term.end(), ' '));
    max_words = std::max(max_words, words);
  }
  const std::vector<std::string> toks = tokens(text);
  std::set<std::string> found;
  std::size_t i = 0;
  while (i < toks.size()) {
    std::size_t best = 0;
    std::string best_term;
    for (std::size_t len = 1; len <= max_words && i + len <= toks.size(); ++len) {
      const std::string window = join(toks, i, len);
      if (lexicon.count(window) > 0 && len > best) {
        best = len;
        best_term = window;
      }
    }
    if (best > 0) {
      found.insert(best_term);
      i += best;
    } else {
      ++i;
    }
  }
  return found;
}

// --- n-gram metrics ---------------------------------------------------------

// clipped overlap counted by direct enumeration (no hash maps)
inline std::tuple<double, double, double> brute_rouge_n(const std::vector<std::string>& cand,
                                                        const std::vector<std::string>& ref,
                                                        int n) {
  const auto grams = [n](const std::vector<std::string>& t) {
    std::vector<std::vector<std::string>> out;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= t.size(); ++i)
      out.push_back(std::vector<std::string>(t.begin() + static_cast<std::ptrdiff_t>(i),
                                             t.begin() + static_cast<std::ptrdiff_t>(i) + n));
    return out;
  };
  const auto cg = grams(cand);
  const auto rg = grams(ref);
  if (cg.empty() || rg.empty()) return {0.0, 0.0, 0.0};
  double overlap = 0;
  std::vector<bool> used(rg.size(), false);
  for (const auto& g : cg) {
    for (std::size_t j = 0; j < rg.size(); ++j) {
      if (!used[j] && rg[j] == g) {
        used[j] = true;
        overlap += 1;
        break;
      }
    }
  }
  const double p = overlap / static_cast<double>(cg.size());
  const double r = overlap / static_cast<double>(rg.size());
  const double f = (p + r > 0) ? 2 * p * r / (p + r) : 0.0;
  return {p, r, f};
}

inline std::size_t lcs_memo_impl(const std::vector<std::string>& a,
                                 const std::vector<std::string>& b, std::size_t i, std::size_t j,
                                 std::vector<std::vector<int>>& memo) {
  if (i == a.size() || j == b.size()) return 0;
  if (memo[i][j] >= 0) return static_cast<std::size_t>(memo[i][j]);
  std::size_t best;
  if (a[i] == b[j]) {
    best = 1 + lcs_memo_impl(a, b, i + 1, j + 1, memo);
  } else {
    best = std::max(lcs_memo_impl(a, b, i + 1, j, memo), lcs_memo_impl(a, b, i, j + 1, memo));
  }
  memo[i][j] = static_cast<int>(best);
  return best;
}

inline std::size_t lcs_memo(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::vector<int>> memo(a.size(), std::vector<int>(b.size(), -1));
  return lcs_memo_impl(a, b, 0, 0, memo);
}

// --- correlations -----------------------------------------------------------

inline double brute_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
  }
  const double dn = static_cast<double>(n);
  const double num = dn * sxy - sx * sy;
  const double den = std::sqrt(dn * sxx - sx * sx) * std::sqrt(dn * syy - sy * sy);
  return num / den;
}

inline std::vector<double> brute_ranks(const std::vector<double>& v) {
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t less = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++less;
      if (v[j] == v[i]) ++equal;
    }
    ranks[i] = static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0;
  }
  return ranks;
}

inline double brute_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return brute_pearson(brute_ranks(x), brute_ranks(y));
}

// direct pair enumeration of the tau-b definition
inline double brute_kendall(const std::vector<double>& x, const std::vector<double>& y) {
  double concordant = 0, discordant = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) {
        tx += 1;
      } else if (dy == 0) {
        ty += 1;
      } else if (dx * dy > 0) {
        concordant += 1;
      } else {
        discordant += 1;
      }
    }
  }
  const double c = concordant, d = discordant;
  return (c - d) / std::sqrt((c + d + tx) * (c + d + ty));
}

// --- retrieval --------------------------------------------------------------

struct Edge {
  std::string cause;
  std::string effect;
  std::uint64_t weight;
};

// scans the full edge list, then sorts by (total weight desc, term asc)
inline std::vector<std::string> brute_retrieve(const std::vector<Edge>& edges,
                                               const std::set<std::string>& causes) {
  std::map<std::string, std::uint64_t> totals;
  for (const Edge& e : edges) {
    if (causes.count(e.cause) > 0) totals[e.effect] += e.weight;
  }
  std::vector<std::pair<std::string, std::uint64_t>> ranked(totals.begin(), totals.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  for (const auto& [term, w] : ranked) out.push_back(term);
  return out;
}

// --- term ratios ------------------------------------------------------------

struct BruteRatios {
  std::optional<double> atr, acr, iir;
};

inline BruteRatios brute_term_ratios(const std::set<std::string>& ga,
                                     const std::set<std::string>& ra,
                                     const std::set<std::string>& q) {
  BruteRatios out;
  double ga_n = 0, ra_n = 0, ga_q = 0, ra_q = 0, ga_not_q = 0, ra_not_q = 0;
  for (const auto& t : ga) {
    ga_n += 1;
    if (q.count(t) > 0) ga_q += 1;
    else ga_not_q += 1;
  }
  for (const auto& t : ra) {
    ra_n += 1;
    if (q.count(t) > 0) ra_q += 1;
    else ra_not_q += 1;
  }
  if (ra_n > 0) out.atr = ga_n / ra_n;
  if (ra_q > 0) out.acr = ga_q / ra_q;
  if (ra_not_q > 0) out.iir = ga_not_q / ra_not_q;
  return out;
}

}  // namespace oracles
