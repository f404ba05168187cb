#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "finqa/text.hpp"

namespace finqa {

// A Term is always normalized: lower-cased, punctuation stripped at word
// boundaries, exactly one space between words, never empty.
using Term = std::string;

// Throws Error when the input normalizes to nothing.
Term normalize_term(std::string_view raw);

struct TermMatch {
  Term term;
  std::size_t start = 0;  // byte offsets into the source text
  std::size_t end = 0;
};

// Financial-term dictionary with a compiled word-level matcher. Immutable
// after construction; every query is const and safe to call concurrently.
class TermLexicon {
 public:
  // One term per line, '#' comments and blank lines ignored. Duplicate
  // normalized terms across files collapse to one entry.
  static TermLexicon load(const std::vector<std::string>& paths, bool plural_fold = false);

  // Builds from in-memory strings (normalizing each). Throws on zero terms.
  static TermLexicon from_terms(const std::vector<std::string>& raw_terms,
                                bool plural_fold = false);

  const std::set<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool contains(const Term& t) const { return terms_.count(t) > 0; }
  bool plural_fold() const { return plural_fold_; }

  // Scans the text for lexicon terms. Longest match wins at each word
  // position; scanning resumes after a match, so spans never overlap and
  // "income" cannot fire inside a matched "net income". Spans are sorted
  // by start offset and aligned to word boundaries of the source.
  std::vector<TermMatch> match_spans(std::string_view text) const;

  // The distinct-term projection of match_spans.
  std::set<Term> extract_terms(std::string_view text) const;

 private:
  struct Node {
    std::map<std::string, int> children;  // next word -> node index
    int term = -1;                        // index into term_list_ when a term ends here
  };

  TermLexicon() = default;
  void compile();

  std::set<Term> terms_;
  std::vector<Term> term_list_;
  std::vector<Node> nodes_;
  bool plural_fold_ = false;
};

}  // namespace finqa
