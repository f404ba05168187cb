#include "finqa/lexicon.hpp"

#include <fstream>
#include <sstream>

#include "finqa/error.hpp"
#include "finqa/io.hpp"

namespace finqa {

Term normalize_term(std::string_view raw) {
  std::string norm = normalized_or_empty(raw);
  if (norm.empty()) throw Error("empty after normalization: \"" + std::string(raw) + "\"");
  return norm;
}

namespace {

std::vector<std::string> split_words(const Term& term) {
  std::vector<std::string> words;
  std::istringstream in(term);
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

bool is_blank(std::string_view line) {
  for (char c : line) {
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

}  // namespace

TermLexicon TermLexicon::load(const std::vector<std::string>& paths, bool plural_fold) {
  TermLexicon lex;
  lex.plural_fold_ = plural_fold;
  for (const std::string& path : paths) {
    const std::string content = read_text_file(path);
    if (!is_valid_utf8(content)) throw Error(path + ": not valid UTF-8");
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (is_blank(line)) continue;
      std::size_t first = line.find_first_not_of(" \t");
      if (line[first] == '#') continue;
      try {
        lex.terms_.insert(normalize_term(line));
      } catch (const Error& e) {
        throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  if (lex.terms_.empty()) throw Error("empty lexicon: no terms after filtering");
  lex.compile();
  return lex;
}

TermLexicon TermLexicon::from_terms(const std::vector<std::string>& raw_terms, bool plural_fold) {
  TermLexicon lex;
  lex.plural_fold_ = plural_fold;
  for (const std::string& raw : raw_terms) lex.terms_.insert(normalize_term(raw));
  if (lex.terms_.empty()) throw Error("empty lexicon: no terms after filtering");
  lex.compile();
  return lex;
}

void TermLexicon::compile() {
  term_list_.assign(terms_.begin(), terms_.end());
  nodes_.clear();
  nodes_.emplace_back();  // root
  for (std::size_t t = 0; t < term_list_.size(); ++t) {
    int node = 0;
    for (const std::string& word : split_words(term_list_[t])) {
      auto [it, inserted] = nodes_[node].children.try_emplace(word, 0);
      if (inserted) {
        it->second = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
      }
      node = it->second;
    }
    nodes_[node].term = static_cast<int>(t);
  }
}

std::vector<TermMatch> TermLexicon::match_spans(std::string_view text) const {
  const std::vector<WordToken> toks = word_tokens(text);
  std::vector<TermMatch> out;
  std::size_t i = 0;
  while (i < toks.size()) {
    int node = 0;
    int best_term = -1;
    std::size_t best_len = 0;
    for (std::size_t j = i; j < toks.size(); ++j) {
      const Node& n = nodes_[static_cast<std::size_t>(node)];
      const std::string& w = toks[j].norm;
      auto exact = n.children.find(w);
      // Plural folding only applies to the final word of a term: a stripped
      // token may complete a term here but never extends the walk.
      if (plural_fold_ && w.size() > 1 && w.back() == 's') {
        auto fold = n.children.find(w.substr(0, w.size() - 1));
        if (fold != n.children.end() && nodes_[static_cast<std::size_t>(fold->second)].term >= 0) {
          const std::size_t len = j - i + 1;
          const bool exact_ends_here =
              exact != n.children.end() &&
              nodes_[static_cast<std::size_t>(exact->second)].term >= 0;
          if (len > best_len && !exact_ends_here) {
            best_term = nodes_[static_cast<std::size_t>(fold->second)].term;
            best_len = len;
          }
        }
      }
      if (exact == n.children.end()) break;
      node = exact->second;
      if (nodes_[static_cast<std::size_t>(node)].term >= 0) {
        const std::size_t len = j - i + 1;
        if (len >= best_len) {
          best_term = nodes_[static_cast<std::size_t>(node)].term;
          best_len = len;
        }
      }
    }
    if (best_term >= 0) {
      out.push_back(TermMatch{term_list_[static_cast<std::size_t>(best_term)], toks[i].begin,
                              toks[i + best_len - 1].end});
      i += best_len;
    } else {
      ++i;
    }
  }
  return out;
}

std::set<Term> TermLexicon::extract_terms(std::string_view text) const {
  std::set<Term> out;
  for (const TermMatch& m : match_spans(text)) out.insert(m.term);
  return out;
}

}  // namespace finqa
