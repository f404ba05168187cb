#include "finqa/kg.hpp"

#include <algorithm>
#include <charconv>

#include "finqa/error.hpp"
#include "finqa/io.hpp"

namespace finqa {

NeutralizeMode parse_neutralize_mode(std::string_view raw) {
  if (raw == "remove-both") return NeutralizeMode::RemoveBoth;
  if (raw == "keep-dominant") return NeutralizeMode::KeepDominant;
  throw Error("unknown neutralize mode: \"" + std::string(raw) +
              "\" (expected remove-both or keep-dominant)");
}

std::string to_string(NeutralizeMode mode) {
  return mode == NeutralizeMode::RemoveBoth ? "remove-both" : "keep-dominant";
}

RetrievalMode parse_retrieval_mode(std::string_view raw) {
  if (raw == "all") return RetrievalMode::All;
  if (raw == "top-n" || raw == "topn") return RetrievalMode::TopN;
  throw Error("unknown retrieval mode: \"" + std::string(raw) + "\" (expected all or top-n)");
}

void CausalGraph::add_edge(const Term& cause, const Term& effect, std::uint64_t weight) {
  if (cause == effect) throw Error("self-loop: " + cause + " -> " + effect);
  if (weight == 0) throw Error("edge weight must be >= 1");
  auto [it, inserted] = out_[cause].try_emplace(effect, weight);
  if (inserted) {
    ++edges_;
  } else {
    it->second += weight;
  }
}

std::uint64_t CausalGraph::weight(const Term& cause, const Term& effect) const {
  auto c = out_.find(cause);
  if (c == out_.end()) return 0;
  auto e = c->second.find(effect);
  return e == c->second.end() ? 0 : e->second;
}

std::set<Term> CausalGraph::entities() const {
  std::set<Term> out;
  for (const auto& [cause, effects] : out_) {
    out.insert(cause);
    for (const auto& [effect, w] : effects) out.insert(effect);
  }
  return out;
}

KgStats CausalGraph::stats() const { return KgStats{entities().size(), edge_count()}; }

CausalGraph build_graph(const std::vector<PremiseClaimPair>& pairs, const TermLexicon& lex) {
  CausalGraph g;
  for (const PremiseClaimPair& pair : pairs) {
    const std::set<Term> causes = lex.extract_terms(pair.premise.text);
    const std::set<Term> effects = lex.extract_terms(pair.claim.text);
    for (const Term& cause : causes) {
      for (const Term& effect : effects) {
        if (cause != effect) g.add_edge(cause, effect, 1);
      }
    }
  }
  return g;
}

CausalGraph neutralize(const CausalGraph& g, NeutralizeMode mode) {
  CausalGraph out;
  for (const auto& [cause, effects] : g.adjacency()) {
    for (const auto& [effect, w] : effects) {
      const std::uint64_t reverse = g.weight(effect, cause);
      if (reverse == 0) {
        out.add_edge(cause, effect, w);
        continue;
      }
      // mutual pair: drop both, or keep the strictly dominant direction
      if (mode == NeutralizeMode::KeepDominant && w > reverse) out.add_edge(cause, effect, w);
    }
  }
  return out;
}

std::vector<Term> retrieve_effects(const CausalGraph& g, const std::set<Term>& causes,
                                   RetrievalMode mode, std::optional<int> top_n) {
  if (mode == RetrievalMode::TopN && (!top_n || *top_n < 1))
    throw Error("top-n retrieval requires n >= 1");
  std::map<Term, std::uint64_t> total;
  for (const Term& cause : causes) {
    auto it = g.adjacency().find(cause);
    if (it == g.adjacency().end()) continue;
    for (const auto& [effect, w] : it->second) total[effect] += w;
  }
  std::vector<std::pair<Term, std::uint64_t>> ranked(total.begin(), total.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<Term> out;
  out.reserve(ranked.size());
  for (const auto& [term, w] : ranked) out.push_back(term);
  if (mode == RetrievalMode::TopN && out.size() > static_cast<std::size_t>(*top_n))
    out.resize(static_cast<std::size_t>(*top_n));
  return out;
}

Retriever::Retriever(const CausalGraph& g) : g_(&g) {
  std::vector<std::string> causes;
  causes.reserve(g.adjacency().size());
  for (const auto& [cause, effects] : g.adjacency()) causes.push_back(cause);
  if (!causes.empty()) cause_lex_ = TermLexicon::from_terms(causes);
}

std::set<Term> Retriever::causes_in(std::string_view question) const {
  if (!cause_lex_) return {};
  return cause_lex_->extract_terms(question);
}

std::vector<Term> Retriever::for_question(std::string_view question, RetrievalMode mode,
                                          std::optional<int> top_n) const {
  return retrieve_effects(*g_, causes_in(question), mode, top_n);
}

void save_graph(const std::string& path, const CausalGraph& g) {
  std::string content;
  for (const auto& [cause, effects] : g.adjacency()) {
    for (const auto& [effect, w] : effects) {
      content += cause;
      content.push_back('\t');
      content += effect;
      content.push_back('\t');
      content += std::to_string(w);
      content.push_back('\n');
    }
  }
  write_file_atomic(path, content);
}

CausalGraph load_graph(const std::string& path, std::vector<std::string>* warnings) {
  const std::string content = read_text_file(path);
  if (!is_valid_utf8(content)) throw Error(path + ": not valid UTF-8");
  CausalGraph g;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string line = content.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);

    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
      throw Error(where + ": expected cause<TAB>effect<TAB>weight");

    Term cause, effect;
    try {
      cause = normalize_term(line.substr(0, t1));
      effect = normalize_term(line.substr(t1 + 1, t2 - t1 - 1));
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    const std::string weight_str = line.substr(t2 + 1);
    std::uint64_t weight = 0;
    auto [ptr, ec] = std::from_chars(weight_str.data(), weight_str.data() + weight_str.size(), weight);
    if (ec != std::errc{} || ptr != weight_str.data() + weight_str.size())
      throw Error(where + ": non-integer weight \"" + weight_str + "\"");
    if (weight == 0) throw Error(where + ": weight must be >= 1");
    if (cause == effect) throw Error(where + ": self-loop " + cause + " -> " + effect);

    if (g.has_edge(cause, effect) && warnings != nullptr)
      warnings->push_back(where + ": duplicate edge " + cause + " -> " + effect +
                          "; aggregating weights");
    g.add_edge(cause, effect, weight);
  }
  return g;
}

}  // namespace finqa
