#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "finqa/corpus.hpp"
#include "finqa/lexicon.hpp"

namespace finqa {

enum class NeutralizeMode { RemoveBoth, KeepDominant };
NeutralizeMode parse_neutralize_mode(std::string_view raw);
std::string to_string(NeutralizeMode mode);

enum class RetrievalMode { All, TopN };
RetrievalMode parse_retrieval_mode(std::string_view raw);

struct KgStats {
  std::size_t entity_count = 0;
  std::size_t relation_count = 0;
  bool operator==(const KgStats&) const = default;
};

// Weighted directed graph over normalized terms. An edge cause->effect
// carries the number of premise/claim pairs supporting it. Self-loops are
// forbidden. Immutable once built/loaded; queries are concurrency-safe.
class CausalGraph {
 public:
  using EffectMap = std::map<Term, std::uint64_t>;
  using Adjacency = std::map<Term, EffectMap>;

  void add_edge(const Term& cause, const Term& effect, std::uint64_t weight = 1);
  std::uint64_t weight(const Term& cause, const Term& effect) const;  // 0 when absent
  bool has_edge(const Term& cause, const Term& effect) const { return weight(cause, effect) > 0; }

  const Adjacency& adjacency() const { return out_; }
  std::size_t edge_count() const { return edges_; }
  bool empty() const { return edges_ == 0; }
  std::set<Term> entities() const;
  KgStats stats() const;

  bool operator==(const CausalGraph& other) const { return out_ == other.out_; }

 private:
  Adjacency out_;
  std::size_t edges_ = 0;
};

// Every term of the premise is a cause of every term of the claim; each
// pair contributes weight 1 per (cause, effect) combination; self-loops
// are suppressed.
CausalGraph build_graph(const std::vector<PremiseClaimPair>& pairs, const TermLexicon& lex);

// Resolves mutual causality (both a->b and b->a present). RemoveBoth drops
// both directions; KeepDominant keeps the higher-weight one and drops both
// on equal weights. Idempotent in both modes.
CausalGraph neutralize(const CausalGraph& g, NeutralizeMode mode);

// Union of out-neighbors of the given causes, ordered by descending total
// supporting weight, ties lexicographic. TopN truncates to the first n.
std::vector<Term> retrieve_effects(const CausalGraph& g, const std::set<Term>& causes,
                                   RetrievalMode mode = RetrievalMode::All,
                                   std::optional<int> top_n = std::nullopt);

// Matches a question against the graph's own cause entities and retrieves
// their effects. Builds the cause-side matcher once.
class Retriever {
 public:
  explicit Retriever(const CausalGraph& g);
  std::set<Term> causes_in(std::string_view question) const;
  std::vector<Term> for_question(std::string_view question,
                                 RetrievalMode mode = RetrievalMode::All,
                                 std::optional<int> top_n = std::nullopt) const;

 private:
  const CausalGraph* g_;
  std::optional<TermLexicon> cause_lex_;  // nullopt when the graph has no causes
};

// TSV: cause<TAB>effect<TAB>weight, UTF-8, sorted by (cause, effect).
void save_graph(const std::string& path, const CausalGraph& g);

// Terms are normalized on load; self-loops are rejected, duplicate keys
// aggregate their weights with a warning.
CausalGraph load_graph(const std::string& path, std::vector<std::string>* warnings = nullptr);

}  // namespace finqa
