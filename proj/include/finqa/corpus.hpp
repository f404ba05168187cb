#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "finqa/lexicon.hpp"

namespace finqa {

enum class ArgLabel { Claim, Premise, Scenario };

std::string to_string(ArgLabel label);
ArgLabel parse_arg_label(std::string_view raw);  // case-insensitive; throws on unknown

struct LabeledSentence {
  std::string id;
  std::string doc_id;
  int sent_idx = 0;
  std::string text;
  ArgLabel label = ArgLabel::Claim;
  std::optional<std::string> claim_ref;

  bool operator==(const LabeledSentence&) const = default;
};

// One question from the call's Q&A session, the manager's recorded answer
// (the ground truth for evaluation), and optionally the prepared remarks
// delivered before the session.
struct QAPair {
  std::string id;
  std::string question;
  std::string reference_answer;
  std::optional<std::string> prepared_remarks;
  std::optional<std::string> company;
  std::optional<std::string> call_id;

  bool operator==(const QAPair&) const = default;
};

struct PremiseClaimPair {
  LabeledSentence premise;
  LabeledSentence claim;
};

nlohmann::json qa_to_json(const QAPair& qa);
QAPair qa_from_json(const nlohmann::json& row);

std::vector<QAPair> load_qa(const std::string& path);
void save_qa(const std::string& path, const std::vector<QAPair>& pairs);

// Keeps exactly the pairs whose question AND reference answer each contain
// at least one lexicon term; order preserved.
std::vector<QAPair> filter_term_bearing(const std::vector<QAPair>& pairs, const TermLexicon& lex);

std::vector<LabeledSentence> load_labeled_sentences(const std::string& path);

struct PairingResult {
  std::vector<PremiseClaimPair> pairs;
  int unpaired_premises = 0;
};

// Pairs every premise with its claim: an explicit claim_ref wins; otherwise
// the nearest claim in the same document within +/- window sentence
// positions, ties broken toward the preceding claim. Premises with no claim
// in range are counted, not fatal. Scenario sentences never pair.
PairingResult pair_premise_claim(const std::vector<LabeledSentence>& sentences, int window);

std::vector<PremiseClaimPair> load_pairs(const std::string& path);
void save_pairs(const std::string& path, const std::vector<PremiseClaimPair>& pairs);

}  // namespace finqa
