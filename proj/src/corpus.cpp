#include "finqa/corpus.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "finqa/error.hpp"
#include "finqa/io.hpp"

namespace finqa {

std::string to_string(ArgLabel label) {
  switch (label) {
    case ArgLabel::Claim: return "claim";
    case ArgLabel::Premise: return "premise";
    case ArgLabel::Scenario: return "scenario";
  }
  return "claim";
}

ArgLabel parse_arg_label(std::string_view raw) {
  std::string low;
  low.reserve(raw.size());
  for (char c : raw) low.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  if (low == "claim") return ArgLabel::Claim;
  if (low == "premise") return ArgLabel::Premise;
  if (low == "scenario") return ArgLabel::Scenario;
  throw Error("unknown label: \"" + std::string(raw) + "\"");
}

namespace {

std::string require_string(const nlohmann::json& row, const char* field, std::size_t line_no,
                           const std::string& path) {
  auto it = row.find(field);
  if (it == row.end())
    throw Error(path + ":" + std::to_string(line_no) + ": missing field '" + field + "'");
  if (!it->is_string())
    throw Error(path + ":" + std::to_string(line_no) + ": field '" + field + "' must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const nlohmann::json& row, const char* field,
                                           std::size_t line_no, const std::string& path) {
  auto it = row.find(field);
  if (it == row.end() || it->is_null()) return std::nullopt;
  if (!it->is_string())
    throw Error(path + ":" + std::to_string(line_no) + ": field '" + field + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

nlohmann::json qa_to_json(const QAPair& qa) {
  nlohmann::json row = {
      {"id", qa.id},
      {"question", qa.question},
      {"reference_answer", qa.reference_answer},
  };
  if (qa.prepared_remarks) row["prepared_remarks"] = *qa.prepared_remarks;
  if (qa.company) row["company"] = *qa.company;
  if (qa.call_id) row["call_id"] = *qa.call_id;
  return row;
}

QAPair qa_from_json(const nlohmann::json& row) {
  QAPair qa;
  qa.id = row.at("id").get<std::string>();
  qa.question = row.at("question").get<std::string>();
  qa.reference_answer = row.at("reference_answer").get<std::string>();
  if (row.contains("prepared_remarks") && !row["prepared_remarks"].is_null())
    qa.prepared_remarks = row["prepared_remarks"].get<std::string>();
  if (row.contains("company") && !row["company"].is_null())
    qa.company = row["company"].get<std::string>();
  if (row.contains("call_id") && !row["call_id"].is_null())
    qa.call_id = row["call_id"].get<std::string>();
  return qa;
}

std::vector<QAPair> load_qa(const std::string& path) {
  std::vector<QAPair> out;
  std::map<std::string, std::size_t> seen;  // id -> first line
  for_each_jsonl(path, [&](std::size_t line_no, const nlohmann::json& row) {
    QAPair qa;
    qa.id = require_string(row, "id", line_no, path);
    qa.question = require_string(row, "question", line_no, path);
    qa.reference_answer = require_string(row, "reference_answer", line_no, path);
    qa.prepared_remarks = optional_string(row, "prepared_remarks", line_no, path);
    qa.company = optional_string(row, "company", line_no, path);
    qa.call_id = optional_string(row, "call_id", line_no, path);
    if (qa.question.empty())
      throw Error(path + ":" + std::to_string(line_no) + ": empty question");
    if (qa.reference_answer.empty())
      throw Error(path + ":" + std::to_string(line_no) + ": empty reference_answer");
    auto [it, inserted] = seen.try_emplace(qa.id, line_no);
    if (!inserted)
      throw Error(path + ": duplicate id '" + qa.id + "' on lines " +
                  std::to_string(it->second) + " and " + std::to_string(line_no));
    out.push_back(std::move(qa));
  });
  return out;
}

void save_qa(const std::string& path, const std::vector<QAPair>& pairs) {
  std::vector<nlohmann::json> rows;
  rows.reserve(pairs.size());
  for (const QAPair& qa : pairs) rows.push_back(qa_to_json(qa));
  write_jsonl(path, rows);
}

std::vector<QAPair> filter_term_bearing(const std::vector<QAPair>& pairs, const TermLexicon& lex) {
  std::vector<QAPair> out;
  for (const QAPair& qa : pairs) {
    if (!lex.extract_terms(qa.question).empty() &&
        !lex.extract_terms(qa.reference_answer).empty()) {
      out.push_back(qa);
    }
  }
  return out;
}

namespace {

nlohmann::json sentence_to_json(const LabeledSentence& s) {
  nlohmann::json row = {
      {"id", s.id},         {"doc_id", s.doc_id}, {"sent_idx", s.sent_idx},
      {"text", s.text},     {"label", to_string(s.label)},
  };
  if (s.claim_ref) row["claim_ref"] = *s.claim_ref;
  return row;
}

LabeledSentence sentence_from_json(const nlohmann::json& row) {
  LabeledSentence s;
  s.id = row.at("id").get<std::string>();
  s.doc_id = row.at("doc_id").get<std::string>();
  s.sent_idx = row.at("sent_idx").get<int>();
  s.text = row.at("text").get<std::string>();
  s.label = parse_arg_label(row.at("label").get<std::string>());
  if (row.contains("claim_ref") && !row["claim_ref"].is_null())
    s.claim_ref = row["claim_ref"].get<std::string>();
  return s;
}

}  // namespace

std::vector<LabeledSentence> load_labeled_sentences(const std::string& path) {
  std::vector<LabeledSentence> out;
  for_each_jsonl(path, [&](std::size_t line_no, const nlohmann::json& row) {
    LabeledSentence s;
    s.id = require_string(row, "id", line_no, path);
    s.doc_id = require_string(row, "doc_id", line_no, path);
    auto idx = row.find("sent_idx");
    if (idx == row.end() || !idx->is_number_integer())
      throw Error(path + ":" + std::to_string(line_no) + ": missing integer field 'sent_idx'");
    s.sent_idx = idx->get<int>();
    if (s.sent_idx < 0)
      throw Error(path + ":" + std::to_string(line_no) + ": sent_idx must be >= 0");
    s.text = require_string(row, "text", line_no, path);
    try {
      s.label = parse_arg_label(require_string(row, "label", line_no, path));
    } catch (const Error& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    s.claim_ref = optional_string(row, "claim_ref", line_no, path);
    out.push_back(std::move(s));
  });

  std::set<std::pair<std::string, int>> positions;
  std::map<std::string, const LabeledSentence*> by_id;
  for (const LabeledSentence& s : out) {
    if (!positions.insert({s.doc_id, s.sent_idx}).second)
      throw Error(path + ": duplicate (doc_id, sent_idx) = (" + s.doc_id + ", " +
                  std::to_string(s.sent_idx) + ")");
    if (!by_id.try_emplace(s.id, &s).second)
      throw Error(path + ": duplicate sentence id '" + s.id + "'");
  }
  for (const LabeledSentence& s : out) {
    if (!s.claim_ref) continue;
    if (s.label != ArgLabel::Premise)
      throw Error(path + ": claim_ref on non-premise sentence '" + s.id + "'");
    auto it = by_id.find(*s.claim_ref);
    if (it == by_id.end() || it->second->doc_id != s.doc_id)
      throw Error(path + ": claim_ref '" + *s.claim_ref + "' of sentence '" + s.id +
                  "' does not reference a sentence in doc '" + s.doc_id + "'");
    if (it->second->label != ArgLabel::Claim)
      throw Error(path + ": claim_ref '" + *s.claim_ref + "' of sentence '" + s.id +
                  "' references a non-claim sentence");
  }

  std::sort(out.begin(), out.end(), [](const LabeledSentence& a, const LabeledSentence& b) {
    return std::tie(a.doc_id, a.sent_idx) < std::tie(b.doc_id, b.sent_idx);
  });
  return out;
}

PairingResult pair_premise_claim(const std::vector<LabeledSentence>& sentences, int window) {
  if (window < 1) throw Error("window must be >= 1");
  std::map<std::string, const LabeledSentence*> by_id;
  for (const LabeledSentence& s : sentences) by_id.emplace(s.id, &s);

  PairingResult result;
  for (const LabeledSentence& premise : sentences) {
    if (premise.label != ArgLabel::Premise) continue;
    if (premise.claim_ref) {
      result.pairs.push_back(PremiseClaimPair{premise, *by_id.at(*premise.claim_ref)});
      continue;
    }
    const LabeledSentence* best = nullptr;
    int best_dist = 0;
    for (const LabeledSentence& cand : sentences) {
      if (cand.label != ArgLabel::Claim || cand.doc_id != premise.doc_id) continue;
      const int dist = std::abs(cand.sent_idx - premise.sent_idx);
      if (dist > window) continue;
      const bool preceding = cand.sent_idx < premise.sent_idx;
      if (best == nullptr || dist < best_dist ||
          (dist == best_dist && preceding && best->sent_idx > premise.sent_idx)) {
        best = &cand;
        best_dist = dist;
      }
    }
    if (best != nullptr) {
      result.pairs.push_back(PremiseClaimPair{premise, *best});
    } else {
      ++result.unpaired_premises;
    }
  }
  return result;
}

std::vector<PremiseClaimPair> load_pairs(const std::string& path) {
  std::vector<PremiseClaimPair> out;
  for_each_jsonl(path, [&](std::size_t line_no, const nlohmann::json& row) {
    try {
      PremiseClaimPair pair{sentence_from_json(row.at("premise")),
                            sentence_from_json(row.at("claim"))};
      if (pair.premise.label != ArgLabel::Premise || pair.claim.label != ArgLabel::Claim ||
          pair.premise.doc_id != pair.claim.doc_id)
        throw Error("invalid premise/claim pair");
      out.push_back(std::move(pair));
    } catch (const nlohmann::json::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  });
  return out;
}

void save_pairs(const std::string& path, const std::vector<PremiseClaimPair>& pairs) {
  std::vector<nlohmann::json> rows;
  rows.reserve(pairs.size());
  for (const PremiseClaimPair& p : pairs) {
    rows.push_back({{"premise", sentence_to_json(p.premise)}, {"claim", sentence_to_json(p.claim)}});
  }
  write_jsonl(path, rows);
}

}  // namespace finqa
