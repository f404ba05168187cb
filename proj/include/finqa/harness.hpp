#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "finqa/kg.hpp"
#include "finqa/llm.hpp"
#include "finqa/metrics.hpp"

namespace finqa {

struct KgRef {
  std::string name;
  std::string path;
};

struct ExperimentPlan {
  std::vector<ProviderConfig> providers;
  std::vector<KgRef> kgs;  // real KGs; rows for non-KG configs always carry kg "none"
  std::vector<PromptConfig> configs;
  std::string qa_path;
  std::vector<std::string> lexicon_paths;
  std::string output_dir;
  std::optional<int> max_entities;
  RetrievalMode retrieval_mode = RetrievalMode::All;
  std::optional<int> top_n;
  bool plural_fold = false;
  std::optional<ProviderConfig> judge_provider;

  static ExperimentPlan from_json(const nlohmann::json& obj);
  static ExperimentPlan from_file(const std::string& path);
};

struct ResultRow {
  std::string model;
  std::string kg = "none";
  std::string config;
  int items = 0;
  int failures = 0;  // generation failures (render or provider)
  RatioAggregate ratios;
  std::optional<double> rouge1_pct;
  std::optional<double> rouge2_pct;
  std::optional<double> rougeL_pct;
  std::optional<double> bleu_pct;
  std::optional<double> judge_con;   // 0..10 means
  std::optional<double> judge_info;
  std::optional<double> judge_rel;
  int judged_items = 0;
  int judge_failures = 0;

  bool operator==(const ResultRow&) const = default;
  nlohmann::json to_json() const;
  static ResultRow from_json(const nlohmann::json& row);
};

struct ResultTable {
  std::vector<ResultRow> rows;

  bool operator==(const ResultTable&) const = default;
  int completed_items() const;  // successful generations across all cells
  nlohmann::json to_json() const;
  static ResultTable from_json(const nlohmann::json& obj);
};

// Runs the full (provider x kg x config) matrix: retrieve entities, render
// prompts, generate, score, optionally judge, aggregate. All intermediate
// artifacts live under plan.output_dir; cells whose artifacts are already
// present are skipped, so interrupted runs resume where they stopped.
// The final table is written to <output_dir>/table.json.
ResultTable run(const ExperimentPlan& plan);

ResultTable load_table(const std::string& path);

enum class ReportFormat { Csv, Markdown, Json };
ReportFormat parse_report_format(std::string_view raw);

// Deterministic row order (model, kg, config). Markdown bolds the best
// defined value per metric column within each model block.
std::string format_report(const ResultTable& table, ReportFormat format);
void write_report(const ResultTable& table, ReportFormat format, const std::string& path);

// Judged items as written by the judge step: item_id plus the three
// criterion scores (absent on parse failure).
struct JudgedItem {
  std::string item_id;
  JudgeScores scores;
};

std::vector<JudgedItem> load_judged(const std::string& path);

// Human score sheet: CSV with an item_id column and per-criterion columns
// info, con, and optional rel_acc. Annotator columns with an _<k> suffix
// (info_1, info_2, ...) are averaged at load.
struct HumanScores {
  std::map<std::string, std::map<std::string, double>> by_item;  // item -> criterion -> mean
  bool has(const std::string& criterion) const;
};

HumanScores load_human_csv(const std::string& path);

struct CriterionCorrelation {
  std::optional<CorrelationReport> report;
  std::string error;  // set when the coefficient is undefined (e.g. constant input)
};

struct JudgeHumanCorrelation {
  std::map<std::string, CriterionCorrelation> per_criterion;  // "info", "con", "rel_acc"
  int joined_items = 0;
  int dropped_parse_failures = 0;

  nlohmann::json to_json() const;
};

// Joins judge and human scores on item id (parse-failed judge items are
// dropped and counted) and correlates each shared criterion. Throws when
// fewer than 2 items join.
JudgeHumanCorrelation correlate_judge_human(const std::vector<JudgedItem>& judged,
                                            const HumanScores& human);

}  // namespace finqa
