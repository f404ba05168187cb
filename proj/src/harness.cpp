#include "finqa/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "finqa/corpus.hpp"
#include "finqa/error.hpp"
#include "finqa/io.hpp"

namespace fs = std::filesystem;

namespace finqa {

// ---------------------------------------------------------------------------
// Plan

ExperimentPlan ExperimentPlan::from_json(const nlohmann::json& obj) {
  ExperimentPlan plan;
  try {
    for (const auto& p : obj.at("providers"))
      plan.providers.push_back(ProviderConfig::from_json(p));
    if (obj.contains("kgs")) {
      for (const auto& k : obj["kgs"]) {
        KgRef ref{k.at("name").get<std::string>(), k.at("path").get<std::string>()};
        if (ref.name == "none")
          throw Error("plan: KG name 'none' is reserved for the no-KG setting");
        plan.kgs.push_back(std::move(ref));
      }
    }
    for (const auto& c : obj.at("configs"))
      plan.configs.push_back(parse_prompt_config(c.get<std::string>()));
    plan.qa_path = obj.at("qa_path").get<std::string>();
    for (const auto& p : obj.at("lexicon_paths"))
      plan.lexicon_paths.push_back(p.get<std::string>());
    plan.output_dir = obj.at("output_dir").get<std::string>();
    if (obj.contains("max_entities") && !obj["max_entities"].is_null())
      plan.max_entities = obj["max_entities"].get<int>();
    if (obj.contains("retrieval_mode"))
      plan.retrieval_mode = parse_retrieval_mode(obj["retrieval_mode"].get<std::string>());
    if (obj.contains("top_n") && !obj["top_n"].is_null()) plan.top_n = obj["top_n"].get<int>();
    if (obj.contains("plural_fold")) plan.plural_fold = obj["plural_fold"].get<bool>();
    if (obj.contains("judge_provider") && !obj["judge_provider"].is_null())
      plan.judge_provider = ProviderConfig::from_json(obj["judge_provider"]);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("plan: ") + e.what());
  }
  return plan;
}

ExperimentPlan ExperimentPlan::from_file(const std::string& path) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": malformed JSON: " + e.what());
  }
  try {
    return from_json(obj);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Result table

namespace {

nlohmann::json opt_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

nlohmann::json opt_json(const std::optional<int>& v) {
  if (v) return *v;
  return nullptr;
}

std::optional<double> opt_from(const nlohmann::json& row, const char* key) {
  if (!row.contains(key) || row[key].is_null()) return std::nullopt;
  return row[key].get<double>();
}

}  // namespace

nlohmann::json ResultRow::to_json() const {
  return {
      {"model", model},
      {"kg", kg},
      {"config", config},
      {"items", items},
      {"failures", failures},
      {"atr_pct", opt_json(ratios.atr_pct)},
      {"acr_pct", opt_json(ratios.acr_pct)},
      {"iir_pct", opt_json(ratios.iir_pct)},
      {"atr_excluded", ratios.atr_excluded},
      {"acr_excluded", ratios.acr_excluded},
      {"iir_excluded", ratios.iir_excluded},
      {"rouge1_pct", opt_json(rouge1_pct)},
      {"rouge2_pct", opt_json(rouge2_pct)},
      {"rougeL_pct", opt_json(rougeL_pct)},
      {"bleu_pct", opt_json(bleu_pct)},
      {"judge_con", opt_json(judge_con)},
      {"judge_info", opt_json(judge_info)},
      {"judge_rel", opt_json(judge_rel)},
      {"judged_items", judged_items},
      {"judge_failures", judge_failures},
  };
}

ResultRow ResultRow::from_json(const nlohmann::json& row) {
  ResultRow r;
  r.model = row.at("model").get<std::string>();
  r.kg = row.at("kg").get<std::string>();
  r.config = row.at("config").get<std::string>();
  r.items = row.at("items").get<int>();
  r.failures = row.at("failures").get<int>();
  r.ratios.atr_pct = opt_from(row, "atr_pct");
  r.ratios.acr_pct = opt_from(row, "acr_pct");
  r.ratios.iir_pct = opt_from(row, "iir_pct");
  r.ratios.atr_excluded = row.at("atr_excluded").get<int>();
  r.ratios.acr_excluded = row.at("acr_excluded").get<int>();
  r.ratios.iir_excluded = row.at("iir_excluded").get<int>();
  r.ratios.items = r.items - r.failures;
  r.rouge1_pct = opt_from(row, "rouge1_pct");
  r.rouge2_pct = opt_from(row, "rouge2_pct");
  r.rougeL_pct = opt_from(row, "rougeL_pct");
  r.bleu_pct = opt_from(row, "bleu_pct");
  r.judge_con = opt_from(row, "judge_con");
  r.judge_info = opt_from(row, "judge_info");
  r.judge_rel = opt_from(row, "judge_rel");
  r.judged_items = row.at("judged_items").get<int>();
  r.judge_failures = row.at("judge_failures").get<int>();
  return r;
}

int ResultTable::completed_items() const {
  int total = 0;
  for (const ResultRow& r : rows) total += r.items - r.failures;
  return total;
}

nlohmann::json ResultTable::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const ResultRow& r : rows) rows_json.push_back(r.to_json());
  return {{"rows", rows_json}};
}

ResultTable ResultTable::from_json(const nlohmann::json& obj) {
  ResultTable table;
  for (const auto& row : obj.at("rows")) table.rows.push_back(ResultRow::from_json(row));
  return table;
}

ResultTable load_table(const std::string& path) {
  try {
    return ResultTable::from_json(nlohmann::json::parse(read_text_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": malformed table: " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Cell execution

namespace {

std::string sanitize(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    out.push_back(keep ? c : '-');
  }
  return out.empty() ? std::string("x") : out;
}

struct LoadedKg {
  CausalGraph graph;
  std::optional<Retriever> retriever;
};

struct CellContext {
  const ExperimentPlan* plan;
  const TermLexicon* lexicon;
  const std::vector<QAPair>* qa;
  ChatTransport* transport;
  ChatTransport* judge_transport;  // null when judging is off
  const ProviderConfig* provider;
  const Retriever* retriever;  // null for non-KG cells
};

void generate_cell_artifacts(const CellContext& ctx, PromptConfig config,
                             const std::string& kg_name, const fs::path& cell_dir) {
  const std::vector<QAPair>& qa = *ctx.qa;
  const std::size_t n = qa.size();

  RenderOptions opts;
  opts.max_entities = ctx.plan->max_entities;

  std::vector<std::optional<RenderedPrompt>> prompts(n);
  std::vector<std::string> render_errors(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Term> entities;
    if (needs_kg(config) && ctx.retriever != nullptr)
      entities = ctx.retriever->for_question(qa[i].question, ctx.plan->retrieval_mode,
                                             ctx.plan->top_n);
    try {
      prompts[i] = render(config, qa[i], entities, opts);
    } catch (const Error& e) {
      render_errors[i] = e.what();
    }
  }

  std::vector<nlohmann::json> prompt_rows;
  prompt_rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (prompts[i]) {
      prompt_rows.push_back({{"qa_id", qa[i].id},
                             {"config", to_string(config)},
                             {"entity_count", prompts[i]->entity_count},
                             {"content_hash", prompts[i]->content_hash},
                             {"text", prompts[i]->text}});
    } else {
      prompt_rows.push_back({{"qa_id", qa[i].id},
                             {"config", to_string(config)},
                             {"render_error", render_errors[i]}});
    }
  }
  write_jsonl((cell_dir / "prompts.jsonl").string(), prompt_rows);

  std::vector<RenderedPrompt> batch;
  batch.reserve(n);
  for (const auto& p : prompts) {
    if (p) batch.push_back(*p);
  }
  const std::vector<GenerationRecord> generated =
      run_batch(*ctx.provider, *ctx.transport, batch, kg_name);

  std::vector<GenerationRecord> merged(n);
  std::size_t gi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (prompts[i]) {
      merged[i] = generated[gi++];
    } else {
      GenerationRecord failed;
      failed.qa_id = qa[i].id;
      failed.config = config;
      failed.kg_name = kg_name;
      failed.model = ctx.provider->model;
      failed.created_at = now_iso8601_utc();
      failed.error = "render: " + render_errors[i];
      merged[i] = std::move(failed);
    }
  }
  std::vector<nlohmann::json> gen_rows;
  gen_rows.reserve(n);
  for (const GenerationRecord& rec : merged) gen_rows.push_back(rec.to_json());
  write_jsonl((cell_dir / "generations.jsonl").string(), gen_rows);

  std::vector<nlohmann::json> score_rows;
  score_rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const GenerationRecord& rec = merged[i];
    if (!rec.ok()) {
      score_rows.push_back({{"qa_id", rec.qa_id}, {"gen_failed", true}, {"error", rec.error}});
      continue;
    }
    const TermSets ts = term_sets(*ctx.lexicon, qa[i].question, rec.answer, qa[i].reference_answer);
    const TermRatios ratios = term_ratios(ts);
    const NgramScores ngrams = score_ngrams(rec.answer, qa[i].reference_answer);
    score_rows.push_back({{"qa_id", rec.qa_id},
                          {"gen_failed", false},
                          {"atr", opt_json(ratios.atr)},
                          {"acr", opt_json(ratios.acr)},
                          {"iir", opt_json(ratios.iir)},
                          {"rouge1", ngrams.rouge1_f},
                          {"rouge2", ngrams.rouge2_f},
                          {"rougeL", ngrams.rougeL_f},
                          {"bleu", ngrams.bleu}});
  }
  write_jsonl((cell_dir / "scores.jsonl").string(), score_rows);

  if (ctx.judge_transport != nullptr) {
    std::vector<nlohmann::json> judged_rows;
    for (std::size_t i = 0; i < n; ++i) {
      const GenerationRecord& rec = merged[i];
      if (!rec.ok()) continue;
      nlohmann::json row = {{"item_id", rec.qa_id}, {"qa_id", rec.qa_id},
                            {"config", to_string(config)}, {"kg", kg_name},
                            {"model", rec.model}};
      try {
        const JudgeScores scores =
            judge(*ctx.plan->judge_provider, *ctx.judge_transport, qa[i].question, rec.answer);
        row["concreteness"] = opt_json(scores.concreteness);
        row["info_richness"] = opt_json(scores.info_richness);
        row["relevance_accuracy"] = opt_json(scores.relevance_accuracy);
        row["parse_failed"] = scores.parse_failed();
        row["raw_response"] = scores.raw_response;
      } catch (const Error& e) {
        row["concreteness"] = nullptr;
        row["info_richness"] = nullptr;
        row["relevance_accuracy"] = nullptr;
        row["parse_failed"] = true;
        row["raw_response"] = "";
        row["judge_error"] = e.what();
      }
      judged_rows.push_back(std::move(row));
    }
    write_jsonl((cell_dir / "judged.jsonl").string(), judged_rows);
  }
}

ResultRow aggregate_cell(const std::string& model, const std::string& kg_name,
                         PromptConfig config, const fs::path& cell_dir, bool judging) {
  ResultRow row;
  row.model = model;
  row.kg = kg_name;
  row.config = to_string(config);

  std::vector<TermRatios> ratios;
  double r1 = 0, r2 = 0, rl = 0, bl = 0;
  int scored = 0;
  for (const nlohmann::json& s : read_jsonl((cell_dir / "scores.jsonl").string())) {
    ++row.items;
    if (s.value("gen_failed", false)) {
      ++row.failures;
      continue;
    }
    TermRatios r;
    r.atr = opt_from(s, "atr");
    r.acr = opt_from(s, "acr");
    r.iir = opt_from(s, "iir");
    ratios.push_back(r);
    r1 += s.at("rouge1").get<double>();
    r2 += s.at("rouge2").get<double>();
    rl += s.at("rougeL").get<double>();
    bl += s.at("bleu").get<double>();
    ++scored;
  }
  row.ratios = aggregate_ratios(ratios);
  if (scored > 0) {
    row.rouge1_pct = 100.0 * r1 / scored;
    row.rouge2_pct = 100.0 * r2 / scored;
    row.rougeL_pct = 100.0 * rl / scored;
    row.bleu_pct = 100.0 * bl / scored;
  }

  if (judging) {
    double con = 0, info = 0, rel = 0;
    int ok = 0;
    for (const nlohmann::json& j : read_jsonl((cell_dir / "judged.jsonl").string())) {
      ++row.judged_items;
      if (j.value("parse_failed", true)) {
        ++row.judge_failures;
        continue;
      }
      con += j.at("concreteness").get<double>();
      info += j.at("info_richness").get<double>();
      rel += j.at("relevance_accuracy").get<double>();
      ++ok;
    }
    if (ok > 0) {
      row.judge_con = con / ok;
      row.judge_info = info / ok;
      row.judge_rel = rel / ok;
    }
  }
  return row;
}

bool cell_complete(const fs::path& cell_dir, bool judging) {
  const bool base = fs::exists(cell_dir / "prompts.jsonl") &&
                    fs::exists(cell_dir / "generations.jsonl") &&
                    fs::exists(cell_dir / "scores.jsonl");
  if (!base) return false;
  return !judging || fs::exists(cell_dir / "judged.jsonl");
}

void validate_plan(const ExperimentPlan& plan) {
  if (plan.providers.empty()) throw Error("plan: providers must be non-empty");
  if (plan.configs.empty()) throw Error("plan: configs must be non-empty");
  if (plan.output_dir.empty()) throw Error("plan: output_dir must be set");
  if (plan.retrieval_mode == RetrievalMode::TopN && (!plan.top_n || *plan.top_n < 1))
    throw Error("plan: retrieval_mode top-n requires top_n >= 1");
  std::set<std::string> models;
  for (const ProviderConfig& p : plan.providers) {
    if (!models.insert(p.model).second)
      throw Error("plan: duplicate provider model name '" + p.model + "'");
  }
  std::set<std::string> kg_names;
  for (const KgRef& kg : plan.kgs) {
    if (!kg_names.insert(kg.name).second)
      throw Error("plan: duplicate KG name '" + kg.name + "'");
    if (!fs::exists(kg.path)) throw Error("plan: KG file not found: " + kg.path);
  }
  bool any_kg_config = false;
  for (PromptConfig c : plan.configs) any_kg_config = any_kg_config || needs_kg(c);
  if (any_kg_config && plan.kgs.empty())
    throw Error("plan: configs include a KG-bearing configuration but no KGs are listed");
}

}  // namespace

ResultTable run(const ExperimentPlan& plan) {
  validate_plan(plan);

  const TermLexicon lexicon = TermLexicon::load(plan.lexicon_paths, plan.plural_fold);
  const std::vector<QAPair> qa_all = load_qa(plan.qa_path);
  const std::vector<QAPair> qa = filter_term_bearing(qa_all, lexicon);
  if (qa.empty()) throw Error("no QA pairs survive the term-bearing filter");

  fs::create_directories(fs::path(plan.output_dir) / "cells");

  // KGs load once; the retriever needs a stable graph address
  std::map<std::string, std::unique_ptr<LoadedKg>> kgs;
  for (const KgRef& ref : plan.kgs) {
    auto loaded = std::make_unique<LoadedKg>();
    std::vector<std::string> warnings;
    loaded->graph = load_graph(ref.path, &warnings);
    for (const std::string& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    loaded->retriever.emplace(loaded->graph);
    kgs.emplace(ref.name, std::move(loaded));
  }

  const bool judging = plan.judge_provider.has_value();
  std::unique_ptr<ChatTransport> judge_transport;
  if (judging) judge_transport = make_transport(*plan.judge_provider);

  ResultTable table;
  for (const ProviderConfig& provider : plan.providers) {
    const std::unique_ptr<ChatTransport> transport = make_transport(provider);
    for (const PromptConfig config : plan.configs) {
      std::vector<const KgRef*> cell_kgs;
      static const KgRef kNone{"none", ""};
      if (needs_kg(config)) {
        for (const KgRef& ref : plan.kgs) cell_kgs.push_back(&ref);
      } else {
        cell_kgs.push_back(&kNone);  // KG listed or not, these cells carry kg "none"
      }
      for (const KgRef* kg : cell_kgs) {
        const fs::path cell_dir = fs::path(plan.output_dir) / "cells" /
                                  (sanitize(provider.model) + "__" + sanitize(kg->name) + "__" +
                                   to_string(config));
        if (!cell_complete(cell_dir, judging)) {
          fs::create_directories(cell_dir);
          CellContext ctx;
          ctx.plan = &plan;
          ctx.lexicon = &lexicon;
          ctx.qa = &qa;
          ctx.transport = transport.get();
          ctx.judge_transport = judge_transport.get();
          ctx.provider = &provider;
          ctx.retriever = kg->name == "none" ? nullptr : &*kgs.at(kg->name)->retriever;
          generate_cell_artifacts(ctx, config, kg->name, cell_dir);
        }
        table.rows.push_back(aggregate_cell(provider.model, kg->name, config, cell_dir, judging));
      }
    }
  }

  std::sort(table.rows.begin(), table.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.model, a.kg, a.config) < std::tie(b.model, b.kg, b.config);
  });
  write_file_atomic((fs::path(plan.output_dir) / "table.json").string(),
                    table.to_json().dump(2) + "\n");
  return table;
}

// ---------------------------------------------------------------------------
// Reports

ReportFormat parse_report_format(std::string_view raw) {
  if (raw == "csv") return ReportFormat::Csv;
  if (raw == "markdown" || raw == "md") return ReportFormat::Markdown;
  if (raw == "json") return ReportFormat::Json;
  throw Error("unknown report format: \"" + std::string(raw) +
              "\" (expected csv, markdown, or json)");
}

namespace {

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const std::vector<std::string>& metric_columns() {
  static const std::vector<std::string> cols = {
      "atr_pct", "acr_pct", "iir_pct", "rouge1_pct", "rouge2_pct",
      "rougeL_pct", "bleu_pct", "judge_con", "judge_info", "judge_rel"};
  return cols;
}

std::optional<double> metric_value(const ResultRow& row, const std::string& col) {
  if (col == "atr_pct") return row.ratios.atr_pct;
  if (col == "acr_pct") return row.ratios.acr_pct;
  if (col == "iir_pct") return row.ratios.iir_pct;
  if (col == "rouge1_pct") return row.rouge1_pct;
  if (col == "rouge2_pct") return row.rouge2_pct;
  if (col == "rougeL_pct") return row.rougeL_pct;
  if (col == "bleu_pct") return row.bleu_pct;
  if (col == "judge_con") return row.judge_con;
  if (col == "judge_info") return row.judge_info;
  if (col == "judge_rel") return row.judge_rel;
  return std::nullopt;
}

std::string format_markdown(const ResultTable& table) {
  // best defined value per metric within each model block gets bolded
  std::map<std::string, std::map<std::string, double>> best;  // model -> column -> max
  for (const ResultRow& row : table.rows) {
    for (const std::string& col : metric_columns()) {
      const auto v = metric_value(row, col);
      if (!v) continue;
      auto& slot = best[row.model];
      auto it = slot.find(col);
      if (it == slot.end() || *v > it->second) slot[col] = *v;
    }
  }
  std::ostringstream out;
  out << "| model | kg | config | items | failures | ATR% | ACR% | IIR% | ROUGE-1 | ROUGE-2 | "
         "ROUGE-L | BLEU | CON | INFO | REL |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const ResultRow& row : table.rows) {
    out << "| " << row.model << " | " << row.kg << " | " << row.config << " | " << row.items
        << " | " << row.failures << " |";
    for (const std::string& col : metric_columns()) {
      const auto v = metric_value(row, col);
      if (!v) {
        out << " - |";
        continue;
      }
      const auto& slot = best[row.model];
      const auto it = slot.find(col);
      const bool is_best = it != slot.end() && *v == it->second;
      if (is_best)
        out << " **" << fmt2(*v) << "** |";
      else
        out << " " << fmt2(*v) << " |";
    }
    out << "\n";
  }
  return out.str();
}

std::string format_csv(const ResultTable& table) {
  std::ostringstream out;
  out << "model,kg,config,items,failures,atr_pct,acr_pct,iir_pct,atr_excluded,acr_excluded,"
         "iir_excluded,rouge1_pct,rouge2_pct,rougeL_pct,bleu_pct,judge_con,judge_info,judge_rel,"
         "judged_items,judge_failures\n";
  const auto cell = [](const std::optional<double>& v) { return v ? fmt2(*v) : std::string(); };
  for (const ResultRow& r : table.rows) {
    out << r.model << ',' << r.kg << ',' << r.config << ',' << r.items << ',' << r.failures << ','
        << cell(r.ratios.atr_pct) << ',' << cell(r.ratios.acr_pct) << ',' << cell(r.ratios.iir_pct)
        << ',' << r.ratios.atr_excluded << ',' << r.ratios.acr_excluded << ','
        << r.ratios.iir_excluded << ',' << cell(r.rouge1_pct) << ',' << cell(r.rouge2_pct) << ','
        << cell(r.rougeL_pct) << ',' << cell(r.bleu_pct) << ',' << cell(r.judge_con) << ','
        << cell(r.judge_info) << ',' << cell(r.judge_rel) << ',' << r.judged_items << ','
        << r.judge_failures << '\n';
  }
  return out.str();
}

}  // namespace

std::string format_report(const ResultTable& table, ReportFormat format) {
  if (table.rows.empty()) throw Error("report: table is empty");
  switch (format) {
    case ReportFormat::Csv: return format_csv(table);
    case ReportFormat::Markdown: return format_markdown(table);
    case ReportFormat::Json: return table.to_json().dump(2) + "\n";
  }
  throw Error("report: unknown format");
}

void write_report(const ResultTable& table, ReportFormat format, const std::string& path) {
  write_file_atomic(path, format_report(table, format));
}

// ---------------------------------------------------------------------------
// Judge vs human correlation

std::vector<JudgedItem> load_judged(const std::string& path) {
  std::vector<JudgedItem> out;
  for_each_jsonl(path, [&](std::size_t line_no, const nlohmann::json& row) {
    JudgedItem item;
    if (row.contains("item_id"))
      item.item_id = row["item_id"].get<std::string>();
    else if (row.contains("qa_id"))
      item.item_id = row["qa_id"].get<std::string>();
    else
      throw Error(path + ":" + std::to_string(line_no) + ": missing item_id");
    const auto grab = [&](const char* key) -> std::optional<int> {
      if (!row.contains(key) || row[key].is_null()) return std::nullopt;
      return row[key].get<int>();
    };
    item.scores.concreteness = grab("concreteness");
    item.scores.info_richness = grab("info_richness");
    item.scores.relevance_accuracy = grab("relevance_accuracy");
    item.scores.raw_response = row.value("raw_response", "");
    out.push_back(std::move(item));
  });
  return out;
}

bool HumanScores::has(const std::string& criterion) const {
  for (const auto& [item, scores] : by_item) {
    if (scores.count(criterion) > 0) return true;
  }
  return false;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

// strips a trailing _<digits> annotator suffix: info_2 -> info
std::string column_base(const std::string& name) {
  const std::size_t us = name.rfind('_');
  if (us == std::string::npos || us + 1 >= name.size()) return name;
  for (std::size_t i = us + 1; i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9') return name;
  }
  return name.substr(0, us);
}

}  // namespace

HumanScores load_human_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty file");
  const std::vector<std::string> header = split_csv_line(line);

  int id_col = -1;
  std::vector<std::string> bases(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name;
    for (char c : header[i]) name.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    if (name == "item_id") {
      id_col = static_cast<int>(i);
      continue;
    }
    const std::string base = column_base(name);
    if (base != "info" && base != "con" && base != "rel_acc")
      throw Error(path + ": unknown column '" + header[i] +
                  "' (expected item_id, info, con, or rel_acc, optionally with _<k> suffixes)");
    bases[i] = base;
  }
  if (id_col < 0) throw Error(path + ": missing item_id column");

  HumanScores human;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw Error(path + ":" + std::to_string(line_no) + ": expected " +
                  std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    const std::string& item = fields[static_cast<std::size_t>(id_col)];
    if (human.by_item.count(item) > 0)
      throw Error(path + ":" + std::to_string(line_no) + ": duplicate item_id '" + item + "'");
    std::map<std::string, std::pair<double, int>> sums;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (static_cast<int>(i) == id_col) continue;
      double value = 0;
      try {
        value = std::stod(fields[i]);
      } catch (const std::exception&) {
        throw Error(path + ":" + std::to_string(line_no) + ": non-numeric score '" + fields[i] +
                    "'");
      }
      if (value < 0 || value > 10)
        throw Error(path + ":" + std::to_string(line_no) + ": score out of range [0,10]: " +
                    fields[i]);
      auto& slot = sums[bases[i]];
      slot.first += value;
      slot.second += 1;
    }
    std::map<std::string, double> means;
    for (const auto& [base, sum] : sums) means[base] = sum.first / sum.second;
    human.by_item.emplace(item, std::move(means));
  }
  if (human.by_item.empty()) throw Error(path + ": no data rows");
  return human;
}

nlohmann::json JudgeHumanCorrelation::to_json() const {
  nlohmann::json out = {{"joined_items", joined_items},
                        {"dropped_parse_failures", dropped_parse_failures}};
  for (const auto& [name, corr] : per_criterion) {
    if (corr.report) {
      out[name] = {{"pearson", corr.report->pearson},
                   {"spearman", corr.report->spearman},
                   {"kendall", corr.report->kendall},
                   {"n", corr.report->n}};
    } else {
      out[name] = {{"error", corr.error}};
    }
  }
  return out;
}

JudgeHumanCorrelation correlate_judge_human(const std::vector<JudgedItem>& judged,
                                            const HumanScores& human) {
  JudgeHumanCorrelation result;

  struct Paired {
    std::vector<double> judge;
    std::vector<double> human;
  };
  std::map<std::string, Paired> series;  // criterion -> vectors
  const std::vector<std::pair<std::string, std::optional<int> JudgeScores::*>> criteria = {
      {"con", &JudgeScores::concreteness},
      {"info", &JudgeScores::info_richness},
      {"rel_acc", &JudgeScores::relevance_accuracy},
  };

  std::set<std::string> joined;
  for (const JudgedItem& item : judged) {
    if (item.scores.parse_failed()) {
      ++result.dropped_parse_failures;
      continue;
    }
    auto it = human.by_item.find(item.item_id);
    if (it == human.by_item.end()) continue;
    joined.insert(item.item_id);
    for (const auto& [name, member] : criteria) {
      auto h = it->second.find(name);
      if (h == it->second.end()) continue;
      series[name].judge.push_back(static_cast<double>(*(item.scores.*member)));
      series[name].human.push_back(h->second);
    }
  }
  result.joined_items = static_cast<int>(joined.size());
  if (result.joined_items < 2)
    throw Error("correlate: join produced fewer than 2 items (" +
                std::to_string(result.joined_items) + ")");

  for (const auto& [name, paired] : series) {
    CriterionCorrelation corr;
    try {
      corr.report = correlations(paired.judge, paired.human);
    } catch (const Error& e) {
      corr.error = e.what();
    }
    result.per_criterion.emplace(name, std::move(corr));
  }
  return result;
}

}  // namespace finqa
