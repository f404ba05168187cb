// Command-line front end: lexicon/corpus/kg prep, prompt rendering, batch
// generation and judging, scoring, correlation, and full experiment runs.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "finqa/corpus.hpp"
#include "finqa/error.hpp"
#include "finqa/harness.hpp"
#include "finqa/io.hpp"
#include "finqa/kg.hpp"
#include "finqa/lexicon.hpp"
#include "finqa/llm.hpp"
#include "finqa/metrics.hpp"
#include "finqa/prompts.hpp"

using namespace finqa;

namespace {

std::vector<PromptConfig> parse_config_list(const std::string& raw) {
  if (raw == "all")
    return {PromptConfig::Baseline, PromptConfig::PresentationOnly, PromptConfig::KgOnly,
            PromptConfig::PresentationAndKg};
  return {parse_prompt_config(raw)};
}

std::map<std::string, QAPair> qa_by_id(const std::vector<QAPair>& pairs) {
  std::map<std::string, QAPair> out;
  for (const QAPair& qa : pairs) out.emplace(qa.id, qa);
  return out;
}

RetrievalMode mode_from(const std::string& raw) { return parse_retrieval_mode(raw); }

void cmd_lexicon_check(const std::vector<std::string>& files, bool plural_fold) {
  const TermLexicon lex = TermLexicon::load(files, plural_fold);
  std::cout << "terms: " << lex.size() << "\n";
}

void cmd_corpus_validate(const std::string& qa_path) {
  const std::vector<QAPair> pairs = load_qa(qa_path);
  std::cout << "qa pairs: " << pairs.size() << " (valid)\n";
}

void cmd_corpus_pair(const std::string& sentences_path, int window, const std::string& out_path) {
  const std::vector<LabeledSentence> sentences = load_labeled_sentences(sentences_path);
  const PairingResult result = pair_premise_claim(sentences, window);
  save_pairs(out_path, result.pairs);
  std::cout << "pairs: " << result.pairs.size()
            << ", unpaired premises: " << result.unpaired_premises << "\n";
}

void cmd_kg_build(const std::string& pairs_path, const std::vector<std::string>& lexicon_paths,
                  const std::string& neutralize_mode, const std::string& out_path,
                  bool plural_fold) {
  const TermLexicon lex = TermLexicon::load(lexicon_paths, plural_fold);
  const std::vector<PremiseClaimPair> pairs = load_pairs(pairs_path);
  CausalGraph g = build_graph(pairs, lex);
  const KgStats before = g.stats();
  if (neutralize_mode != "none") g = neutralize(g, parse_neutralize_mode(neutralize_mode));
  save_graph(out_path, g);
  const KgStats after = g.stats();
  std::cout << "built: " << before.entity_count << " entities, " << before.relation_count
            << " relations\n";
  if (neutralize_mode != "none")
    std::cout << "after " << neutralize_mode << ": " << after.entity_count << " entities, "
              << after.relation_count << " relations\n";
}

void cmd_kg_stats(const std::string& kg_path) {
  std::vector<std::string> warnings;
  const CausalGraph g = load_graph(kg_path, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  const KgStats stats = g.stats();
  std::cout << "entities: " << stats.entity_count << "\nrelations: " << stats.relation_count
            << "\n";
}

void cmd_kg_retrieve(const std::string& kg_path, const std::string& question,
                     const std::string& mode, int top_n) {
  const CausalGraph g = load_graph(kg_path);
  const Retriever retriever(g);
  const RetrievalMode m = mode_from(mode);
  const std::optional<int> n = m == RetrievalMode::TopN ? std::optional<int>(top_n) : std::nullopt;
  for (const Term& t : retriever.for_question(question, m, n)) std::cout << t << "\n";
}

void cmd_prompt_render(const std::string& config_raw, const std::string& qa_path,
                       const std::string& id, const std::string& kg_path,
                       const std::string& mode, int top_n, int max_entities,
                       const std::string& templates_dir, bool strict) {
  const PromptConfig config = parse_prompt_config(config_raw);
  const auto qa_map = qa_by_id(load_qa(qa_path));
  auto it = qa_map.find(id);
  if (it == qa_map.end()) throw Error("qa id not found: " + id);

  std::vector<Term> entities;
  if (needs_kg(config)) {
    if (kg_path.empty()) throw Error("config '" + config_raw + "' requires --kg");
    const CausalGraph g = load_graph(kg_path);
    const Retriever retriever(g);
    const RetrievalMode m = mode_from(mode);
    const std::optional<int> n =
        m == RetrievalMode::TopN ? std::optional<int>(top_n) : std::nullopt;
    entities = retriever.for_question(it->second.question, m, n);
  }

  RenderOptions opts;
  if (max_entities >= 0) opts.max_entities = max_entities;
  opts.strict_entities = strict;
  TemplateSet custom;
  if (!templates_dir.empty()) {
    custom = TemplateSet::load_dir(templates_dir);
    opts.templates = &custom;
  }
  const RenderedPrompt prompt = render(config, it->second, entities, opts);
  std::fwrite(prompt.text.data(), 1, prompt.text.size(), stdout);
}

void cmd_prompt_templates(const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const TemplateSet& t = TemplateSet::builtin();
  write_file_atomic(out_dir + "/baseline.txt", t.baseline);
  write_file_atomic(out_dir + "/presentation_only.txt", t.presentation_only);
  write_file_atomic(out_dir + "/kg_only.txt", t.kg_only);
  write_file_atomic(out_dir + "/presentation_and_kg.txt", t.presentation_and_kg);
  write_file_atomic(out_dir + "/judge.txt", judge_template());
  std::cout << "templates written to " << out_dir << "\n";
}

void cmd_generate(const std::string& provider_path, const std::string& config_raw,
                  const std::string& qa_path, const std::string& kg_path,
                  const std::string& kg_name_flag, const std::string& mode, int top_n,
                  int max_entities, const std::string& out_path) {
  const ProviderConfig provider = ProviderConfig::from_file(provider_path);
  const std::vector<PromptConfig> configs = parse_config_list(config_raw);
  const std::vector<QAPair> qa = load_qa(qa_path);

  std::optional<CausalGraph> g;
  std::optional<Retriever> retriever;
  std::string kg_name = "none";
  if (!kg_path.empty()) {
    g = load_graph(kg_path);
    retriever.emplace(*g);
    kg_name = kg_name_flag.empty() ? kg_path : kg_name_flag;
  }
  for (const PromptConfig config : configs) {
    if (needs_kg(config) && !retriever)
      throw Error("config '" + to_string(config) + "' requires --kg");
  }
  const RetrievalMode m = mode_from(mode);
  const std::optional<int> n = m == RetrievalMode::TopN ? std::optional<int>(top_n) : std::nullopt;

  const auto transport = make_transport(provider);
  RenderOptions opts;
  if (max_entities >= 0) opts.max_entities = max_entities;

  std::vector<nlohmann::json> rows;
  for (const PromptConfig config : configs) {
    const std::string cell_kg = needs_kg(config) ? kg_name : "none";
    std::vector<RenderedPrompt> prompts;
    std::vector<GenerationRecord> render_failed;
    std::vector<bool> ok(qa.size(), false);
    std::vector<std::string> errors(qa.size());
    for (std::size_t i = 0; i < qa.size(); ++i) {
      std::vector<Term> entities;
      if (needs_kg(config)) entities = retriever->for_question(qa[i].question, m, n);
      try {
        prompts.push_back(render(config, qa[i], entities, opts));
        ok[i] = true;
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
    const std::vector<GenerationRecord> generated =
        run_batch(provider, *transport, prompts, cell_kg);
    std::size_t gi = 0;
    for (std::size_t i = 0; i < qa.size(); ++i) {
      if (ok[i]) {
        rows.push_back(generated[gi++].to_json());
      } else {
        GenerationRecord failed;
        failed.qa_id = qa[i].id;
        failed.config = config;
        failed.kg_name = cell_kg;
        failed.model = provider.model;
        failed.created_at = now_iso8601_utc();
        failed.error = "render: " + errors[i];
        rows.push_back(failed.to_json());
      }
    }
  }
  write_jsonl(out_path, rows);
  std::cout << "generated " << rows.size() << " records -> " << out_path << "\n";
}

void cmd_judge(const std::string& provider_path, const std::string& gen_path,
               const std::string& qa_path, const std::string& out_path) {
  const ProviderConfig provider = ProviderConfig::from_file(provider_path);
  const auto qa_map = qa_by_id(load_qa(qa_path));
  const auto transport = make_transport(provider);

  std::vector<GenerationRecord> records;
  for (const nlohmann::json& row : read_jsonl(gen_path))
    records.push_back(GenerationRecord::from_json(row));

  // item ids stay plain qa ids unless the file mixes cells
  std::map<std::string, int> id_counts;
  for (const GenerationRecord& rec : records) ++id_counts[rec.qa_id];
  const bool composite =
      std::any_of(id_counts.begin(), id_counts.end(), [](const auto& kv) { return kv.second > 1; });

  std::vector<nlohmann::json> rows;
  int skipped = 0;
  for (const GenerationRecord& rec : records) {
    if (!rec.ok()) {
      ++skipped;
      continue;
    }
    auto it = qa_map.find(rec.qa_id);
    if (it == qa_map.end()) throw Error(gen_path + ": qa id '" + rec.qa_id + "' not in " + qa_path);
    const std::string item_id =
        composite ? rec.qa_id + "|" + to_string(rec.config) + "|" + rec.kg_name + "|" + rec.model
                  : rec.qa_id;
    nlohmann::json row = {{"item_id", item_id},   {"qa_id", rec.qa_id},
                          {"config", to_string(rec.config)}, {"kg", rec.kg_name},
                          {"model", rec.model}};
    try {
      const JudgeScores scores = judge(provider, *transport, it->second.question, rec.answer);
      row["concreteness"] =
          scores.concreteness ? nlohmann::json(*scores.concreteness) : nlohmann::json(nullptr);
      row["info_richness"] =
          scores.info_richness ? nlohmann::json(*scores.info_richness) : nlohmann::json(nullptr);
      row["relevance_accuracy"] = scores.relevance_accuracy
                                      ? nlohmann::json(*scores.relevance_accuracy)
                                      : nlohmann::json(nullptr);
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
    rows.push_back(std::move(row));
  }
  write_jsonl(out_path, rows);
  std::cout << "judged " << rows.size() << " records (" << skipped
            << " failed generations skipped) -> " << out_path << "\n";
}

void cmd_score(const std::string& gen_path, const std::string& qa_path,
               const std::vector<std::string>& lexicon_paths, const std::string& out_path,
               bool plural_fold) {
  const TermLexicon lex = TermLexicon::load(lexicon_paths, plural_fold);
  const auto qa_map = qa_by_id(load_qa(qa_path));

  std::vector<nlohmann::json> rows;
  std::vector<TermRatios> all_ratios;
  for (const nlohmann::json& row : read_jsonl(gen_path)) {
    const GenerationRecord rec = GenerationRecord::from_json(row);
    nlohmann::json out = {{"qa_id", rec.qa_id},
                          {"config", to_string(rec.config)},
                          {"kg", rec.kg_name},
                          {"model", rec.model}};
    if (!rec.ok()) {
      out["gen_failed"] = true;
      out["error"] = rec.error;
      rows.push_back(std::move(out));
      continue;
    }
    auto it = qa_map.find(rec.qa_id);
    if (it == qa_map.end()) throw Error(gen_path + ": qa id '" + rec.qa_id + "' not in " + qa_path);
    const TermSets ts = term_sets(lex, it->second.question, rec.answer, it->second.reference_answer);
    const TermRatios ratios = term_ratios(ts);
    const NgramScores ngrams = score_ngrams(rec.answer, it->second.reference_answer);
    all_ratios.push_back(ratios);
    out["gen_failed"] = false;
    out["atr"] = ratios.atr ? nlohmann::json(*ratios.atr) : nlohmann::json(nullptr);
    out["acr"] = ratios.acr ? nlohmann::json(*ratios.acr) : nlohmann::json(nullptr);
    out["iir"] = ratios.iir ? nlohmann::json(*ratios.iir) : nlohmann::json(nullptr);
    out["rouge1"] = ngrams.rouge1_f;
    out["rouge2"] = ngrams.rouge2_f;
    out["rougeL"] = ngrams.rougeL_f;
    out["bleu"] = ngrams.bleu;
    rows.push_back(std::move(out));
  }
  write_jsonl(out_path, rows);

  const RatioAggregate agg = aggregate_ratios(all_ratios);
  std::cout << "scored " << all_ratios.size() << " of " << rows.size() << " records -> "
            << out_path << "\n";
  const auto show = [](const char* name, const std::optional<double>& v, int excluded) {
    std::cout << "  " << name << ": ";
    if (v)
      std::printf("%.2f", *v);
    else
      std::cout << "-";
    std::cout << " (excluded " << excluded << ")\n";
  };
  show("ATR%", agg.atr_pct, agg.atr_excluded);
  show("ACR%", agg.acr_pct, agg.acr_excluded);
  show("IIR%", agg.iir_pct, agg.iir_excluded);
}

void cmd_correlate(const std::string& judged_path, const std::string& human_path,
                   const std::string& out_path) {
  const std::vector<JudgedItem> judged = load_judged(judged_path);
  const HumanScores human = load_human_csv(human_path);
  const JudgeHumanCorrelation result = correlate_judge_human(judged, human);
  const std::string content = result.to_json().dump(2) + "\n";
  write_file_atomic(out_path, content);
  std::cout << content;
}

int cmd_run(const std::string& plan_path, const std::string& output_dir, const std::string& qa,
            int max_entities, const std::string& mode, int top_n) {
  ExperimentPlan plan = ExperimentPlan::from_file(plan_path);
  // flags win over the plan file
  if (!output_dir.empty()) plan.output_dir = output_dir;
  if (!qa.empty()) plan.qa_path = qa;
  if (max_entities >= 0) plan.max_entities = max_entities;
  if (!mode.empty()) plan.retrieval_mode = mode_from(mode);
  if (top_n >= 1) plan.top_n = top_n;

  const ResultTable table = finqa::run(plan);
  std::cout << format_report(table, ReportFormat::Markdown);
  std::cout << "table: " << plan.output_dir << "/table.json\n";
  if (table.completed_items() == 0) {
    std::cerr << "error: zero items completed\n";
    return 1;
  }
  return 0;
}

void cmd_report(const std::string& table_path, const std::string& format_raw,
                const std::string& out_path) {
  const ResultTable table = load_table(table_path);
  const ReportFormat format = parse_report_format(format_raw);
  const std::string content = format_report(table, format);
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    write_file_atomic(out_path, content);
    std::cout << "report written to " << out_path << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal-KG answer rehearsal and evaluation toolkit"};
  app.require_subcommand(1);

  // lexicon
  auto* lexicon_cmd = app.add_subcommand("lexicon", "dictionary operations");
  lexicon_cmd->require_subcommand(1);
  auto* lex_check = lexicon_cmd->add_subcommand("check", "load dictionaries and print term count");
  std::vector<std::string> lex_files;
  bool lex_fold = false;
  lex_check->add_option("files", lex_files, "term files")->required()->expected(-1);
  lex_check->add_flag("--plural-fold", lex_fold, "fold trailing-s plurals when matching");
  lex_check->callback([&] { cmd_lexicon_check(lex_files, lex_fold); });

  // corpus
  auto* corpus_cmd = app.add_subcommand("corpus", "QA and argument-sentence ingestion");
  corpus_cmd->require_subcommand(1);
  auto* corpus_validate = corpus_cmd->add_subcommand("validate", "validate a QA JSONL file");
  std::string cv_qa;
  corpus_validate->add_option("qa", cv_qa, "qa.jsonl")->required();
  corpus_validate->callback([&] { cmd_corpus_validate(cv_qa); });

  auto* corpus_pair = corpus_cmd->add_subcommand("pair", "pair premises with claims");
  std::string cp_sentences, cp_out;
  int cp_window = 3;
  corpus_pair->add_option("sentences", cp_sentences, "sentences.jsonl")->required();
  corpus_pair->add_option("--window", cp_window, "max sentence distance (default 3)");
  corpus_pair->add_option("--out", cp_out, "output pairs.jsonl")->required();
  corpus_pair->callback([&] { cmd_corpus_pair(cp_sentences, cp_window, cp_out); });

  // kg
  auto* kg_cmd = app.add_subcommand("kg", "causal knowledge graph operations");
  kg_cmd->require_subcommand(1);
  auto* kg_build_cmd = kg_cmd->add_subcommand("build", "build a graph from premise/claim pairs");
  std::string kb_pairs, kb_out, kb_neutralize = "remove-both";
  std::vector<std::string> kb_lexicon;
  bool kb_fold = false;
  kg_build_cmd->add_option("--pairs", kb_pairs, "pairs.jsonl")->required();
  kg_build_cmd->add_option("--lexicon", kb_lexicon, "term files")->required();
  kg_build_cmd->add_option("--neutralize", kb_neutralize,
                           "remove-both | keep-dominant | none (default remove-both)");
  kg_build_cmd->add_option("--out", kb_out, "output kg.tsv")->required();
  kg_build_cmd->add_flag("--plural-fold", kb_fold, "fold trailing-s plurals when matching");
  kg_build_cmd->callback([&] { cmd_kg_build(kb_pairs, kb_lexicon, kb_neutralize, kb_out, kb_fold); });

  auto* kg_stats_cmd = kg_cmd->add_subcommand("stats", "entity and relation counts");
  std::string ks_path;
  kg_stats_cmd->add_option("kg", ks_path, "kg.tsv")->required();
  kg_stats_cmd->callback([&] { cmd_kg_stats(ks_path); });

  auto* kg_retrieve_cmd = kg_cmd->add_subcommand("retrieve", "effect entities for a question");
  std::string kr_path, kr_question, kr_mode = "all";
  int kr_n = 10;
  kg_retrieve_cmd->add_option("kg", kr_path, "kg.tsv")->required();
  kg_retrieve_cmd->add_option("--question", kr_question, "question text")->required();
  kg_retrieve_cmd->add_option("--mode", kr_mode, "all | top-n (default all)");
  kg_retrieve_cmd->add_option("--n", kr_n, "entity budget for top-n");
  kg_retrieve_cmd->callback([&] { cmd_kg_retrieve(kr_path, kr_question, kr_mode, kr_n); });

  // prompt
  auto* prompt_cmd = app.add_subcommand("prompt", "prompt rendering");
  prompt_cmd->require_subcommand(1);
  auto* prompt_render_cmd = prompt_cmd->add_subcommand("render", "render one prompt to stdout");
  std::string pr_config, pr_qa, pr_id, pr_kg, pr_mode = "all", pr_templates;
  int pr_n = 10, pr_max_entities = -1;
  bool pr_strict = false;
  prompt_render_cmd->add_option("--config", pr_config, "baseline | presentation_only | kg_only | kg_and_presentation")->required();
  prompt_render_cmd->add_option("--qa", pr_qa, "qa.jsonl")->required();
  prompt_render_cmd->add_option("--id", pr_id, "qa id")->required();
  prompt_render_cmd->add_option("--kg", pr_kg, "kg.tsv (for KG-bearing configs)");
  prompt_render_cmd->add_option("--mode", pr_mode, "all | top-n");
  prompt_render_cmd->add_option("--n", pr_n, "entity budget for top-n");
  prompt_render_cmd->add_option("--max-entities", pr_max_entities, "cap on entities rendered");
  prompt_render_cmd->add_option("--templates", pr_templates, "directory of template overrides");
  prompt_render_cmd->add_flag("--strict", pr_strict, "error on empty entity list");
  prompt_render_cmd->callback([&] {
    cmd_prompt_render(pr_config, pr_qa, pr_id, pr_kg, pr_mode, pr_n, pr_max_entities,
                      pr_templates, pr_strict);
  });

  auto* prompt_templates_cmd =
      prompt_cmd->add_subcommand("templates", "export the built-in templates");
  std::string pt_out;
  prompt_templates_cmd->add_option("--out", pt_out, "output directory")->required();
  prompt_templates_cmd->callback([&] { cmd_prompt_templates(pt_out); });

  // generate
  auto* generate_cmd = app.add_subcommand("generate", "batch answer generation");
  std::string g_provider, g_config = "all", g_qa, g_kg, g_kg_name, g_mode = "all", g_out;
  int g_n = 10, g_max_entities = -1;
  generate_cmd->add_option("--provider", g_provider, "provider config JSON")->required();
  generate_cmd->add_option("--config", g_config, "prompt config or 'all' (default all)");
  generate_cmd->add_option("--qa", g_qa, "qa.jsonl")->required();
  generate_cmd->add_option("--kg", g_kg, "kg.tsv (for KG-bearing configs)");
  generate_cmd->add_option("--kg-name", g_kg_name, "name recorded for the KG (default: path)");
  generate_cmd->add_option("--mode", g_mode, "all | top-n");
  generate_cmd->add_option("--n", g_n, "entity budget for top-n");
  generate_cmd->add_option("--max-entities", g_max_entities, "cap on entities rendered");
  generate_cmd->add_option("--out", g_out, "output gen.jsonl")->required();
  generate_cmd->callback([&] {
    cmd_generate(g_provider, g_config, g_qa, g_kg, g_kg_name, g_mode, g_n, g_max_entities, g_out);
  });

  // judge
  auto* judge_cmd = app.add_subcommand("judge", "rate generated answers");
  std::string j_provider, j_gen, j_qa, j_out;
  judge_cmd->add_option("--provider", j_provider, "provider config JSON")->required();
  judge_cmd->add_option("--gen", j_gen, "gen.jsonl")->required();
  judge_cmd->add_option("--qa", j_qa, "qa.jsonl (for the questions)")->required();
  judge_cmd->add_option("--out", j_out, "output judged.jsonl")->required();
  judge_cmd->callback([&] { cmd_judge(j_provider, j_gen, j_qa, j_out); });

  // score
  auto* score_cmd = app.add_subcommand("score", "term-ratio and n-gram metrics");
  std::string s_gen, s_qa, s_out;
  std::vector<std::string> s_lexicon;
  bool s_fold = false;
  score_cmd->add_option("--gen", s_gen, "gen.jsonl")->required();
  score_cmd->add_option("--qa", s_qa, "qa.jsonl")->required();
  score_cmd->add_option("--lexicon", s_lexicon, "term files")->required();
  score_cmd->add_option("--out", s_out, "output scores.jsonl")->required();
  score_cmd->add_flag("--plural-fold", s_fold, "fold trailing-s plurals when matching");
  score_cmd->callback([&] { cmd_score(s_gen, s_qa, s_lexicon, s_out, s_fold); });

  // correlate
  auto* correlate_cmd = app.add_subcommand("correlate", "judge vs human correlation");
  std::string c_judged, c_human, c_out;
  correlate_cmd->add_option("--judged", c_judged, "judged.jsonl")->required();
  correlate_cmd->add_option("--human", c_human, "human scores CSV")->required();
  correlate_cmd->add_option("--out", c_out, "output corr.json")->required();
  correlate_cmd->callback([&] { cmd_correlate(c_judged, c_human, c_out); });

  // run
  auto* run_cmd = app.add_subcommand("run", "execute a full experiment plan");
  std::string r_plan, r_output_dir, r_qa, r_mode;
  int r_max_entities = -1, r_top_n = 0, r_exit = 0;
  run_cmd->add_option("--plan", r_plan, "plan JSON")->required();
  run_cmd->add_option("--output-dir", r_output_dir, "override plan output_dir");
  run_cmd->add_option("--qa", r_qa, "override plan qa_path");
  run_cmd->add_option("--max-entities", r_max_entities, "override plan max_entities");
  run_cmd->add_option("--mode", r_mode, "override plan retrieval_mode");
  run_cmd->add_option("--n", r_top_n, "override plan top_n");
  run_cmd->callback(
      [&] { r_exit = cmd_run(r_plan, r_output_dir, r_qa, r_max_entities, r_mode, r_top_n); });

  // report
  auto* report_cmd = app.add_subcommand("report", "format a result table");
  std::string rep_table, rep_format = "markdown", rep_out = "-";
  report_cmd->add_option("--table", rep_table, "table.json")->required();
  report_cmd->add_option("--format", rep_format, "csv | markdown | json (default markdown)");
  report_cmd->add_option("--out", rep_out, "output file, '-' for stdout");
  report_cmd->callback([&] { cmd_report(rep_table, rep_format, rep_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return r_exit;
}
