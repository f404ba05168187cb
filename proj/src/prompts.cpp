#include "finqa/prompts.hpp"

#include "finqa/error.hpp"
#include "finqa/hash.hpp"
#include "finqa/io.hpp"

namespace finqa {

std::string to_string(PromptConfig config) {
  switch (config) {
    case PromptConfig::Baseline: return "baseline";
    case PromptConfig::PresentationOnly: return "presentation_only";
    case PromptConfig::KgOnly: return "kg_only";
    case PromptConfig::PresentationAndKg: return "kg_and_presentation";
  }
  return "baseline";
}

PromptConfig parse_prompt_config(std::string_view raw) {
  if (raw == "baseline") return PromptConfig::Baseline;
  if (raw == "presentation_only" || raw == "presentation") return PromptConfig::PresentationOnly;
  if (raw == "kg_only" || raw == "kg") return PromptConfig::KgOnly;
  if (raw == "kg_and_presentation" || raw == "presentation_and_kg")
    return PromptConfig::PresentationAndKg;
  throw Error("unknown prompt config: \"" + std::string(raw) +
              "\" (expected baseline, presentation_only, kg_only, or kg_and_presentation)");
}

bool needs_presentation(PromptConfig config) {
  return config == PromptConfig::PresentationOnly || config == PromptConfig::PresentationAndKg;
}

bool needs_kg(PromptConfig config) {
  return config == PromptConfig::KgOnly || config == PromptConfig::PresentationAndKg;
}

namespace {

constexpr const char* kQuestionBlock = "Below are the questions during the earnings call: {Question}";
constexpr const char* kRemarksBlock =
    "Before the earnings call, the executive prepared remarks: {Prepare Remarks}";
constexpr const char* kKgBlock =
    "Please infer based on the relevant terms obtained from the earnings call knowledge graph: "
    "{Extract related entities from KG}";
constexpr const char* kClosingBaseline =
    "Assume the role of a company executive, and provide an oral response in English narrative "
    "format, without paragraphs:";
constexpr const char* kClosing =
    "Assume the role of a company executive and provide an oral response in English narrative "
    "format, without paragraphs:";

std::string join_blocks(std::initializer_list<const char*> blocks) {
  std::string out;
  for (const char* block : blocks) {
    if (!out.empty()) out += "\n\n";
    out += block;
  }
  return out;
}

void replace_all(std::string& text, std::string_view placeholder, std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(placeholder, pos)) != std::string::npos) {
    text.replace(pos, placeholder.size(), value);
    pos += value.size();
  }
}

}  // namespace

const TemplateSet& TemplateSet::builtin() {
  static const TemplateSet set{
      join_blocks({kQuestionBlock, kClosingBaseline}),
      join_blocks({kQuestionBlock, kRemarksBlock, kClosing}),
      join_blocks({kQuestionBlock, kKgBlock, kClosing}),
      join_blocks({kQuestionBlock, kRemarksBlock, kKgBlock, kClosing}),
  };
  return set;
}

TemplateSet TemplateSet::load_dir(const std::string& dir) {
  TemplateSet set;
  set.baseline = read_text_file(dir + "/baseline.txt");
  set.presentation_only = read_text_file(dir + "/presentation_only.txt");
  set.kg_only = read_text_file(dir + "/kg_only.txt");
  set.presentation_and_kg = read_text_file(dir + "/presentation_and_kg.txt");
  return set;
}

const std::string& TemplateSet::for_config(PromptConfig config) const {
  switch (config) {
    case PromptConfig::Baseline: return baseline;
    case PromptConfig::PresentationOnly: return presentation_only;
    case PromptConfig::KgOnly: return kg_only;
    case PromptConfig::PresentationAndKg: return presentation_and_kg;
  }
  return baseline;
}

RenderedPrompt render(PromptConfig config, const QAPair& qa, const std::vector<Term>& entities,
                      const RenderOptions& opts) {
  const TemplateSet& templates = opts.templates ? *opts.templates : TemplateSet::builtin();

  if (needs_presentation(config) && !qa.prepared_remarks)
    throw Error("prompt config '" + to_string(config) + "' requires prepared_remarks (qa id '" +
                qa.id + "')");

  RenderedPrompt out;
  out.config = config;
  out.qa_id = qa.id;
  out.text = templates.for_config(config);
  replace_all(out.text, "{Question}", qa.question);
  if (needs_presentation(config)) replace_all(out.text, "{Prepare Remarks}", *qa.prepared_remarks);
  if (needs_kg(config)) {
    std::size_t count = entities.size();
    if (opts.max_entities && *opts.max_entities >= 0)
      count = std::min<std::size_t>(count, static_cast<std::size_t>(*opts.max_entities));
    std::string joined;
    if (count == 0) {
      if (opts.strict_entities)
        throw Error("prompt config '" + to_string(config) + "' has an empty entity list (qa id '" +
                    qa.id + "')");
      joined = "(none)";
    } else {
      for (std::size_t i = 0; i < count; ++i) {
        if (i > 0) joined += ", ";
        joined += entities[i];
      }
    }
    replace_all(out.text, "{Extract related entities from KG}", joined);
    out.entity_count = static_cast<int>(count);
  }
  out.content_hash = content_hash(out.text);
  return out;
}

bool golden_check(PromptConfig config, const QAPair& qa, const std::vector<Term>& entities,
                  const std::string& golden_path, const RenderOptions& opts) {
  const std::string golden = read_text_file(golden_path);
  return render(config, qa, entities, opts).text == golden;
}

}  // namespace finqa
