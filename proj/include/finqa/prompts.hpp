#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finqa/corpus.hpp"
#include "finqa/lexicon.hpp"

namespace finqa {

enum class PromptConfig { Baseline, PresentationOnly, KgOnly, PresentationAndKg };

std::string to_string(PromptConfig config);
PromptConfig parse_prompt_config(std::string_view raw);
bool needs_presentation(PromptConfig config);
bool needs_kg(PromptConfig config);

// The four generation templates. Placeholders: {Question}, {Prepare Remarks},
// {Extract related entities from KG}.
struct TemplateSet {
  std::string baseline;
  std::string presentation_only;
  std::string kg_only;
  std::string presentation_and_kg;

  static const TemplateSet& builtin();
  // Reads baseline.txt, presentation_only.txt, kg_only.txt,
  // presentation_and_kg.txt from a directory.
  static TemplateSet load_dir(const std::string& dir);
  const std::string& for_config(PromptConfig config) const;
};

struct RenderOptions {
  std::optional<int> max_entities;      // unlimited by default
  bool strict_entities = false;         // error instead of "(none)" on empty entity list
  const TemplateSet* templates = nullptr;  // defaults to builtin()
};

struct RenderedPrompt {
  std::string text;
  PromptConfig config = PromptConfig::Baseline;
  std::string qa_id;
  int entity_count = 0;
  std::string content_hash;  // pure function of text
};

// Fills the template for `config` with the question, prepared remarks, and
// the entity list joined by ", " in retrieval order (truncated to
// max_entities when given). Presentation-bearing configs require
// qa.prepared_remarks. An empty entity list renders as "(none)" unless
// strict_entities is set.
RenderedPrompt render(PromptConfig config, const QAPair& qa, const std::vector<Term>& entities,
                      const RenderOptions& opts = {});

// True iff render(...) equals the golden file byte for byte.
bool golden_check(PromptConfig config, const QAPair& qa, const std::vector<Term>& entities,
                  const std::string& golden_path, const RenderOptions& opts = {});

}  // namespace finqa
