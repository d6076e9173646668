#include "clinact/prompts.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "clinact/csv.hpp"
#include "clinact/errors.hpp"

namespace clinact {

using json = nlohmann::ordered_json;

PromptVersion PromptVersion::from_tag(PromptVersionTag tag) {
  PromptVersion v;
  v.tag = tag;
  switch (tag) {
    case PromptVersionTag::kV1:
      break;
    case PromptVersionTag::kV2:
      v.has_category_definitions = true;
      v.has_few_shot_examples = true;
      break;
    case PromptVersionTag::kV3:
      v.has_category_definitions = true;
      v.has_few_shot_examples = true;
      v.two_stage = true;
      v.has_inclusion_exclusion_rules = true;
      break;
    case PromptVersionTag::kV4:
      v.has_category_definitions = true;
      v.has_few_shot_examples = true;
      v.two_stage = true;
      v.has_inclusion_exclusion_rules = true;
      v.implicit_action_rule = true;
      v.multi_label_rule = true;
      break;
  }
  return v;
}

std::optional<PromptVersion> PromptVersion::parse(std::string_view name) {
  if (name == "v1") return from_tag(PromptVersionTag::kV1);
  if (name == "v2") return from_tag(PromptVersionTag::kV2);
  if (name == "v3") return from_tag(PromptVersionTag::kV3);
  if (name == "v4") return from_tag(PromptVersionTag::kV4);
  return std::nullopt;
}

std::string_view PromptVersion::name() const {
  switch (tag) {
    case PromptVersionTag::kV1: return "v1";
    case PromptVersionTag::kV2: return "v2";
    case PromptVersionTag::kV3: return "v3";
    case PromptVersionTag::kV4: return "v4";
  }
  return "v4";
}

const std::vector<FewShotExample>& few_shot_examples() {
  static const std::vector<FewShotExample> examples = {
      {"The patient was instructed to hold ASA and refrain from NSAIDs for 2 "
       "weeks.",
       true,
       {ActionCategory::kMedication},
       "Explicit medication change/hold instruction"},
      {"Discharged on Atorvastatin 40 mg daily and Aspirin 81 mg.",
       false,
       {},
       "Standard continuation of existing medications"},
      {"The patient requires a neurology consult at XYZ for evaluation.",
       true,
       {ActionCategory::kAppointment},
       "Explicit specialist referral"},
      {"Follow up with your primary care provider as needed for any new "
       "concerns.",
       false,
       {},
       "Non-specific, conditional guidance without a concrete action"},
      {"We ask that the patient's family physician repeat these tests in 2 "
       "weeks to ensure resolution.",
       true,
       {ActionCategory::kLab},
       "Explicit laboratory test follow-up"},
      {"Please arrive at 11 am for X-rays before your visit.",
       true,
       {ActionCategory::kAppointment, ActionCategory::kImaging},
       "Multiple explicit procedural actions"},
  };
  return examples;
}

std::string_view system_prompt() {
  return "You are a clinical information extraction assistant. You read "
         "discharge summary sentences and answer with a single JSON object, "
         "nothing else.";
}

namespace {

std::string sentences_block(const ContextBatch& batch,
                            const std::vector<int>* subset) {
  std::string out;
  auto emit = [&](int index) {
    json line;
    line["index"] = index;
    line["sentence"] = batch.sentences[static_cast<std::size_t>(index)]
                           .sentence_text();
    out += line.dump();
    out.push_back('\n');
  };
  if (subset) {
    for (int i : *subset) emit(i);
  } else {
    for (std::size_t i = 0; i < batch.sentences.size(); ++i) {
      emit(static_cast<int>(i));
    }
  }
  if (!out.empty()) out.pop_back();
  return out;
}

std::string definitions_block(bool with_definitions) {
  std::string out;
  for (ActionCategory c : kAllCategories) {
    out += "- ";
    out += display_name(c);
    if (with_definitions) {
      out += ": ";
      out += category_definition(c);
    }
    out.push_back('\n');
  }
  out.pop_back();
  return out;
}

enum class ExampleStyle { kVerdicts, kLabelsActionableOnly, kLabelsAll };

std::string examples_block(ExampleStyle style) {
  std::string out;
  for (const FewShotExample& ex : few_shot_examples()) {
    if (style == ExampleStyle::kLabelsActionableOnly && !ex.actionable) {
      continue;
    }
    out += "Sentence: \"" + ex.sentence + "\"\n";
    if (style == ExampleStyle::kVerdicts) {
      out += std::string("Verdict: ") +
             (ex.actionable ? "Actionable" : "Non-Actionable") + "\n";
    } else {
      out += "Labels: " + json(to_display_names(ex.labels)).dump() + "\n";
    }
    out += "Reason: " + ex.rationale + "\n\n";
  }
  if (!out.empty()) {
    out.pop_back();
    out.pop_back();
  }
  return out;
}

void replace_all(std::string& text, std::string_view from,
                 std::string_view to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  PromptLibrary lib;
  for (const std::string& name : expected_template_files()) {
    const auto path = dir / (name + ".txt");
    if (!std::filesystem::exists(path)) {
      throw IoError("missing prompt template: " + path.string());
    }
    lib.templates_[name] = csv::read_text_file(path);
  }
  return lib;
}

const std::vector<std::string>& PromptLibrary::expected_template_files() {
  static const std::vector<std::string> names = {
      "v1_single_step", "v2_single_step", "v3_stage1",
      "v3_stage2",      "v4_stage1",      "v4_stage2",
  };
  return names;
}

std::string PromptLibrary::render(const std::string& key,
                                  const ContextBatch& batch,
                                  const std::vector<int>* subset,
                                  const PromptVersion& version) const {
  auto it = templates_.find(key);
  if (it == templates_.end()) {
    throw ProtocolError("prompt template not loaded: " + key);
  }
  std::string text = it->second;
  replace_all(text, "{{sentences}}", sentences_block(batch, subset));
  replace_all(text, "{{definitions}}",
              definitions_block(version.has_category_definitions));
  ExampleStyle style;
  if (key.ends_with("stage1")) {
    style = ExampleStyle::kVerdicts;
  } else if (key.ends_with("stage2")) {
    style = ExampleStyle::kLabelsActionableOnly;
  } else {
    style = ExampleStyle::kLabelsAll;
  }
  replace_all(text, "{{examples}}", examples_block(style));
  if (text.find("{{") != std::string::npos) {
    throw ProtocolError("unresolved placeholder in template " + key);
  }
  return text;
}

std::string PromptLibrary::render_stage1(const ContextBatch& batch,
                                         const PromptVersion& version) const {
  if (!version.two_stage) {
    throw VersionMismatchError(std::string(version.name()) +
                               " is single-step; stage-1 prompt undefined");
  }
  return render(std::string(version.name()) + "_stage1", batch, nullptr,
                version);
}

std::optional<std::string> PromptLibrary::render_stage2(
    const ContextBatch& batch, const std::vector<int>& actionable_indices,
    const PromptVersion& version) const {
  if (!version.two_stage) {
    throw VersionMismatchError(std::string(version.name()) +
                               " is single-step; stage-2 prompt undefined");
  }
  if (actionable_indices.empty()) return std::nullopt;
  std::vector<int> subset(actionable_indices);
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  for (int i : subset) {
    if (i < 0 || i >= static_cast<int>(batch.sentences.size())) {
      throw ProtocolError("actionable index " + std::to_string(i) +
                          " outside batch of " +
                          std::to_string(batch.sentences.size()));
    }
  }
  return render(std::string(version.name()) + "_stage2", batch, &subset,
                version);
}

std::string PromptLibrary::render_single_step(
    const ContextBatch& batch, const PromptVersion& version) const {
  if (version.two_stage) {
    throw VersionMismatchError(std::string(version.name()) +
                               " is two-stage; single-step prompt undefined");
  }
  return render(std::string(version.name()) + "_single_step", batch, nullptr,
                version);
}

}  // namespace clinact
