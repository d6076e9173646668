#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clinact/batcher.hpp"
#include "clinact/categories.hpp"

namespace clinact {

enum class PromptVersionTag { kV1, kV2, kV3, kV4 };

/// Feature ladder across the four prompt iterations. Flags are monotone
/// non-decreasing from v1 to v4, except two_stage which flips once at v3.
struct PromptVersion {
  PromptVersionTag tag = PromptVersionTag::kV4;
  bool has_category_definitions = false;
  bool has_few_shot_examples = false;
  bool two_stage = false;
  bool has_inclusion_exclusion_rules = false;
  bool implicit_action_rule = false;
  bool multi_label_rule = false;

  static PromptVersion from_tag(PromptVersionTag tag);
  static std::optional<PromptVersion> parse(std::string_view name);
  std::string_view name() const;
};

/// One worked example: sentence, actionability verdict, category labels.
/// Non-actionable examples carry an empty label set.
struct FewShotExample {
  std::string sentence;
  bool actionable = false;
  LabelSet labels;
  std::string rationale;
};

/// The six canonical worked examples used in few-shot blocks.
const std::vector<FewShotExample>& few_shot_examples();

/// Versioned template assets: one file per (version, stage) with
/// {{sentences}}, {{definitions}}, {{examples}} placeholders.
class PromptLibrary {
 public:
  static PromptLibrary load(const std::filesystem::path& dir);

  /// Actionability prompt over every sentence in the batch. Requires a
  /// two-stage version.
  std::string render_stage1(const ContextBatch& batch,
                            const PromptVersion& version) const;

  /// Category prompt over the actionable subset only. Returns nullopt when
  /// the subset is empty (caller skips the model call). Requires a two-stage
  /// version.
  std::optional<std::string> render_stage2(
      const ContextBatch& batch, const std::vector<int>& actionable_indices,
      const PromptVersion& version) const;

  /// v1/v2 prompt: categories for all sentences, empty list meaning no
  /// action. Requires a single-step version.
  std::string render_single_step(const ContextBatch& batch,
                                 const PromptVersion& version) const;

  static const std::vector<std::string>& expected_template_files();

 private:
  std::string render(const std::string& key, const ContextBatch& batch,
                     const std::vector<int>* subset,
                     const PromptVersion& version) const;

  std::map<std::string, std::string> templates_;
};

/// Fixed system text sent with every request.
std::string_view system_prompt();

}  // namespace clinact
