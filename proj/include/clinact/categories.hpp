#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace clinact {

/// Closed taxonomy of post-discharge clinical action categories.
enum class ActionCategory : int {
  kAppointment = 0,
  kLab,
  kMedication,
  kImaging,
  kProcedure,
  kCaseInstructions,
  kOtherContextual,
};

inline constexpr int kCategoryCount = 7;

inline constexpr std::array<ActionCategory, kCategoryCount> kAllCategories = {
    ActionCategory::kAppointment,      ActionCategory::kLab,
    ActionCategory::kMedication,       ActionCategory::kImaging,
    ActionCategory::kProcedure,        ActionCategory::kCaseInstructions,
    ActionCategory::kOtherContextual,
};

/// Canonical display string, the form written to every file.
std::string_view display_name(ActionCategory c);

/// One-line definition of the category, embedded verbatim in prompts.
std::string_view category_definition(ActionCategory c);

/// Lowercases, maps punctuation to single spaces, collapses whitespace runs,
/// trims. Idempotent: normalize(normalize(x)) == normalize(x).
std::string normalize_label_key(std::string_view s);

/// Strict parse: accepts exactly the canonical display string.
std::optional<ActionCategory> parse_category(std::string_view s);

/// Lenient match for model output: normalized-key equality plus a fixed alias
/// table covering hyphen/space spelling variants.
std::optional<ActionCategory> match_model_label(std::string_view s);

/// Ordered by enum value, so serialization order is deterministic.
using LabelSet = std::set<ActionCategory>;

std::vector<std::string> to_display_names(const LabelSet& labels);

}  // namespace clinact
