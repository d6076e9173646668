#include "clinact/categories.hpp"

#include <cctype>
#include <unordered_map>

namespace clinact {
namespace {

constexpr std::array<std::string_view, kCategoryCount> kDisplayNames = {
    "Appointment-related followup",
    "Lab-related followup",
    "Medication-related followup",
    "Imaging-related followup",
    "Procedure-related followup",
    "Case-specific instructions for patient",
    "Other helpful contextual information",
};

constexpr std::array<std::string_view, kCategoryCount> kDefinitions = {
    "Instructions to schedule or attend a clinical visit, consultation, or "
    "referral.",
    "Instructions to order, repeat, or review laboratory tests.",
    "Instructions to start, stop, change, hold, or adjust medications.",
    "Instructions to schedule or obtain diagnostic imaging studies.",
    "Instructions related to medical or surgical procedures and their care.",
    "Direct care instructions given to the patient.",
    "Clinically useful information that supports follow-up or care "
    "coordination.",
};

const std::unordered_map<std::string, ActionCategory>& alias_map() {
  static const auto* map = [] {
    auto* m = new std::unordered_map<std::string, ActionCategory>;
    for (ActionCategory c : kAllCategories) {
      m->emplace(normalize_label_key(display_name(c)), c);
    }
    // Hyphen/space variants ("follow-up", "follow up").
    for (ActionCategory c :
         {ActionCategory::kAppointment, ActionCategory::kLab,
          ActionCategory::kMedication, ActionCategory::kImaging,
          ActionCategory::kProcedure}) {
      std::string key = normalize_label_key(display_name(c));
      key.replace(key.rfind("followup"), 8, "follow up");
      m->emplace(key, c);
    }
    m->emplace("case specific patient instructions",
               ActionCategory::kCaseInstructions);
    m->emplace("case specific instructions",
               ActionCategory::kCaseInstructions);
    return m;
  }();
  return *map;
}

}  // namespace

std::string_view display_name(ActionCategory c) {
  return kDisplayNames[static_cast<int>(c)];
}

std::string_view category_definition(ActionCategory c) {
  return kDefinitions[static_cast<int>(c)];
}

std::string normalize_label_key(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char ch : s) {
    if (std::isalnum(ch)) {
      out.push_back(static_cast<char>(std::tolower(ch)));
    } else if (ch >= 0x80) {
      out.push_back(static_cast<char>(ch));
    } else if (!out.empty() && out.back() != ' ') {
      out.push_back(' ');
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::optional<ActionCategory> parse_category(std::string_view s) {
  for (ActionCategory c : kAllCategories) {
    if (s == display_name(c)) return c;
  }
  return std::nullopt;
}

std::optional<ActionCategory> match_model_label(std::string_view s) {
  const auto& aliases = alias_map();
  auto it = aliases.find(normalize_label_key(s));
  if (it == aliases.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> to_display_names(const LabelSet& labels) {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (ActionCategory c : labels) out.emplace_back(display_name(c));
  return out;
}

}  // namespace clinact
