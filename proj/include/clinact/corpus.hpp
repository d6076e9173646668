#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clinact/categories.hpp"

namespace clinact {

/// Character-level annotation, half-open [start, end).
struct AnnotationSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  LabelSet labels;

  bool operator==(const AnnotationSpan&) const = default;
};

/// Half-open character range of one sentence.
using SentenceRange = std::pair<std::size_t, std::size_t>;

struct DischargeDocument {
  std::string doc_id;
  std::string text;
  std::vector<AnnotationSpan> spans;
  /// When present, segmentation is a verbatim pass-through of these ranges.
  std::optional<std::vector<SentenceRange>> sentence_offsets;
};

/// One sentence of one document with its aggregated gold label set.
struct SentenceRecord {
  std::string doc_id;
  int sent_index = 0;
  std::vector<std::string> tokens;
  LabelSet true_labels;

  /// Tokens joined by single spaces; used for prompts and reports.
  std::string sentence_text() const;

  bool operator==(const SentenceRecord&) const = default;
};

/// Sentence ranges for a document. Pre-segmented offsets are returned
/// verbatim; otherwise splits on newlines and on '.', '?', '!' followed by
/// whitespace and an uppercase letter. Ranges are trimmed of surrounding
/// whitespace, non-overlapping, and sorted.
std::vector<SentenceRange> segment(const DischargeDocument& document);

std::vector<std::string> whitespace_tokens(std::string_view text);

/// Builds one record per range; true_labels is the union of labels over all
/// annotation spans that strictly overlap the range (half-open semantics:
/// span.end == range.start does not intersect).
std::vector<SentenceRecord> aggregate_labels(
    const DischargeDocument& document, const std::vector<SentenceRange>& ranges);

/// segment + aggregate_labels.
std::vector<SentenceRecord> build_sentence_records(
    const DischargeDocument& document);

/// One JSON object per line:
/// {"doc_id": str, "text": str, "spans": [{"start", "end", "labels"}],
///  "sentence_offsets": [[int,int]]?}
std::vector<DischargeDocument> read_documents_jsonl(
    const std::filesystem::path& path);
std::vector<DischargeDocument> documents_from_jsonl(std::string_view text,
                                                    std::string_view origin);
std::string documents_to_jsonl(const std::vector<DischargeDocument>& docs);

/// Sentence interchange CSV: header doc_id,sent_index,sentence,true_labels;
/// sentence and true_labels cells are JSON arrays; UTF-8, LF endings.
std::string records_to_csv(const std::vector<SentenceRecord>& records);
void write_records(const std::vector<SentenceRecord>& records,
                   const std::filesystem::path& path);
std::vector<SentenceRecord> records_from_csv(std::string_view text,
                                             std::string_view origin);
std::vector<SentenceRecord> read_records(const std::filesystem::path& path);

/// Fraction of records with a non-empty label set. Empty input is an error.
double actionable_rate(const std::vector<SentenceRecord>& records);

}  // namespace clinact
