#include "clinact/corpus.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "clinact/csv.hpp"
#include "clinact/errors.hpp"

namespace clinact {

using json = nlohmann::ordered_json;

namespace {

bool is_ws(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
         c == '\v';
}

void validate_spans(const DischargeDocument& doc) {
  for (const AnnotationSpan& span : doc.spans) {
    if (span.start >= span.end || span.end > doc.text.size()) {
      throw CorpusIntegrityError(
          "doc " + doc.doc_id + ": span [" + std::to_string(span.start) +
          ", " + std::to_string(span.end) + ") out of bounds for text of " +
          std::to_string(doc.text.size()) + " chars");
    }
    if (span.labels.empty()) {
      throw TaxonomyError("doc " + doc.doc_id + ": span [" +
                          std::to_string(span.start) + ", " +
                          std::to_string(span.end) + ") has no labels");
    }
  }
}

void validate_offsets(const DischargeDocument& doc) {
  if (!doc.sentence_offsets) return;
  std::size_t prev_end = 0;
  bool first = true;
  for (const SentenceRange& r : *doc.sentence_offsets) {
    if (r.first >= r.second || r.second > doc.text.size()) {
      throw CorpusIntegrityError("doc " + doc.doc_id +
                                 ": sentence offset [" +
                                 std::to_string(r.first) + ", " +
                                 std::to_string(r.second) + ") out of bounds");
    }
    if (!first && r.first < prev_end) {
      throw CorpusIntegrityError("doc " + doc.doc_id +
                                 ": sentence offsets overlap or are unsorted");
    }
    prev_end = r.second;
    first = false;
  }
}

LabelSet parse_label_array(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ParseError(where + ": labels must be an array");
  LabelSet labels;
  for (const auto& item : arr) {
    if (!item.is_string()) {
      throw ParseError(where + ": label entries must be strings");
    }
    auto cat = parse_category(item.get<std::string>());
    if (!cat) {
      throw TaxonomyError(where + ": unknown label '" +
                          item.get<std::string>() + "'");
    }
    labels.insert(*cat);
  }
  return labels;
}

}  // namespace

std::string SentenceRecord::sentence_text() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<SentenceRange> segment(const DischargeDocument& document) {
  if (document.sentence_offsets) {
    validate_offsets(document);
    return *document.sentence_offsets;
  }
  const std::string& text = document.text;
  std::vector<SentenceRange> out;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    while (i < n && is_ws(text[i])) ++i;
    if (i >= n) break;
    const std::size_t start = i;
    std::size_t end = n;
    for (std::size_t j = i; j < n; ++j) {
      const char c = text[j];
      if (c == '\n') {
        end = j;
        break;
      }
      if (c == '.' || c == '?' || c == '!') {
        std::size_t m = j + 1;
        if (m < n && is_ws(text[m])) {
          while (m < n && is_ws(text[m])) ++m;
          if (m < n && text[m] >= 'A' && text[m] <= 'Z') {
            end = j + 1;
            break;
          }
        }
      }
    }
    std::size_t e = end;
    while (e > start && is_ws(text[e - 1])) --e;
    if (e > start) out.emplace_back(start, e);
    i = end;
  }
  return out;
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ws(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_ws(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::vector<SentenceRecord> aggregate_labels(
    const DischargeDocument& document,
    const std::vector<SentenceRange>& ranges) {
  validate_spans(document);
  std::vector<SentenceRecord> records;
  records.reserve(ranges.size());
  int index = 0;
  for (const SentenceRange& range : ranges) {
    SentenceRecord rec;
    rec.doc_id = document.doc_id;
    rec.sent_index = index++;
    rec.tokens = whitespace_tokens(
        std::string_view(document.text).substr(range.first,
                                               range.second - range.first));
    for (const AnnotationSpan& span : document.spans) {
      if (span.start < range.second && span.end > range.first) {
        rec.true_labels.insert(span.labels.begin(), span.labels.end());
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<SentenceRecord> build_sentence_records(
    const DischargeDocument& document) {
  return aggregate_labels(document, segment(document));
}

std::vector<DischargeDocument> documents_from_jsonl(std::string_view text,
                                                    std::string_view origin) {
  std::vector<DischargeDocument> docs;
  std::set<std::string> seen_ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where =
        std::string(origin) + ": line " + std::to_string(line_no);

    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw ParseError(where + ": not a JSON object");
    }
    DischargeDocument doc;
    if (!j.contains("doc_id") || !j["doc_id"].is_string() ||
        j["doc_id"].get<std::string>().empty()) {
      throw ParseError(where + ": doc_id must be a non-empty string");
    }
    doc.doc_id = j["doc_id"].get<std::string>();
    if (!seen_ids.insert(doc.doc_id).second) {
      throw CorpusIntegrityError(where + ": duplicate doc_id '" + doc.doc_id +
                                 "'");
    }
    if (!j.contains("text") || !j["text"].is_string()) {
      throw ParseError(where + ": text must be a string");
    }
    doc.text = j["text"].get<std::string>();
    if (j.contains("spans")) {
      if (!j["spans"].is_array()) {
        throw ParseError(where + ": spans must be an array");
      }
      for (const auto& s : j["spans"]) {
        if (!s.is_object() || !s.contains("start") || !s.contains("end") ||
            !s["start"].is_number_integer() || !s["end"].is_number_integer()) {
          throw ParseError(where + ": span needs integer start/end");
        }
        const auto start = s["start"].get<long long>();
        const auto end = s["end"].get<long long>();
        if (start < 0 || end < 0) {
          throw CorpusIntegrityError(where + ": negative span offset");
        }
        AnnotationSpan span;
        span.start = static_cast<std::size_t>(start);
        span.end = static_cast<std::size_t>(end);
        span.labels = parse_label_array(
            s.contains("labels") ? s["labels"] : json::array(), where);
        doc.spans.push_back(std::move(span));
      }
    }
    if (j.contains("sentence_offsets") && !j["sentence_offsets"].is_null()) {
      if (!j["sentence_offsets"].is_array()) {
        throw ParseError(where + ": sentence_offsets must be an array");
      }
      std::vector<SentenceRange> offsets;
      for (const auto& o : j["sentence_offsets"]) {
        if (!o.is_array() || o.size() != 2 || !o[0].is_number_integer() ||
            !o[1].is_number_integer() || o[0].get<long long>() < 0 ||
            o[1].get<long long>() < 0) {
          throw ParseError(where + ": sentence offset must be [start, end]");
        }
        offsets.emplace_back(o[0].get<std::size_t>(), o[1].get<std::size_t>());
      }
      doc.sentence_offsets = std::move(offsets);
    }
    validate_spans(doc);
    validate_offsets(doc);
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<DischargeDocument> read_documents_jsonl(
    const std::filesystem::path& path) {
  return documents_from_jsonl(csv::read_text_file(path), path.string());
}

std::string documents_to_jsonl(const std::vector<DischargeDocument>& docs) {
  std::string out;
  for (const DischargeDocument& doc : docs) {
    json j;
    j["doc_id"] = doc.doc_id;
    j["text"] = doc.text;
    j["spans"] = json::array();
    for (const AnnotationSpan& span : doc.spans) {
      json s;
      s["start"] = span.start;
      s["end"] = span.end;
      s["labels"] = to_display_names(span.labels);
      j["spans"].push_back(std::move(s));
    }
    if (doc.sentence_offsets) {
      j["sentence_offsets"] = json::array();
      for (const SentenceRange& r : *doc.sentence_offsets) {
        j["sentence_offsets"].push_back({r.first, r.second});
      }
    }
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

std::string records_to_csv(const std::vector<SentenceRecord>& records) {
  std::string out = "doc_id,sent_index,sentence,true_labels\n";
  for (const SentenceRecord& rec : records) {
    out += csv::format_row({rec.doc_id, std::to_string(rec.sent_index),
                            json(rec.tokens).dump(),
                            json(to_display_names(rec.true_labels)).dump()});
  }
  return out;
}

void write_records(const std::vector<SentenceRecord>& records,
                   const std::filesystem::path& path) {
  csv::write_file(path, records_to_csv(records));
}

std::vector<SentenceRecord> records_from_csv(std::string_view text,
                                             std::string_view origin) {
  auto rows = csv::parse(text, origin);
  if (rows.empty() || rows[0] != std::vector<std::string>{
                                     "doc_id", "sent_index", "sentence",
                                     "true_labels"}) {
    throw ParseError(std::string(origin) +
                     ": missing or malformed header row");
  }
  std::vector<SentenceRecord> records;
  std::map<std::string, std::set<int>> indices_per_doc;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string where =
        std::string(origin) + ": row " + std::to_string(r + 1);
    const auto& row = rows[r];
    if (row.size() != 4) {
      throw ParseError(where + ": expected 4 columns, got " +
                       std::to_string(row.size()));
    }
    SentenceRecord rec;
    rec.doc_id = row[0];
    if (rec.doc_id.empty()) throw ParseError(where + ": empty doc_id");
    try {
      std::size_t used = 0;
      rec.sent_index = std::stoi(row[1], &used);
      if (used != row[1].size() || rec.sent_index < 0) throw std::exception();
    } catch (...) {
      throw ParseError(where + ": sent_index must be a non-negative integer");
    }
    json toks = json::parse(row[2], nullptr, false);
    if (toks.is_discarded() || !toks.is_array()) {
      throw ParseError(where + ": sentence cell must be a JSON array");
    }
    for (const auto& t : toks) {
      if (!t.is_string()) {
        throw ParseError(where + ": sentence tokens must be strings");
      }
      rec.tokens.push_back(t.get<std::string>());
    }
    json labels = json::parse(row[3], nullptr, false);
    if (labels.is_discarded()) {
      throw ParseError(where + ": true_labels cell must be a JSON array");
    }
    rec.true_labels = parse_label_array(labels, where);
    if (!indices_per_doc[rec.doc_id].insert(rec.sent_index).second) {
      throw CorpusIntegrityError(where + ": duplicate (doc_id, sent_index) = (" +
                                 rec.doc_id + ", " +
                                 std::to_string(rec.sent_index) + ")");
    }
    records.push_back(std::move(rec));
  }
  for (const auto& [doc_id, indices] : indices_per_doc) {
    if (*indices.rbegin() != static_cast<int>(indices.size()) - 1) {
      throw CorpusIntegrityError(std::string(origin) + ": doc " + doc_id +
                                 ": sent_index values are not contiguous from 0");
    }
  }
  std::sort(records.begin(), records.end(),
            [](const SentenceRecord& a, const SentenceRecord& b) {
              return std::tie(a.doc_id, a.sent_index) <
                     std::tie(b.doc_id, b.sent_index);
            });
  return records;
}

std::vector<SentenceRecord> read_records(const std::filesystem::path& path) {
  return records_from_csv(csv::read_text_file(path), path.string());
}

double actionable_rate(const std::vector<SentenceRecord>& records) {
  if (records.empty()) {
    throw UndefinedRateError("actionable_rate over an empty record set");
  }
  std::size_t actionable = 0;
  for (const SentenceRecord& rec : records) {
    if (!rec.true_labels.empty()) ++actionable;
  }
  return static_cast<double>(actionable) / static_cast<double>(records.size());
}

}  // namespace clinact
