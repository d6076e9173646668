#include "clinact/batcher.hpp"

#include "clinact/errors.hpp"

namespace clinact {

std::vector<ContextBatch> partition(const std::vector<SentenceRecord>& records,
                                    int k) {
  if (k < 1) {
    throw ConfigError("batch size k must be >= 1, got " + std::to_string(k));
  }
  std::vector<ContextBatch> batches;
  if (records.empty()) return batches;

  const std::string& doc_id = records.front().doc_id;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].doc_id != doc_id) {
      throw CorpusIntegrityError("partition input mixes documents '" + doc_id +
                                 "' and '" + records[i].doc_id + "'");
    }
    if (records[i].sent_index != records[i - 1].sent_index + 1) {
      throw CorpusIntegrityError(
          "doc " + doc_id + ": sent_index " +
          std::to_string(records[i - 1].sent_index) + " followed by " +
          std::to_string(records[i].sent_index) + " (unsorted or gapped)");
    }
  }

  const std::size_t n = records.size();
  const std::size_t stride = static_cast<std::size_t>(k);
  for (std::size_t start = 0; start < n; start += stride) {
    ContextBatch batch;
    batch.doc_id = doc_id;
    batch.batch_index = static_cast<int>(start / stride) + 1;
    batch.k = k;
    const std::size_t end = std::min(n, start + stride);
    batch.sentences.assign(records.begin() + static_cast<std::ptrdiff_t>(start),
                           records.begin() + static_cast<std::ptrdiff_t>(end));
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace clinact
