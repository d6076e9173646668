#pragma once

#include <vector>

#include "clinact/corpus.hpp"

namespace clinact {

/// Ordered slice of consecutive sentences from one document; the prompt unit.
struct ContextBatch {
  std::string doc_id;
  int batch_index = 1;  // 1-based
  int k = 1;            // configured batch size
  std::vector<SentenceRecord> sentences;
};

/// Partitions one document's sentences into non-overlapping batches of size k;
/// only the final batch may be smaller. Input must be sorted by sent_index
/// with no gaps and a single doc_id. k < 1 is a configuration error.
std::vector<ContextBatch> partition(const std::vector<SentenceRecord>& records,
                                    int k);

}  // namespace clinact
