#pragma once

#include <cstddef>
#include <vector>

#include "sparsenav/encoders.hpp"

namespace sparsenav {

enum class Metric : std::uint8_t { Hamming = 1, Euclidean = 2 };

// Hamming for the hash models, Euclidean for perfect memory.
Metric metric_for(Model model);

// The set of stored memory items. Append-only while training, then frozen for testing.
class MemoryStore {
 public:
  MemoryStore(Metric metric, std::size_t item_dim);

  // Throws std::invalid_argument if the item kind or length does not fit the store,
  // StateError once frozen.
  void store_item(HashVector item);
  void freeze() noexcept { frozen_ = true; }

  Metric metric() const noexcept { return metric_; }
  std::size_t item_dim() const noexcept { return item_dim_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  bool frozen() const noexcept { return frozen_; }
  const std::vector<HashVector>& items() const noexcept { return items_; }

  bool operator==(const MemoryStore&) const = default;

 private:
  Metric metric_;
  std::size_t item_dim_;
  bool frozen_ = false;
  std::vector<HashVector> items_;
};

struct NoveltyResult {
  double d = 0.0;
  std::size_t argmin_index = 0;
};

// Hamming: popcount(a XOR b). Euclidean: sqrt of the exact integer sum of squared differences.
double dissimilarity(const HashVector& a, const HashVector& b, Metric metric, OpCounts* ops = nullptr);

// Minimum dissimilarity between an already encoded query and every stored item; the
// first index attaining it is reported. Throws StateError on an empty store.
NoveltyResult nearest_item(const MemoryStore& store, const HashVector& code, OpCounts* ops = nullptr);

// Encodes x once and scans the store.
NoveltyResult evaluate_novelty(const MemoryStore& store, const InputVector& x, const Encoder& encoder,
                               OpCounts* ops = nullptr);

}  // namespace sparsenav
