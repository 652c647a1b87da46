#include "sparsenav/memory.hpp"

#include <cmath>
#include <stdexcept>

#include "sparsenav/errors.hpp"

namespace sparsenav {

Metric metric_for(Model model) {
  return model == Model::PerfectMemory ? Metric::Euclidean : Metric::Hamming;
}

MemoryStore::MemoryStore(Metric metric, std::size_t item_dim) : metric_(metric), item_dim_(item_dim) {
  if (item_dim == 0) throw std::invalid_argument("MemoryStore: item_dim must be positive");
}

void MemoryStore::store_item(HashVector item) {
  if (frozen_) throw StateError("MemoryStore: store is frozen");
  const bool binary = std::holds_alternative<BitVector>(item);
  if (binary != (metric_ == Metric::Hamming)) {
    throw std::invalid_argument("MemoryStore: item kind does not match the store metric");
  }
  if (sparsenav::item_dim(item) != item_dim_) throw std::invalid_argument("MemoryStore: item dimension mismatch");
  items_.push_back(std::move(item));
}

namespace {

double hamming(const BitVector& a, const BitVector& b, OpCounts* ops) {
  const auto wa = a.words();
  const auto wb = b.words();
  std::uint64_t distance = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    distance += static_cast<std::uint64_t>(std::popcount(wa[i] ^ wb[i]));
  }
  if (ops) {
    // One XOR per hash bit; one accumulation per differing bit.
    ops->eval_xor += a.size();
    ops->eval_adds += distance;
  }
  return static_cast<double>(distance);
}

double euclidean(const InputVector& a, const InputVector& b, OpCounts* ops) {
  std::uint64_t sum_sq = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::int64_t diff = static_cast<std::int64_t>(a[i]) - static_cast<std::int64_t>(b[i]);
    sum_sq += static_cast<std::uint64_t>(diff * diff);
  }
  if (ops) {
    // n subtractions + (n - 1) additions; n squares plus the final root.
    ops->eval_adds += 2 * a.size() - 1;
    ops->eval_square_mults += a.size() + 1;
  }
  return std::sqrt(static_cast<double>(sum_sq));
}

}  // namespace

double dissimilarity(const HashVector& a, const HashVector& b, Metric metric, OpCounts* ops) {
  if (item_dim(a) != item_dim(b)) throw std::invalid_argument("dissimilarity: dimension mismatch");
  if (metric == Metric::Hamming) {
    const auto* ba = std::get_if<BitVector>(&a);
    const auto* bb = std::get_if<BitVector>(&b);
    if (!ba || !bb) throw std::invalid_argument("dissimilarity: Hamming needs binary hashes");
    return hamming(*ba, *bb, ops);
  }
  const auto* ra = std::get_if<InputVector>(&a);
  const auto* rb = std::get_if<InputVector>(&b);
  if (!ra || !rb) throw std::invalid_argument("dissimilarity: Euclidean needs grayscale vectors");
  return euclidean(*ra, *rb, ops);
}

NoveltyResult nearest_item(const MemoryStore& store, const HashVector& code, OpCounts* ops) {
  if (store.empty()) throw StateError("novelty is undefined for an empty memory store");
  NoveltyResult best{dissimilarity(code, store.items().front(), store.metric(), ops), 0};
  for (std::size_t i = 1; i < store.size(); ++i) {
    const double d = dissimilarity(code, store.items()[i], store.metric(), ops);
    if (d < best.d) best = {d, i};
  }
  return best;
}

NoveltyResult evaluate_novelty(const MemoryStore& store, const InputVector& x, const Encoder& encoder,
                               OpCounts* ops) {
  if (store.empty()) throw StateError("novelty is undefined for an empty memory store");
  return nearest_item(store, encoder.encode(x, ops), ops);
}

}  // namespace sparsenav
