#pragma once

// Closed-form efficiency figures: code-length bounds, memory capacity, storage sizes and
// per-query operation counts for the three encoders.

#include <cstddef>
#include <cstdint>

#include "sparsenav/encoders.hpp"

namespace sparsenav {

// Shannon entropy of a Bernoulli(kappa) bit, in bits. Throws std::invalid_argument
// outside [0, 1].
double bernoulli_entropy(double kappa);

// n_kc * H(kappa): lossless code length floor for one hash.
double compression_lower_bound(std::size_t n_kc, double kappa);

// Number of stored hashes m at which a random novel hash is still told apart with
// error probability p_error:
//   m = (log(1 - p_error^(1/n_kc)) - log kappa) / log(1 - kappa)
// Throws std::invalid_argument unless 0 < p_error < 1, 0 < kappa < 1, n_kc >= 1. The value is
// negative for kappa < 1 - p_error^(1/n_kc) and is returned as computed.
double memory_capacity(std::size_t n_kc, double kappa, double p_error);

// Bits of a compressed-sparse-row hash: 0.8 * n_kc (ceil'd).
std::uint64_t csr_bits(std::size_t n_kc);

// Storage in bits assuming 1 bit per binary element, 8 per grayscale value and 64 per real.
struct StorageReport {
  Model model = Model::FlyHash;
  std::uint64_t w_bits = 0;
  std::uint64_t y_bits = 0;
  std::uint64_t n_items = 0;
  std::uint64_t total_bits = 0;  // w_bits + n_items * y_bits
  bool operator==(const StorageReport&) const = default;
};

StorageReport storage_size(Model model, std::size_t n_pn, std::size_t n_kc, std::size_t n_items);

// Operations for one encode plus one pairwise evaluation. eval_adds is an upper bound for
// the hash models (accumulated set bits of the XOR).
using OpCountReport = OpCounts;

OpCountReport op_counts(Model model, std::size_t n_pn, std::size_t n_kc, double kappa, std::size_t fanout = 10);

// Live counters of encoding `query` and comparing it with `stored`. FlyHash encoders must be
// built with fixed_fanout, otherwise the counts have no closed form: StateError.
OpCountReport instrumented_counts(const Encoder& encoder, const InputVector& query, const HashVector& stored);

}  // namespace sparsenav
