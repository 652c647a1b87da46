#pragma once

// Visual-memory encoders: y = f(W . x) for three models.
//
//  * FlyHash: sparse binary W (expansion, n_kc > n_pn typically), f = k-winners-take-all.
//  * Conventional LSH: dense Gaussian W, f = Heaviside step (bit set iff projection > 0).
//  * Perfect memory: W = I, the raw grayscale input is the stored item.
//
// A ProjectionMatrix never changes after construction, so one Encoder can be shared
// between threads; encode() keeps no state of its own.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sparsenav/bitvector.hpp"

namespace sparsenav {

enum class Model : std::uint8_t { FlyHash, ConvLSH, PerfectMemory };

std::string_view to_string(Model model);
// Accepts "flyhash", "convlsh" / "lsh", "perfect" / "perfectmemory" (case-insensitive).
Model parse_model(std::string_view name);

// Raw grayscale pixels, one per projection neuron.
using InputVector = std::vector<std::uint8_t>;

// A stored memory item: a binary hash, or the raw image for the perfect-memory model.
using HashVector = std::variant<BitVector, InputVector>;

std::size_t item_dim(const HashVector& item);

// Live operation tallies. Encoding and evaluation are counted separately so they can be
// compared one-to-one with the analytic run-time table.
struct OpCounts {
  std::uint64_t encode_mults = 0;
  std::uint64_t encode_adds = 0;
  std::uint64_t encode_kwta = 0;
  std::uint64_t eval_xor = 0;
  std::uint64_t eval_square_mults = 0;
  std::uint64_t eval_adds = 0;

  OpCounts& operator+=(const OpCounts& o);
  bool operator==(const OpCounts&) const = default;
};

struct EncoderConfig {
  Model model = Model::FlyHash;
  std::size_t n_pn = 726;
  std::size_t n_kc = 2000;
  double kappa = 0.1;          // hash sparsity, FlyHash only
  double theta = 10.0 / 726.0; // connection density, FlyHash only
  std::uint64_t seed = 0;
  // FlyHash only: exactly round(theta * n_pn) connections per KC instead of Bernoulli draws.
  bool fixed_fanout = false;

  // Throws ConfigError on invalid parameters.
  void validate() const;

  // Number of winners, round(kappa * n_kc) clamped to at least 1.
  std::size_t k() const;
  std::size_t fanout() const;
  // n_kc for the hash models, n_pn for perfect memory.
  std::size_t output_dim() const;

  bool operator==(const EncoderConfig&) const = default;
};

class ProjectionMatrix {
 public:
  enum class Layout : std::uint8_t { SparseBinary = 1, DenseReal = 2, Identity = 3 };

  // Each row lists the connected input indices; rows must be strictly increasing and < n_pn.
  static ProjectionMatrix sparse_binary(std::size_t n_pn,
                                        const std::vector<std::vector<std::uint32_t>>& rows,
                                        std::uint64_t seed);
  // Row-major rows x n_pn finite weights.
  static ProjectionMatrix dense_real(std::size_t n_pn, std::size_t rows, std::vector<double> weights,
                                     std::uint64_t seed);
  static ProjectionMatrix identity(std::size_t n_pn);

  Layout layout() const noexcept { return layout_; }
  std::size_t n_pn() const noexcept { return n_pn_; }
  std::size_t rows() const noexcept { return rows_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::span<const std::uint32_t> row_indices(std::size_t row) const;
  std::span<const double> row_weights(std::size_t row) const;
  // Stored connections: nonzeros for SparseBinary, rows * n_pn for DenseReal.
  std::size_t nnz() const noexcept;

  bool operator==(const ProjectionMatrix&) const = default;

 private:
  ProjectionMatrix() = default;

  Layout layout_ = Layout::Identity;
  std::size_t n_pn_ = 0;
  std::size_t rows_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::size_t> offsets_;   // SparseBinary: rows + 1 offsets into indices_
  std::vector<std::uint32_t> indices_;
  std::vector<double> weights_;        // DenseReal
};

// W_ij ~ Bernoulli(theta), or exactly round(theta * n_pn) distinct inputs per row in
// fixed_fanout mode. Deterministic in cfg.seed.
ProjectionMatrix init_flyhash_weights(const EncoderConfig& cfg);
// W_ij ~ N(0, 1), n_kc rows of n_pn weights. Deterministic in cfg.seed.
ProjectionMatrix init_lsh_weights(const EncoderConfig& cfg);
// Picks the initializer matching cfg.model.
ProjectionMatrix init_weights(const EncoderConfig& cfg);

// Sets exactly the k largest entries. Ties at the k-th value go to the lowest indices.
BitVector k_wta(std::span<const double> pre_activations, std::size_t k);
BitVector k_wta(std::span<const std::int64_t> pre_activations, std::size_t k);

HashVector encode(const ProjectionMatrix& matrix, const InputVector& x, const EncoderConfig& cfg,
                  OpCounts* ops = nullptr);

// Config plus its projection matrix.
class Encoder {
 public:
  explicit Encoder(EncoderConfig cfg);
  // Throws ConfigError if the matrix does not fit the config.
  Encoder(EncoderConfig cfg, ProjectionMatrix matrix);

  HashVector encode(const InputVector& x, OpCounts* ops = nullptr) const {
    return sparsenav::encode(matrix_, x, cfg_, ops);
  }

  const EncoderConfig& config() const noexcept { return cfg_; }
  const ProjectionMatrix& matrix() const noexcept { return matrix_; }

 private:
  EncoderConfig cfg_;
  ProjectionMatrix matrix_;
};

}  // namespace sparsenav
