#include "sparsenav/encoders.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <iterator>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "sparsenav/errors.hpp"

namespace sparsenav {

std::string_view to_string(Model model) {
  switch (model) {
    case Model::FlyHash: return "flyhash";
    case Model::ConvLSH: return "convlsh";
    case Model::PerfectMemory: return "perfect";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "flyhash") return Model::FlyHash;
  if (lower == "convlsh" || lower == "lsh") return Model::ConvLSH;
  if (lower == "perfect" || lower == "perfectmemory" || lower == "perfect_memory") {
    return Model::PerfectMemory;
  }
  throw ConfigError("unknown model '" + std::string(name) + "'");
}

std::size_t item_dim(const HashVector& item) {
  return std::visit([](const auto& v) { return v.size(); }, item);
}

OpCounts& OpCounts::operator+=(const OpCounts& o) {
  encode_mults += o.encode_mults;
  encode_adds += o.encode_adds;
  encode_kwta += o.encode_kwta;
  eval_xor += o.eval_xor;
  eval_square_mults += o.eval_square_mults;
  eval_adds += o.eval_adds;
  return *this;
}

// ---------------------------------------------------------------------------
// EncoderConfig
// ---------------------------------------------------------------------------

void EncoderConfig::validate() const {
  if (n_pn == 0) throw ConfigError("n_pn must be at least 1");
  if (model == Model::PerfectMemory) return;
  if (n_kc == 0) throw ConfigError("n_kc must be at least 1");
  if (n_kc > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("n_kc too large");
  if (model != Model::FlyHash) return;
  if (!(kappa > 0.0 && kappa < 1.0)) throw ConfigError("kappa must lie in (0, 1)");
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0, 1)");
  if (fixed_fanout && (fanout() == 0 || fanout() > n_pn)) {
    throw ConfigError("fixed fanout round(theta * n_pn) must lie in [1, n_pn]");
  }
}

std::size_t EncoderConfig::k() const {
  const auto k = static_cast<std::size_t>(std::llround(kappa * static_cast<double>(n_kc)));
  return std::max<std::size_t>(k, 1);
}

std::size_t EncoderConfig::fanout() const {
  return static_cast<std::size_t>(std::llround(theta * static_cast<double>(n_pn)));
}

std::size_t EncoderConfig::output_dim() const {
  return model == Model::PerfectMemory ? n_pn : n_kc;
}

// ---------------------------------------------------------------------------
// ProjectionMatrix
// ---------------------------------------------------------------------------

ProjectionMatrix ProjectionMatrix::sparse_binary(std::size_t n_pn,
                                                 const std::vector<std::vector<std::uint32_t>>& rows,
                                                 std::uint64_t seed) {
  if (n_pn == 0 || rows.empty()) throw ConfigError("sparse matrix needs nonzero dimensions");
  ProjectionMatrix m;
  m.layout_ = Layout::SparseBinary;
  m.n_pn_ = n_pn;
  m.rows_ = rows.size();
  m.seed_ = seed;
  m.offsets_.reserve(rows.size() + 1);
  m.offsets_.push_back(0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] >= n_pn) throw ConfigError("sparse row index out of range");
      if (i > 0 && row[i] <= row[i - 1]) throw ConfigError("sparse row indices must be strictly increasing");
    }
    m.indices_.insert(m.indices_.end(), row.begin(), row.end());
    m.offsets_.push_back(m.indices_.size());
  }
  return m;
}

ProjectionMatrix ProjectionMatrix::dense_real(std::size_t n_pn, std::size_t rows, std::vector<double> weights,
                                              std::uint64_t seed) {
  if (n_pn == 0 || rows == 0) throw ConfigError("dense matrix needs nonzero dimensions");
  if (weights.size() != n_pn * rows) throw ConfigError("dense matrix weight count does not match rows * n_pn");
  if (!std::all_of(weights.begin(), weights.end(), [](double w) { return std::isfinite(w); })) {
    throw ConfigError("dense matrix weights must be finite");
  }
  ProjectionMatrix m;
  m.layout_ = Layout::DenseReal;
  m.n_pn_ = n_pn;
  m.rows_ = rows;
  m.seed_ = seed;
  m.weights_ = std::move(weights);
  return m;
}

ProjectionMatrix ProjectionMatrix::identity(std::size_t n_pn) {
  if (n_pn == 0) throw ConfigError("identity matrix needs n_pn >= 1");
  ProjectionMatrix m;
  m.layout_ = Layout::Identity;
  m.n_pn_ = n_pn;
  m.rows_ = n_pn;
  return m;
}

std::span<const std::uint32_t> ProjectionMatrix::row_indices(std::size_t row) const {
  if (layout_ != Layout::SparseBinary || row >= rows_) throw std::out_of_range("row_indices");
  return std::span<const std::uint32_t>(indices_).subspan(offsets_[row], offsets_[row + 1] - offsets_[row]);
}

std::span<const double> ProjectionMatrix::row_weights(std::size_t row) const {
  if (layout_ != Layout::DenseReal || row >= rows_) throw std::out_of_range("row_weights");
  return std::span<const double>(weights_).subspan(row * n_pn_, n_pn_);
}

std::size_t ProjectionMatrix::nnz() const noexcept {
  switch (layout_) {
    case Layout::SparseBinary: return indices_.size();
    case Layout::DenseReal: return weights_.size();
    case Layout::Identity: return n_pn_;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Initialisation
// ---------------------------------------------------------------------------

ProjectionMatrix init_flyhash_weights(const EncoderConfig& cfg) {
  if (cfg.model != Model::FlyHash) throw ConfigError("init_flyhash_weights needs a FlyHash config");
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::vector<std::uint32_t>> rows(cfg.n_kc);

  if (cfg.fixed_fanout) {
    std::vector<std::uint32_t> all(cfg.n_pn);
    std::iota(all.begin(), all.end(), 0U);
    const std::size_t c = cfg.fanout();
    for (auto& row : rows) {
      row.reserve(c);
      // Selection sampling keeps the input order, so rows come out sorted.
      std::sample(all.begin(), all.end(), std::back_inserter(row), c, rng);
    }
  } else {
    // Gaps between successes of i.i.d. Bernoulli(theta) trials are geometric.
    std::geometric_distribution<std::int64_t> gap(cfg.theta);
    const auto n_pn = static_cast<std::int64_t>(cfg.n_pn);
    for (auto& row : rows) {
      for (std::int64_t pos = gap(rng); pos < n_pn; pos += 1 + gap(rng)) {
        row.push_back(static_cast<std::uint32_t>(pos));
      }
    }
  }
  return ProjectionMatrix::sparse_binary(cfg.n_pn, rows, cfg.seed);
}

ProjectionMatrix init_lsh_weights(const EncoderConfig& cfg) {
  if (cfg.model != Model::ConvLSH) throw ConfigError("init_lsh_weights needs a ConvLSH config");
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> weights(cfg.n_kc * cfg.n_pn);
  for (double& w : weights) w = normal(rng);
  return ProjectionMatrix::dense_real(cfg.n_pn, cfg.n_kc, std::move(weights), cfg.seed);
}

ProjectionMatrix init_weights(const EncoderConfig& cfg) {
  switch (cfg.model) {
    case Model::FlyHash: return init_flyhash_weights(cfg);
    case Model::ConvLSH: return init_lsh_weights(cfg);
    case Model::PerfectMemory:
      cfg.validate();
      return ProjectionMatrix::identity(cfg.n_pn);
  }
  throw ConfigError("unknown model");
}

// ---------------------------------------------------------------------------
// k-WTA
// ---------------------------------------------------------------------------

namespace {

template <typename T>
BitVector k_wta_impl(std::span<const T> values, std::size_t k) {
  if (k == 0 || k > values.size()) throw std::invalid_argument("k_wta: k must lie in [1, length]");
  if constexpr (std::is_floating_point_v<T>) {
    if (std::any_of(values.begin(), values.end(), [](T v) { return std::isnan(v); })) {
      throw std::invalid_argument("k_wta: NaN pre-activation");
    }
  }
  std::vector<T> scratch(values.begin(), values.end());
  const auto kth = scratch.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(scratch.begin(), kth, scratch.end(), std::greater<T>());
  const T threshold = *kth;

  const auto above = static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [&](T v) { return v > threshold; }));
  std::size_t ties_left = k - above;

  BitVector out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > threshold) {
      out.set(i);
    } else if (ties_left > 0 && values[i] == threshold) {
      out.set(i);
      --ties_left;
    }
  }
  return out;
}

}  // namespace

BitVector k_wta(std::span<const double> pre_activations, std::size_t k) {
  return k_wta_impl(pre_activations, k);
}

BitVector k_wta(std::span<const std::int64_t> pre_activations, std::size_t k) {
  return k_wta_impl(pre_activations, k);
}

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

HashVector encode(const ProjectionMatrix& matrix, const InputVector& x, const EncoderConfig& cfg,
                  OpCounts* ops) {
  if (x.size() != matrix.n_pn()) throw std::invalid_argument("encode: input length does not match n_pn");

  switch (matrix.layout()) {
    case ProjectionMatrix::Layout::SparseBinary: {
      std::vector<std::int64_t> pre(matrix.rows());
      std::uint64_t adds = 0;
      for (std::size_t r = 0; r < matrix.rows(); ++r) {
        const auto idx = matrix.row_indices(r);
        if (idx.empty()) continue;
        std::int64_t acc = x[idx[0]];
        for (std::size_t i = 1; i < idx.size(); ++i) acc += x[idx[i]];
        adds += idx.size() - 1;
        pre[r] = acc;
      }
      if (ops) {
        ops->encode_adds += adds;
        ops->encode_kwta += 1;
      }
      return k_wta(std::span<const std::int64_t>(pre), cfg.k());
    }
    case ProjectionMatrix::Layout::DenseReal: {
      BitVector out(matrix.rows());
      for (std::size_t r = 0; r < matrix.rows(); ++r) {
        const auto w = matrix.row_weights(r);
        double acc = w[0] * x[0];
        for (std::size_t i = 1; i < w.size(); ++i) acc += w[i] * x[i];
        // Heaviside with H(0) = 0.
        if (acc > 0.0) out.set(r);
      }
      if (ops) {
        ops->encode_mults += matrix.rows() * matrix.n_pn();
        ops->encode_adds += matrix.rows() * (matrix.n_pn() - 1);
      }
      return out;
    }
    case ProjectionMatrix::Layout::Identity:
      return x;
  }
  throw std::logic_error("encode: unknown layout");
}

// ---------------------------------------------------------------------------
// Encoder
// ---------------------------------------------------------------------------

Encoder::Encoder(EncoderConfig cfg) : cfg_(cfg), matrix_(init_weights(cfg)) {}

Encoder::Encoder(EncoderConfig cfg, ProjectionMatrix matrix) : cfg_(cfg), matrix_(std::move(matrix)) {
  cfg_.validate();
  using Layout = ProjectionMatrix::Layout;
  const Layout expected = cfg_.model == Model::FlyHash   ? Layout::SparseBinary
                          : cfg_.model == Model::ConvLSH ? Layout::DenseReal
                                                         : Layout::Identity;
  if (matrix_.layout() != expected) throw ConfigError("matrix layout does not match the encoder model");
  if (matrix_.n_pn() != cfg_.n_pn || matrix_.rows() != cfg_.output_dim()) {
    throw ConfigError("matrix dimensions do not match the encoder config");
  }
}

}  // namespace sparsenav
