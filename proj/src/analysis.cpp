#include "sparsenav/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "sparsenav/errors.hpp"
#include "sparsenav/memory.hpp"

namespace sparsenav {

namespace {

void require_dims(std::size_t n_pn, std::size_t n_kc) {
  if (n_pn == 0 || n_kc == 0) throw std::invalid_argument("n_pn and n_kc must be positive");
}

}  // namespace

double bernoulli_entropy(double kappa) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in [0, 1]");
  if (kappa == 0.0 || kappa == 1.0) return 0.0;
  return -kappa * std::log2(kappa) - (1.0 - kappa) * std::log2(1.0 - kappa);
}

double compression_lower_bound(std::size_t n_kc, double kappa) {
  return static_cast<double>(n_kc) * bernoulli_entropy(kappa);
}

double memory_capacity(std::size_t n_kc, double kappa, double p_error) {
  if (n_kc == 0) throw std::invalid_argument("n_kc must be at least 1");
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("kappa must lie in (0, 1)");
  if (!(p_error > 0.0 && p_error < 1.0)) throw std::invalid_argument("p_error must lie in (0, 1)");
  // 1 - p^(1/n) via expm1 keeps precision when the root is close to 1.
  const double one_minus_root = -std::expm1(std::log(p_error) / static_cast<double>(n_kc));
  return (std::log(one_minus_root) - std::log(kappa)) / std::log1p(-kappa);
}

std::uint64_t csr_bits(std::size_t n_kc) {
  return (static_cast<std::uint64_t>(n_kc) * 4 + 4) / 5;
}

StorageReport storage_size(Model model, std::size_t n_pn, std::size_t n_kc, std::size_t n_items) {
  require_dims(n_pn, n_kc);
  StorageReport r;
  r.model = model;
  r.n_items = n_items;
  const std::uint64_t pn = n_pn;
  const std::uint64_t kc = n_kc;
  switch (model) {
    case Model::FlyHash:
      r.w_bits = pn * kc;
      r.y_bits = kc;
      break;
    case Model::ConvLSH:
      r.w_bits = 64 * pn * kc;
      r.y_bits = kc;
      break;
    case Model::PerfectMemory:
      r.w_bits = 0;
      r.y_bits = 8 * pn;
      break;
  }
  r.total_bits = r.w_bits + r.n_items * r.y_bits;
  return r;
}

OpCountReport op_counts(Model model, std::size_t n_pn, std::size_t n_kc, double kappa, std::size_t fanout) {
  require_dims(n_pn, n_kc);
  OpCountReport r;
  const std::uint64_t pn = n_pn;
  const std::uint64_t kc = n_kc;
  switch (model) {
    case Model::FlyHash: {
      if (fanout == 0) throw std::invalid_argument("fanout must be positive");
      EncoderConfig cfg;
      cfg.n_pn = n_pn;
      cfg.n_kc = n_kc;
      cfg.kappa = kappa;
      cfg.validate();
      r.encode_adds = (fanout - 1) * kc;
      r.encode_kwta = 1;
      r.eval_xor = kc;
      r.eval_adds = 2 * cfg.k();
      break;
    }
    case Model::ConvLSH:
      r.encode_mults = pn * kc;
      r.encode_adds = (pn - 1) * kc;
      r.eval_xor = kc;
      r.eval_adds = kc;
      break;
    case Model::PerfectMemory:
      r.eval_square_mults = pn + 1;  // the final square root counted as one
      r.eval_adds = 2 * pn - 1;
      break;
  }
  return r;
}

OpCountReport instrumented_counts(const Encoder& encoder, const InputVector& query, const HashVector& stored) {
  const EncoderConfig& cfg = encoder.config();
  if (cfg.model == Model::FlyHash && !cfg.fixed_fanout) {
    throw StateError("instrumented_counts: FlyHash encoder needs fixed_fanout");
  }
  OpCountReport r;
  const HashVector code = encoder.encode(query, &r);
  dissimilarity(code, stored, metric_for(cfg.model), &r);
  return r;
}

}  // namespace sparsenav
