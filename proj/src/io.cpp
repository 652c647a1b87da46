#include "sparsenav/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "sparsenav/analysis.hpp"
#include "sparsenav/errors.hpp"

namespace sparsenav {

namespace {

using json = nlohmann::json;

constexpr std::array<char, 4> kMatrixMagic = {'S', 'N', 'V', 'M'};
constexpr std::array<char, 4> kStoreMagic = {'S', 'N', 'V', 'S'};

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), bytes.size())) throw ConfigError("container is truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

void put_header(std::ostream& out, const std::array<char, 4>& magic, std::uint8_t tag, std::uint8_t flag) {
  out.write(magic.data(), magic.size());
  put<std::uint32_t>(out, kContainerVersion);
  put<std::uint8_t>(out, tag);
  put<std::uint8_t>(out, flag);
  put<std::uint16_t>(out, 0);
}

// Returns {tag, flag}.
std::pair<std::uint8_t, std::uint8_t> get_header(std::istream& in, const std::array<char, 4>& magic) {
  std::array<char, 4> m{};
  if (!in.read(m.data(), m.size()) || m != magic) throw ConfigError("bad container magic");
  if (get<std::uint32_t>(in) != kContainerVersion) throw ConfigError("unsupported container version");
  const auto tag = get<std::uint8_t>(in);
  const auto flag = get<std::uint8_t>(in);
  get<std::uint16_t>(in);
  return {tag, flag};
}

std::uint64_t checked_size(std::uint64_t v) {
  // Guards allocations against garbage headers.
  if (v > (std::uint64_t{1} << 40)) throw ConfigError("container dimension out of range");
  return v;
}

template <typename F>
void with_output(const std::filesystem::path& path, F&& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  f(out);
  if (!out) throw ConfigError("write failed: " + path.string());
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return in;
}

json pose_json(const TimedPose& p) {
  return json{{"t", p.t}, {"x", p.pose.x}, {"y", p.pose.y}, {"heading", p.pose.heading}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

void write_matrix(std::ostream& out, const ProjectionMatrix& matrix) {
  put_header(out, kMatrixMagic, static_cast<std::uint8_t>(matrix.layout()), 0);
  put<std::uint64_t>(out, matrix.n_pn());
  put<std::uint64_t>(out, matrix.rows());
  put<std::uint64_t>(out, matrix.seed());
  switch (matrix.layout()) {
    case ProjectionMatrix::Layout::SparseBinary:
      for (std::size_t r = 0; r < matrix.rows(); ++r) {
        const auto idx = matrix.row_indices(r);
        put<std::uint32_t>(out, static_cast<std::uint32_t>(idx.size()));
        for (std::uint32_t i : idx) put<std::uint32_t>(out, i);
      }
      break;
    case ProjectionMatrix::Layout::DenseReal:
      for (std::size_t r = 0; r < matrix.rows(); ++r) {
        for (double w : matrix.row_weights(r)) put<double>(out, w);
      }
      break;
    case ProjectionMatrix::Layout::Identity:
      break;
  }
}

ProjectionMatrix read_matrix(std::istream& in) {
  const auto [tag, flag] = get_header(in, kMatrixMagic);
  (void)flag;
  const std::uint64_t n_pn = checked_size(get<std::uint64_t>(in));
  const std::uint64_t rows = checked_size(get<std::uint64_t>(in));
  const auto seed = get<std::uint64_t>(in);
  try {
    switch (static_cast<ProjectionMatrix::Layout>(tag)) {
      case ProjectionMatrix::Layout::SparseBinary: {
        std::vector<std::vector<std::uint32_t>> lists(rows);
        for (auto& row : lists) {
          const auto count = get<std::uint32_t>(in);
          if (count > n_pn) throw ConfigError("sparse row longer than n_pn");
          row.resize(count);
          for (auto& i : row) i = get<std::uint32_t>(in);
        }
        return ProjectionMatrix::sparse_binary(n_pn, lists, seed);
      }
      case ProjectionMatrix::Layout::DenseReal: {
        std::vector<double> weights(rows * n_pn);
        for (double& w : weights) w = get<double>(in);
        return ProjectionMatrix::dense_real(n_pn, rows, std::move(weights), seed);
      }
      case ProjectionMatrix::Layout::Identity:
        if (rows != n_pn) throw ConfigError("identity matrix must be square");
        return ProjectionMatrix::identity(n_pn);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid matrix body: ") + e.what());
  }
  throw ConfigError("unknown matrix layout tag");
}

void save_matrix(const std::filesystem::path& path, const ProjectionMatrix& matrix) {
  with_output(path, [&](std::ostream& out) { write_matrix(out, matrix); });
}

ProjectionMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return read_matrix(in);
}

// ---------------------------------------------------------------------------
// Store
// ---------------------------------------------------------------------------

void write_store(std::ostream& out, const MemoryStore& store) {
  put_header(out, kStoreMagic, static_cast<std::uint8_t>(store.metric()), store.frozen() ? 1 : 0);
  put<std::uint64_t>(out, store.item_dim());
  put<std::uint64_t>(out, store.size());
  for (const HashVector& item : store.items()) {
    if (const auto* bits = std::get_if<BitVector>(&item)) {
      for (BitVector::Word w : bits->words()) put<std::uint64_t>(out, w);
    } else {
      const auto& pixels = std::get<InputVector>(item);
      out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    }
  }
}

MemoryStore read_store(std::istream& in) {
  const auto [tag, frozen] = get_header(in, kStoreMagic);
  if (tag != static_cast<std::uint8_t>(Metric::Hamming) && tag != static_cast<std::uint8_t>(Metric::Euclidean)) {
    throw ConfigError("unknown store metric tag");
  }
  const auto metric = static_cast<Metric>(tag);
  const std::uint64_t dim = checked_size(get<std::uint64_t>(in));
  const std::uint64_t count = checked_size(get<std::uint64_t>(in));
  MemoryStore store(metric, dim);
  for (std::uint64_t n = 0; n < count; ++n) {
    if (metric == Metric::Hamming) {
      BitVector bits(dim);
      for (BitVector::Word& w : bits.words()) w = get<std::uint64_t>(in);
      if (dim % BitVector::kWordBits != 0 && !bits.words().empty() &&
          (bits.words().back() >> (dim % BitVector::kWordBits)) != 0) {
        throw ConfigError("store item has bits past item_dim");
      }
      store.store_item(std::move(bits));
    } else {
      InputVector pixels(dim);
      if (!in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(dim))) {
        throw ConfigError("container is truncated");
      }
      store.store_item(std::move(pixels));
    }
  }
  if (frozen) store.freeze();
  return store;
}

void save_store(const std::filesystem::path& path, const MemoryStore& store) {
  with_output(path, [&](std::ostream& out) { write_store(out, store); });
}

MemoryStore load_store(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return read_store(in);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

void write_trajectory_csv(std::ostream& out, const std::vector<TimedPose>& trajectory) {
  out << "t,x,y,heading\n";
  out.precision(17);
  for (const TimedPose& p : trajectory) out << p.t << ',' << p.pose.x << ',' << p.pose.y << ',' << p.pose.heading << '\n';
}

void write_novelty_csv(std::ostream& out, const std::vector<NoveltySample>& trace) {
  out << "t,d_left,d_right,omega\n";
  out.precision(17);
  for (const NoveltySample& s : trace) out << s.t << ',' << s.d_left << ',' << s.d_right << ',' << s.omega << '\n';
}

std::string record_to_json(const TrialRecord& record) {
  json train = json::array();
  for (const TimedPose& p : record.train_trajectory) train.push_back(pose_json(p));
  json test = json::array();
  for (const TimedPose& p : record.test_trajectory) test.push_back(pose_json(p));
  json trace = json::array();
  for (const NoveltySample& s : record.novelty_trace) {
    trace.push_back({{"t", s.t}, {"d_left", s.d_left}, {"d_right", s.d_right}, {"omega", s.omega}});
  }
  const OpCounts& o = record.ops;
  const json doc{{"seed", record.seed},
                 {"final_distance", record.final_distance},
                 {"success", record.success},
                 {"collided", record.collided},
                 {"ops",
                  {{"encode_mults", o.encode_mults},
                   {"encode_adds", o.encode_adds},
                   {"encode_kwta", o.encode_kwta},
                   {"eval_xor", o.eval_xor},
                   {"eval_square_mults", o.eval_square_mults},
                   {"eval_adds", o.eval_adds}}},
                 {"train_trajectory", train},
                 {"test_trajectory", test},
                 {"novelty_trace", trace}};
  return doc.dump(1);
}

double entropy_bits_per_item(const EncoderConfig& cfg) {
  if (cfg.model == Model::PerfectMemory) return static_cast<double>(storage_size(cfg.model, cfg.n_pn, 1, 1).y_bits);
  return compression_lower_bound(cfg.n_kc, cfg.kappa);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "model,n_kc,kappa,n_trials,success_rate,mean_final_distance,entropy_bits_per_item\n";
  out.precision(10);
  for (const SweepRow& r : rows) {
    out << to_string(r.encoder.model) << ',' << r.encoder.n_kc << ',' << r.encoder.kappa << ',' << r.n_trials << ','
        << r.success_rate << ',' << r.mean_final_distance << ',' << entropy_bits_per_item(r.encoder) << '\n';
  }
}

void write_trials_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "model,n_kc,kappa,trial,seed,final_distance,success,collided\n";
  out.precision(17);
  for (const SweepRow& r : rows) {
    for (std::size_t i = 0; i < r.trials.size(); ++i) {
      const TrialRecord& t = r.trials[i];
      out << to_string(r.encoder.model) << ',' << r.encoder.n_kc << ',' << r.encoder.kappa << ',' << i << ',' << t.seed
          << ',' << t.final_distance << ',' << (t.success ? 1 : 0) << ',' << (t.collided ? 1 : 0) << '\n';
    }
  }
}

}  // namespace sparsenav
