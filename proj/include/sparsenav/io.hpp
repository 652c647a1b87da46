#pragma once

// Binary containers for projection matrices and memory stores, and CSV / JSON exports of
// trial records and sweep tables.
//
// Matrix container (all integers little-endian):
//   "SNVM" | u32 version=1 | u8 layout | 3 zero bytes | u64 n_pn | u64 rows | u64 seed
//   SparseBinary: per row, u32 count then count u32 input indices
//   DenseReal:    rows * n_pn IEEE-754 doubles, row-major
//   Identity:     no body
//
// Store container:
//   "SNVS" | u32 version=1 | u8 metric | u8 frozen | 2 zero bytes | u64 item_dim | u64 count
//   Hamming:   per item ceil(item_dim / 64) u64 words, bit i of word j is element 64 j + i
//   Euclidean: per item item_dim bytes

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sparsenav/encoders.hpp"
#include "sparsenav/harness.hpp"
#include "sparsenav/memory.hpp"

namespace sparsenav {

inline constexpr std::uint32_t kContainerVersion = 1;

// Readers throw ConfigError on a bad magic, version, tag, truncation or inconsistent body.
void write_matrix(std::ostream& out, const ProjectionMatrix& matrix);
ProjectionMatrix read_matrix(std::istream& in);
void save_matrix(const std::filesystem::path& path, const ProjectionMatrix& matrix);
ProjectionMatrix load_matrix(const std::filesystem::path& path);

void write_store(std::ostream& out, const MemoryStore& store);
MemoryStore read_store(std::istream& in);
void save_store(const std::filesystem::path& path, const MemoryStore& store);
MemoryStore load_store(const std::filesystem::path& path);

// t,x,y,heading
void write_trajectory_csv(std::ostream& out, const std::vector<TimedPose>& trajectory);
// t,d_left,d_right,omega
void write_novelty_csv(std::ostream& out, const std::vector<NoveltySample>& trace);
// Nested record with trajectories, novelty trace, outcome and op counters.
std::string record_to_json(const TrialRecord& record);

// model,n_kc,kappa,n_trials,success_rate,mean_final_distance,entropy_bits_per_item
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
// model,n_kc,kappa,trial,seed,final_distance,success,collided
void write_trials_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// Per-item code length floor: n_kc * H(kappa) for the hash models, 8 * n_pn for perfect memory.
double entropy_bits_per_item(const EncoderConfig& cfg);

}  // namespace sparsenav
