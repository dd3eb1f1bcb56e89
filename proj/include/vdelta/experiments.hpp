#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "vdelta/dynamics.hpp"
#include "vdelta/grid.hpp"
#include "vdelta/potentials.hpp"

namespace vdelta {

enum class ImageMode { kCheckerboard, kConstantRandom };
enum class StartMode { kNoise, kBlurred };
enum class ForwardOrigin { kData, kNoise };

struct ExperimentConfig {
  std::size_t size_x = 128;
  std::size_t size_y = 128;
  std::size_t blocks_x = 4;
  std::size_t blocks_y = 4;
  ImageMode image_mode = ImageMode::kCheckerboard;
  double c_high = 0.9;
  double c_low = 0.1;
  std::uint64_t seed = 0;
  double delta = 0.01;
  double beta = 0.05;
  double sigma_smooth = 0.5;
  std::size_t steps = 40;  // T
  double sigma_fwd = 1.0;
  std::size_t forward_steps = 50;
  StartMode start = StartMode::kNoise;
  std::vector<std::size_t> snapshot_steps = {0, 10, 20, 40};
  std::filesystem::path output_dir = "out";

  ReverseParams reverse_params() const { return {beta, sigma_smooth, steps}; }
  ForwardParams forward_params() const { return {sigma_fwd, forward_steps}; }
};

/// Throws ConfigError (or InvalidPartition for non-divisible dimensions).
/// Snapshot steps outside [0, T] are rejected, not clamped.
void validate(const ExperimentConfig& config);

/// Applies a flat JSON object on top of `base`. Keys are the field names
/// L_x, L_y, B_x, B_y, image_mode, c_high, c_low, seed, delta, beta,
/// sigma_smooth, T, sigma_fwd, forward_steps, start, snapshot_steps,
/// output_dir. Unknown keys and wrong types throw ConfigError.
ExperimentConfig parse_config(std::string_view json_text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
std::string to_json(const ExperimentConfig& config);

/// Seeded 64-bit Mersenne Twister (std::mt19937_64) keyed by (seed, stream)
/// through std::seed_seq{seed_lo32, seed_hi32, stream}. Uniform doubles take
/// the top 53 bits of each draw: (u >> 11) * 2^-53. Both steps are fully
/// specified by the C++ standard, so streams are portable.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint32_t stream);
  double uniform01();

 private:
  std::mt19937_64 engine_;
};

inline constexpr std::uint32_t kImageStream = 1;
inline constexpr std::uint32_t kNoiseStream = 2;

struct DataImage {
  PmfGrid q_data;
  BlockPartition partition;
  MassVector w_ref;
};

DataImage make_data_image(const ExperimentConfig& config);
PmfGrid make_initial_noise(const ExperimentConfig& config);

struct MetricRow {
  std::size_t n = 0;
  double v_base = 0.0;
  double v_proj = 0.0;
  double vdelta_base = 0.0;
  double vdelta_proj = 0.0;
  double eblock_base = 0.0;
  double eblock_proj = 0.0;
  double epix_base = 0.0;
  double epix_proj = 0.0;

  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

struct TrajectoryRecord {
  std::vector<PmfGrid> states_base;
  std::vector<PmfGrid> states_proj;
  std::vector<MetricRow> series;
  std::vector<double> pre_projection_drift;
};

MetricRow evaluate_metrics(std::size_t n, const PmfGrid& base, const PmfGrid& proj,
                           const DataImage& data, const ToleranceBand& band);

TrajectoryRecord run_restore_experiment(const ExperimentConfig& config);

struct ForwardRow {
  std::size_t n = 0;
  double v = 0.0;
  double eblock = 0.0;
};

struct ForwardRecord {
  std::vector<PmfGrid> states;
  std::vector<ForwardRow> series;
};

/// Forward blur from q_data or from noise for config.forward_steps steps.
/// E_block is measured against the block masses of the starting state.
ForwardRecord run_forward_experiment(const ExperimentConfig& config, ForwardOrigin origin);

inline constexpr std::string_view kMetricsHeader =
    "n,V_base,V_proj,Vdelta_base,Vdelta_proj,Eblock_base,Eblock_proj,Epix_base,Epix_proj";
inline constexpr std::string_view kForwardHeader = "n,V,Eblock";

std::string metrics_csv(const std::vector<MetricRow>& series);
void emit_csv(const TrajectoryRecord& record, const std::filesystem::path& path);
std::vector<MetricRow> read_metrics_csv(const std::filesystem::path& path);

void emit_forward_csv(const ForwardRecord& record, const std::filesystem::path& path);
void emit_drift_csv(const TrajectoryRecord& record, const std::filesystem::path& path);

void emit_snapshot(const Grid& p, const std::filesystem::path& path);

}  // namespace vdelta
