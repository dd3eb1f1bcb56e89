#include "cli.hpp"

#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vdelta/errors.hpp"
#include "vdelta/experiments.hpp"
#include "vdelta/io.hpp"
#include "vdelta/projection.hpp"

namespace vdelta::cli {

namespace {

namespace fs = std::filesystem;

// Flags that override ExperimentConfig fields; unset optionals keep the file/default value.
struct ConfigFlags {
  std::string config_path;
  std::optional<std::size_t> size;
  std::optional<std::size_t> size_x, size_y, blocks_x, blocks_y;
  std::optional<std::string> image_mode;
  std::optional<double> c_high, c_low;
  std::optional<std::uint64_t> seed;
  std::optional<double> delta, beta, sigma_smooth;
  std::optional<std::size_t> steps;
  std::optional<double> sigma_fwd;
  std::optional<std::size_t> forward_steps;
  std::optional<std::string> start;
  std::optional<std::vector<std::size_t>> snapshot_steps;
  std::optional<std::string> out;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--L", size, "grid side length (sets L_x and L_y)");
    app.add_option("--Lx", size_x, "grid extent along x");
    app.add_option("--Ly", size_y, "grid extent along y");
    app.add_option("--Bx", blocks_x, "blocks along x");
    app.add_option("--By", blocks_y, "blocks along y");
    app.add_option("--image-mode", image_mode, "checkerboard | constant-random")
        ->check(CLI::IsMember({"checkerboard", "constant-random"}));
    app.add_option("--c-high", c_high, "checkerboard high intensity");
    app.add_option("--c-low", c_low, "checkerboard low intensity");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--delta", delta, "block-mass tolerance");
    app.add_option("--beta", beta, "reverse-step pull toward the data");
    app.add_option("--sigma-smooth", sigma_smooth, "reverse-step smoothing width (pixels)");
    app.add_option("--T", steps, "number of reverse steps");
    app.add_option("--sigma-fwd", sigma_fwd, "forward blur width (pixels)");
    app.add_option("--forward-steps", forward_steps, "number of forward blur steps");
    app.add_option("--start", start, "noise | blurred")
        ->check(CLI::IsMember({"noise", "blurred"}));
    app.add_option("--snapshot-steps", snapshot_steps, "reverse steps to snapshot")
        ->delimiter(',');
    app.add_option("--out", out, "output directory");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (size) c.size_x = c.size_y = *size;
    if (size_x) c.size_x = *size_x;
    if (size_y) c.size_y = *size_y;
    if (blocks_x) c.blocks_x = *blocks_x;
    if (blocks_y) c.blocks_y = *blocks_y;
    if (image_mode) {
      c.image_mode =
          *image_mode == "checkerboard" ? ImageMode::kCheckerboard : ImageMode::kConstantRandom;
    }
    if (c_high) c.c_high = *c_high;
    if (c_low) c.c_low = *c_low;
    if (seed) c.seed = *seed;
    if (delta) c.delta = *delta;
    if (beta) c.beta = *beta;
    if (sigma_smooth) c.sigma_smooth = *sigma_smooth;
    if (steps) c.steps = *steps;
    if (sigma_fwd) c.sigma_fwd = *sigma_fwd;
    if (forward_steps) c.forward_steps = *forward_steps;
    if (start) c.start = *start == "noise" ? StartMode::kNoise : StartMode::kBlurred;
    if (snapshot_steps) c.snapshot_steps = *snapshot_steps;
    if (out) c.output_dir = *out;
    validate(c);
    return c;
  }
};

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

double max_abs_diff(const Grid& a, const Grid& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  }
  return m;
}

int cmd_restore(const ConfigFlags& flags, std::ostream& out) {
  const ExperimentConfig c = flags.resolve();
  const TrajectoryRecord record = run_restore_experiment(c);
  prepare_dir(c.output_dir);
  emit_csv(record, c.output_dir / "metrics.csv");
  emit_drift_csv(record, c.output_dir / "drift.csv");
  for (std::size_t n : c.snapshot_steps) {
    const std::string suffix = "_n" + std::to_string(n) + ".pgm";
    emit_snapshot(record.states_base[n], c.output_dir / ("snap_base" + suffix));
    emit_snapshot(record.states_proj[n], c.output_dir / ("snap_proj" + suffix));
  }
  const MetricRow& last = record.series.back();
  out << "restore T=" << c.steps << " delta=" << io::format_double(c.delta)
      << " Eblock_base=" << io::format_double(last.eblock_base)
      << " Eblock_proj=" << io::format_double(last.eblock_proj)
      << " Epix_base=" << io::format_double(last.epix_base)
      << " Epix_proj=" << io::format_double(last.epix_proj) << " final_max_abs_diff="
      << io::format_double(max_abs_diff(record.states_base.back(), record.states_proj.back()))
      << '\n';
  return kExitOk;
}

int cmd_forward(const ConfigFlags& flags, const std::string& from, std::ostream& out) {
  const ExperimentConfig c = flags.resolve();
  const ForwardOrigin origin = from == "noise" ? ForwardOrigin::kNoise : ForwardOrigin::kData;
  const ForwardRecord record = run_forward_experiment(c, origin);
  prepare_dir(c.output_dir);
  emit_forward_csv(record, c.output_dir / "forward_metrics.csv");
  const ForwardRow& first = record.series.front();
  const ForwardRow& last = record.series.back();
  out << "forward from=" << from << " steps=" << c.forward_steps
      << " V_initial=" << io::format_double(first.v) << " V_final=" << io::format_double(last.v)
      << " Eblock_final=" << io::format_double(last.eblock) << '\n';
  return kExitOk;
}

struct ProjectFlags {
  std::string input;
  std::string output;
  std::size_t blocks_x = 0;
  std::size_t blocks_y = 0;
  double delta = 0.0;
  std::string reference;
  std::vector<double> w_ref;
};

int cmd_project(const ProjectFlags& f, std::ostream& out) {
  Grid raw;
  try {
    raw = io::read_grid_file(f.input);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  const PmfGrid p = normalize(std::move(raw));
  const BlockPartition part = make_partition(p.size_x(), p.size_y(), f.blocks_x, f.blocks_y);

  MassVector w_ref;
  if (!f.reference.empty()) {
    Grid ref_raw;
    try {
      ref_raw = io::read_grid_file(f.reference);
    } catch (const IoError& e) {
      throw ConfigError(e.what());
    }
    w_ref = block_masses(normalize(std::move(ref_raw)), part);
  } else if (!f.w_ref.empty()) {
    if (f.w_ref.size() != part.block_count()) {
      throw ConfigError("--w-ref needs " + std::to_string(part.block_count()) + " values");
    }
    w_ref = MassVector(f.w_ref);
  } else {
    w_ref = MassVector(std::vector<double>(part.block_count(),
                                           1.0 / static_cast<double>(part.block_count())));
  }
  const ToleranceBand band(std::move(w_ref), f.delta);

  const double before = potential_v_delta(p, part, band);
  const PmfGrid projected = project(p, part, band);
  const double after = potential_v_delta(projected, part, band);

  const fs::path target(f.output);
  if (target.extension() == ".pgm") {
    io::write_pgm(projected, target);
  } else {
    io::write_csv_matrix(projected, target);
  }
  out << "Vdelta_before=" << io::format_double(before)
      << " Vdelta_after=" << io::format_double(after) << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Block-mass constrained reverse diffusion experiments", "vdelta"};
  app.require_subcommand(1);

  ConfigFlags restore_flags;
  CLI::App* restore = app.add_subcommand("restore", "baseline vs projected reverse diffusion");
  restore_flags.attach(*restore);

  ConfigFlags forward_flags;
  std::string from = "data";
  CLI::App* forward = app.add_subcommand("forward", "blockwise forward blur from data or noise");
  forward_flags.attach(*forward);
  forward->add_option("--from", from, "data | noise")->check(CLI::IsMember({"data", "noise"}));

  ProjectFlags project_flags;
  CLI::App* proj = app.add_subcommand("project", "project a grid file onto the tolerance band");
  proj->add_option("--in", project_flags.input, "input grid (graymap or CSV matrix)")
      ->required()
      ->check(CLI::ExistingFile);
  proj->add_option("--out", project_flags.output, "output file (.pgm or CSV)")->required();
  proj->add_option("--Bx", project_flags.blocks_x, "blocks along x")->required();
  proj->add_option("--By", project_flags.blocks_y, "blocks along y")->required();
  proj->add_option("--delta", project_flags.delta, "block-mass tolerance")->required();
  auto* ref_opt = proj->add_option("--ref", project_flags.reference,
                                   "reference grid whose block masses define the band")
                      ->check(CLI::ExistingFile);
  proj->add_option("--w-ref", project_flags.w_ref, "reference block masses")
      ->delimiter(',')
      ->excludes(ref_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (restore->parsed()) return cmd_restore(restore_flags, out);
    if (forward->parsed()) return cmd_forward(forward_flags, from, out);
    return cmd_project(project_flags, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidPartition& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace vdelta::cli
