#include "vdelta/experiments.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "vdelta/errors.hpp"
#include "vdelta/io.hpp"
#include "vdelta/projection.hpp"

namespace vdelta {

using nlohmann::json;

void validate(const ExperimentConfig& c) {
  make_partition(c.size_x, c.size_y, c.blocks_x, c.blocks_y);
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(std::isfinite(c.c_high) && c.c_high >= 0.0, "c_high must be nonnegative");
  require(std::isfinite(c.c_low) && c.c_low >= 0.0, "c_low must be nonnegative");
  require(c.image_mode != ImageMode::kCheckerboard || c.c_high + c.c_low > 0.0,
          "c_high and c_low cannot both be zero");
  require(std::isfinite(c.delta) && c.delta >= 0.0, "delta must be nonnegative");
  require(c.beta >= 0.0 && c.beta <= 1.0, "beta must lie in [0, 1]");
  require(std::isfinite(c.sigma_smooth) && c.sigma_smooth >= 0.0,
          "sigma_smooth must be nonnegative");
  require(std::isfinite(c.sigma_fwd) && c.sigma_fwd > 0.0, "sigma_fwd must be positive");
  for (std::size_t s : c.snapshot_steps) {
    require(s <= c.steps, "snapshot step " + std::to_string(s) + " outside [0, " +
                              std::to_string(c.steps) + "]");
  }
}

namespace {

std::string_view image_mode_name(ImageMode m) {
  return m == ImageMode::kCheckerboard ? "checkerboard" : "constant-random";
}

std::string_view start_mode_name(StartMode m) {
  return m == StartMode::kNoise ? "noise" : "blurred";
}

template <typename T>
T get_field(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

std::size_t get_count(const json& j, const char* key) {
  if (!j.is_number_unsigned()) {
    throw ConfigError(std::string("config field '") + key + "' must be a nonnegative integer");
  }
  return j.get<std::size_t>();
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text, ExperimentConfig c) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    const char* k = key.c_str();
    if (key == "L_x") {
      c.size_x = get_count(value, k);
    } else if (key == "L_y") {
      c.size_y = get_count(value, k);
    } else if (key == "B_x") {
      c.blocks_x = get_count(value, k);
    } else if (key == "B_y") {
      c.blocks_y = get_count(value, k);
    } else if (key == "image_mode") {
      const auto mode = get_field<std::string>(value, k);
      if (mode == "checkerboard") {
        c.image_mode = ImageMode::kCheckerboard;
      } else if (mode == "constant-random") {
        c.image_mode = ImageMode::kConstantRandom;
      } else {
        throw ConfigError("unknown image_mode '" + mode + "'");
      }
    } else if (key == "c_high") {
      c.c_high = get_field<double>(value, k);
    } else if (key == "c_low") {
      c.c_low = get_field<double>(value, k);
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
      c.seed = value.get<std::uint64_t>();
    } else if (key == "delta") {
      c.delta = get_field<double>(value, k);
    } else if (key == "beta") {
      c.beta = get_field<double>(value, k);
    } else if (key == "sigma_smooth") {
      c.sigma_smooth = get_field<double>(value, k);
    } else if (key == "T") {
      c.steps = get_count(value, k);
    } else if (key == "sigma_fwd") {
      c.sigma_fwd = get_field<double>(value, k);
    } else if (key == "forward_steps") {
      c.forward_steps = get_count(value, k);
    } else if (key == "start") {
      const auto mode = get_field<std::string>(value, k);
      if (mode == "noise") {
        c.start = StartMode::kNoise;
      } else if (mode == "blurred") {
        c.start = StartMode::kBlurred;
      } else {
        throw ConfigError("unknown start '" + mode + "'");
      }
    } else if (key == "snapshot_steps") {
      if (!value.is_array()) throw ConfigError("snapshot_steps must be an array");
      c.snapshot_steps.clear();
      for (const auto& s : value) c.snapshot_steps.push_back(get_count(s, k));
    } else if (key == "output_dir") {
      c.output_dir = get_field<std::string>(value, k);
    } else {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, std::move(base));
}

std::string to_json(const ExperimentConfig& c) {
  const json doc = {
      {"L_x", c.size_x},
      {"L_y", c.size_y},
      {"B_x", c.blocks_x},
      {"B_y", c.blocks_y},
      {"image_mode", image_mode_name(c.image_mode)},
      {"c_high", c.c_high},
      {"c_low", c.c_low},
      {"seed", c.seed},
      {"delta", c.delta},
      {"beta", c.beta},
      {"sigma_smooth", c.sigma_smooth},
      {"T", c.steps},
      {"sigma_fwd", c.sigma_fwd},
      {"forward_steps", c.forward_steps},
      {"start", start_mode_name(c.start)},
      {"snapshot_steps", c.snapshot_steps},
      {"output_dir", c.output_dir.string()},
  };
  return doc.dump(2);
}

SeededRng::SeededRng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), stream};
  engine_.seed(seq);
}

double SeededRng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

DataImage make_data_image(const ExperimentConfig& config) {
  BlockPartition part =
      make_partition(config.size_x, config.size_y, config.blocks_x, config.blocks_y);
  SeededRng rng(config.seed, kImageStream);
  Grid img(config.size_x, config.size_y);
  for (std::size_t j = 0; j < part.block_count(); ++j) {
    const std::size_t bx = j / part.blocks_y();
    const std::size_t by = j % part.blocks_y();
    double level = 0.0;
    if (config.image_mode == ImageMode::kCheckerboard) {
      level = (bx + by) % 2 == 0 ? config.c_high : config.c_low;
    } else {
      level = rng.uniform01();
    }
    const Block& b = part[j];
    for (std::size_t x = b.x0; x < b.x1; ++x) {
      for (std::size_t y = b.y0; y < b.y1; ++y) img(x, y) = level;
    }
  }
  PmfGrid q_data = normalize(std::move(img));
  MassVector w_ref = block_masses(q_data, part);
  return {std::move(q_data), std::move(part), std::move(w_ref)};
}

PmfGrid make_initial_noise(const ExperimentConfig& config) {
  SeededRng rng(config.seed, kNoiseStream);
  Grid noise(config.size_x, config.size_y);
  for (double& v : noise.values()) v = rng.uniform01();
  return normalize(std::move(noise));
}

MetricRow evaluate_metrics(std::size_t n, const PmfGrid& base, const PmfGrid& proj,
                           const DataImage& data, const ToleranceBand& band) {
  MetricRow row;
  row.n = n;
  row.v_base = potential_v(base, data.partition);
  row.v_proj = potential_v(proj, data.partition);
  row.vdelta_base = potential_v_delta(base, data.partition, band);
  row.vdelta_proj = potential_v_delta(proj, data.partition, band);
  row.eblock_base = e_block(base, data.partition, data.w_ref);
  row.eblock_proj = e_block(proj, data.partition, data.w_ref);
  row.epix_base = e_pix(base, data.q_data);
  row.epix_proj = e_pix(proj, data.q_data);
  return row;
}

TrajectoryRecord run_restore_experiment(const ExperimentConfig& config) {
  validate(config);
  const DataImage data = make_data_image(config);
  const ToleranceBand band(data.w_ref, config.delta);

  PmfGrid start = config.start == StartMode::kNoise
                      ? make_initial_noise(config)
                      : run_forward(data.q_data, data.partition, config.forward_params()).back();

  ReversePair pair =
      run_reverse_pair(start, data.q_data, data.partition, band, config.reverse_params());

  TrajectoryRecord record;
  record.series.reserve(pair.baseline.size());
  for (std::size_t n = 0; n < pair.baseline.size(); ++n) {
    record.series.push_back(evaluate_metrics(n, pair.baseline[n], pair.projected[n], data, band));
  }
  record.states_base = std::move(pair.baseline);
  record.states_proj = std::move(pair.projected);
  record.pre_projection_drift = std::move(pair.pre_projection_drift);
  return record;
}

ForwardRecord run_forward_experiment(const ExperimentConfig& config, ForwardOrigin origin) {
  validate(config);
  const DataImage data = make_data_image(config);
  const PmfGrid start = origin == ForwardOrigin::kData ? data.q_data : make_initial_noise(config);
  const MassVector w0 = block_masses(start, data.partition);

  ForwardRecord record;
  record.states = run_forward(start, data.partition, config.forward_params());
  record.series.reserve(record.states.size());
  for (std::size_t n = 0; n < record.states.size(); ++n) {
    record.series.push_back({n, potential_v(record.states[n], data.partition),
                             e_block(record.states[n], data.partition, w0)});
  }
  return record;
}

std::string metrics_csv(const std::vector<MetricRow>& series) {
  std::string out(kMetricsHeader);
  out.push_back('\n');
  for (const MetricRow& r : series) {
    out += std::to_string(r.n);
    for (double v : {r.v_base, r.v_proj, r.vdelta_base, r.vdelta_proj, r.eblock_base,
                     r.eblock_proj, r.epix_base, r.epix_proj}) {
      out.push_back(',');
      out += io::format_double(v);
    }
    out.push_back('\n');
  }
  return out;
}

void emit_csv(const TrajectoryRecord& record, const std::filesystem::path& path) {
  io::write_file(path, metrics_csv(record.series));
}

std::vector<MetricRow> read_metrics_csv(const std::filesystem::path& path) {
  std::istringstream in(io::read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw ConfigError("metrics file " + path.string() + " has an unexpected header");
  }
  std::vector<MetricRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    while (true) {
      const std::size_t comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != 9) throw ConfigError("metrics row has " + std::to_string(cells.size()) +
                                             " columns, expected 9");
    MetricRow r;
    r.n = static_cast<std::size_t>(io::parse_double(cells[0]));
    double* fields[] = {&r.v_base,      &r.v_proj,      &r.vdelta_base,
                        &r.vdelta_proj, &r.eblock_base, &r.eblock_proj,
                        &r.epix_base,   &r.epix_proj};
    for (std::size_t i = 0; i < 8; ++i) *fields[i] = io::parse_double(cells[i + 1]);
    rows.push_back(r);
  }
  return rows;
}

void emit_forward_csv(const ForwardRecord& record, const std::filesystem::path& path) {
  std::string out(kForwardHeader);
  out.push_back('\n');
  for (const ForwardRow& r : record.series) {
    out += std::to_string(r.n) + "," + io::format_double(r.v) + "," +
           io::format_double(r.eblock) + "\n";
  }
  io::write_file(path, out);
}

void emit_drift_csv(const TrajectoryRecord& record, const std::filesystem::path& path) {
  std::string out = "n,drift_l1\n";
  for (std::size_t i = 0; i < record.pre_projection_drift.size(); ++i) {
    out += std::to_string(i + 1) + "," + io::format_double(record.pre_projection_drift[i]) + "\n";
  }
  io::write_file(path, out);
}

void emit_snapshot(const Grid& p, const std::filesystem::path& path) { io::write_pgm(p, path); }

}  // namespace vdelta
