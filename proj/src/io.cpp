#include "vdelta/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "vdelta/errors.hpp"

namespace vdelta::io {

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw IoError("could not format number");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string encode_pgm(const Grid& g) {
  std::string out = "P5\n" + std::to_string(g.size_y()) + " " + std::to_string(g.size_x()) +
                    "\n255\n";
  const double peak = g.max();
  out.reserve(out.size() + g.size());
  for (double v : g.values()) {
    long level = 0;
    if (peak > 0.0) level = std::lround(255.0 * v / peak);
    level = std::clamp(level, 0L, 255L);
    out.push_back(static_cast<char>(static_cast<unsigned char>(level)));
  }
  return out;
}

void write_pgm(const Grid& g, const std::filesystem::path& path) {
  write_file(path, encode_pgm(g));
}

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(const std::string& data, std::size_t& pos) {
  while (pos < data.size()) {
    const char c = data[pos];
    if (c == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  if (start == pos) throw ConfigError("truncated graymap header");
  return data.substr(start, pos - start);
}

std::size_t parse_size(const std::string& token) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ConfigError("bad graymap header field '" + token + "'");
  }
  return v;
}

Grid decode_pgm(const std::string& data) {
  std::size_t pos = 0;
  const std::string magic = next_token(data, pos);
  if (magic != "P5" && magic != "P2") throw ConfigError("not a graymap (magic " + magic + ")");
  const std::size_t width = parse_size(next_token(data, pos));
  const std::size_t height = parse_size(next_token(data, pos));
  const std::size_t maxval = parse_size(next_token(data, pos));
  if (width == 0 || height == 0 || maxval == 0 || maxval > 255) {
    throw ConfigError("unsupported graymap dimensions or depth");
  }
  Grid g(height, width);
  auto values = g.values();
  if (magic == "P5") {
    ++pos;  // single whitespace byte after maxval
    if (data.size() < pos + values.size()) throw ConfigError("graymap pixel data truncated");
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = static_cast<unsigned char>(data[pos + i]) / static_cast<double>(maxval);
    }
  } else {
    for (double& v : values) {
      const std::size_t level = parse_size(next_token(data, pos));
      if (level > maxval) throw ConfigError("graymap pixel exceeds maxval");
      v = static_cast<double>(level) / static_cast<double>(maxval);
    }
  }
  return g;
}

}  // namespace

Grid read_pgm(const std::filesystem::path& path) { return decode_pgm(read_file(path)); }

void write_csv_matrix(const Grid& g, const std::filesystem::path& path) {
  std::string out;
  for (std::size_t x = 0; x < g.size_x(); ++x) {
    for (std::size_t y = 0; y < g.size_y(); ++y) {
      if (y > 0) out.push_back(',');
      out += format_double(g(x, y));
    }
    out.push_back('\n');
  }
  write_file(path, out);
}

namespace {

Grid decode_csv_matrix(const std::string& data) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::istringstream in(data);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      values.push_back(parse_double(std::string_view(line).substr(start, comma - start)));
      ++count;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw ConfigError("ragged CSV matrix: row " + std::to_string(rows + 1) + " has " +
                        std::to_string(count) + " columns, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw ConfigError("empty CSV matrix");
  return Grid(rows, cols, std::move(values));
}

}  // namespace

Grid read_csv_matrix(const std::filesystem::path& path) {
  return decode_csv_matrix(read_file(path));
}

Grid read_grid_file(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  if (data.rfind("P5", 0) == 0 || data.rfind("P2", 0) == 0) return decode_pgm(data);
  return decode_csv_matrix(data);
}

}  // namespace vdelta::io
