#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "vdelta/grid.hpp"

namespace vdelta::io {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

/// Parses a full string as a double; throws ConfigError on trailing garbage.
double parse_double(std::string_view text);

/// Binary 8-bit graymap ("P5"). The grid's x axis runs down the rows, so the
/// image is size_y() pixels wide and size_x() tall. Pixel = round(255 * v / max).
std::string encode_pgm(const Grid& g);
void write_pgm(const Grid& g, const std::filesystem::path& path);

/// Reads a P5 (or plain P2) graymap into values v / maxval in [0, 1].
Grid read_pgm(const std::filesystem::path& path);

/// One grid row (fixed x) per line, comma-separated, round-trip precision.
void write_csv_matrix(const Grid& g, const std::filesystem::path& path);
Grid read_csv_matrix(const std::filesystem::path& path);

/// Dispatches on content: files starting with "P2"/"P5" are graymaps, anything else CSV.
Grid read_grid_file(const std::filesystem::path& path);

/// Writes `contents` to `path`, throwing IoError on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace vdelta::io
