#pragma once

#include "spcp/matrix_core.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace spcp::io {

// Binary layout, all little-endian:
//   "SPCP" | version u32 | rows u32 | cols u32 | rows*cols f64 in row-major order
inline constexpr char kMagic[4] = {'S', 'P', 'C', 'P'};
inline constexpr std::uint32_t kFormatVersion = 1;

void write_binary(std::ostream& os, const Matrix& a);
Matrix read_binary(std::istream& is);
void write_binary(const std::filesystem::path& path, const Matrix& a);
Matrix read_binary(const std::filesystem::path& path);

/// Plain comma-separated grid, one matrix row per line, 17 significant digits.
void write_csv(std::ostream& os, const Matrix& a);
Matrix read_csv(std::istream& is);
void write_csv(const std::filesystem::path& path, const Matrix& a);
Matrix read_csv(const std::filesystem::path& path);

/// Dispatches on extension: ".csv" is CSV, anything else the binary format.
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& a);

/// Ordered `key = value` text. Blank lines and lines starting with '#' are ignored.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& is);
KeyValues read_key_values(const std::filesystem::path& path);
void write_key_values(const std::filesystem::path& path, const KeyValues& kv);

/// Shortest decimal representation that round-trips exactly.
std::string format_double(double x);

}  // namespace spcp::io
