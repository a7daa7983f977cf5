#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace pcwlab::io {

// Shortest text that round-trips the double exactly.
std::string format_roundtrip(double value);
// 17 significant digits, %.17g style.
std::string format_g17(double value);
void append_g17(std::string& out, double value);
void append_roundtrip(std::string& out, double value);

// Throws ArtifactError when the text is not a complete finite-or-not number.
double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::uint64_t fnv1a(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t value);
std::string file_hash(const std::filesystem::path& path);

}  // namespace pcwlab::io
