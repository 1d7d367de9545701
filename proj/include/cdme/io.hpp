#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace cdme {

/// Shortest round-trip decimal form of a double ("%.17g" trimmed), locale
/// independent; every persisted number goes through this so re-runs are
/// byte-identical.
std::string format_double(double v);

std::string sha256_hex(std::span<const unsigned char> data);
std::string sha256_hex(const std::string& data);
std::string file_sha256(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace cdme
