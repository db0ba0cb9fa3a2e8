#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rblab {

/// Shortest decimal representation that round-trips the double exactly
/// (std::to_chars); integers and seeds print through the integer overloads.
std::string format_double(double v);
std::string format_int(long long v);
std::string format_uint(std::uint64_t v);

std::uint64_t fnv1a64(std::string_view data);

/// "fnv1a64:<16 hex digits>" content digest used in manifests.
std::string digest_string(std::string_view data);

/// Row-buffered CSV with a mandatory header. write() goes through a
/// temporary file and renames on success, so failures leave no partial
/// output behind.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void row(std::vector<std::string> cells);
  const std::string& content() const { return content_; }
  std::string digest() const { return digest_string(content_); }
  void write(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string content_;
};

/// Atomic whole-file write (temp + rename), shared by CSV and manifest
/// emission.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace rblab
