#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tdse/propagator.hpp"

namespace tdse::io {

/// Shortest round-trip-safe text for a double: 17 significant digits.
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

/// Columns: t, l2, one per recorded norm, boundary_mass, step_residual, iterations.
void write_run_csv(const std::filesystem::path& path, const PropagationRun& run);

inline constexpr char kStateMagic[8] = {'S', 'C', 'H', 'R', 'S', 'T', 'v', '1'};

/// Layout: 8-byte magic, little-endian uint64 header length, JSON header
/// (grid metadata plus caller provenance), then re/im little-endian doubles.
void write_state(const std::filesystem::path& path, const WaveFunction& f,
                 const nlohmann::json& provenance = nlohmann::json::object());

struct StateFile {
  WaveFunction state;
  nlohmann::json header;
};
StateFile read_state(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace tdse::io
