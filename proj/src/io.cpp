#include "tdse/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace tdse::io {

std::string format_double(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), columns_(header.size()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot open " + path.string());
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::invalid_argument("csv: column count mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << '\n';
  if (!out_) throw std::runtime_error("write failed: " + path_.string());
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row(cells);
}

void write_run_csv(const std::filesystem::path& path, const PropagationRun& run) {
  std::vector<std::string> header{"t", "l2"};
  for (const auto& l : run.norm_labels) header.push_back(l);
  header.insert(header.end(), {"boundary_mass", "step_residual", "iterations"});
  CsvWriter csv(path, header);
  for (const auto& r : run.records) {
    std::vector<double> row{r.t, r.l2};
    row.insert(row.end(), r.weighted.begin(), r.weighted.end());
    row.insert(row.end(), {r.boundary_mass, r.step_residual, double(r.iterations)});
    csv.row(row);
  }
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(in.get())) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_state(const std::filesystem::path& path, const WaveFunction& f,
                 const nlohmann::json& provenance) {
  nlohmann::json header = {
      {"format", "SCHRSTv1"},
      {"dim", f.grid.dim()},
      {"half_width", f.grid.half_width()},
      {"points", f.grid.points()},
      {"length", f.size()},
      {"layout", "row-major, axis 0 slowest; complex as (re, im) little-endian float64"},
      {"provenance", provenance}};
  const std::string text = header.dump();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write(kStateMagic, sizeof kStateMagic);
  put_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const cplx& v : f.values) {
    put_f64(out, v.real());
    put_f64(out, v.imag());
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

StateFile read_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kStateMagic, 8) != 0)
    throw std::runtime_error(path.string() + ": not a state file");
  const std::uint64_t len = get_u64(in);
  if (len > (1u << 24)) throw std::runtime_error(path.string() + ": header too large");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  StateFile sf;
  sf.header = nlohmann::json::parse(text);
  const SpatialGrid g = make_grid(sf.header.at("dim").get<int>(),
                                  sf.header.at("half_width").get<double>(),
                                  sf.header.at("points").get<int>());
  sf.state = WaveFunction(g);
  for (auto& v : sf.state.values) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    v = {re, im};
  }
  if (!in) throw std::runtime_error(path.string() + ": truncated state data");
  return sf;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[digest[i] >> 4];
    s += hex[digest[i] & 0xf];
  }
  return s;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

}  // namespace tdse::io
