#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lognls/diagnostics.hpp"
#include "lognls/solver.hpp"

namespace lognls {

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void write_snapshot(const std::string& stem, const Field& f, double t,
                    const std::map<std::string, std::string>& metadata) {
  const Grid& g = f.grid();
  std::ofstream hdr(stem + ".hdr");
  if (!hdr) throw std::runtime_error("cannot open " + stem + ".hdr for writing");
  hdr << "dim = " << g.dim() << "\n"
      << "points_per_axis = " << g.points_per_axis() << "\n"
      << "box_length = " << format_real(g.box_length()) << "\n"
      << "t = " << format_real(t) << "\n"
      << "format = complex64_le\n"
      << "layout = row_major_last_axis_fastest\n";
  for (const auto& [k, v] : metadata) hdr << k << " = " << v << "\n";

  std::vector<float> buf(2 * f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    buf[2 * i] = static_cast<float>(f[i].real());
    buf[2 * i + 1] = static_cast<float>(f[i].imag());
  }
  std::ofstream bin(stem + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + stem + ".bin for writing");
  bin.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!bin || !hdr) throw std::runtime_error("failed writing snapshot " + stem);
}

Snapshot read_snapshot(const std::string& stem) {
  std::ifstream hdr(stem + ".hdr");
  if (!hdr) throw std::runtime_error("cannot open " + stem + ".hdr");
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(hdr, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto take = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error(std::string("snapshot header lacks ") + key);
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  const int dim = std::stoi(take("dim"));
  const std::size_t n = std::stoul(take("points_per_axis"));
  const double L = std::stod(take("box_length"));
  const double t = std::stod(take("t"));
  if (take("format") != "complex64_le") throw std::runtime_error("unsupported snapshot format");
  take("layout");
  Grid g(dim, n, L);

  std::vector<float> buf(2 * g.size());
  std::ifstream bin(stem + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + stem + ".bin");
  bin.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (bin.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float)))
    throw std::runtime_error("snapshot " + stem + ".bin is truncated");
  std::vector<Complex> values(g.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = {buf[2 * i], buf[2 * i + 1]};
  return {Field(g, std::move(values)), t, std::move(kv)};
}

}  // namespace lognls
