#include "tucker/dtns_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

namespace tucker {
namespace {

constexpr std::array<char, 5> kMagic{'D', 'T', 'N', 'S', '1'};
// Guards against absurd headers from corrupt files.
constexpr std::uint32_t kMaxModes = 64;

template <typename T>
T to_little(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  } else {
    return value;
  }
}

template <typename T>
void put(std::ostream& out, T value) {
  const T le = to_little(value);
  out.write(reinterpret_cast<const char*>(&le), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T raw{};
  if (!in.read(reinterpret_cast<char*>(&raw), sizeof(T))) throw IoError("DTNS1: truncated header");
  return to_little(raw);
}

}  // namespace

void write_dtns(std::ostream& out, const DenseTensor& t) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(t.order()));
  for (auto n : t.dims()) put<std::uint64_t>(out, n);
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(t.data().data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  } else {
    for (double v : t.data()) put<double>(out, v);
  }
  if (!out) throw IoError("DTNS1: write failed");
}

DenseTensor read_dtns(std::istream& in) {
  std::array<char, 5> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw IoError("DTNS1: bad magic");
  const auto d = get<std::uint32_t>(in);
  if (d == 0 || d > kMaxModes) throw IoError("DTNS1: invalid mode count");
  Dims dims(d);
  std::size_t total = 1;
  for (auto& n : dims) {
    const auto raw = get<std::uint64_t>(in);
    if (raw == 0 || raw > std::numeric_limits<std::size_t>::max() / total)
      throw IoError("DTNS1: invalid dimension");
    n = static_cast<std::size_t>(raw);
    total *= n;
  }
  std::vector<double> data(total);
  if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(total * sizeof(double))))
    throw IoError("DTNS1: truncated payload");
  if constexpr (std::endian::native == std::endian::big)
    for (auto& v : data) v = to_little(v);
  return DenseTensor(std::move(dims), std::move(data));
}

void save_dtns(const std::filesystem::path& path, const DenseTensor& t) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_dtns(out, t);
}

DenseTensor load_dtns(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_dtns(in);
}

void save_matrix_dtns(const std::filesystem::path& path, const Matrix& m) {
  const Dims dims{static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())};
  save_dtns(path, DenseTensor(dims, std::vector<double>(m.data(), m.data() + m.size())));
}

Matrix load_matrix_dtns(const std::filesystem::path& path) {
  const DenseTensor t = load_dtns(path);
  if (t.order() != 2) throw IoError(path.string() + ": expected a 2-way DTNS1 container");
  return Eigen::Map<const Matrix>(t.data().data(), static_cast<Eigen::Index>(t.dim(0)),
                                  static_cast<Eigen::Index>(t.dim(1)));
}

}  // namespace tucker
