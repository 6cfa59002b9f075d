#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "zk/error.hpp"
#include "zk/field.hpp"

// ZK3D snapshot layout (little endian):
//   "ZK3D" | u32 version | u32 nx, ny, nz | f64 L | u8 rep | (f64 re, f64 im) * nx*ny*nz
// Version 1 is the isotropic layout above. Version 2 stores three f64
// lengths (Lx, Ly, Lz) in place of L for anisotropic grids.

namespace zk {

namespace detail {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void write_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T read_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw InvalidArgument("snapshot: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace detail

inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::uint32_t kSnapshotVersionAnisotropic = 2;

inline void write_snapshot(std::ostream& os, const Field& f) {
  const auto& g = f.grid();
  os.write("ZK3D", 4);
  detail::write_le<std::uint32_t>(os, g.isotropic() ? kSnapshotVersion : kSnapshotVersionAnisotropic);
  for (int a = 0; a < 3; ++a) detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.n(a)));
  if (g.isotropic()) {
    detail::write_le<double>(os, g.length(0));
  } else {
    for (int a = 0; a < 3; ++a) detail::write_le<double>(os, g.length(a));
  }
  detail::write_le<std::uint8_t>(os, static_cast<std::uint8_t>(f.rep()));
  for (const auto& v : f.data()) {
    detail::write_le<double>(os, v.real());
    detail::write_le<double>(os, v.imag());
  }
}

inline Field read_snapshot(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "ZK3D", 4) != 0) throw InvalidArgument("snapshot: bad magic");
  const auto version = detail::read_le<std::uint32_t>(is);
  if (version != kSnapshotVersion && version != kSnapshotVersionAnisotropic) {
    throw InvalidArgument("snapshot: unsupported version " + std::to_string(version));
  }
  std::array<int, 3> n{};
  for (auto& v : n) v = static_cast<int>(detail::read_le<std::uint32_t>(is));
  std::array<double, 3> length{};
  if (version == kSnapshotVersion) {
    length.fill(detail::read_le<double>(is));
  } else {
    for (auto& v : length) v = detail::read_le<double>(is);
  }
  const auto rep = detail::read_le<std::uint8_t>(is);
  if (rep > 1) throw InvalidArgument("snapshot: bad representation tag");
  const FourierGrid grid = make_grid(n, length);
  Field f(grid, static_cast<Representation>(rep));
  for (auto& v : f.data()) {
    const double re = detail::read_le<double>(is);
    const double im = detail::read_le<double>(is);
    v = Complex(re, im);
  }
  return f;
}

inline void save_snapshot(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("snapshot: cannot open " + path + " for writing");
  write_snapshot(os, f);
}

inline Field load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("snapshot: cannot open " + path);
  return read_snapshot(is);
}

}  // namespace zk
