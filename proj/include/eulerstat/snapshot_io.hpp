#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "eulerstat/ensemble.hpp"
#include "eulerstat/errors.hpp"

// Snapshot file layout, all little-endian:
//   "EUSS" | u32 format_version | u32 N | u32 m | f64 time | u64 manifest_hash
//   then per sample: u64 seed, coefficients for k1 = -N..N (outer),
//   k2 = -N..N (inner), component 1 then 2, each as (f64 re, f64 im).

namespace eulerstat {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}
inline void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}
inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw FormatError("truncated snapshot");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw FormatError("truncated snapshot");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace detail

inline constexpr std::string_view snapshot_magic = "EUSS";

inline void write_snapshot(std::ostream& os, const EnsembleSnapshot& snap) {
  if (snap.fields.size() != snap.sample_seeds.size())
    throw ArgumentError("snapshot has mismatched field and seed counts");
  os.write(snapshot_magic.data(), 4);
  detail::put_u32(os, snapshot_format_version);
  detail::put_u32(os, static_cast<std::uint32_t>(snap.N));
  detail::put_u32(os, static_cast<std::uint32_t>(snap.fields.size()));
  detail::put_f64(os, snap.time);
  detail::put_u64(os, snap.manifest_hash);
  for (std::size_t i = 0; i < snap.fields.size(); ++i) {
    if (snap.fields[i].resolution() != snap.N) throw ArgumentError("sample resolution differs from N");
    detail::put_u64(os, snap.sample_seeds[i]);
    for (const Vec2c& c : snap.fields[i].coeffs()) {
      detail::put_f64(os, c.x.real());
      detail::put_f64(os, c.x.imag());
      detail::put_f64(os, c.y.real());
      detail::put_f64(os, c.y.imag());
    }
  }
}

inline EnsembleSnapshot read_snapshot(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string_view(magic, 4) != snapshot_magic)
    throw FormatError("not an EUSS snapshot");
  const std::uint32_t version = detail::get_u32(is);
  if (version != snapshot_format_version)
    throw FormatError("unsupported snapshot format version " + std::to_string(version));
  EnsembleSnapshot snap;
  snap.N = static_cast<int>(detail::get_u32(is));
  const std::uint32_t m = detail::get_u32(is);
  snap.time = detail::get_f64(is);
  snap.manifest_hash = detail::get_u64(is);
  if (snap.N < 1) throw FormatError("snapshot resolution must be positive");
  for (std::uint32_t i = 0; i < m; ++i) {
    snap.sample_seeds.push_back(detail::get_u64(is));
    SpectralField f(snap.N);
    for (Vec2c& c : f.coeffs()) {
      const double a = detail::get_f64(is), b = detail::get_f64(is);
      const double p = detail::get_f64(is), q = detail::get_f64(is);
      c = {complex(a, b), complex(p, q)};
    }
    snap.fields.push_back(std::move(f));
  }
  return snap;
}

inline void save_snapshot(const std::string& path, const EnsembleSnapshot& snap) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  write_snapshot(os, snap);
  if (!os) throw FormatError("write to '" + path + "' failed");
}

inline EnsembleSnapshot load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open '" + path + "'");
  return read_snapshot(is);
}

}  // namespace eulerstat
