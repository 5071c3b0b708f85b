#pragma once

// Binary spectrum cache. Layout (little-endian host assumed):
//   magic "PXPSPEC1" | u32 format version | u32 n_sites | u64 dim
//   | u16 sector-id length + bytes | u16 observable-id length + bytes
//   | dim f64 energies | dim*dim f64 eigenvectors (column-major)
//   | u64 FNV-1a checksum of everything before it.
// Any mismatch or truncation throws CacheError; callers recompute.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scarlab/spectral.hpp"

namespace scarlab {

inline constexpr std::uint32_t kCacheFormatVersion = 1;
inline constexpr char kCacheMagic[8] = {'P', 'X', 'P', 'S', 'P', 'E', 'C', '1'};

struct CacheError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::uint64_t fnv1a(const unsigned char* data, std::size_t len,
                           std::uint64_t seed = 1469598103934665603ull) {
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= data[i];
    h *= 1099511628211ull;
  }
  return h;
}

template <typename T>
void append_raw(std::vector<unsigned char>& buf, const T& value) {
  const auto* p = reinterpret_cast<const unsigned char*>(&value);
  buf.insert(buf.end(), p, p + sizeof(T));
}

inline void append_str(std::vector<unsigned char>& buf, const std::string& s) {
  append_raw(buf, static_cast<std::uint16_t>(s.size()));
  buf.insert(buf.end(), s.begin(), s.end());
}

}  // namespace detail

inline std::string spectrum_cache_name(int n_sites) {
  return "spectrum_n" + std::to_string(n_sites) + "_" + SectorBasis::id() +
         ".bin";
}

inline void save_spectrum(const std::string& path, const Spectrum& spec,
                          const std::string& observable_id = kObservableId) {
  std::vector<unsigned char> buf;
  buf.insert(buf.end(), kCacheMagic, kCacheMagic + sizeof(kCacheMagic));
  detail::append_raw(buf, kCacheFormatVersion);
  detail::append_raw(buf, static_cast<std::uint32_t>(spec.n_sites));
  detail::append_raw(buf, static_cast<std::uint64_t>(spec.dim()));
  detail::append_str(buf, spec.sector_id);
  detail::append_str(buf, observable_id);
  const auto dim = spec.dim();
  const auto* e = reinterpret_cast<const unsigned char*>(spec.energies.data());
  buf.insert(buf.end(), e, e + sizeof(double) * static_cast<std::size_t>(dim));
  const auto* v = reinterpret_cast<const unsigned char*>(spec.vectors.data());
  buf.insert(buf.end(), v,
             v + sizeof(double) * static_cast<std::size_t>(dim) *
                     static_cast<std::size_t>(dim));
  const std::uint64_t checksum = detail::fnv1a(buf.data(), buf.size());
  detail::append_raw(buf, checksum);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CacheError("cannot open cache file for writing: " + path);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw CacheError("cache write failed: " + path);
}

// Loads and validates a cached spectrum. expected_n < 0 skips the site check.
inline Spectrum load_spectrum(const std::string& path, int expected_n = -1,
                              const std::string& expected_observable_id =
                                  kObservableId) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheError("cache file not found: " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < sizeof(kCacheMagic) + 16 + sizeof(std::uint64_t))
    throw CacheError("cache file truncated: " + path);

  const std::size_t body = buf.size() - sizeof(std::uint64_t);
  std::uint64_t stored = 0;
  std::memcpy(&stored, buf.data() + body, sizeof(stored));
  if (detail::fnv1a(buf.data(), body) != stored)
    throw CacheError("cache checksum mismatch: " + path);

  std::size_t pos = 0;
  auto read_raw = [&](auto& value) {
    if (pos + sizeof(value) > body) throw CacheError("cache file truncated: " + path);
    std::memcpy(&value, buf.data() + pos, sizeof(value));
    pos += sizeof(value);
  };
  if (std::memcmp(buf.data(), kCacheMagic, sizeof(kCacheMagic)) != 0)
    throw CacheError("cache magic mismatch: " + path);
  pos = sizeof(kCacheMagic);

  std::uint32_t version = 0, n_sites = 0;
  std::uint64_t dim = 0;
  read_raw(version);
  if (version != kCacheFormatVersion)
    throw CacheError("unsupported cache format version " +
                     std::to_string(version));
  read_raw(n_sites);
  read_raw(dim);
  auto read_str = [&]() {
    std::uint16_t len = 0;
    read_raw(len);
    if (pos + len > body) throw CacheError("cache file truncated: " + path);
    std::string s(reinterpret_cast<const char*>(buf.data() + pos), len);
    pos += len;
    return s;
  };
  const std::string sector_id = read_str();
  const std::string observable_id = read_str();
  if (expected_n >= 0 && static_cast<int>(n_sites) != expected_n)
    throw CacheError("cache holds n_sites=" + std::to_string(n_sites) +
                     ", expected " + std::to_string(expected_n));
  if (sector_id != SectorBasis::id())
    throw CacheError("cache sector id mismatch: " + sector_id);
  if (observable_id != expected_observable_id)
    throw CacheError("cache observable id mismatch: " + observable_id);

  const std::size_t need =
      sizeof(double) * (dim + dim * dim);
  if (body - pos != need) throw CacheError("cache payload size mismatch: " + path);

  Spectrum spec;
  spec.n_sites = static_cast<int>(n_sites);
  spec.sector_id = sector_id;
  spec.energies.resize(static_cast<Eigen::Index>(dim));
  std::memcpy(spec.energies.data(), buf.data() + pos, sizeof(double) * dim);
  pos += sizeof(double) * dim;
  spec.vectors.resize(static_cast<Eigen::Index>(dim),
                      static_cast<Eigen::Index>(dim));
  std::memcpy(spec.vectors.data(), buf.data() + pos,
              sizeof(double) * dim * dim);
  return spec;
}

}  // namespace scarlab
