#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "waveseg/acwe.hpp"
#include "waveseg/core.hpp"
#include "waveseg/features.hpp"
#include "waveseg/wavelet.hpp"

namespace waveseg {

// Flat binary container shared by pyramid / feature-field / level-set dumps:
//   magic[4] | u32 version | u32 width | u32 height | u32 levels | u32 dim
// followed by the payload as little-endian 64-bit floats. Payload order:
//   "WVPY": LL_K, then per level k = K..1: HL_k, LH_k, HH_k (row-major)
//   "WVFF": dim mask bytes, then width*height*dim values, pixel-major
//   "WVPH": width*height values, row-major
namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

struct BinReader {
  const std::vector<std::uint8_t>& bytes;
  const std::string& path;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > bytes.size()) {
      throw FormatError(path + ": truncated container (byte " + std::to_string(bytes.size()) + ")");
    }
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = bytes[pos] | (bytes[pos + 1] << 8) | (bytes[pos + 2] << 16) |
                      (static_cast<std::uint32_t>(bytes[pos + 3]) << 24);
    pos += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
    pos += 8;
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
};

inline void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure on " + path);
}

inline std::vector<std::uint8_t> header(const char magic[5], std::uint32_t w, std::uint32_t h,
                                        std::uint32_t levels, std::uint32_t dim) {
  std::vector<std::uint8_t> out(magic, magic + 4);
  put_u32(out, 1);  // version
  put_u32(out, w);
  put_u32(out, h);
  put_u32(out, levels);
  put_u32(out, dim);
  return out;
}

inline void expect_magic(BinReader& r, const char magic[5]) {
  r.need(4);
  if (!std::equal(magic, magic + 4, r.bytes.begin() + r.pos)) {
    throw FormatError(r.path + ": bad magic (byte 0)");
  }
  r.pos += 4;
  const std::uint32_t version = r.u32();
  if (version != 1) throw FormatError(r.path + ": unsupported container version");
}

}  // namespace detail

inline void write_pyramid(const WaveletPyramid& pyr, const std::string& path) {
  auto out = detail::header("WVPY", static_cast<std::uint32_t>(pyr.image_width()),
                            static_cast<std::uint32_t>(pyr.image_height()),
                            static_cast<std::uint32_t>(pyr.levels), 0);
  for (double v : pyr.approx.data) detail::put_f64(out, v);
  for (int k = pyr.levels; k >= 1; --k) {
    for (const Matrix* band :
         {&pyr.details[k - 1].hl, &pyr.details[k - 1].lh, &pyr.details[k - 1].hh}) {
      for (double v : band->data) detail::put_f64(out, v);
    }
  }
  detail::write_bytes(path, out);
}

inline WaveletPyramid read_pyramid(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::BinReader r{bytes, path};
  detail::expect_magic(r, "WVPY");
  const int w = static_cast<int>(r.u32());
  const int h = static_cast<int>(r.u32());
  const int levels = static_cast<int>(r.u32());
  r.u32();  // dim, unused
  if (levels < 1 || w < (1 << levels) || h < (1 << levels) || w % (1 << levels) != 0 ||
      h % (1 << levels) != 0) {
    throw FormatError(path + ": inconsistent pyramid header");
  }
  WaveletPyramid pyr;
  pyr.levels = levels;
  pyr.approx = Matrix(h >> levels, w >> levels);
  for (double& v : pyr.approx.data) v = r.f64();
  pyr.details.resize(levels);
  for (int k = levels; k >= 1; --k) {
    DetailBands d{Matrix(h >> k, w >> k), Matrix(h >> k, w >> k), Matrix(h >> k, w >> k)};
    for (Matrix* band : {&d.hl, &d.lh, &d.hh}) {
      for (double& v : band->data) v = r.f64();
    }
    pyr.details[k - 1] = std::move(d);
  }
  return pyr;
}

inline void write_feature_field(const FeatureField& ff, int levels, const std::string& path) {
  auto out = detail::header("WVFF", static_cast<std::uint32_t>(ff.width),
                            static_cast<std::uint32_t>(ff.height),
                            static_cast<std::uint32_t>(levels), static_cast<std::uint32_t>(ff.dim));
  out.insert(out.end(), ff.lowfreq_mask.begin(), ff.lowfreq_mask.end());
  for (double v : ff.values) detail::put_f64(out, v);
  detail::write_bytes(path, out);
}

inline FeatureField read_feature_field(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::BinReader r{bytes, path};
  detail::expect_magic(r, "WVFF");
  FeatureField ff;
  ff.width = static_cast<int>(r.u32());
  ff.height = static_cast<int>(r.u32());
  r.u32();  // levels, informational
  ff.dim = static_cast<int>(r.u32());
  if (ff.width < 1 || ff.height < 1 || ff.dim < 1) {
    throw FormatError(path + ": inconsistent feature header");
  }
  r.need(static_cast<size_t>(ff.dim));
  ff.lowfreq_mask.assign(bytes.begin() + r.pos, bytes.begin() + r.pos + ff.dim);
  r.pos += ff.dim;
  ff.values.resize(ff.pixel_count() * ff.dim);
  for (double& v : ff.values) v = r.f64();
  return ff;
}

inline void write_levelset(const LevelSet& ls, const std::string& path) {
  auto out = detail::header("WVPH", static_cast<std::uint32_t>(ls.width),
                            static_cast<std::uint32_t>(ls.height), 0, 1);
  for (double v : ls.phi) detail::put_f64(out, v);
  detail::write_bytes(path, out);
}

inline LevelSet read_levelset(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::BinReader r{bytes, path};
  detail::expect_magic(r, "WVPH");
  LevelSet ls;
  ls.width = static_cast<int>(r.u32());
  ls.height = static_cast<int>(r.u32());
  r.u32();
  r.u32();
  if (ls.width < 1 || ls.height < 1) throw FormatError(path + ": inconsistent level-set header");
  ls.phi.resize(static_cast<size_t>(ls.width) * ls.height);
  for (double& v : ls.phi) v = r.f64();
  return ls;
}

}  // namespace waveseg
