#pragma once

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "waveseg/clustering.hpp"
#include "waveseg/core.hpp"

namespace waveseg {
namespace detail {

[[noreturn]] inline void format_fail(const std::string& path, size_t offset,
                                     const std::string& what) {
  throw FormatError(path + ": " + what + " (byte " + std::to_string(offset) + ")");
}

struct ByteCursor {
  const std::vector<std::uint8_t>& bytes;
  const std::string& path;
  size_t pos = 0;

  bool eof() const { return pos >= bytes.size(); }
  std::uint8_t peek() const {
    if (eof()) format_fail(path, pos, "unexpected end of file");
    return bytes[pos];
  }
  std::uint8_t take() {
    const std::uint8_t b = peek();
    ++pos;
    return b;
  }
  void skip_pgm_space() {
    // whitespace and '#' comments up to end of line
    while (!eof()) {
      const std::uint8_t b = bytes[pos];
      if (b == '#') {
        while (!eof() && bytes[pos] != '\n') ++pos;
      } else if (b == ' ' || b == '\t' || b == '\r' || b == '\n' || b == '\v' || b == '\f') {
        ++pos;
      } else {
        break;
      }
    }
  }
  long parse_int() {
    skip_pgm_space();
    if (eof() || bytes[pos] < '0' || bytes[pos] > '9') {
      format_fail(path, pos, "expected integer");
    }
    long v = 0;
    while (!eof() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      v = v * 10 + (bytes[pos] - '0');
      if (v > 1'000'000'000L) format_fail(path, pos, "integer too large");
      ++pos;
    }
    return v;
  }
};

inline GrayImage read_pgm(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  ByteCursor cur{bytes, path};
  const bool ascii = bytes[1] == '2';
  cur.pos = 2;
  const long width = cur.parse_int();
  const long height = cur.parse_int();
  const long maxval = cur.parse_int();
  if (width < 1 || height < 1) format_fail(path, cur.pos, "bad dimensions");
  if (maxval < 1 || maxval > 65535) format_fail(path, cur.pos, "bad maxval");

  GrayImage img(static_cast<int>(width), static_cast<int>(height));
  const size_t count = img.size();
  if (ascii) {
    for (size_t i = 0; i < count; ++i) {
      const long v = cur.parse_int();
      if (v > maxval) format_fail(path, cur.pos, "sample exceeds maxval");
      img.pixels[i] = static_cast<double>(v) / maxval;
    }
  } else {
    // single whitespace byte separates the header from raw samples
    if (cur.eof()) format_fail(path, cur.pos, "missing raster");
    cur.take();
    const int bytes_per = maxval > 255 ? 2 : 1;
    if (bytes.size() - cur.pos < count * bytes_per) {
      format_fail(path, bytes.size(), "truncated raster");
    }
    for (size_t i = 0; i < count; ++i) {
      long v;
      if (bytes_per == 1) {
        v = bytes[cur.pos++];
      } else {
        v = (static_cast<long>(bytes[cur.pos]) << 8) | bytes[cur.pos + 1];  // big-endian
        cur.pos += 2;
      }
      if (v > maxval) format_fail(path, cur.pos, "sample exceeds maxval");
      img.pixels[i] = static_cast<double>(v) / maxval;
    }
  }
  return img;
}

inline std::uint32_t read_be32(const std::vector<std::uint8_t>& b, size_t pos) {
  return (static_cast<std::uint32_t>(b[pos]) << 24) | (static_cast<std::uint32_t>(b[pos + 1]) << 16) |
         (static_cast<std::uint32_t>(b[pos + 2]) << 8) | b[pos + 3];
}

inline GrayImage read_png(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() < 8 || !std::equal(sig, sig + 8, bytes.begin())) {
    format_fail(path, 0, "bad PNG signature");
  }
  size_t pos = 8;
  long width = 0, height = 0;
  int bit_depth = 0;
  bool have_ihdr = false, have_iend = false;
  std::vector<std::uint8_t> idat;

  while (pos + 8 <= bytes.size() && !have_iend) {
    const std::uint32_t len = read_be32(bytes, pos);
    if (pos + 12 + len > bytes.size()) format_fail(path, pos, "truncated chunk");
    const std::string type(bytes.begin() + pos + 4, bytes.begin() + pos + 8);
    const std::uint8_t* data = bytes.data() + pos + 8;
    const std::uint32_t crc_stored = read_be32(bytes, pos + 8 + len);
    const std::uint32_t crc_calc = static_cast<std::uint32_t>(
        crc32(crc32(0L, Z_NULL, 0), bytes.data() + pos + 4, len + 4));
    if (crc_stored != crc_calc) format_fail(path, pos + 8 + len, "chunk CRC mismatch");

    if (type == "IHDR") {
      if (len != 13) format_fail(path, pos, "bad IHDR length");
      width = read_be32(bytes, pos + 8);
      height = read_be32(bytes, pos + 12);
      bit_depth = data[8];
      const int color_type = data[9];
      const int interlace = data[12];
      if (color_type != 0) format_fail(path, pos + 8 + 9, "only grayscale PNG supported");
      if (bit_depth != 8 && bit_depth != 16) {
        format_fail(path, pos + 8 + 8, "only 8/16-bit PNG supported");
      }
      if (data[10] != 0 || data[11] != 0) format_fail(path, pos + 8 + 10, "bad compression/filter");
      if (interlace != 0) format_fail(path, pos + 8 + 12, "interlaced PNG not supported");
      if (width < 1 || height < 1) format_fail(path, pos + 8, "bad dimensions");
      have_ihdr = true;
    } else if (type == "IDAT") {
      if (!have_ihdr) format_fail(path, pos, "IDAT before IHDR");
      idat.insert(idat.end(), data, data + len);
    } else if (type == "IEND") {
      have_iend = true;
    }
    pos += 12 + len;
  }
  if (!have_ihdr || !have_iend || idat.empty()) format_fail(path, pos, "missing PNG chunks");

  const int bpp = bit_depth / 8;
  const size_t stride = static_cast<size_t>(width) * bpp;
  const size_t raw_size = (stride + 1) * height;
  std::vector<std::uint8_t> raw(raw_size);
  uLongf dest_len = raw_size;
  const int zrc = uncompress(raw.data(), &dest_len, idat.data(), idat.size());
  if (zrc != Z_OK || dest_len != raw_size) format_fail(path, pos, "PNG inflate failed");

  // undo per-scanline filters
  std::vector<std::uint8_t> out(stride * height);
  for (long r = 0; r < height; ++r) {
    const std::uint8_t filter = raw[r * (stride + 1)];
    const std::uint8_t* src = raw.data() + r * (stride + 1) + 1;
    std::uint8_t* dst = out.data() + r * stride;
    const std::uint8_t* up = r > 0 ? out.data() + (r - 1) * stride : nullptr;
    for (size_t i = 0; i < stride; ++i) {
      const int left = i >= static_cast<size_t>(bpp) ? dst[i - bpp] : 0;
      const int above = up ? up[i] : 0;
      const int upleft = (up && i >= static_cast<size_t>(bpp)) ? up[i - bpp] : 0;
      int v = src[i];
      switch (filter) {
        case 0: break;
        case 1: v += left; break;
        case 2: v += above; break;
        case 3: v += (left + above) / 2; break;
        case 4: {
          const int p = left + above - upleft;
          const int pa = std::abs(p - left), pb = std::abs(p - above), pc = std::abs(p - upleft);
          v += (pa <= pb && pa <= pc) ? left : (pb <= pc ? above : upleft);
          break;
        }
        default:
          format_fail(path, 8, "unknown PNG filter " + std::to_string(filter));
      }
      dst[i] = static_cast<std::uint8_t>(v & 0xff);
    }
  }

  GrayImage img(static_cast<int>(width), static_cast<int>(height));
  const double maxval = bit_depth == 8 ? 255.0 : 65535.0;
  for (size_t i = 0; i < img.size(); ++i) {
    long v;
    if (bpp == 1) {
      v = out[i];
    } else {
      v = (static_cast<long>(out[2 * i]) << 8) | out[2 * i + 1];
    }
    img.pixels[i] = static_cast<double>(v) / maxval;
  }
  return img;
}

}  // namespace detail

/// Reads a PGM (P2 or P5) or an 8/16-bit grayscale PNG, normalizing
/// intensities to [0,1] by the format's maximum sample value. Malformed
/// content raises FormatError naming the offending byte offset.
inline GrayImage read_image(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) {
    return detail::read_pgm(bytes, path);
  }
  if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P') {
    return detail::read_png(bytes, path);
  }
  detail::format_fail(path, 0, "unrecognized image format");
}

/// Binary P5 PGM, maxval 255; intensities are clamped to [0,1] and rounded.
inline void write_pgm(const GrayImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<std::uint8_t> row(img.size());
  for (size_t i = 0; i < img.size(); ++i) {
    const double v = std::clamp(img.pixels[i], 0.0, 1.0);
    row[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  if (!out) throw IoError("write failure on " + path);
}

/// Classes map to evenly spaced gray levels: 0 and 255 for two classes,
/// {0,127,255} for three, and so on.
inline void write_label_pgm(const HardLabeling& lab, int classes, const std::string& path) {
  if (classes < 1) throw ConfigError("classes must be >= 1");
  GrayImage img(lab.width, lab.height);
  for (size_t j = 0; j < lab.pixel_count(); ++j) {
    const int level = classes > 1 ? (255 * lab.labels[j]) / (classes - 1) : 0;
    img.pixels[j] = static_cast<double>(level) / 255.0;
  }
  write_pgm(img, path);
}

/// Inverse of write_label_pgm: nearest evenly spaced level wins.
inline HardLabeling read_label_pgm(const std::string& path, int classes) {
  if (classes < 1) throw ConfigError("classes must be >= 1");
  const GrayImage img = read_image(path);
  HardLabeling lab;
  lab.width = img.width;
  lab.height = img.height;
  lab.classes = classes;
  lab.labels.resize(img.size());
  for (size_t j = 0; j < img.size(); ++j) {
    const int k = static_cast<int>(std::lround(img.pixels[j] * (classes - 1)));
    lab.labels[j] = std::clamp(k, 0, classes - 1);
  }
  return lab;
}

}  // namespace waveseg
