#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace waveseg {

enum class ErrorCategory {
  Config,
  Name,
  Dimension,
  Format,
  Io,
  DegenerateRegion,
  Placement,
  ConstantImage,
};

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Name: return "name";
    case ErrorCategory::Dimension: return "dimension";
    case ErrorCategory::Format: return "format";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::DegenerateRegion: return "degenerate_region";
    case ErrorCategory::Placement: return "placement";
    case ErrorCategory::ConstantImage: return "constant_image";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error(ErrorCategory::Config, m) {}
};
struct NameError : Error {
  explicit NameError(const std::string& m) : Error(ErrorCategory::Name, m) {}
};
struct DimensionError : Error {
  explicit DimensionError(const std::string& m) : Error(ErrorCategory::Dimension, m) {}
};
struct FormatError : Error {
  explicit FormatError(const std::string& m) : Error(ErrorCategory::Format, m) {}
};
struct IoError : Error {
  explicit IoError(const std::string& m) : Error(ErrorCategory::Io, m) {}
};
struct DegenerateRegionError : Error {
  explicit DegenerateRegionError(const std::string& m) : Error(ErrorCategory::DegenerateRegion, m) {}
};
struct PlacementError : Error {
  explicit PlacementError(const std::string& m) : Error(ErrorCategory::Placement, m) {}
};
struct ConstantImageError : Error {
  explicit ConstantImageError(const std::string& m) : Error(ErrorCategory::ConstantImage, m) {}
};

/// Dense row-major grid of doubles. Used for wavelet sub-bands, level sets
/// and any intermediate 2-D buffer.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  const double& at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
  size_t size() const { return data.size(); }
};

/// 2-D grayscale raster, intensities normalized to [0,1] on ingestion.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // row-major

  GrayImage() = default;
  GrayImage(int w, int h, double fill = 0.0)
      : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

  double& at(int r, int c) { return pixels[static_cast<size_t>(r) * width + c]; }
  const double& at(int r, int c) const { return pixels[static_cast<size_t>(r) * width + c]; }
  size_t size() const { return pixels.size(); }
};

inline Matrix to_matrix(const GrayImage& img) {
  Matrix m(img.height, img.width);
  m.data = img.pixels;
  return m;
}

inline GrayImage to_image(const Matrix& m) {
  GrayImage img(m.cols, m.rows);
  img.pixels = m.data;
  return img;
}

/// Deterministic random helper over mt19937_64. All stochastic pieces of the
/// library (phantom noise, k-means++ seeding, validation signals) draw from
/// this so that a fixed seed reproduces a run exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t integer(std::uint64_t bound) {
    const std::uint64_t limit = bound * (std::numeric_limits<std::uint64_t>::max() / bound);
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % bound;
  }

  /// Standard normal via Box-Muller, one spare cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Runs fn(begin, end) over [0, count) split into contiguous chunks, one per
/// thread. Chunk boundaries depend only on (count, threads), and callers must
/// not write outside their chunk, so results are identical for any thread
/// count.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    fn(0, count);
    return;
  }
  const int n = std::min(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(n);
  const int chunk = (count + n - 1) / n;
  for (int t = 0; t < n; ++t) {
    const int begin = t * chunk;
    const int end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& th : pool) th.join();
}

inline int mod_index(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on " + path);
  return bytes;
}

}  // namespace detail

}  // namespace waveseg
