#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "waveseg/core.hpp"
#include "waveseg/filterbank.hpp"
#include "waveseg/wavelet.hpp"

namespace waveseg {

/// Per-pixel wavelet-tree feature vectors. Component order matches
/// extract_first_tree; lowfreq_mask flags the four coarsest-level components
/// (LL_K, HL_K, LH_K, HH_K). levels = 0 degenerates to one intensity
/// component with an empty mask, which reproduces the plain intensity
/// algorithms through the same code paths.
struct FeatureField {
  int width = 0;
  int height = 0;
  int dim = 0;
  std::vector<double> values;             // pixel-major, dim per pixel
  std::vector<std::uint8_t> lowfreq_mask; // per component

  std::span<double> at(int r, int c) {
    return {values.data() + (static_cast<size_t>(r) * width + c) * dim, static_cast<size_t>(dim)};
  }
  std::span<const double> at(int r, int c) const {
    return {values.data() + (static_cast<size_t>(r) * width + c) * dim, static_cast<size_t>(dim)};
  }
  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

enum class WeightingMode { SignedPower, ScalarScale };

/// Weighting of the low-frequency components: signed-power maps x to
/// sign(x)*|x|^w, scalar-scale to w*x. w = 1 is the identity in both modes.
struct WeightingConfig {
  double w = 1.0;
  WeightingMode mode = WeightingMode::SignedPower;
};

/// D = 1 intensity features (the levels = 0 case).
inline FeatureField intensity_features(const GrayImage& img) {
  FeatureField ff;
  ff.width = img.width;
  ff.height = img.height;
  ff.dim = 1;
  ff.values = img.pixels;
  ff.lowfreq_mask.assign(1, 0);
  return ff;
}

/// Literal construction: for every pixel, circularly shift the image so that
/// pixel sits at the origin, decompose, and vectorize the first tree. This is
/// the defining semantics; feature_field computes the same values faster.
inline FeatureField feature_field_reference(const GrayImage& img, const FilterPair& pair,
                                            int levels) {
  if (levels == 0) return intensity_features(img);
  FeatureField ff;
  ff.width = img.width;
  ff.height = img.height;
  ff.dim = tree_feature_length(levels);
  ff.values.resize(ff.pixel_count() * ff.dim);
  ff.lowfreq_mask.assign(ff.dim, 0);
  for (int i = 0; i < 4; ++i) ff.lowfreq_mask[i] = 1;

  GrayImage shifted(img.width, img.height);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      for (int i = 0; i < img.height; ++i) {
        for (int j = 0; j < img.width; ++j) {
          shifted.at(i, j) = img.at((i + r) % img.height, (j + c) % img.width);
        }
      }
      const auto tree = extract_first_tree(wavedec2(shifted, pair, levels));
      auto dst = ff.at(r, c);
      std::copy(tree.begin(), tree.end(), dst.begin());
    }
  }
  return ff;
}

namespace detail {

// Full-rate filtering pass with taps spaced `hole` samples apart, the
// a-trous form of one decomposition stage.
inline void atrous_rows(const Matrix& in, std::span<const double> h, int origin, int hole,
                        Matrix& out, int threads) {
  parallel_for(in.rows, threads, [&](int begin, int end) {
    for (int r = begin; r < end; ++r) {
      for (int t = 0; t < in.cols; ++t) {
        double acc = 0.0;
        for (size_t n = 0; n < h.size(); ++n) {
          acc += h[n] * in.at(r, mod_index(t + hole * (static_cast<int>(n) - origin), in.cols));
        }
        out.at(r, t) = acc;
      }
    }
  });
}

inline void atrous_cols(const Matrix& in, std::span<const double> h, int origin, int hole,
                        Matrix& out, int threads) {
  parallel_for(in.cols, threads, [&](int begin, int end) {
    for (int c = begin; c < end; ++c) {
      for (int t = 0; t < in.rows; ++t) {
        double acc = 0.0;
        for (size_t n = 0; n < h.size(); ++n) {
          acc += h[n] * in.at(mod_index(t + hole * (static_cast<int>(n) - origin), in.rows), c);
        }
        out.at(t, c) = acc;
      }
    }
  });
}

}  // namespace detail

/// Equivalent to feature_field_reference but via an undecimated transform:
/// the level-k coefficients of all circular shifts are computed at once, and
/// each pixel's tree is gathered from them. Matches the reference
/// construction exactly (same sums in the same order). Per-pixel work is
/// data-parallel; results do not depend on the thread count.
inline FeatureField feature_field(const GrayImage& img, const FilterPair& pair, int levels,
                                  int threads = 1) {
  if (levels == 0) return intensity_features(img);
  const int div = 1 << levels;
  if (img.width % div != 0 || img.height % div != 0 || img.width < div || img.height < div) {
    throw DimensionError("image dimensions " + std::to_string(img.width) + "x" +
                         std::to_string(img.height) + " not divisible by 2^" +
                         std::to_string(levels));
  }

  const int w = img.width, h = img.height;
  // undecimated bands per level: [k-1] = {HL, LH, HH}; approx carried forward
  std::vector<std::array<Matrix, 3>> bands(levels);
  Matrix approx = to_matrix(img);
  Matrix row_lo(h, w), row_hi(h, w);
  for (int k = 1; k <= levels; ++k) {
    const int hole = 1 << (k - 1);
    detail::atrous_rows(approx, pair.h0, pair.h0_origin, hole, row_lo, threads);
    detail::atrous_rows(approx, pair.h1, pair.h1_origin, hole, row_hi, threads);
    Matrix ll(h, w), lh(h, w), hl(h, w), hh(h, w);
    detail::atrous_cols(row_lo, pair.h0, pair.h0_origin, hole, ll, threads);
    detail::atrous_cols(row_lo, pair.h1, pair.h1_origin, hole, lh, threads);
    detail::atrous_cols(row_hi, pair.h0, pair.h0_origin, hole, hl, threads);
    detail::atrous_cols(row_hi, pair.h1, pair.h1_origin, hole, hh, threads);
    bands[k - 1] = {std::move(hl), std::move(lh), std::move(hh)};
    approx = std::move(ll);
  }

  FeatureField ff;
  ff.width = w;
  ff.height = h;
  ff.dim = tree_feature_length(levels);
  ff.values.resize(ff.pixel_count() * ff.dim);
  ff.lowfreq_mask.assign(ff.dim, 0);
  for (int i = 0; i < 4; ++i) ff.lowfreq_mask[i] = 1;

  parallel_for(h, threads, [&](int begin, int end) {
    for (int r = begin; r < end; ++r) {
      for (int c = 0; c < w; ++c) {
        auto dst = ff.at(r, c);
        size_t idx = 0;
        dst[idx++] = approx.at(r, c);
        for (int b = 0; b < 3; ++b) dst[idx++] = bands[levels - 1][b].at(r, c);
        for (int k = levels - 1; k >= 1; --k) {
          const int block = 1 << (levels - k);
          const int stride = 1 << k;
          for (int b = 0; b < 3; ++b) {
            const Matrix& band = bands[k - 1][b];
            for (int p = 0; p < block; ++p) {
              const int rr = (r + p * stride) % h;
              for (int q = 0; q < block; ++q) {
                dst[idx++] = band.at(rr, (c + q * stride) % w);
              }
            }
          }
        }
      }
    }
  });
  return ff;
}

/// Applies the low-frequency weighting to the masked components. w = 1
/// returns the input unchanged (bit-exact).
inline FeatureField apply_weighting(FeatureField ff, const WeightingConfig& cfg) {
  if (!(cfg.w > 0.0)) throw ConfigError("weighting parameter w must be > 0");
  if (cfg.w == 1.0) return ff;
  for (size_t px = 0; px < ff.pixel_count(); ++px) {
    double* v = ff.values.data() + px * ff.dim;
    for (int d = 0; d < ff.dim; ++d) {
      if (!ff.lowfreq_mask[d]) continue;
      if (cfg.mode == WeightingMode::SignedPower) {
        const double mag = std::pow(std::abs(v[d]), cfg.w);
        v[d] = v[d] < 0.0 ? -mag : mag;
      } else {
        v[d] *= cfg.w;
      }
    }
  }
  return ff;
}

}  // namespace waveseg
