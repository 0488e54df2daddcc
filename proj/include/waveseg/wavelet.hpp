#pragma once

#include <array>
#include <string>
#include <vector>

#include "waveseg/core.hpp"
#include "waveseg/filterbank.hpp"

namespace waveseg {

/// Detail sub-bands of one decomposition level. Orientation convention:
/// HL is high-pass along x (width), LH high-pass along y, HH both.
struct DetailBands {
  Matrix hl, lh, hh;
};

/// Multi-level 2-D decomposition: approximation LL_K plus the three detail
/// bands per level. details[k-1] holds level k (level 1 is the finest);
/// level-k bands have dimensions (height/2^k, width/2^k).
struct WaveletPyramid {
  int levels = 0;
  Matrix approx;
  std::vector<DetailBands> details;

  int image_width() const { return levels > 0 ? details[0].hl.cols * 2 : approx.cols; }
  int image_height() const { return levels > 0 ? details[0].hl.rows * 2 : approx.rows; }
};

namespace detail {

inline void require_even(int width, int height) {
  if (width % 2 != 0 || height % 2 != 0 || width < 2 || height < 2) {
    throw DimensionError("image dimensions must be even, got " + std::to_string(width) + "x" +
                         std::to_string(height));
  }
}

// One analysis pass along rows (x) of m with the given filter.
inline Matrix analyze_rows(const Matrix& m, std::span<const double> h, int origin) {
  Matrix out(m.rows, m.cols / 2);
  std::vector<double> row(m.cols), half(m.cols / 2);
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) row[c] = m.at(r, c);
    analyze_periodic(row, h, origin, half);
    for (int c = 0; c < out.cols; ++c) out.at(r, c) = half[c];
  }
  return out;
}

// One analysis pass along columns (y).
inline Matrix analyze_cols(const Matrix& m, std::span<const double> h, int origin) {
  Matrix out(m.rows / 2, m.cols);
  std::vector<double> col(m.rows), half(m.rows / 2);
  for (int c = 0; c < m.cols; ++c) {
    for (int r = 0; r < m.rows; ++r) col[r] = m.at(r, c);
    analyze_periodic(col, h, origin, half);
    for (int r = 0; r < out.rows; ++r) out.at(r, c) = half[r];
  }
  return out;
}

inline void synthesize_rows_add(const Matrix& coeffs, std::span<const double> f, int origin,
                                Matrix& out) {
  std::vector<double> half(coeffs.cols), full(out.cols);
  for (int r = 0; r < out.rows; ++r) {
    for (int c = 0; c < coeffs.cols; ++c) half[c] = coeffs.at(r, c);
    std::fill(full.begin(), full.end(), 0.0);
    synthesize_periodic_add(half, f, origin, full);
    for (int c = 0; c < out.cols; ++c) out.at(r, c) += full[c];
  }
}

inline void synthesize_cols_add(const Matrix& coeffs, std::span<const double> f, int origin,
                                Matrix& out) {
  std::vector<double> half(coeffs.rows), full(out.rows);
  for (int c = 0; c < out.cols; ++c) {
    for (int r = 0; r < coeffs.rows; ++r) half[r] = coeffs.at(r, c);
    std::fill(full.begin(), full.end(), 0.0);
    synthesize_periodic_add(half, f, origin, full);
    for (int r = 0; r < out.rows; ++r) out.at(r, c) += full[r];
  }
}

inline std::array<Matrix, 4> dwt2_matrix(const Matrix& m, const FilterPair& pair) {
  require_even(m.cols, m.rows);
  Matrix row_lo = analyze_rows(m, pair.h0, pair.h0_origin);
  Matrix row_hi = analyze_rows(m, pair.h1, pair.h1_origin);
  Matrix ll = analyze_cols(row_lo, pair.h0, pair.h0_origin);
  Matrix lh = analyze_cols(row_lo, pair.h1, pair.h1_origin);
  Matrix hl = analyze_cols(row_hi, pair.h0, pair.h0_origin);
  Matrix hh = analyze_cols(row_hi, pair.h1, pair.h1_origin);
  return {std::move(ll), std::move(hl), std::move(lh), std::move(hh)};
}

inline Matrix idwt2_matrix(const Matrix& ll, const Matrix& hl, const Matrix& lh, const Matrix& hh,
                           const FilterPair& pair) {
  if (hl.rows != ll.rows || hl.cols != ll.cols || lh.rows != ll.rows || lh.cols != ll.cols ||
      hh.rows != ll.rows || hh.cols != ll.cols) {
    throw DimensionError("sub-band dimensions disagree");
  }
  const int rows = ll.rows * 2;
  const int cols = ll.cols * 2;
  // invert the column pass per half, then the row pass
  Matrix row_lo(rows, ll.cols, 0.0);
  synthesize_cols_add(ll, pair.f0, pair.f0_origin, row_lo);
  synthesize_cols_add(lh, pair.f1, pair.f1_origin, row_lo);
  Matrix row_hi(rows, ll.cols, 0.0);
  synthesize_cols_add(hl, pair.f0, pair.f0_origin, row_hi);
  synthesize_cols_add(hh, pair.f1, pair.f1_origin, row_hi);
  Matrix out(rows, cols, 0.0);
  synthesize_rows_add(row_lo, pair.f0, pair.f0_origin, out);
  synthesize_rows_add(row_hi, pair.f1, pair.f1_origin, out);
  return out;
}

}  // namespace detail

/// Single-level separable 2-D analysis with periodic extension, row pass
/// then column pass, downsampled by 2 each direction. Returns LL, HL, LH, HH
/// each of size (height/2, width/2). Throws DimensionError on odd sides.
inline std::array<Matrix, 4> dwt2_single_level(const GrayImage& img, const FilterPair& pair) {
  return detail::dwt2_matrix(to_matrix(img), pair);
}

/// Inverse of dwt2_single_level.
inline GrayImage idwt2_single_level(const Matrix& ll, const Matrix& hl, const Matrix& lh,
                                    const Matrix& hh, const FilterPair& pair) {
  return to_image(detail::idwt2_matrix(ll, hl, lh, hh, pair));
}

/// K-level decomposition: recursively re-analyzes the LL band. Requires both
/// sides divisible by 2^K (callers pad beforehand if needed).
inline WaveletPyramid wavedec2(const GrayImage& img, const FilterPair& pair, int levels) {
  if (levels < 1) throw ConfigError("wavedec2 needs levels >= 1");
  const int div = 1 << levels;
  if (img.width % div != 0 || img.height % div != 0 || img.width < div || img.height < div) {
    throw DimensionError("image dimensions " + std::to_string(img.width) + "x" +
                         std::to_string(img.height) + " not divisible by 2^" +
                         std::to_string(levels));
  }
  WaveletPyramid pyr;
  pyr.levels = levels;
  pyr.details.resize(levels);
  Matrix cur = to_matrix(img);
  for (int k = 1; k <= levels; ++k) {
    auto bands = detail::dwt2_matrix(cur, pair);
    cur = std::move(bands[0]);
    pyr.details[k - 1] = {std::move(bands[1]), std::move(bands[2]), std::move(bands[3])};
  }
  pyr.approx = std::move(cur);
  return pyr;
}

/// Inverse multi-level transform; with the tap origins of a validated pair
/// the round trip wavedec2 -> waverec2 has no spatial shift.
inline GrayImage waverec2(const WaveletPyramid& pyr, const FilterPair& pair) {
  if (pyr.levels < 1) throw ConfigError("pyramid has no levels");
  Matrix cur = pyr.approx;
  for (int k = pyr.levels; k >= 1; --k) {
    const DetailBands& d = pyr.details[k - 1];
    if (d.hl.rows != cur.rows || d.hl.cols != cur.cols) {
      throw DimensionError("pyramid level " + std::to_string(k) + " inconsistent with approx");
    }
    cur = detail::idwt2_matrix(cur, d.hl, d.lh, d.hh, pair);
  }
  return to_image(cur);
}

/// Feature length of the K-level tree: 4 coefficients at the coarsest level
/// plus 3 blocks of 4^(K-k) per finer level; 1 when K = 0 (intensity only).
inline int tree_feature_length(int levels) {
  if (levels == 0) return 1;
  int d = 4;
  for (int k = levels - 1; k >= 1; --k) {
    const int block = 1 << (levels - k);
    d += 3 * block * block;
  }
  return d;
}

/// Vectorizes the spatial-orientation tree rooted at index (0,0):
/// LL_K(0,0), HL_K(0,0), LH_K(0,0), HH_K(0,0), then for k = K-1 .. 1 the
/// row-major top-left 2^(K-k) square of HL_k, LH_k, HH_k.
inline std::vector<double> extract_first_tree(const WaveletPyramid& pyr) {
  std::vector<double> out;
  out.reserve(tree_feature_length(pyr.levels));
  const int k_top = pyr.levels;
  out.push_back(pyr.approx.at(0, 0));
  out.push_back(pyr.details[k_top - 1].hl.at(0, 0));
  out.push_back(pyr.details[k_top - 1].lh.at(0, 0));
  out.push_back(pyr.details[k_top - 1].hh.at(0, 0));
  for (int k = k_top - 1; k >= 1; --k) {
    const int block = 1 << (k_top - k);
    for (const Matrix* band : {&pyr.details[k - 1].hl, &pyr.details[k - 1].lh,
                               &pyr.details[k - 1].hh}) {
      for (int r = 0; r < block; ++r) {
        for (int c = 0; c < block; ++c) out.push_back(band->at(r, c));
      }
    }
  }
  return out;
}

}  // namespace waveseg
