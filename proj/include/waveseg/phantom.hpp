#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "waveseg/clustering.hpp"
#include "waveseg/core.hpp"

namespace waveseg {

enum class PhantomKind { Minefield, Disk, Composite };

/// Synthetic test image description. Non-positive geometry fields fall back
/// to defaults scaled to the image size. noise_sigma is the std of additive
/// Gaussian noise applied after composing the clean image; the result is
/// clipped to [0,1].
struct PhantomSpec {
  PhantomKind kind = PhantomKind::Minefield;
  int width = 64;
  int height = 64;
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;

  // minefield / disk
  int mine_count = 10;
  double mine_radius = 4.0;
  double disk_radius = 0.0;  // default min(w,h)/4
  double background = 0.2;
  double foreground = 0.8;

  // composite: smooth blob + sinusoidal grating band on a flat base
  double composite_base = 0.4;
  double texture_period = 4.0;
  double texture_amplitude = 0.25;
  double blob_radius = 0.0;  // default 0.16*min(w,h)
  double blob_contrast = 0.2;
  double blob_sigma = 2.0;
};

/// Image with per-pixel ground-truth labels and the region name catalog
/// (index = class).
struct LabeledImage {
  GrayImage image;
  HardLabeling truth;
  std::vector<std::string> regions;
};

namespace detail {

inline void paint_disk(GrayImage& img, HardLabeling& truth, double cy, double cx, double radius,
                       double value, int label) {
  const double r2 = radius * radius;
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const double dy = r - cy, dx = c - cx;
      if (dy * dy + dx * dx <= r2) {
        img.at(r, c) = value;
        truth.labels[static_cast<size_t>(r) * img.width + c] = label;
      }
    }
  }
}

inline void add_noise_and_clip(GrayImage& img, double sigma, Rng& rng) {
  for (double& v : img.pixels) {
    if (sigma > 0.0) v += sigma * rng.normal();
    v = std::clamp(v, 0.0, 1.0);
  }
}

// Separable Gaussian blur with mirrored borders; kernel truncated at 3 sigma.
inline GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  if (sigma <= 0.0) return img;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += kernel[i + radius];
  }
  for (double& k : kernel) k /= sum;
  auto mirror = [](int i, int n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
    return std::clamp(i, 0, n - 1);
  };
  GrayImage tmp(img.width, img.height), out(img.width, img.height);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * img.at(r, mirror(c + i, img.width));
      tmp.at(r, c) = acc;
    }
  }
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * tmp.at(mirror(r + i, img.height), c);
      out.at(r, c) = acc;
    }
  }
  return out;
}

}  // namespace detail

/// Deterministic phantom generation. Minefield: non-overlapping bright disks
/// on a dark background; placement gives up with PlacementError after 10*n
/// rejected draws. Disk: one centered bright disk. Composite: a smooth
/// low-contrast blob plus a zero-mean sinusoidal grating band, labeled
/// background / texture / blob.
inline LabeledImage make_phantom(const PhantomSpec& spec) {
  if (spec.width < 4 || spec.height < 4) throw ConfigError("phantom too small");
  if (spec.noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
  Rng rng(spec.seed);
  LabeledImage out;
  out.image = GrayImage(spec.width, spec.height, 0.0);
  out.truth.width = spec.width;
  out.truth.height = spec.height;
  out.truth.labels.assign(out.image.size(), 0);

  switch (spec.kind) {
    case PhantomKind::Minefield: {
      out.regions = {"background", "mine"};
      out.truth.classes = 2;
      std::fill(out.image.pixels.begin(), out.image.pixels.end(), spec.background);
      const double radius = spec.mine_radius > 0.0 ? spec.mine_radius : 4.0;
      const int margin = static_cast<int>(std::ceil(radius)) + 1;
      if (2 * margin >= spec.width || 2 * margin >= spec.height) {
        throw ConfigError("mine radius too large for image");
      }
      const double min_sep2 = (2.0 * radius + 1.0) * (2.0 * radius + 1.0);
      std::vector<std::pair<double, double>> centers;
      int attempts = 0;
      const int budget = 10 * std::max(1, spec.mine_count);
      while (static_cast<int>(centers.size()) < spec.mine_count) {
        if (attempts >= budget) {
          throw PlacementError("could not place " + std::to_string(spec.mine_count) +
                               " disks in " + std::to_string(budget) + " attempts");
        }
        ++attempts;
        const double cy = margin + rng.uniform() * (spec.height - 2 * margin);
        const double cx = margin + rng.uniform() * (spec.width - 2 * margin);
        bool ok = true;
        for (const auto& [py, px] : centers) {
          const double dy = cy - py, dx = cx - px;
          if (dy * dy + dx * dx < min_sep2) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        centers.emplace_back(cy, cx);
      }
      for (const auto& [cy, cx] : centers) {
        detail::paint_disk(out.image, out.truth, cy, cx, radius, spec.foreground, 1);
      }
      break;
    }
    case PhantomKind::Disk: {
      out.regions = {"background", "disk"};
      out.truth.classes = 2;
      std::fill(out.image.pixels.begin(), out.image.pixels.end(), spec.background);
      const double radius =
          spec.disk_radius > 0.0 ? spec.disk_radius : std::min(spec.width, spec.height) / 4.0;
      detail::paint_disk(out.image, out.truth, (spec.height - 1) / 2.0, (spec.width - 1) / 2.0,
                         radius, spec.foreground, 1);
      break;
    }
    case PhantomKind::Composite: {
      out.regions = {"background", "texture", "blob"};
      out.truth.classes = 3;
      std::fill(out.image.pixels.begin(), out.image.pixels.end(), spec.composite_base);

      const double blob_radius =
          spec.blob_radius > 0.0 ? spec.blob_radius : 0.16 * std::min(spec.width, spec.height);
      const double blob_cy = 0.30 * spec.height;
      const double blob_cx = 0.50 * spec.width;
      GrayImage blob_layer(spec.width, spec.height, 0.0);
      {
        HardLabeling scratch = out.truth;  // throwaway labels
        detail::paint_disk(blob_layer, scratch, blob_cy, blob_cx, blob_radius, spec.blob_contrast,
                           0);
      }
      blob_layer = detail::gaussian_blur(blob_layer, spec.blob_sigma);

      const int band_top = static_cast<int>(std::lround(0.65 * spec.height));
      const int band_height = std::max(1, spec.height / 4);
      const double k = 2.0 * 3.14159265358979323846 / spec.texture_period;
      const double blob_r2 = blob_radius * blob_radius;
      for (int r = 0; r < spec.height; ++r) {
        for (int c = 0; c < spec.width; ++c) {
          double v = spec.composite_base + blob_layer.at(r, c);
          int label = 0;
          const double dy = r - blob_cy, dx = c - blob_cx;
          if (dy * dy + dx * dx <= blob_r2) label = 2;
          if (r >= band_top && r < band_top + band_height) {
            v += spec.texture_amplitude * std::sin(k * c);
            label = 1;
          }
          out.image.at(r, c) = v;
          out.truth.labels[static_cast<size_t>(r) * spec.width + c] = label;
        }
      }
      break;
    }
  }
  detail::add_noise_and_clip(out.image, spec.noise_sigma, rng);
  return out;
}

/// Otsu's threshold over a fixed [0,1] histogram: maximizes the
/// between-class variance w0*w1*(mu0-mu1)^2; ties resolve to the lowest
/// threshold. Returns the binary mask (intensity > threshold) and the
/// threshold itself. Throws ConstantImageError when there is nothing to
/// split.
inline std::pair<std::vector<std::uint8_t>, double> otsu_binarize(const GrayImage& img,
                                                                  int bins = 256) {
  if (bins < 2) throw ConfigError("otsu needs at least 2 bins");
  if (img.size() == 0) throw DimensionError("empty image");
  const auto [mn, mx] = std::minmax_element(img.pixels.begin(), img.pixels.end());
  if (*mn == *mx) throw ConstantImageError("constant image has no threshold");

  std::vector<double> hist(bins, 0.0);
  for (double v : img.pixels) {
    int b = static_cast<int>(std::clamp(v, 0.0, 1.0) * bins);
    b = std::min(b, bins - 1);
    hist[b] += 1.0;
  }
  const double total = static_cast<double>(img.size());
  double total_mean = 0.0;
  for (int b = 0; b < bins; ++b) total_mean += b * hist[b];

  double best_var = -1.0;
  int best_t = 0;
  double w0 = 0.0, sum0 = 0.0;
  for (int t = 0; t < bins - 1; ++t) {
    w0 += hist[t];
    sum0 += t * hist[t];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (total_mean - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best_var) {
      best_var = between;
      best_t = t;
    }
  }
  const double threshold = static_cast<double>(best_t + 1) / bins;
  std::vector<std::uint8_t> mask(img.size());
  for (size_t j = 0; j < img.size(); ++j) mask[j] = img.pixels[j] > threshold ? 1 : 0;
  return {std::move(mask), threshold};
}

}  // namespace waveseg
