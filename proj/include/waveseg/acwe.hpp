#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "waveseg/core.hpp"
#include "waveseg/features.hpp"

namespace waveseg {

/// Signed level-set function; the foreground region is {phi >= 0}.
struct LevelSet {
  int width = 0;
  int height = 0;
  double eps = 1.0;  // Heaviside regularization width in pixels
  std::vector<double> phi;

  double& at(int r, int c) { return phi[static_cast<size_t>(r) * width + c]; }
  const double& at(int r, int c) const { return phi[static_cast<size_t>(r) * width + c]; }
};

struct AcweParams {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  std::optional<double> mu;  // length weight; default 0.1x the data-force range
  double eps = 1.0;
  std::optional<double> dt;  // default 0.45*eps/(mu + max data force)
  int max_iter = 1000;
  double stop_tol = 1e-4;  // fraction of pixels changing sign per iteration
};

struct AcweResult {
  LevelSet phi;
  std::vector<std::uint8_t> mask;       // phi >= 0
  std::vector<double> mean_inside;      // hard means over the final mask
  std::vector<double> mean_outside;
  std::vector<double> energy_trace;
  int iterations = 0;
  bool converged = false;
  double resolved_mu = 0.0;
  double resolved_dt = 0.0;
};

/// Smooth Heaviside H_eps(z) = 1/2 (1 + 2/pi atan(z/eps)).
inline double regularized_heaviside(double z, double eps) {
  return 0.5 * (1.0 + (2.0 / 3.14159265358979323846) * std::atan(z / eps));
}

/// Its derivative, delta_eps(z) = eps / (pi (eps^2 + z^2)).
inline double regularized_delta(double z, double eps) {
  return eps / (3.14159265358979323846 * (eps * eps + z * z));
}

/// Smoothed foreground/background feature means, weighted by H_eps(phi) and
/// its complement. Throws DegenerateRegionError if a region's weight sum
/// collapses.
inline std::pair<std::vector<double>, std::vector<double>> region_means(const FeatureField& ff,
                                                                        const LevelSet& ls) {
  if (ls.width != ff.width || ls.height != ff.height) {
    throw DimensionError("level set dimensions do not match feature field");
  }
  std::vector<double> inside(ff.dim, 0.0), outside(ff.dim, 0.0);
  double w_in = 0.0, w_out = 0.0;
  for (size_t j = 0; j < ff.pixel_count(); ++j) {
    const double h = regularized_heaviside(ls.phi[j], ls.eps);
    const double* f = ff.values.data() + j * ff.dim;
    w_in += h;
    w_out += 1.0 - h;
    for (int d = 0; d < ff.dim; ++d) {
      inside[d] += h * f[d];
      outside[d] += (1.0 - h) * f[d];
    }
  }
  if (w_in < 1e-12 || w_out < 1e-12) {
    throw DegenerateRegionError("a region has vanishing weight");
  }
  for (int d = 0; d < ff.dim; ++d) {
    inside[d] /= w_in;
    outside[d] /= w_out;
  }
  return {std::move(inside), std::move(outside)};
}

namespace detail {

inline int mirror_index(int i, int n) {
  if (n == 1) return 0;
  if (i < 0) i = -i;
  if (i >= n) i = 2 * n - 2 - i;
  return std::clamp(i, 0, n - 1);
}

inline void gradient_central(const LevelSet& ls, std::vector<double>& gx,
                             std::vector<double>& gy) {
  const int w = ls.width, h = ls.height;
  gx.resize(ls.phi.size());
  gy.resize(ls.phi.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const size_t i = static_cast<size_t>(r) * w + c;
      gx[i] = 0.5 * (ls.at(r, mirror_index(c + 1, w)) - ls.at(r, mirror_index(c - 1, w)));
      gy[i] = 0.5 * (ls.at(mirror_index(r + 1, h), c) - ls.at(mirror_index(r - 1, h), c));
    }
  }
}

}  // namespace detail

/// div(grad(phi)/|grad(phi)|) by central differences with mirrored borders;
/// the gradient magnitude is regularized as sqrt(gx^2 + gy^2 + 1e-8).
inline Matrix curvature(const LevelSet& ls) {
  const int w = ls.width, h = ls.height;
  std::vector<double> gx, gy;
  detail::gradient_central(ls, gx, gy);
  std::vector<double> nx(gx.size()), ny(gy.size());
  for (size_t i = 0; i < gx.size(); ++i) {
    const double mag = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i] + 1e-8);
    nx[i] = gx[i] / mag;
    ny[i] = gy[i] / mag;
  }
  Matrix out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double dnx = 0.5 * (nx[static_cast<size_t>(r) * w + detail::mirror_index(c + 1, w)] -
                                nx[static_cast<size_t>(r) * w + detail::mirror_index(c - 1, w)]);
      const double dny = 0.5 * (ny[static_cast<size_t>(detail::mirror_index(r + 1, h)) * w + c] -
                                ny[static_cast<size_t>(detail::mirror_index(r - 1, h)) * w + c]);
      out.at(r, c) = dnx + dny;
    }
  }
  return out;
}

enum class LevelSetInit { Circle, Checkerboard };

/// Circle: signed distance to a centered circle (default radius min(w,h)/3),
/// positive inside. Checkerboard: sine product with a 10 px period.
inline LevelSet init_levelset(int width, int height, LevelSetInit kind, double param = 0.0) {
  if (width < 1 || height < 1) throw DimensionError("level set needs positive dimensions");
  LevelSet ls;
  ls.width = width;
  ls.height = height;
  ls.phi.resize(static_cast<size_t>(width) * height);
  if (kind == LevelSetInit::Circle) {
    const double radius = param > 0.0 ? param : std::min(width, height) / 3.0;
    const double cy = (height - 1) / 2.0;
    const double cx = (width - 1) / 2.0;
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        ls.at(r, c) = radius - std::hypot(r - cy, c - cx);
      }
    }
  } else {
    const double period = param > 0.0 ? param : 10.0;
    const double k = 2.0 * 3.14159265358979323846 / period;
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        ls.at(r, c) = std::sin(k * r) * std::sin(k * c);
      }
    }
  }
  return ls;
}

/// Level-set evolution of the two-region piecewise-constant model over
/// feature vectors:
///   phi += dt * delta_eps(phi) * (mu*curv - l1*||F-F1||^2 + l2*||F-F2||^2)
/// with the region means recomputed every iteration. Stops once the
/// fraction of pixels whose sign changed stays below stop_tol for three
/// consecutive iterations (a single quiet iteration can occur mid-motion).
/// The reported means are the plain averages over the final binary mask.
inline AcweResult acwe_w(const FeatureField& ff, LevelSet init, const AcweParams& params) {
  if (init.width != ff.width || init.height != ff.height) {
    throw DimensionError("initial level set does not match feature field");
  }
  if (params.eps <= 0.0 || params.max_iter < 1) throw ConfigError("invalid ACWE parameters");
  const size_t n = ff.pixel_count();
  init.eps = params.eps;

  auto data_force = [&](const std::vector<double>& m1, const std::vector<double>& m2, size_t j) {
    const double* f = ff.values.data() + j * ff.dim;
    double d1 = 0.0, d2 = 0.0;
    for (int d = 0; d < ff.dim; ++d) {
      const double a = f[d] - m1[d];
      const double b = f[d] - m2[d];
      d1 += a * a;
      d2 += b * b;
    }
    return params.lambda2 * d2 - params.lambda1 * d1;
  };

  auto [m1, m2] = region_means(ff, init);
  double force_min = std::numeric_limits<double>::infinity();
  double force_max = -std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < n; ++j) {
    const double fj = data_force(m1, m2, j);
    force_min = std::min(force_min, fj);
    force_max = std::max(force_max, fj);
  }
  const double mu = params.mu.value_or(0.1 * (force_max - force_min));
  const double max_force = std::max(std::abs(force_min), std::abs(force_max));
  const double dt = params.dt.value_or(0.45 * params.eps / (mu + max_force + 1e-12));

  AcweResult res;
  res.resolved_mu = mu;
  res.resolved_dt = dt;
  res.phi = std::move(init);
  LevelSet& ls = res.phi;

  std::vector<double> phi_new(n), gx, gy;
  int steady = 0;
  for (int iter = 1; iter <= params.max_iter; ++iter) {
    if (iter > 1) std::tie(m1, m2) = region_means(ff, ls);
    const Matrix curv = curvature(ls);
    size_t flips = 0;
    for (size_t j = 0; j < n; ++j) {
      const double force = mu * curv.data[j] + data_force(m1, m2, j);
      phi_new[j] = ls.phi[j] + dt * regularized_delta(ls.phi[j], params.eps) * force;
      flips += (phi_new[j] >= 0.0) != (ls.phi[j] >= 0.0);
    }
    ls.phi.swap(phi_new);

    // objective: region terms plus mu * sum delta_eps(phi)|grad phi|
    detail::gradient_central(ls, gx, gy);
    double energy = 0.0;
    for (size_t j = 0; j < n; ++j) {
      const double* f = ff.values.data() + j * ff.dim;
      double d1 = 0.0, d2 = 0.0;
      for (int d = 0; d < ff.dim; ++d) {
        const double a = f[d] - m1[d];
        const double b = f[d] - m2[d];
        d1 += a * a;
        d2 += b * b;
      }
      const double hs = regularized_heaviside(ls.phi[j], params.eps);
      energy += params.lambda1 * d1 * hs + params.lambda2 * d2 * (1.0 - hs);
      energy += mu * regularized_delta(ls.phi[j], params.eps) * std::hypot(gx[j], gy[j]);
    }
    res.energy_trace.push_back(energy);
    res.iterations = iter;
    if (static_cast<double>(flips) / static_cast<double>(n) < params.stop_tol) {
      if (++steady >= 3) {
        res.converged = true;
        break;
      }
    } else {
      steady = 0;
    }
  }

  res.mask.resize(n);
  for (size_t j = 0; j < n; ++j) res.mask[j] = ls.phi[j] >= 0.0 ? 1 : 0;
  std::vector<double> in(ff.dim, 0.0), out(ff.dim, 0.0);
  size_t n_in = 0, n_out = 0;
  for (size_t j = 0; j < n; ++j) {
    const double* f = ff.values.data() + j * ff.dim;
    if (res.mask[j]) {
      ++n_in;
      for (int d = 0; d < ff.dim; ++d) in[d] += f[d];
    } else {
      ++n_out;
      for (int d = 0; d < ff.dim; ++d) out[d] += f[d];
    }
  }
  if (n_in > 0 && n_out > 0) {
    for (int d = 0; d < ff.dim; ++d) {
      in[d] /= n_in;
      out[d] /= n_out;
    }
    res.mean_inside = std::move(in);
    res.mean_outside = std::move(out);
  } else {
    res.mean_inside = m1;  // fall back to the smoothed means
    res.mean_outside = m2;
  }
  return res;
}

}  // namespace waveseg
