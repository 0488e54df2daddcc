#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "waveseg/core.hpp"
#include "waveseg/features.hpp"

namespace waveseg {

/// One class index per pixel.
struct HardLabeling {
  int width = 0;
  int height = 0;
  int classes = 0;
  std::vector<int> labels;

  size_t pixel_count() const { return labels.size(); }
};

/// Per-pixel per-class memberships on the simplex (rows sum to 1).
struct SoftMembership {
  int width = 0;
  int height = 0;
  int classes = 0;
  double fuzzifier = 2.0;
  std::vector<double> u;  // pixel-major, classes per pixel

  size_t pixel_count() const { return u.size() / classes; }
  std::span<double> row(size_t j) { return {u.data() + j * classes, static_cast<size_t>(classes)}; }
  std::span<const double> row(size_t j) const {
    return {u.data() + j * classes, static_cast<size_t>(classes)};
  }
};

struct Centroids {
  int classes = 0;
  int dim = 0;
  std::vector<double> values;  // class-major

  std::span<double> at(int k) { return {values.data() + static_cast<size_t>(k) * dim, static_cast<size_t>(dim)}; }
  std::span<const double> at(int k) const {
    return {values.data() + static_cast<size_t>(k) * dim, static_cast<size_t>(dim)};
  }
};

struct ClusterResult {
  HardLabeling labels;
  std::optional<SoftMembership> membership;  // set by fcm_w
  Centroids centroids;
  std::vector<double> objective_trace;  // non-increasing
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

struct ClusterParams {
  int classes = 2;
  double fuzzifier = 2.0;  // q, used by fcm_w
  double tol = 1e-6;
  int max_iter = 300;
  std::uint64_t seed = 0;
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

/// k-means++ seeding: first centroid uniform, the rest sampled proportional
/// to the squared distance to the nearest chosen centroid.
inline Centroids kmeans_plus_plus(const FeatureField& ff, int classes, Rng& rng) {
  const size_t n = ff.pixel_count();
  Centroids cen;
  cen.classes = classes;
  cen.dim = ff.dim;
  cen.values.resize(static_cast<size_t>(classes) * ff.dim);

  auto feature = [&](size_t j) {
    return std::span<const double>(ff.values.data() + j * ff.dim, static_cast<size_t>(ff.dim));
  };
  const size_t first = rng.integer(n);
  std::copy_n(ff.values.data() + first * ff.dim, ff.dim, cen.values.begin());

  std::vector<double> dist(n);
  for (size_t j = 0; j < n; ++j) dist[j] = squared_distance(feature(j), cen.at(0));
  for (int k = 1; k < classes; ++k) {
    double total = 0.0;
    for (double d : dist) total += d;
    size_t pick;
    if (total <= 0.0) {
      pick = rng.integer(n);
    } else {
      const double r = rng.uniform() * total;
      double cum = 0.0;
      pick = n - 1;
      for (size_t j = 0; j < n; ++j) {
        cum += dist[j];
        if (r < cum) {
          pick = j;
          break;
        }
      }
    }
    std::copy_n(ff.values.data() + pick * ff.dim, ff.dim, cen.at(k).begin());
    for (size_t j = 0; j < n; ++j) {
      dist[j] = std::min(dist[j], squared_distance(feature(j), cen.at(k)));
    }
  }
  return cen;
}

// Moves the point farthest from its centroid into each empty class (skips
// singleton donor classes so no class empties in turn). Mutates labels.
inline void repair_empty_classes(const FeatureField& ff, std::vector<int>& labels,
                                 const Centroids& cen) {
  const size_t n = ff.pixel_count();
  std::vector<int> counts(cen.classes, 0);
  for (int l : labels) ++counts[l];
  for (int k = 0; k < cen.classes; ++k) {
    if (counts[k] > 0) continue;
    double best = -1.0;
    size_t best_j = 0;
    for (size_t j = 0; j < n; ++j) {
      if (counts[labels[j]] <= 1) continue;
      const double d = squared_distance(
          std::span<const double>(ff.values.data() + j * ff.dim, static_cast<size_t>(ff.dim)),
          cen.at(labels[j]));
      if (d > best) {
        best = d;
        best_j = j;
      }
    }
    if (best < 0.0) continue;  // nothing movable
    --counts[labels[best_j]];
    labels[best_j] = k;
    ++counts[k];
  }
}

}  // namespace detail

/// Nearest-centroid assignment by squared Euclidean distance over the full
/// feature vector; ties go to the lowest class index.
inline HardLabeling assign_hard(const FeatureField& ff, const Centroids& cen) {
  if (cen.dim != ff.dim) throw DimensionError("centroid dim does not match feature dim");
  HardLabeling lab;
  lab.width = ff.width;
  lab.height = ff.height;
  lab.classes = cen.classes;
  lab.labels.resize(ff.pixel_count());
  for (size_t j = 0; j < ff.pixel_count(); ++j) {
    std::span<const double> f(ff.values.data() + j * ff.dim, static_cast<size_t>(ff.dim));
    int best_k = 0;
    double best = detail::squared_distance(f, cen.at(0));
    for (int k = 1; k < cen.classes; ++k) {
      const double d = detail::squared_distance(f, cen.at(k));
      if (d < best) {
        best = d;
        best_k = k;
      }
    }
    lab.labels[j] = best_k;
  }
  return lab;
}

/// Component-wise class means. An empty class receives the feature of the
/// point farthest from its own centroid (the point that the next assignment
/// step will claim for it).
inline Centroids update_centroids(const FeatureField& ff, const HardLabeling& lab, int classes) {
  if (lab.pixel_count() != ff.pixel_count()) throw DimensionError("labeling size mismatch");
  std::vector<int> labels = lab.labels;
  Centroids cen;
  cen.classes = classes;
  cen.dim = ff.dim;
  cen.values.assign(static_cast<size_t>(classes) * ff.dim, 0.0);
  std::vector<int> counts(classes, 0);
  for (size_t j = 0; j < labels.size(); ++j) {
    const int k = labels[j];
    if (k < 0 || k >= classes) throw ConfigError("label out of range");
    ++counts[k];
    double* dst = cen.values.data() + static_cast<size_t>(k) * ff.dim;
    const double* src = ff.values.data() + j * ff.dim;
    for (int d = 0; d < ff.dim; ++d) dst[d] += src[d];
  }
  bool any_empty = false;
  for (int k = 0; k < classes; ++k) {
    if (counts[k] == 0) {
      any_empty = true;
      continue;
    }
    double* dst = cen.values.data() + static_cast<size_t>(k) * ff.dim;
    for (int d = 0; d < ff.dim; ++d) dst[d] /= counts[k];
  }
  if (any_empty) {
    detail::repair_empty_classes(ff, labels, cen);
    // recompute means with the repaired labels
    HardLabeling repaired = lab;
    repaired.labels = std::move(labels);
    std::vector<int> counts2(classes, 0);
    for (int l : repaired.labels) ++counts2[l];
    bool still_empty = false;
    for (int c : counts2) still_empty |= (c == 0);
    if (!still_empty) return update_centroids(ff, repaired, classes);
  }
  return cen;
}

inline double kmeans_objective(const FeatureField& ff, const HardLabeling& lab,
                               const Centroids& cen) {
  double j_total = 0.0;
  for (size_t j = 0; j < ff.pixel_count(); ++j) {
    j_total += detail::squared_distance(
        std::span<const double>(ff.values.data() + j * ff.dim, static_cast<size_t>(ff.dim)),
        cen.at(lab.labels[j]));
  }
  return j_total;
}

/// Hard clustering over feature vectors: alternates nearest-centroid
/// assignment and mean updates from a k-means++ start until the labels stop
/// changing, the objective decrease falls below tol, or max_iter.
inline ClusterResult kmeans_w(const FeatureField& ff, const ClusterParams& params) {
  const size_t n = ff.pixel_count();
  if (params.classes < 1) throw ConfigError("classes must be >= 1");
  if (static_cast<size_t>(params.classes) > n) throw ConfigError("more classes than pixels");

  Rng rng(params.seed);
  ClusterResult res;
  res.seed = params.seed;
  res.centroids = detail::kmeans_plus_plus(ff, params.classes, rng);

  std::vector<int> prev;
  for (int iter = 1; iter <= params.max_iter; ++iter) {
    HardLabeling lab = assign_hard(ff, res.centroids);
    if (!prev.empty() && lab.labels == prev) {
      res.converged = true;
      break;
    }
    detail::repair_empty_classes(ff, lab.labels, res.centroids);
    res.centroids = update_centroids(ff, lab, params.classes);
    const double j_now = kmeans_objective(ff, lab, res.centroids);
    res.labels = std::move(lab);
    res.iterations = iter;
    const bool small_step =
        !res.objective_trace.empty() && res.objective_trace.back() - j_now < params.tol;
    res.objective_trace.push_back(j_now);
    if (small_step) {
      res.converged = true;
      break;
    }
    prev = res.labels.labels;
  }
  return res;
}

/// Membership update minimizing the fuzzy objective for fixed centroids:
/// u_jk = 1 / sum_l (d_jk / d_jl)^(2/(q-1)). A pixel coinciding with one or
/// more centroids splits its membership equally among them.
inline SoftMembership fcm_membership_update(const FeatureField& ff, const Centroids& cen,
                                            double q) {
  if (!(q > 1.0)) throw ConfigError("fuzzifier q must be > 1");
  if (cen.dim != ff.dim) throw DimensionError("centroid dim does not match feature dim");
  SoftMembership sm;
  sm.width = ff.width;
  sm.height = ff.height;
  sm.classes = cen.classes;
  sm.fuzzifier = q;
  sm.u.resize(ff.pixel_count() * cen.classes);
  const double expo = -1.0 / (q - 1.0);
  std::vector<double> d2(cen.classes);
  for (size_t j = 0; j < ff.pixel_count(); ++j) {
    std::span<const double> f(ff.values.data() + j * ff.dim, static_cast<size_t>(ff.dim));
    int coincident = 0;
    for (int k = 0; k < cen.classes; ++k) {
      d2[k] = detail::squared_distance(f, cen.at(k));
      if (d2[k] == 0.0) ++coincident;
    }
    auto row = sm.row(j);
    if (coincident > 0) {
      for (int k = 0; k < cen.classes; ++k) row[k] = d2[k] == 0.0 ? 1.0 / coincident : 0.0;
      continue;
    }
    double total = 0.0;
    for (int k = 0; k < cen.classes; ++k) {
      row[k] = std::pow(d2[k], expo);
      total += row[k];
    }
    for (int k = 0; k < cen.classes; ++k) row[k] /= total;
  }
  return sm;
}

inline HardLabeling defuzzify_labels(const SoftMembership& sm);

/// Centroid update: F_k = sum_j u_jk^q F_j / sum_j u_jk^q. A class whose
/// weight column vanishes is re-seeded with the feature of the point
/// farthest from its defuzzified centroid.
inline Centroids fcm_centroid_update(const FeatureField& ff, const SoftMembership& sm, double q) {
  if (!(q > 1.0)) throw ConfigError("fuzzifier q must be > 1");
  if (sm.pixel_count() != ff.pixel_count()) throw DimensionError("membership size mismatch");
  Centroids cen;
  cen.classes = sm.classes;
  cen.dim = ff.dim;
  cen.values.assign(static_cast<size_t>(sm.classes) * ff.dim, 0.0);
  std::vector<double> denom(sm.classes, 0.0);
  for (size_t j = 0; j < ff.pixel_count(); ++j) {
    auto row = sm.row(j);
    const double* src = ff.values.data() + j * ff.dim;
    for (int k = 0; k < sm.classes; ++k) {
      const double wq = std::pow(row[k], q);
      denom[k] += wq;
      double* dst = cen.values.data() + static_cast<size_t>(k) * ff.dim;
      for (int d = 0; d < ff.dim; ++d) dst[d] += wq * src[d];
    }
  }
  std::vector<int> degenerate;
  for (int k = 0; k < sm.classes; ++k) {
    if (denom[k] <= 0.0) {
      degenerate.push_back(k);
      continue;
    }
    double* dst = cen.values.data() + static_cast<size_t>(k) * ff.dim;
    for (int d = 0; d < ff.dim; ++d) dst[d] /= denom[k];
  }
  if (!degenerate.empty()) {
    // effectively unreachable for valid memberships; keep a deterministic rule
    HardLabeling lab = defuzzify_labels(sm);
    for (int k : degenerate) {
      double best = -1.0;
      size_t best_j = 0;
      for (size_t j = 0; j < ff.pixel_count(); ++j) {
        const double d = detail::squared_distance(
            std::span<const double>(ff.values.data() + j * ff.dim, static_cast<size_t>(ff.dim)),
            cen.at(lab.labels[j]));
        if (d > best) {
          best = d;
          best_j = j;
        }
      }
      std::copy_n(ff.values.data() + best_j * ff.dim, ff.dim, cen.at(k).begin());
    }
  }
  return cen;
}

/// Per-pixel argmax of the membership row, ties to the lowest class index.
inline HardLabeling defuzzify_labels(const SoftMembership& sm) {
  HardLabeling lab;
  lab.width = sm.width;
  lab.height = sm.height;
  lab.classes = sm.classes;
  lab.labels.resize(sm.pixel_count());
  for (size_t j = 0; j < sm.pixel_count(); ++j) {
    auto row = sm.row(j);
    int best_k = 0;
    for (int k = 1; k < sm.classes; ++k) {
      if (row[k] > row[best_k]) best_k = k;
    }
    lab.labels[j] = best_k;
  }
  return lab;
}

inline HardLabeling defuzzify(const SoftMembership& sm) { return defuzzify_labels(sm); }

inline double fcm_objective(const FeatureField& ff, const SoftMembership& sm,
                            const Centroids& cen) {
  double j_total = 0.0;
  for (size_t j = 0; j < ff.pixel_count(); ++j) {
    std::span<const double> f(ff.values.data() + j * ff.dim, static_cast<size_t>(ff.dim));
    auto row = sm.row(j);
    for (int k = 0; k < sm.classes; ++k) {
      j_total += std::pow(row[k], sm.fuzzifier) * detail::squared_distance(f, cen.at(k));
    }
  }
  return j_total;
}

/// Fuzzy clustering over feature vectors: k-means++ centroid start, then
/// alternating membership and centroid updates until the largest membership
/// change falls below tol or max_iter.
inline ClusterResult fcm_w(const FeatureField& ff, const ClusterParams& params) {
  const size_t n = ff.pixel_count();
  if (params.classes < 1) throw ConfigError("classes must be >= 1");
  if (static_cast<size_t>(params.classes) > n) throw ConfigError("more classes than pixels");

  Rng rng(params.seed);
  ClusterResult res;
  res.seed = params.seed;
  res.centroids = detail::kmeans_plus_plus(ff, params.classes, rng);
  SoftMembership u = fcm_membership_update(ff, res.centroids, params.fuzzifier);

  for (int iter = 1; iter <= params.max_iter; ++iter) {
    res.centroids = fcm_centroid_update(ff, u, params.fuzzifier);
    SoftMembership u_new = fcm_membership_update(ff, res.centroids, params.fuzzifier);
    res.objective_trace.push_back(fcm_objective(ff, u_new, res.centroids));
    double du = 0.0;
    for (size_t i = 0; i < u.u.size(); ++i) du = std::max(du, std::abs(u_new.u[i] - u.u[i]));
    u = std::move(u_new);
    res.iterations = iter;
    if (du < params.tol) {
      res.converged = true;
      break;
    }
  }
  res.labels = defuzzify_labels(u);
  res.membership = std::move(u);
  return res;
}

}  // namespace waveseg
