#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "waveseg/clustering.hpp"
#include "waveseg/core.hpp"

namespace waveseg {

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;
};

inline BinaryMask mask_of_class(const HardLabeling& lab, int k) {
  BinaryMask m{lab.width, lab.height, {}};
  m.data.resize(lab.pixel_count());
  for (size_t j = 0; j < lab.pixel_count(); ++j) m.data[j] = lab.labels[j] == k ? 1 : 0;
  return m;
}

/// Dice overlap 2|A&B| / (|A|+|B|); two empty masks agree perfectly (1),
/// an empty vs non-empty pair scores 0.
inline double dice(const BinaryMask& a, const BinaryMask& b) {
  if (a.width != b.width || a.height != b.height) throw DimensionError("mask dimensions differ");
  size_t inter = 0, na = 0, nb = 0;
  for (size_t j = 0; j < a.data.size(); ++j) {
    na += a.data[j] != 0;
    nb += b.data[j] != 0;
    inter += (a.data[j] != 0) && (b.data[j] != 0);
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

/// Intersection over union; iou <= dice always.
inline double iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.width != b.width || a.height != b.height) throw DimensionError("mask dimensions differ");
  size_t inter = 0, uni = 0;
  for (size_t j = 0; j < a.data.size(); ++j) {
    const bool pa = a.data[j] != 0, pb = b.data[j] != 0;
    inter += pa && pb;
    uni += pa || pb;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Evaluation of a labeling against ground truth after matching predicted
/// classes to truth classes. permutation[t] is the predicted class assigned
/// to truth class t.
struct EvalReport {
  double dice = 0.0;  // mean of per-class dice
  double iou = 0.0;
  double misclassification_rate = 0.0;
  std::vector<int> permutation;
  std::vector<double> per_class_dice;
  std::vector<double> per_class_iou;
};

/// Finds the class matching that minimizes the error rate: exhaustive over
/// permutations for classes <= 6, greedy confusion-matrix matching above.
/// Reports matched per-class Dice/IoU and the overall rate.
inline EvalReport misclassification(const HardLabeling& pred, const HardLabeling& truth,
                                    int classes) {
  if (pred.width != truth.width || pred.height != truth.height ||
      pred.pixel_count() != truth.pixel_count()) {
    throw DimensionError("labeling dimensions differ");
  }
  if (classes < 1) throw ConfigError("classes must be >= 1");
  const size_t n = pred.pixel_count();
  for (size_t j = 0; j < n; ++j) {
    if (pred.labels[j] < 0 || pred.labels[j] >= classes || truth.labels[j] < 0 ||
        truth.labels[j] >= classes) {
      throw ConfigError("label out of range");
    }
  }

  // confusion[p][t] = pixels predicted p with truth t
  std::vector<std::vector<size_t>> confusion(classes, std::vector<size_t>(classes, 0));
  for (size_t j = 0; j < n; ++j) ++confusion[pred.labels[j]][truth.labels[j]];

  std::vector<int> best_perm(classes);
  std::iota(best_perm.begin(), best_perm.end(), 0);
  auto matched = [&](const std::vector<int>& perm) {
    size_t hits = 0;
    for (int t = 0; t < classes; ++t) hits += confusion[perm[t]][t];
    return hits;
  };

  if (classes <= 6) {
    std::vector<int> perm(classes);
    std::iota(perm.begin(), perm.end(), 0);
    size_t best_hits = 0;
    bool first = true;
    do {
      const size_t hits = matched(perm);
      if (first || hits > best_hits) {
        best_hits = hits;
        best_perm = perm;
        first = false;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    std::vector<bool> used_p(classes, false), used_t(classes, false);
    std::fill(best_perm.begin(), best_perm.end(), -1);
    for (int step = 0; step < classes; ++step) {
      size_t best_count = 0;
      int bp = -1, bt = -1;
      for (int p = 0; p < classes; ++p) {
        if (used_p[p]) continue;
        for (int t = 0; t < classes; ++t) {
          if (used_t[t]) continue;
          if (bp < 0 || confusion[p][t] > best_count) {
            best_count = confusion[p][t];
            bp = p;
            bt = t;
          }
        }
      }
      used_p[bp] = true;
      used_t[bt] = true;
      best_perm[bt] = bp;
    }
  }

  EvalReport report;
  report.permutation = best_perm;
  report.misclassification_rate = 1.0 - static_cast<double>(matched(best_perm)) / n;
  report.per_class_dice.resize(classes);
  report.per_class_iou.resize(classes);
  std::vector<size_t> pred_count(classes, 0), truth_count(classes, 0);
  for (int p = 0; p < classes; ++p) {
    for (int t = 0; t < classes; ++t) {
      pred_count[p] += confusion[p][t];
      truth_count[t] += confusion[p][t];
    }
  }
  for (int t = 0; t < classes; ++t) {
    const int p = best_perm[t];
    const size_t inter = confusion[p][t];
    const size_t denom = pred_count[p] + truth_count[t];
    report.per_class_dice[t] = denom == 0 ? 1.0 : 2.0 * static_cast<double>(inter) / denom;
    const size_t uni = pred_count[p] + truth_count[t] - inter;
    report.per_class_iou[t] = uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
    report.dice += report.per_class_dice[t];
    report.iou += report.per_class_iou[t];
  }
  report.dice /= classes;
  report.iou /= classes;
  return report;
}

}  // namespace waveseg
