// SPDX-License-Identifier: Apache-2.0
#include "metaseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "metaseg/error.hpp"

namespace metaseg {
namespace {

void check_pair(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": inputs differ in length");
  }
  if (a == 0) throw Error(ErrorKind::EmptyInput, std::string(what) + ": empty input");
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double accuracy(std::span<const double> scores, std::span<const double> labels, double threshold) {
  check_pair(scores.size(), labels.size(), "accuracy");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double decision = scores[i] >= threshold ? 1.0 : 0.0;
    if (decision == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

double naive_baseline(std::span<const double> labels) {
  if (labels.empty()) throw Error(ErrorKind::EmptyInput, "naive_baseline: empty input");
  std::size_t ones = 0;
  for (double y : labels) ones += y > 0.5 ? 1 : 0;
  const std::size_t zeros = labels.size() - ones;
  return static_cast<double>(std::max(zeros, ones)) / static_cast<double>(labels.size());
}

double auroc(std::span<const double> scores, std::span<const double> labels) {
  check_pair(scores.size(), labels.size(), "auroc");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] != scores[b] ? scores[a] < scores[b] : a < b;
  });

  // Mid-ranks (1-based) summed over positives.
  double pos_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] > 0.5) {
        pos_rank_sum += rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorKind::SingleClass, "auroc needs both classes present");
  }
  const double np = static_cast<double>(positives);
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(negatives));
}

double r_squared(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred.size(), truth.size(), "r_squared");
  const double m = mean(truth);
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_tot += (truth[i] - m) * (truth[i] - m);
    ss_res += (pred[i] - truth[i]) * (pred[i] - truth[i]);
  }
  if (ss_tot == 0.0) throw Error(ErrorKind::ZeroVariance, "r_squared: constant truth");
  return 1.0 - ss_res / ss_tot;
}

double residual_sigma(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred.size(), truth.size(), "residual_sigma");
  const std::size_t n = pred.size();
  double mr = 0.0;
  for (std::size_t i = 0; i < n; ++i) mr += pred[i] - truth[i];
  mr /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (pred[i] - truth[i]) - mr;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(n));
}

double pearson(std::span<const double> a, std::span<const double> b) {
  check_pair(a.size(), b.size(), "pearson");
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw Error(ErrorKind::ZeroVariance, "pearson: constant input");
  return sab / std::sqrt(saa * sbb);
}

double dice(std::span<const std::uint8_t> pred_mask, std::span<const std::uint8_t> gt_mask) {
  if (pred_mask.size() != gt_mask.size()) {
    throw Error(ErrorKind::DimensionMismatch, "dice: masks differ in size");
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < pred_mask.size(); ++i) {
    const bool p = pred_mask[i] != 0;
    const bool g = gt_mask[i] != 0;
    tp += p && g;
    fp += p && !g;
    fn += !p && g;
  }
  if (tp + fp + fn == 0) return 1.0;
  return static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
}

}  // namespace metaseg
