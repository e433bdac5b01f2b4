#ifndef RANKBENCH_STATS_HPP
#define RANKBENCH_STATS_HPP

// Small numeric kernels shared by the metric, ranking and effect code.
// Written against Eigen's dense base so they accept vectors, blocks, maps and
// expressions of any scalar type.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "rankbench/common.hpp"

namespace rankbench::stats {

template <typename Derived>
std::vector<typename Derived::Scalar> to_std(const Eigen::DenseBase<Derived>& v) {
  std::vector<typename Derived::Scalar> out(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v.derived().coeff(i);
  return out;
}

/// Quantile with linear interpolation between order statistics (the
/// "linear" / type-7 definition). q in [0, 1].
template <typename Derived>
typename Derived::Scalar quantile(const Eigen::DenseBase<Derived>& v, double q) {
  using Scalar = typename Derived::Scalar;
  if (v.size() == 0) throw InvalidArgument("quantile of an empty vector");
  auto sorted = to_std(v);
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const Scalar frac = static_cast<Scalar>(h - static_cast<double>(lo));
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

template <typename Derived>
typename Derived::Scalar median(const Eigen::DenseBase<Derived>& v) {
  return quantile(v, 0.5);
}

template <typename Derived>
typename Derived::Scalar iqr(const Eigen::DenseBase<Derived>& v) {
  return quantile(v, 0.75) - quantile(v, 0.25);
}

/// Population variance.
template <typename Derived>
typename Derived::Scalar variance(const Eigen::DenseBase<Derived>& v) {
  const auto mean = v.mean();
  return (v.derived().array() - mean).square().mean();
}

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar pearson(const Eigen::DenseBase<DerivedX>& x,
                                  const Eigen::DenseBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  const auto dx = (x.derived().array() - x.mean()).eval();
  const auto dy = (y.derived().array() - y.mean()).eval();
  const Scalar sxx = dx.square().sum();
  const Scalar syy = dy.square().sum();
  if (sxx <= 0 || syy <= 0) throw InvalidArgument("pearson: zero variance input");
  return (dx * dy).sum() / std::sqrt(sxx * syy);
}

namespace detail {

// Merge sort on y counting pairs that are strictly out of order.
template <typename Scalar>
std::int64_t sort_count_swaps(std::vector<Scalar>& v, std::vector<Scalar>& buf,
                              std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = sort_count_swaps(v, buf, lo, mid) + sort_count_swaps(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
            buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

template <typename It, typename Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
  std::int64_t total = 0;
  while (first != last) {
    auto run = first;
    std::int64_t t = 0;
    while (run != last && eq(*run, *first)) {
      ++run;
      ++t;
    }
    total += t * (t - 1) / 2;
    first = run;
  }
  return total;
}

}  // namespace detail

/// Kendall tau-b in O(n log n) (Knight's merge-sort formulation).
template <typename DerivedX, typename DerivedY>
double kendall_tau_b(const Eigen::DenseBase<DerivedX>& x, const Eigen::DenseBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  const auto n = static_cast<std::size_t>(x.size());
  if (n != static_cast<std::size_t>(y.size())) throw InvalidArgument("kendall_tau_b: length mismatch");
  if (n < 2) throw InvalidArgument("kendall_tau_b: need at least two pairs");
  std::vector<std::pair<Scalar, Scalar>> pairs(n);
  for (std::size_t i = 0; i < n; ++i) {
    pairs[i] = {x.derived().coeff(static_cast<Index>(i)), y.derived().coeff(static_cast<Index>(i))};
  }
  std::sort(pairs.begin(), pairs.end());
  const auto n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t n1 = detail::tied_pairs(pairs.begin(), pairs.end(),
                                             [](const auto& a, const auto& b) { return a.first == b.first; });
  const std::int64_t n3 = detail::tied_pairs(pairs.begin(), pairs.end(),
                                             [](const auto& a, const auto& b) { return a == b; });
  std::vector<Scalar> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = pairs[i].second;
  const std::int64_t swaps = detail::sort_count_swaps(ys, buf, 0, n);
  const std::int64_t n2 = detail::tied_pairs(ys.begin(), ys.end(), std::equal_to<Scalar>{});
  const double denom = std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
  if (denom == 0.0) throw InvalidArgument("kendall_tau_b: zero variance input");
  const std::int64_t s = n0 - n1 - n2 + n3 - 2 * swaps;
  return static_cast<double>(s) / denom;
}

template <typename Scalar>
struct PolyFit {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coefficients;  // ascending powers
  Scalar r2;
  Scalar mse;
};

/// Least-squares polynomial fit via column-pivoted Householder QR on the
/// Vandermonde matrix. Callers should scale x to a unit range first.
template <typename DerivedX, typename DerivedY>
PolyFit<typename DerivedX::Scalar> polyfit(const Eigen::DenseBase<DerivedX>& x,
                                           const Eigen::DenseBase<DerivedY>& y, int degree) {
  using Scalar = typename DerivedX::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Index n = x.size();
  if (degree < 0 || n < degree + 1) throw InvalidArgument("polyfit: too few points for degree");
  Mat vander(n, degree + 1);
  for (Index i = 0; i < n; ++i) {
    Scalar power = 1;
    for (int d = 0; d <= degree; ++d) {
      vander(i, d) = power;
      power *= x.derived().coeff(i);
    }
  }
  const Vec target = y.derived().template cast<Scalar>();
  PolyFit<Scalar> fit;
  fit.coefficients = vander.colPivHouseholderQr().solve(target);
  const Vec residual = target - vander * fit.coefficients;
  const Scalar ss_res = residual.squaredNorm();
  const Scalar ss_tot = (target.array() - target.mean()).square().sum();
  fit.mse = ss_res / static_cast<Scalar>(n);
  fit.r2 = ss_tot > 0 ? Scalar(1) - ss_res / ss_tot : Scalar(1);
  return fit;
}

/// Ranks with ties averaged (1-based).
template <typename Derived>
Eigen::Matrix<double, Eigen::Dynamic, 1> average_ranks(const Eigen::DenseBase<Derived>& v) {
  const Index n = v.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return v.derived().coeff(a) < v.derived().coeff(b); });
  Eigen::Matrix<double, Eigen::Dynamic, 1> ranks(n);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v.derived().coeff(order[j + 1]) == v.derived().coeff(order[i])) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks(order[k]) = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace rankbench::stats

#endif  // RANKBENCH_STATS_HPP
