#pragma once

// Reference implementations used only by tests. They favour obviousness over
// speed and share no code with the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

/// Attenuated correlation of two standard normals with latent correlation
/// 0.3 after equal-probability 5-level discretization (exact bivariate
/// normal integration, computed once offline).
inline constexpr double kAttenuated5Level_r03 = 0.26817125023699173;

/// Textbook Pearson: sum of products of deviations over the root of the
/// product of sums of squares.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Pads a count table to square with zero rows/columns.
inline Eigen::MatrixXi pad_square(const Eigen::MatrixXi& counts) {
  const Eigen::Index n = std::max(counts.rows(), counts.cols());
  Eigen::MatrixXi padded = Eigen::MatrixXi::Zero(n, n);
  padded.topLeftCorner(counts.rows(), counts.cols()) = counts;
  return padded;
}

struct PermutationResult {
  long long best = 0;
  std::vector<int> first_optimal;  ///< lexicographically smallest optimal permutation
};

/// Exhaustive search over all permutations of the padded square table.
inline PermutationResult brute_force_alignment(const Eigen::MatrixXi& counts) {
  const Eigen::MatrixXi padded = pad_square(counts);
  const auto n = static_cast<int>(padded.rows());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  PermutationResult result;
  result.best = -1;
  do {
    long long total = 0;
    for (int i = 0; i < n; ++i) total += padded(i, perm[static_cast<std::size_t>(i)]);
    if (total > result.best) {
      result.best = total;
      result.first_optimal = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return result;
}

/// Minimum total cost over all permutations (square cost matrix).
inline double brute_force_assignment(const Eigen::MatrixXd& cost) {
  const auto n = static_cast<int>(cost.rows());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost(i, perm[static_cast<std::size_t>(i)]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Raw varimax criterion of Kaiser-normalized loadings, written directly
/// from the definition: per column, the population variance of the squared
/// entries, summed over columns.
inline double normalized_varimax_criterion(const Eigen::MatrixXd& loadings) {
  double total = 0.0;
  const auto n = static_cast<double>(loadings.rows());
  for (Eigen::Index j = 0; j < loadings.cols(); ++j) {
    std::vector<double> sq;
    for (Eigen::Index i = 0; i < loadings.rows(); ++i) {
      const double norm = loadings.row(i).norm();
      const double v = norm > 0.0 ? loadings(i, j) / norm : 0.0;
      sq.push_back(v * v);
    }
    const double mean = std::accumulate(sq.begin(), sq.end(), 0.0) / n;
    double var = 0.0;
    for (double s : sq) var += (s - mean) * (s - mean);
    total += var / n;
  }
  return total;
}

/// Loadings times the planar rotation [[c, -s], [s, c]].
inline Eigen::MatrixXd rotate2(const Eigen::MatrixXd& loadings, double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return loadings * r;
}

/// Angle in [-pi/4, pi/4) maximizing the normalized varimax criterion of a
/// two-column loading matrix: dense grid, then golden-section refinement.
inline double varimax_angle_by_search(const Eigen::MatrixXd& loadings) {
  const double pi = std::acos(-1.0);
  auto f = [&](double a) { return normalized_varimax_criterion(rotate2(loadings, a)); };
  const int steps = 20000;
  const double lo = -pi / 4.0;
  const double h = (pi / 2.0) / steps;
  double best_a = lo;
  double best_f = -INFINITY;
  for (int i = 0; i < steps; ++i) {
    const double a = lo + i * h;
    const double v = f(a);
    if (v > best_f) {
      best_f = v;
      best_a = a;
    }
  }
  double a = best_a - h;
  double b = best_a + h;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  for (int it = 0; it < 200; ++it) {
    if (f(c) > f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return 0.5 * (a + b);
}

/// Symmetric adjacency with unit diagonal made of `sizes` disconnected
/// blocks, random weights in [lo, 1) inside each block.
inline Eigen::MatrixXd block_adjacency(const std::vector<int>& sizes, std::mt19937_64& gen,
                                       double lo = 0.1) {
  const int n = std::accumulate(sizes.begin(), sizes.end(), 0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  std::uniform_real_distribution<double> w(lo, 1.0);
  int start = 0;
  for (int size : sizes) {
    for (int i = start; i < start + size; ++i) {
      for (int j = i + 1; j < start + size; ++j) a(i, j) = a(j, i) = w(gen);
    }
    start += size;
  }
  a.diagonal().setOnes();
  return a;
}

/// Random permutation of 0..n-1.
inline std::vector<int> random_permutation(int n, std::mt19937_64& gen) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), gen);
  return p;
}

inline Eigen::MatrixXd permute_symmetric(const Eigen::MatrixXd& m, const std::vector<int>& p) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out(i, j) = m(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

}  // namespace oracle
