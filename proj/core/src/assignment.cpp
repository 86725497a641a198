#include "sclust/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sclust/error.hpp"

namespace sclust {
namespace {

Eigen::MatrixXd padded_negated(const Eigen::MatrixXi& counts) {
  const Eigen::Index n = std::max(counts.rows(), counts.cols());
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(n, n);
  cost.topLeftCorner(counts.rows(), counts.cols()) = -counts.cast<double>();
  return cost;
}

// Optimal cost of the square problem with the given rows/columns removed.
double reduced_optimum(const Eigen::MatrixXd& cost, const std::vector<bool>& row_used,
                       const std::vector<bool>& col_used) {
  std::vector<Eigen::Index> rows;
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < cost.rows(); ++i) {
    if (!row_used[static_cast<std::size_t>(i)]) rows.push_back(i);
    if (!col_used[static_cast<std::size_t>(i)]) cols.push_back(i);
  }
  if (rows.empty()) return 0.0;
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < cols.size(); ++b) {
      sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = cost(rows[a], cols[b]);
    }
  }
  double total = 0.0;
  solve_assignment(sub, &total);
  return total;
}

}  // namespace

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost, double* total) {
  if (cost.rows() != cost.cols()) throw ParameterError("assignment cost matrix must be square");
  const int n = static_cast<int>(cost.rows());
  constexpr double inf = std::numeric_limits<double>::infinity();

  // Potentials u (rows), v (columns); p[j] = row matched to column j; 1-based
  // with column 0 as the virtual root.
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<int> p(static_cast<std::size_t>(n + 1), 0);
  std::vector<int> way(static_cast<std::size_t>(n + 1), 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[static_cast<std::size_t>(j)] != 0) row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  }
  if (total != nullptr) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += cost(i, row_to_col[static_cast<std::size_t>(i)]);
    *total = sum;
  }
  return row_to_col;
}

long long max_agreement(const Eigen::MatrixXi& counts) {
  if (counts.size() == 0) return 0;
  double total = 0.0;
  solve_assignment(padded_negated(counts), &total);
  return static_cast<long long>(std::llround(-total));
}

std::vector<int> max_agreement_alignment(const Eigen::MatrixXi& counts) {
  std::vector<int> alignment(static_cast<std::size_t>(counts.rows()), -1);
  if (counts.size() == 0) return alignment;
  const Eigen::MatrixXd cost = padded_negated(counts);
  const auto n = static_cast<std::size_t>(cost.rows());

  // Fix rows in order, each to the smallest column that still admits an
  // optimal completion. Costs are integers, so the comparisons are exact.
  std::vector<bool> row_used(n, false);
  std::vector<bool> col_used(n, false);
  double remaining = reduced_optimum(cost, row_used, col_used);
  std::vector<int> padded(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    row_used[i] = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (col_used[j]) continue;
      col_used[j] = true;
      const double rest = reduced_optimum(cost, row_used, col_used);
      const double with_j = cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) + rest;
      if (with_j == remaining) {
        padded[i] = static_cast<int>(j);
        remaining = rest;
        break;
      }
      col_used[j] = false;
    }
  }
  for (std::size_t i = 0; i < alignment.size(); ++i) {
    alignment[i] = padded[i] < counts.cols() ? padded[i] : -1;
  }
  return alignment;
}

}  // namespace sclust
