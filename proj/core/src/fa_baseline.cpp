#include "sclust/fa_baseline.hpp"

#include <cmath>
#include <string>

#include "sclust/error.hpp"
#include "sclust/matrix_io.hpp"
#include "sclust/spectral.hpp"

namespace sclust {
namespace {

constexpr double kPositiveEigenvalue = 1e-12;

}  // namespace

LoadingMatrix extract_factors(const Eigen::MatrixXd& c, int k) {
  if (c.rows() != c.cols() || c.rows() == 0) {
    throw ParameterError("extract_factors: correlation matrix must be square and nonempty");
  }
  if (k < 1 || k > c.rows()) {
    throw ParameterError("extract_factors: k=" + std::to_string(k) + " outside 1.." +
                         std::to_string(c.rows()));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
  if (solver.info() != Eigen::Success) {
    throw ComputationError("extract_factors: eigensolver did not converge");
  }
  const Eigen::Index p = c.rows();
  int positive = 0;
  for (Eigen::Index i = 0; i < p; ++i) {
    if (solver.eigenvalues()(i) > kPositiveEigenvalue) ++positive;
  }
  if (k > positive) {
    throw ComputationError("extract_factors: k=" + std::to_string(k) + " exceeds the " +
                           std::to_string(positive) + " positive eigenvalues");
  }

  LoadingMatrix out;
  out.extraction_tag = "principal_components";
  out.eigenvalues.resize(k);
  Eigen::MatrixXd vectors(p, k);
  for (int j = 0; j < k; ++j) {
    const Eigen::Index src = p - 1 - j;
    out.eigenvalues(j) = solver.eigenvalues()(src);
    vectors.col(j) = solver.eigenvectors().col(src);
  }
  canonicalize_signs(vectors);
  out.loadings = vectors * out.eigenvalues.cwiseSqrt().asDiagonal();
  out.rotation = Eigen::MatrixXd::Identity(k, k);
  return out;
}

LoadingMatrix extract_factors(const CorrelationMatrix& c, int k) {
  return extract_factors(c.values, k);
}

double varimax_criterion(const Eigen::MatrixXd& loadings) {
  const auto n = static_cast<double>(loadings.rows());
  if (n == 0.0) return 0.0;
  const Eigen::ArrayXXd sq = loadings.array().square();
  double total = 0.0;
  for (Eigen::Index j = 0; j < loadings.cols(); ++j) {
    const double s2 = sq.col(j).sum();
    const double s4 = sq.col(j).square().sum();
    total += (n * s4 - s2 * s2) / (n * n);
  }
  return total;
}

Eigen::MatrixXd kaiser_normalize(const Eigen::MatrixXd& loadings) {
  Eigen::MatrixXd out = loadings;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double h = out.row(i).norm();
    if (h > 0.0) out.row(i) /= h;
  }
  return out;
}

LoadingMatrix varimax(const LoadingMatrix& input, int max_iter, double tol) {
  LoadingMatrix out = input;
  const Eigen::Index k = input.n_factors();
  if (out.rotation.size() == 0) out.rotation = Eigen::MatrixXd::Identity(k, k);
  if (k < 2) return out;
  if (max_iter < 1) throw ParameterError("varimax: max_iter must be at least 1");

  const Eigen::Index p = input.n_items();
  Eigen::VectorXd communality(p);
  for (Eigen::Index i = 0; i < p; ++i) communality(i) = input.loadings.row(i).norm();
  Eigen::MatrixXd a = kaiser_normalize(input.loadings);
  Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(k, k);
  const double n = static_cast<double>(p);

  double criterion = varimax_criterion(a);
  out.criterion_history.assign(1, criterion);
  bool converged = false;
  for (int sweep = 0; sweep < max_iter && !converged; ++sweep) {
    for (Eigen::Index c1 = 0; c1 < k - 1; ++c1) {
      for (Eigen::Index c2 = c1 + 1; c2 < k; ++c2) {
        // Closed-form optimal angle for the (c1, c2) plane.
        double sum_u = 0.0;
        double sum_v = 0.0;
        double sum_uv2 = 0.0;
        double sum_u2v2 = 0.0;
        for (Eigen::Index i = 0; i < p; ++i) {
          const double x = a(i, c1);
          const double y = a(i, c2);
          const double u = x * x - y * y;
          const double v = 2.0 * x * y;
          sum_u += u;
          sum_v += v;
          sum_u2v2 += u * u - v * v;
          sum_uv2 += 2.0 * u * v;
        }
        const double num = sum_uv2 - 2.0 * sum_u * sum_v / n;
        const double den = sum_u2v2 - (sum_u * sum_u - sum_v * sum_v) / n;
        const double phi = 0.25 * std::atan2(num, den);
        if (phi == 0.0) continue;
        const double cs = std::cos(phi);
        const double sn = std::sin(phi);
        for (Eigen::Index i = 0; i < p; ++i) {
          const double x = a(i, c1);
          const double y = a(i, c2);
          a(i, c1) = cs * x + sn * y;
          a(i, c2) = -sn * x + cs * y;
        }
        for (Eigen::Index i = 0; i < k; ++i) {
          const double x = rot(i, c1);
          const double y = rot(i, c2);
          rot(i, c1) = cs * x + sn * y;
          rot(i, c2) = -sn * x + cs * y;
        }
      }
    }
    const double next = varimax_criterion(a);
    out.criterion_history.push_back(next);
    converged = next - criterion < tol;
    criterion = next;
  }
  if (!converged) {
    throw ComputationError("varimax did not converge in " + std::to_string(max_iter) +
                           " sweeps (last criterion " + std::to_string(criterion) + ")");
  }

  out.loadings = communality.asDiagonal() * a;
  out.rotation = out.rotation * rot;
  out.rotation_applied = true;
  return out;
}

FactorAssignment assign_by_loading(const LoadingMatrix& loadings, LoadingRule rule) {
  const Eigen::Index p = loadings.n_items();
  const Eigen::Index k = loadings.n_factors();
  FactorAssignment out;
  out.partition.k = static_cast<int>(k);
  out.partition.labels.resize(static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < p; ++i) {
    auto score = [&](Eigen::Index j) {
      const double v = loadings.loadings(i, j);
      return rule == LoadingRule::magnitude ? std::abs(v) : v;
    };
    Eigen::Index best = 0;
    bool tied = false;
    for (Eigen::Index j = 1; j < k; ++j) {
      if (score(j) > score(best)) {
        best = j;
        tied = false;
      } else if (score(j) == score(best)) {
        tied = true;
      }
    }
    if (tied) out.tied_items.push_back(static_cast<int>(i));
    out.partition.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

void write_loadings_csv(const std::filesystem::path& path, const LoadingMatrix& loadings,
                        const std::vector<std::string>& item_ids) {
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < loadings.n_factors(); ++j) names.push_back("factor" + std::to_string(j));
  write_matrix_csv(path, loadings.loadings, item_ids, names);
}

}  // namespace sclust
