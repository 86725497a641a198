#include "sclust/spectral.hpp"

#include <cmath>
#include <string>

#include "sclust/error.hpp"
#include "sclust/parallel.hpp"

namespace sclust {
namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kPsdTolerance = 1e-9;

}  // namespace

Eigen::MatrixXd laplacian(const SimilarityGraph& g) {
  const Eigen::Index p = g.size();
  Eigen::VectorXd inv_sqrt(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(g.degrees(i) > 0.0)) {
      const std::string name = std::to_string(i);
      throw DataError("node " + name + " has zero degree; the normalized Laplacian is undefined");
    }
    inv_sqrt(i) = 1.0 / std::sqrt(g.degrees(i));
  }
  Eigen::MatrixXd lap = -(inv_sqrt.asDiagonal() * g.adjacency * inv_sqrt.asDiagonal());
  lap.diagonal().array() += 1.0;
  Eigen::MatrixXd sym = 0.5 * (lap + lap.transpose());
  return sym;
}

void canonicalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double mag = std::abs(vectors(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (vectors.rows() > 0 && vectors(arg, j) < 0.0) vectors.col(j) *= -1.0;
  }
}

LaplacianSpectrum eigendecompose(const Eigen::MatrixXd& lap, double zero_tolerance) {
  if (lap.rows() != lap.cols()) {
    throw ParameterError("eigendecompose: matrix is not square");
  }
  const double asym = (lap - lap.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance) {
    throw ParameterError("eigendecompose: matrix is not symmetric (max |L - L^T| = " +
                         std::to_string(asym) + ")");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) {
    throw ComputationError("symmetric eigensolver did not converge on a " +
                           std::to_string(lap.rows()) + "x" + std::to_string(lap.cols()) +
                           " matrix (QL iteration limit " +
                           std::to_string(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>::m_maxIterations) +
                           " per eigenvalue exceeded)");
  }

  LaplacianSpectrum s;
  s.eigenvalues = solver.eigenvalues();
  s.eigenvectors = solver.eigenvectors();
  s.zero_tolerance = zero_tolerance;
  canonicalize_signs(s.eigenvectors);

  if (s.eigenvalues.size() > 0 && s.eigenvalues(0) < -kPsdTolerance) {
    throw ComputationError("Laplacian is not positive semidefinite (smallest eigenvalue " +
                           std::to_string(s.eigenvalues(0)) + ")");
  }
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    if (s.eigenvalues(i) < zero_tolerance) ++s.zero_count;
  }
  return s;
}

SpectralEmbedding embed(const LaplacianSpectrum& s, int l, bool row_normalize) {
  const auto available = static_cast<int>(s.size()) - s.zero_count;
  if (l < 1 || l > available) {
    throw ParameterError("embedding dimension l=" + std::to_string(l) + " unavailable: " +
                         std::to_string(s.size()) + " eigenpairs, " +
                         std::to_string(s.zero_count) + " zero, so 1.." +
                         std::to_string(available) + " usable");
  }
  SpectralEmbedding e;
  e.l = l;
  e.row_normalized = row_normalize;
  e.coords = s.eigenvectors.middleCols(s.zero_count, l);
  if (row_normalize) {
    for (Eigen::Index i = 0; i < e.coords.rows(); ++i) {
      const double norm = e.coords.row(i).norm();
      if (norm > 0.0) {
        e.coords.row(i) /= norm;
      } else {
        e.zero_rows.push_back(static_cast<int>(i));
      }
    }
  }
  return e;
}

LaplacianSpectrum graph_spectrum(const DistanceMatrix& d, double sigma,
                                 KernelVariant kernel, DiagonalPolicy diagonal,
                                 double zero_tolerance) {
  return eigendecompose(laplacian(gaussian_adjacency(d, sigma, kernel, diagonal)),
                        zero_tolerance);
}

std::vector<EigengapRow> eigengap_scan(const DistanceMatrix& d,
                                       std::span<const double> sigma_grid, int l_probe,
                                       KernelVariant kernel, DiagonalPolicy diagonal,
                                       unsigned workers) {
  if (sigma_grid.empty()) throw ParameterError("eigengap scan needs a nonempty sigma grid");
  for (double s : sigma_grid) {
    if (!(s > 0.0)) throw ParameterError("sigma grid values must be positive");
  }
  if (l_probe < 1) throw ParameterError("l_probe must be at least 1");

  std::vector<EigengapRow> rows(sigma_grid.size());
  parallel_for(sigma_grid.size(), workers, [&](std::size_t idx) {
    const double sigma = sigma_grid[idx];
    const auto spectrum = graph_spectrum(d, sigma, kernel, diagonal);
    EigengapRow& row = rows[idx];
    row.sigma = sigma;
    row.zero_count = spectrum.zero_count;
    for (Eigen::Index i = spectrum.zero_count; i < spectrum.size(); ++i) {
      row.nonzero_eigenvalues.push_back(spectrum.eigenvalues(i));
    }
    const auto& ev = row.nonzero_eigenvalues;
    const std::size_t probes =
        std::min<std::size_t>(static_cast<std::size_t>(l_probe), ev.empty() ? 0 : ev.size() - 1);
    double best = -1.0;
    for (std::size_t i = 0; i < probes; ++i) {
      const double gap = ev[i + 1] - ev[i];
      const double rel = ev[i + 1] > 0.0 ? gap / ev[i + 1] : 0.0;
      row.gaps.push_back(gap);
      row.relative_gaps.push_back(rel);
      if (rel > best) {
        best = rel;
        row.largest_gap_after = static_cast<int>(i + 1);
      }
    }
  });
  return rows;
}

}  // namespace sclust
