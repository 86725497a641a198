#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "sclust/simgraph.hpp"

namespace sclust {

/// Full eigendecomposition of a normalized Laplacian, eigenvalues ascending.
struct LaplacianSpectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  ///< column i pairs with eigenvalues(i)
  int zero_count = 0;
  double zero_tolerance = 1e-8;

  Eigen::Index size() const { return eigenvalues.size(); }
};

/// Items x l coordinates from the eigenvectors of the l smallest nonzero
/// eigenvalues.
struct SpectralEmbedding {
  Eigen::MatrixXd coords;
  int l = 0;
  bool row_normalized = false;
  std::vector<int> zero_rows;  ///< rows left at zero by row normalization
};

/// L = I - D^{-1/2} A D^{-1/2}, symmetrized by averaging with its transpose.
/// Throws DataError naming the first node of zero degree.
Eigen::MatrixXd laplacian(const SimilarityGraph& g);

/// Flips each column so its largest-magnitude entry is positive (ties: the
/// lowest row index decides).
void canonicalize_signs(Eigen::MatrixXd& vectors);

LaplacianSpectrum eigendecompose(const Eigen::MatrixXd& lap,
                                 double zero_tolerance = 1e-8);

SpectralEmbedding embed(const LaplacianSpectrum& s, int l, bool row_normalize = false);

/// Convenience: adjacency -> Laplacian -> spectrum for one sigma.
LaplacianSpectrum graph_spectrum(const DistanceMatrix& d, double sigma,
                                 KernelVariant kernel = KernelVariant::ratio_squared,
                                 DiagonalPolicy diagonal = DiagonalPolicy::self_loops,
                                 double zero_tolerance = 1e-8);

/// One row of an eigengap scan. gaps[i] = lambda_{i+2} - lambda_{i+1} over
/// the nonzero eigenvalues (1-based lambda), relative_gaps[i] divides by
/// lambda_{i+2}. largest_gap_after is the 1-based count of small eigenvalues
/// preceding the largest relative gap.
struct EigengapRow {
  double sigma = 0.0;
  int zero_count = 0;
  std::vector<double> nonzero_eigenvalues;
  std::vector<double> gaps;
  std::vector<double> relative_gaps;
  int largest_gap_after = 0;
};

std::vector<EigengapRow> eigengap_scan(const DistanceMatrix& d,
                                       std::span<const double> sigma_grid, int l_probe,
                                       KernelVariant kernel = KernelVariant::ratio_squared,
                                       DiagonalPolicy diagonal = DiagonalPolicy::self_loops,
                                       unsigned workers = 1);

}  // namespace sclust
