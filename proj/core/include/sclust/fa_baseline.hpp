#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

#include "sclust/partition.hpp"
#include "sclust/simgraph.hpp"

namespace sclust {

struct LoadingMatrix {
  Eigen::MatrixXd loadings;  ///< items x k
  bool rotation_applied = false;
  std::string extraction_tag;
  /// Eigenvalues of the extracted components, descending.
  Eigen::VectorXd eigenvalues;
  /// Accumulated orthogonal rotation: loadings = unrotated * rotation.
  Eigen::MatrixXd rotation;
  /// Varimax criterion on Kaiser-normalized loadings: the starting value,
  /// then one entry per sweep.
  std::vector<double> criterion_history;

  Eigen::Index n_items() const { return loadings.rows(); }
  Eigen::Index n_factors() const { return loadings.cols(); }
};

/// Principal-components extraction from a correlation matrix: column j is
/// eigenvector_j * sqrt(eigenvalue_j) for the k largest eigenvalues, each
/// column's largest-magnitude entry positive.
LoadingMatrix extract_factors(const CorrelationMatrix& c, int k);
LoadingMatrix extract_factors(const Eigen::MatrixXd& c, int k);

/// Raw varimax criterion: sum over columns of the variance of squared
/// entries, sum_j [ n * sum_i a_ij^4 - (sum_i a_ij^2)^2 ] / n^2.
double varimax_criterion(const Eigen::MatrixXd& loadings);

/// Rows scaled to unit length (zero rows stay zero).
Eigen::MatrixXd kaiser_normalize(const Eigen::MatrixXd& loadings);

/// Orthogonal varimax rotation by pairwise planar rotations with Kaiser
/// normalization. Stops when a sweep gains less than `tol`; throws
/// ComputationError if that has not happened after `max_iter` sweeps.
LoadingMatrix varimax(const LoadingMatrix& input, int max_iter = 1000, double tol = 1e-10);

enum class LoadingRule {
  magnitude,  ///< argmax_j |a_ij|
  signed_value,  ///< argmax_j a_ij
};

struct FactorAssignment {
  Partition partition;          ///< label = factor index (not renumbered)
  std::vector<int> tied_items;  ///< items whose maximum was shared
};

FactorAssignment assign_by_loading(const LoadingMatrix& loadings,
                                   LoadingRule rule = LoadingRule::magnitude);

void write_loadings_csv(const std::filesystem::path& path, const LoadingMatrix& loadings,
                        const std::vector<std::string>& item_ids);

}  // namespace sclust
