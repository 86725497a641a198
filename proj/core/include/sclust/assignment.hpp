#pragma once

#include <Eigen/Dense>

#include <vector>

namespace sclust {

/// Minimum-cost perfect matching of a square cost matrix (Hungarian method,
/// O(n^3)). Returns row -> column.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost, double* total = nullptr);

/// Largest total of counts(i, match(i)) over one-to-one label matchings.
/// Rectangular tables are padded with empty pseudo-labels.
long long max_agreement(const Eigen::MatrixXi& counts);

/// A maximum-agreement matching, row -> column (-1 for rows matched to a
/// padding column). Among all optimal matchings the lexicographically
/// smallest row -> column sequence of the padded problem is returned.
std::vector<int> max_agreement_alignment(const Eigen::MatrixXi& counts);

}  // namespace sclust
