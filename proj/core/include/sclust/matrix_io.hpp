#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace sclust {

/// Metadata stored alongside a matrix in the binary container.
struct MatrixHeader {
  std::string transform_tag;
  double sigma = 0.0;
};

/// Writes `m` as CSV. When `row_ids` is nonempty a leading id column is
/// written; `column_names` (optional) becomes the header row.
void write_matrix_csv(const std::filesystem::path& path,
                      const Eigen::MatrixXd& m,
                      const std::vector<std::string>& row_ids = {},
                      const std::vector<std::string>& column_names = {},
                      const std::string& id_column = "item_id");

/// Binary container layout, all little-endian:
///   8 bytes  magic "SCLMAT01"
///   u64      rows
///   u64      cols
///   f64      sigma
///   u32      tag length, followed by that many bytes of transform tag
///   f64[]    rows*cols values, row-major
void write_matrix_binary(const std::filesystem::path& path,
                         const Eigen::MatrixXd& m, const MatrixHeader& header);

Eigen::MatrixXd read_matrix_binary(const std::filesystem::path& path,
                                   MatrixHeader* header = nullptr);

}  // namespace sclust
