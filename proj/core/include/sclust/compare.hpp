#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sclust/ingest.hpp"
#include "sclust/partition.hpp"

namespace sclust {

/// Cross-tabulation of two partitions over the same items.
struct ContingencyTable {
  Eigen::MatrixXi counts;  ///< k_rows x k_cols
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  /// row -> matched column under maximum agreement; -1 when the row is
  /// matched to an empty pseudo-label.
  std::vector<int> alignment;
  int diagonal_agreement = 0;
  /// Items in row-partition order; cell_items holds indices into it.
  std::vector<std::string> item_ids;
  std::vector<std::vector<int>> cell_items;  ///< row-major k_rows x k_cols

  int n_items() const { return static_cast<int>(item_ids.size()); }
  const std::vector<int>& members(Eigen::Index row, Eigen::Index col) const {
    return cell_items[static_cast<std::size_t>(row * counts.cols() + col)];
  }
};

/// Rows from `rows`, columns from `cols`. When both partitions carry item
/// ids, items are matched by id (a DataError lists the symmetric difference
/// if the id sets differ); otherwise by position. Empty label lists default
/// to "C0", "C1", ... for rows and "F0", "F1", ... for columns.
ContingencyTable crosstab(const Partition& rows, const Partition& cols,
                          std::vector<std::string> row_labels = {},
                          std::vector<std::string> col_labels = {});

/// diagonal_agreement / n under the maximum-agreement matching.
double agreement_fraction(const Partition& a, const Partition& b);

/// Column order that puts matched columns on the diagonal; unmatched
/// columns follow in index order.
std::vector<int> aligned_column_order(const ContingencyTable& t);

/// Markdown table with aligned columns, blank empty cells, and row/column
/// totals.
std::string render_table_markdown(const ContingencyTable& t,
                                   const std::string& row_total_name = "Cluster size",
                                   const std::string& col_total_name = "Factor size");

/// CSV with aligned column order and totals.
void write_table_csv(const std::filesystem::path& path, const ContingencyTable& t);

struct CellAnnotation {
  int row = 0;
  int col = 0;
  std::vector<std::string> items;
  std::map<std::string, int> domain_counts;
  std::map<std::string, int> facet_counts;
};

struct FacetReassignment {
  std::string row_label;
  std::string col_label;
  std::string facet;
  int count = 0;
};

struct AnnotationReport {
  std::vector<CellAnnotation> cells;  ///< nonempty cells, row-major
  /// Facet counts of items off the matched diagonal.
  std::vector<FacetReassignment> reassignments;
  /// Per-row facet histogram over all items in that row.
  std::vector<std::map<std::string, int>> row_facet_histograms;
  std::vector<std::map<std::string, int>> row_domain_histograms;
};

/// Groups each cell's items by domain and facet. Throws DataError naming
/// items without metadata.
AnnotationReport annotate_with_metadata(const ContingencyTable& t,
                                        const std::vector<ItemMetadata>& meta);

std::string render_annotation_markdown(const ContingencyTable& t, const AnnotationReport& r);

/// row_label,col_label,facet,count (off-diagonal cells only)
void write_reassignments_csv(const std::filesystem::path& path, const AnnotationReport& r);

}  // namespace sclust
