#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sclust {

/// Declared bounds of an integer Likert scale.
struct LikertSchema {
  int scale_min = 1;
  int scale_max = 5;

  int levels() const { return scale_max - scale_min + 1; }
  bool has_integer_midpoint() const { return (scale_min + scale_max) % 2 == 0; }
};

using MaskMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Subjects x items Likert responses. Missing cells are flagged in `missing`
/// and hold 0 in `values`.
struct ResponseMatrix {
  LikertSchema schema;
  std::vector<std::string> item_ids;
  Eigen::MatrixXi values;
  MaskMatrix missing;
  /// Set by impute_neutral: the missing fraction before imputation.
  std::optional<double> imputed_missing_fraction;

  Eigen::Index n_subjects() const { return values.rows(); }
  Eigen::Index n_items() const { return values.cols(); }
  Eigen::Index missing_count() const { return missing.count(); }
  double missing_fraction() const;
};

/// Throws DataError if any invariant of ResponseMatrix is violated.
void validate(const ResponseMatrix& r);

struct ItemMetadata {
  std::string item_id;
  std::optional<std::string> domain_label;
  std::optional<std::string> facet_label;
  int keyed_direction = +1;
};

/// Reads a response CSV: header row of item ids, one row per subject, empty
/// cell = missing. Errors carry the 1-based row and column of the offending
/// cell.
ResponseMatrix load_responses(const std::filesystem::path& path,
                              const LikertSchema& schema);
ResponseMatrix parse_responses(std::istream& in, const LikertSchema& schema,
                               const std::string& source = "<stream>");
void save_responses(const std::filesystem::path& path, const ResponseMatrix& r);

/// Reads metadata CSV with columns item_id,domain_label,facet_label,
/// keyed_direction (header required, column order free).
std::vector<ItemMetadata> load_metadata(const std::filesystem::path& path);
std::vector<ItemMetadata> parse_metadata(std::istream& in,
                                         const std::string& source = "<stream>");
void save_metadata(const std::filesystem::path& path,
                   const std::vector<ItemMetadata>& meta);

/// Replaces every missing cell by the neutral value (the scale midpoint when
/// `neutral` is not given). Scales without an integer midpoint require an
/// explicit neutral value.
ResponseMatrix impute_neutral(const ResponseMatrix& r,
                              std::optional<int> neutral = std::nullopt);

/// Maps v -> scale_min + scale_max - v for every item whose domain label is
/// in `domains_to_flip`. Missing cells stay missing.
ResponseMatrix reverse_code(const ResponseMatrix& r,
                            const std::vector<ItemMetadata>& meta,
                            const std::set<std::string>& domains_to_flip);

/// Same mapping, applied to every item with keyed_direction == -1.
ResponseMatrix reverse_code_by_key(const ResponseMatrix& r,
                                   const std::vector<ItemMetadata>& meta);

/// Metadata reordered to match `item_ids`; throws DataError naming the items
/// that have no entry.
std::vector<ItemMetadata> align_metadata(const std::vector<std::string>& item_ids,
                                         const std::vector<ItemMetadata>& meta);

}  // namespace sclust
