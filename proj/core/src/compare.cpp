#include "sclust/compare.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

#include "sclust/assignment.hpp"
#include "sclust/csv.hpp"
#include "sclust/error.hpp"

namespace sclust {
namespace {

constexpr const char* kUnlabeled = "(none)";

std::vector<std::string> default_labels(const char* prefix, int k) {
  std::vector<std::string> labels;
  for (int i = 0; i < k; ++i) labels.push_back(prefix + std::to_string(i));
  return labels;
}

// Column index in `cols` for each item of `rows`.
std::vector<std::size_t> match_items(const Partition& rows, const Partition& cols) {
  std::vector<std::size_t> index(rows.size());
  if (rows.item_ids.empty() || cols.item_ids.empty()) {
    if (rows.size() != cols.size()) {
      throw DataError("partitions cover different item counts (" + std::to_string(rows.size()) +
                      " vs " + std::to_string(cols.size()) + ")");
    }
    for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
    return index;
  }
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t j = 0; j < cols.item_ids.size(); ++j) pos.emplace(cols.item_ids[j], j);
  std::set<std::string> only_rows;
  for (std::size_t i = 0; i < rows.item_ids.size(); ++i) {
    const auto it = pos.find(rows.item_ids[i]);
    if (it == pos.end()) {
      only_rows.insert(rows.item_ids[i]);
    } else {
      index[i] = it->second;
    }
  }
  std::set<std::string> only_cols;
  const std::set<std::string> row_set(rows.item_ids.begin(), rows.item_ids.end());
  for (const auto& id : cols.item_ids) {
    if (!row_set.contains(id)) only_cols.insert(id);
  }
  if (!only_rows.empty() || !only_cols.empty()) {
    auto list = [](const std::set<std::string>& s) {
      std::string out;
      std::size_t shown = 0;
      for (const auto& id : s) {
        if (shown++ == 20) {
          out += ", ...";
          break;
        }
        out += (out.empty() ? "" : ", ") + id;
      }
      return out.empty() ? std::string("(none)") : out;
    };
    throw DataError("partitions cover different item sets; only in first: " + list(only_rows) +
                    "; only in second: " + list(only_cols));
  }
  return index;
}

}  // namespace

ContingencyTable crosstab(const Partition& rows, const Partition& cols,
                          std::vector<std::string> row_labels,
                          std::vector<std::string> col_labels) {
  const auto index = match_items(rows, cols);
  if (row_labels.empty()) row_labels = default_labels("C", rows.k);
  if (col_labels.empty()) col_labels = default_labels("F", cols.k);
  if (static_cast<int>(row_labels.size()) != rows.k ||
      static_cast<int>(col_labels.size()) != cols.k) {
    throw ParameterError("crosstab: label list sizes must equal the partitions' k");
  }

  ContingencyTable t;
  t.counts = Eigen::MatrixXi::Zero(rows.k, cols.k);
  t.row_labels = std::move(row_labels);
  t.col_labels = std::move(col_labels);
  t.cell_items.resize(static_cast<std::size_t>(rows.k) * static_cast<std::size_t>(cols.k));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.item_ids.push_back(rows.item_ids.empty() ? std::to_string(i) : rows.item_ids[i]);
    const int a = rows.labels[i];
    const int b = cols.labels[index[i]];
    if (a < 0 || a >= rows.k || b < 0 || b >= cols.k) {
      throw DataError("crosstab: label outside [0, k) for item " + t.item_ids.back());
    }
    ++t.counts(a, b);
    t.cell_items[static_cast<std::size_t>(a) * static_cast<std::size_t>(cols.k) +
                 static_cast<std::size_t>(b)]
        .push_back(static_cast<int>(i));
  }
  t.alignment = max_agreement_alignment(t.counts);
  for (std::size_t r = 0; r < t.alignment.size(); ++r) {
    if (t.alignment[r] >= 0) t.diagonal_agreement += t.counts(static_cast<Eigen::Index>(r), t.alignment[r]);
  }
  return t;
}

double agreement_fraction(const Partition& a, const Partition& b) {
  const auto t = crosstab(a, b);
  if (t.n_items() == 0) return 1.0;
  return static_cast<double>(t.diagonal_agreement) / static_cast<double>(t.n_items());
}

std::vector<int> aligned_column_order(const ContingencyTable& t) {
  std::vector<int> order;
  std::vector<bool> placed(static_cast<std::size_t>(t.counts.cols()), false);
  for (int col : t.alignment) {
    if (col >= 0) {
      order.push_back(col);
      placed[static_cast<std::size_t>(col)] = true;
    }
  }
  for (Eigen::Index j = 0; j < t.counts.cols(); ++j) {
    if (!placed[static_cast<std::size_t>(j)]) order.push_back(static_cast<int>(j));
  }
  return order;
}

std::string render_table_markdown(const ContingencyTable& t, const std::string& row_total_name,
                                  const std::string& col_total_name) {
  const auto order = aligned_column_order(t);
  std::ostringstream md;
  md << "| |";
  for (int j : order) md << ' ' << t.col_labels[static_cast<std::size_t>(j)] << " |";
  md << ' ' << row_total_name << " |\n|---|";
  for (std::size_t j = 0; j <= order.size(); ++j) md << "---|";
  md << '\n';
  for (Eigen::Index i = 0; i < t.counts.rows(); ++i) {
    md << "| " << t.row_labels[static_cast<std::size_t>(i)] << " |";
    for (int j : order) {
      const int c = t.counts(i, j);
      md << ' ';
      if (c != 0) md << c;
      md << " |";
    }
    md << ' ' << t.counts.row(i).sum() << " |\n";
  }
  md << "| " << col_total_name << " |";
  for (int j : order) md << ' ' << t.counts.col(j).sum() << " |";
  md << ' ' << t.counts.sum() << " |\n";
  md << "\nItems on the matched diagonal: " << t.diagonal_agreement << "/" << t.n_items()
     << " (" << (t.n_items() - t.diagonal_agreement) << " off-diagonal)\n";
  return md.str();
}

void write_table_csv(const std::filesystem::path& path, const ContingencyTable& t) {
  const auto order = aligned_column_order(t);
  auto out = csv::open_output(path);
  std::vector<std::string> header = {"row_label"};
  for (int j : order) header.push_back(t.col_labels[static_cast<std::size_t>(j)]);
  header.push_back("row_total");
  out << csv::join(header) << '\n';
  for (Eigen::Index i = 0; i < t.counts.rows(); ++i) {
    out << csv::escape(t.row_labels[static_cast<std::size_t>(i)]);
    for (int j : order) out << ',' << t.counts(i, j);
    out << ',' << t.counts.row(i).sum() << '\n';
  }
  out << "col_total";
  for (int j : order) out << ',' << t.counts.col(j).sum();
  out << ',' << t.counts.sum() << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

AnnotationReport annotate_with_metadata(const ContingencyTable& t,
                                        const std::vector<ItemMetadata>& meta) {
  const auto aligned = align_metadata(t.item_ids, meta);
  AnnotationReport report;
  report.row_facet_histograms.resize(static_cast<std::size_t>(t.counts.rows()));
  report.row_domain_histograms.resize(static_cast<std::size_t>(t.counts.rows()));
  for (Eigen::Index i = 0; i < t.counts.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.counts.cols(); ++j) {
      const auto& members = t.members(i, j);
      if (members.empty()) continue;
      CellAnnotation cell;
      cell.row = static_cast<int>(i);
      cell.col = static_cast<int>(j);
      for (int item : members) {
        const auto& m = aligned[static_cast<std::size_t>(item)];
        cell.items.push_back(m.item_id);
        const std::string domain = m.domain_label.value_or(kUnlabeled);
        const std::string facet = m.facet_label.value_or(kUnlabeled);
        ++cell.domain_counts[domain];
        ++cell.facet_counts[facet];
        ++report.row_domain_histograms[static_cast<std::size_t>(i)][domain];
        ++report.row_facet_histograms[static_cast<std::size_t>(i)][facet];
      }
      const bool on_diagonal = t.alignment[static_cast<std::size_t>(i)] == static_cast<int>(j);
      if (!on_diagonal) {
        for (const auto& [facet, count] : cell.facet_counts) {
          report.reassignments.push_back({t.row_labels[static_cast<std::size_t>(i)],
                                          t.col_labels[static_cast<std::size_t>(j)], facet,
                                          count});
        }
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

std::string render_annotation_markdown(const ContingencyTable& t, const AnnotationReport& r) {
  std::ostringstream md;
  auto histogram = [](const std::map<std::string, int>& h) {
    std::string out;
    for (const auto& [key, count] : h) {
      out += (out.empty() ? "" : ", ") + key + ": " + std::to_string(count);
    }
    return out;
  };
  md << "## Row composition\n\n| row | size | domains | facets |\n|---|---|---|---|\n";
  for (std::size_t i = 0; i < r.row_facet_histograms.size(); ++i) {
    md << "| " << t.row_labels[i] << " | " << t.counts.row(static_cast<Eigen::Index>(i)).sum()
       << " | " << histogram(r.row_domain_histograms[i]) << " | "
       << histogram(r.row_facet_histograms[i]) << " |\n";
  }
  md << "\n## Off-diagonal items by facet\n\n| row | column | facet | count |\n|---|---|---|---|\n";
  for (const auto& f : r.reassignments) {
    md << "| " << f.row_label << " | " << f.col_label << " | " << f.facet << " | " << f.count
       << " |\n";
  }
  md << "\n## Cell members\n\n";
  for (const auto& cell : r.cells) {
    md << "- " << t.row_labels[static_cast<std::size_t>(cell.row)] << " x "
       << t.col_labels[static_cast<std::size_t>(cell.col)] << " (" << cell.items.size()
       << "): ";
    for (std::size_t i = 0; i < cell.items.size(); ++i) md << (i ? ", " : "") << cell.items[i];
    md << '\n';
  }
  return md.str();
}

void write_reassignments_csv(const std::filesystem::path& path, const AnnotationReport& r) {
  auto out = csv::open_output(path);
  out << "row_label,col_label,facet,count\n";
  for (const auto& f : r.reassignments) {
    out << csv::join({f.row_label, f.col_label, f.facet, std::to_string(f.count)}) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace sclust
