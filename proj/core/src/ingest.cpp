#include "sclust/ingest.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "sclust/csv.hpp"
#include "sclust/error.hpp"

namespace sclust {
namespace {

void check_schema(const LikertSchema& schema) {
  if (!(schema.scale_min < schema.scale_max)) {
    throw ParameterError("Likert scale requires scale_min < scale_max (got " +
                         std::to_string(schema.scale_min) + ".." +
                         std::to_string(schema.scale_max) + ")");
  }
}

bool read_record(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  return true;
}

void strip_bom(std::string& line) {
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB &&
      static_cast<unsigned char>(line[2]) == 0xBF) {
    line.erase(0, 3);
  }
}

ResponseMatrix flip_items(const ResponseMatrix& r, const std::vector<bool>& flip) {
  ResponseMatrix out = r;
  const int sum = r.schema.scale_min + r.schema.scale_max;
  for (Eigen::Index j = 0; j < r.n_items(); ++j) {
    if (!flip[static_cast<std::size_t>(j)]) continue;
    for (Eigen::Index i = 0; i < r.n_subjects(); ++i) {
      if (!r.missing(i, j)) out.values(i, j) = sum - r.values(i, j);
    }
  }
  return out;
}

}  // namespace

double ResponseMatrix::missing_fraction() const {
  const double cells = static_cast<double>(values.size());
  return cells > 0 ? static_cast<double>(missing_count()) / cells : 0.0;
}

void validate(const ResponseMatrix& r) {
  check_schema(r.schema);
  if (r.n_subjects() < 2 || r.n_items() < 2) {
    throw DataError("response matrix needs at least 2 subjects and 2 items (got " +
                    std::to_string(r.n_subjects()) + " x " +
                    std::to_string(r.n_items()) + ")");
  }
  if (r.missing.rows() != r.values.rows() || r.missing.cols() != r.values.cols()) {
    throw DataError("missing mask shape does not match response values");
  }
  if (static_cast<Eigen::Index>(r.item_ids.size()) != r.n_items()) {
    throw DataError("item id count does not match the number of item columns");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : r.item_ids) {
    if (!seen.insert(id).second) throw DataError("duplicate item id '" + id + "'");
  }
  for (Eigen::Index i = 0; i < r.n_subjects(); ++i) {
    for (Eigen::Index j = 0; j < r.n_items(); ++j) {
      if (r.missing(i, j)) continue;
      const int v = r.values(i, j);
      if (v < r.schema.scale_min || v > r.schema.scale_max) {
        throw DataError("value " + std::to_string(v) + " at subject " +
                        std::to_string(i + 1) + ", item '" +
                        r.item_ids[static_cast<std::size_t>(j)] +
                        "' is outside the declared scale");
      }
    }
  }
}

ResponseMatrix parse_responses(std::istream& in, const LikertSchema& schema,
                               const std::string& source) {
  check_schema(schema);
  std::string line;
  if (!read_record(in, line)) throw ParseError(source, 1, 0, "empty file (no header row)");
  strip_bom(line);

  ResponseMatrix r;
  r.schema = schema;
  for (auto& field : csv::split_line(line)) {
    r.item_ids.emplace_back(csv::trim(field));
  }
  const std::size_t n_items = r.item_ids.size();
  {
    std::unordered_set<std::string> seen;
    for (std::size_t j = 0; j < n_items; ++j) {
      if (r.item_ids[j].empty()) throw ParseError(source, 1, j + 1, "empty item id");
      if (!seen.insert(r.item_ids[j]).second) {
        throw ParseError(source, 1, j + 1, "duplicate item id '" + r.item_ids[j] + "'");
      }
    }
  }

  std::vector<int> values;
  std::vector<char> missing;
  std::size_t row = 1;
  std::size_t n_subjects = 0;
  while (read_record(in, line)) {
    ++row;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split_line(line);
    if (fields.size() != n_items) {
      throw ParseError(source, row, 0,
                       "row has " + std::to_string(fields.size()) +
                           " cells but the header has " + std::to_string(n_items));
    }
    for (std::size_t j = 0; j < n_items; ++j) {
      const auto cell = csv::trim(fields[j]);
      if (cell.empty()) {
        values.push_back(0);
        missing.push_back(1);
        continue;
      }
      int v = 0;
      if (!csv::parse_int(cell, v)) {
        throw ParseError(source, row, j + 1,
                         "non-integer cell '" + std::string(cell) + "'");
      }
      if (v < schema.scale_min || v > schema.scale_max) {
        throw ParseError(source, row, j + 1,
                         "value " + std::to_string(v) + " outside scale " +
                             std::to_string(schema.scale_min) + ".." +
                             std::to_string(schema.scale_max));
      }
      values.push_back(v);
      missing.push_back(0);
    }
    ++n_subjects;
  }

  const auto rows = static_cast<Eigen::Index>(n_subjects);
  const auto cols = static_cast<Eigen::Index>(n_items);
  r.values.resize(rows, cols);
  r.missing.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto idx = static_cast<std::size_t>(i * cols + j);
      r.values(i, j) = values[idx];
      r.missing(i, j) = missing[idx] != 0;
    }
  }
  validate(r);
  return r;
}

ResponseMatrix load_responses(const std::filesystem::path& path,
                              const LikertSchema& schema) {
  auto in = csv::open_input(path);
  return parse_responses(in, schema, path.string());
}

void save_responses(const std::filesystem::path& path, const ResponseMatrix& r) {
  auto out = csv::open_output(path);
  out << csv::join(r.item_ids) << '\n';
  for (Eigen::Index i = 0; i < r.n_subjects(); ++i) {
    for (Eigen::Index j = 0; j < r.n_items(); ++j) {
      if (j > 0) out << ',';
      if (!r.missing(i, j)) out << r.values(i, j);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<ItemMetadata> parse_metadata(std::istream& in, const std::string& source) {
  std::string line;
  if (!read_record(in, line)) throw ParseError(source, 1, 0, "empty file (no header row)");
  strip_bom(line);
  const auto header = csv::split_line(line);
  std::map<std::string, std::size_t> column;
  for (std::size_t j = 0; j < header.size(); ++j) {
    column[std::string(csv::trim(header[j]))] = j;
  }
  if (!column.contains("item_id")) {
    throw ParseError(source, 1, 0, "metadata header lacks an item_id column");
  }
  auto field = [&](const std::vector<std::string>& f,
                   const char* name) -> std::optional<std::string> {
    const auto it = column.find(name);
    if (it == column.end()) return std::nullopt;
    const auto v = csv::trim(f[it->second]);
    if (v.empty()) return std::nullopt;
    return std::string(v);
  };

  std::vector<ItemMetadata> meta;
  std::unordered_set<std::string> seen;
  std::size_t row = 1;
  while (read_record(in, line)) {
    ++row;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split_line(line);
    if (f.size() != header.size()) {
      throw ParseError(source, row, 0,
                       "row has " + std::to_string(f.size()) +
                           " cells but the header has " + std::to_string(header.size()));
    }
    ItemMetadata m;
    m.item_id = field(f, "item_id").value_or("");
    if (m.item_id.empty()) {
      throw ParseError(source, row, column["item_id"] + 1, "empty item_id");
    }
    if (!seen.insert(m.item_id).second) {
      throw ParseError(source, row, column["item_id"] + 1,
                       "duplicate item_id '" + m.item_id + "'");
    }
    m.domain_label = field(f, "domain_label");
    m.facet_label = field(f, "facet_label");
    if (auto key = field(f, "keyed_direction")) {
      int dir = 0;
      if (!csv::parse_int(*key, dir) || (dir != 1 && dir != -1)) {
        throw ParseError(source, row, column["keyed_direction"] + 1,
                         "keyed_direction must be +1 or -1 (got '" + *key + "')");
      }
      m.keyed_direction = dir;
    }
    meta.push_back(std::move(m));
  }
  return meta;
}

std::vector<ItemMetadata> load_metadata(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  return parse_metadata(in, path.string());
}

void save_metadata(const std::filesystem::path& path,
                   const std::vector<ItemMetadata>& meta) {
  auto out = csv::open_output(path);
  out << "item_id,domain_label,facet_label,keyed_direction\n";
  for (const auto& m : meta) {
    out << csv::join({m.item_id, m.domain_label.value_or(""),
                      m.facet_label.value_or(""),
                      m.keyed_direction > 0 ? "1" : "-1"})
        << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

ResponseMatrix impute_neutral(const ResponseMatrix& r, std::optional<int> neutral) {
  if (!neutral) {
    if (!r.schema.has_integer_midpoint()) {
      throw ParameterError("scale " + std::to_string(r.schema.scale_min) + ".." +
                           std::to_string(r.schema.scale_max) +
                           " has no integer midpoint; supply an explicit neutral value");
    }
    neutral = (r.schema.scale_min + r.schema.scale_max) / 2;
  }
  if (*neutral < r.schema.scale_min || *neutral > r.schema.scale_max) {
    throw ParameterError("neutral value " + std::to_string(*neutral) +
                         " lies outside the scale");
  }
  ResponseMatrix out = r;
  if (!out.imputed_missing_fraction) out.imputed_missing_fraction = r.missing_fraction();
  for (Eigen::Index i = 0; i < r.n_subjects(); ++i) {
    for (Eigen::Index j = 0; j < r.n_items(); ++j) {
      if (r.missing(i, j)) out.values(i, j) = *neutral;
    }
  }
  out.missing.setConstant(false);
  return out;
}

std::vector<ItemMetadata> align_metadata(const std::vector<std::string>& item_ids,
                                         const std::vector<ItemMetadata>& meta) {
  std::unordered_map<std::string, const ItemMetadata*> by_id;
  for (const auto& m : meta) by_id.emplace(m.item_id, &m);
  std::vector<ItemMetadata> aligned;
  std::string absent;
  std::size_t n_absent = 0;
  for (const auto& id : item_ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      if (n_absent++ < 20) absent += (absent.empty() ? "" : ", ") + id;
      continue;
    }
    aligned.push_back(*it->second);
  }
  if (n_absent > 0) {
    throw DataError("no metadata for " + std::to_string(n_absent) + " item(s): " +
                    absent + (n_absent > 20 ? ", ..." : ""));
  }
  return aligned;
}

ResponseMatrix reverse_code(const ResponseMatrix& r,
                            const std::vector<ItemMetadata>& meta,
                            const std::set<std::string>& domains_to_flip) {
  const auto aligned = align_metadata(r.item_ids, meta);
  std::set<std::string> valid;
  for (const auto& m : aligned) {
    if (m.domain_label) valid.insert(*m.domain_label);
  }
  for (const auto& d : domains_to_flip) {
    if (!valid.contains(d)) {
      std::string list;
      for (const auto& v : valid) list += (list.empty() ? "" : ", ") + v;
      throw ParameterError("unknown domain label '" + d + "'; valid labels: " +
                           (list.empty() ? "(none)" : list));
    }
  }
  std::vector<bool> flip(aligned.size());
  for (std::size_t j = 0; j < aligned.size(); ++j) {
    flip[j] = aligned[j].domain_label && domains_to_flip.contains(*aligned[j].domain_label);
  }
  return flip_items(r, flip);
}

ResponseMatrix reverse_code_by_key(const ResponseMatrix& r,
                                   const std::vector<ItemMetadata>& meta) {
  const auto aligned = align_metadata(r.item_ids, meta);
  std::vector<bool> flip(aligned.size());
  for (std::size_t j = 0; j < aligned.size(); ++j) {
    flip[j] = aligned[j].keyed_direction < 0;
  }
  return flip_items(r, flip);
}

}  // namespace sclust
