#include "sclust/synth.hpp"

#include <boost/math/distributions/normal.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <optional>

#include "sclust/csv.hpp"
#include "sclust/error.hpp"
#include "sclust/rng.hpp"

namespace sclust {

int PlantedSpec::n_items() const {
  return std::accumulate(block_sizes.begin(), block_sizes.end(), 0);
}

Eigen::MatrixXd target_correlation(const PlantedSpec& spec) {
  const int n = spec.n_items();
  Eigen::MatrixXd c = Eigen::MatrixXd::Constant(n, n, spec.between_r);
  int start = 0;
  for (int size : spec.block_sizes) {
    c.block(start, start, size, size).setConstant(spec.within_r);
    start += size;
  }
  c.diagonal().setOnes();
  return c;
}

void validate(const PlantedSpec& spec) {
  if (spec.block_sizes.empty()) throw ParameterError("planted spec: no blocks");
  for (int size : spec.block_sizes) {
    if (size < 2) throw ParameterError("planted spec: block sizes must be at least 2");
  }
  if (spec.n_subjects < 2) throw ParameterError("planted spec: n_subjects must be at least 2");
  if (!(spec.within_r > 0.0 && spec.within_r < 1.0)) {
    throw ParameterError("planted spec: within_r must lie in (0, 1)");
  }
  if (!(spec.between_r > -1.0 && spec.between_r < spec.within_r)) {
    throw ParameterError("planted spec: between_r must lie in (-1, within_r)");
  }
  if (spec.schema.scale_max <= spec.schema.scale_min) {
    throw ParameterError("planted spec: scale_max must exceed scale_min");
  }
  // Eigenvalues of the block-constant matrix follow from the block sizes.
  // Within a block: 1 - w. The remaining ones are those of the reduced
  // matrix M_ij = sqrt(n_i n_j) (w if i == j else b) + (1 - w) delta_ij.
  const auto m = static_cast<Eigen::Index>(spec.block_sizes.size());
  Eigen::MatrixXd reduced(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double ni = spec.block_sizes[static_cast<std::size_t>(i)];
      const double nj = spec.block_sizes[static_cast<std::size_t>(j)];
      reduced(i, j) = std::sqrt(ni * nj) * (i == j ? spec.within_r : spec.between_r);
    }
    reduced(i, i) += 1.0 - spec.within_r;
  }
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(reduced,
                                                                         Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .minCoeff();
  if (min_eig < -1e-12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", min_eig);
    throw ParameterError(std::string("planted spec: target correlation matrix is not positive "
                                     "semidefinite (smallest eigenvalue ") +
                         buf + ")");
  }
}

std::vector<double> equal_probability_thresholds(int levels) {
  const boost::math::normal_distribution<double> standard;
  std::vector<double> cuts;
  for (int j = 1; j < levels; ++j) {
    cuts.push_back(boost::math::quantile(standard, static_cast<double>(j) / levels));
  }
  return cuts;
}

PlantedData generate(const PlantedSpec& spec) {
  validate(spec);
  const int n_items = spec.n_items();
  const auto n_blocks = spec.block_sizes.size();
  const auto cuts = equal_probability_thresholds(spec.schema.levels());

  PlantedData out;
  out.responses.schema = spec.schema;
  out.responses.values.resize(spec.n_subjects, n_items);
  out.responses.missing = MaskMatrix::Constant(spec.n_subjects, n_items, false);
  out.truth.k = static_cast<int>(n_blocks);
  out.truth.canonical = true;
  out.truth.seed = spec.seed;

  std::vector<int> block_of(static_cast<std::size_t>(n_items));
  {
    int item = 0;
    for (std::size_t b = 0; b < n_blocks; ++b) {
      for (int i = 0; i < spec.block_sizes[b]; ++i, ++item) {
        char id[16];
        std::snprintf(id, sizeof id, "q%03d", item + 1);
        out.responses.item_ids.emplace_back(id);
        block_of[static_cast<std::size_t>(item)] = static_cast<int>(b);
        ItemMetadata meta;
        meta.item_id = id;
        meta.domain_label = "B" + std::to_string(b + 1);
        out.metadata.push_back(std::move(meta));
      }
    }
  }
  out.truth.labels = block_of;
  out.truth.item_ids = out.responses.item_ids;

  auto discretize = [&](double z) {
    int level = 0;
    while (level < static_cast<int>(cuts.size()) && z > cuts[static_cast<std::size_t>(level)]) {
      ++level;
    }
    return spec.schema.scale_min + level;
  };

  Rng rng(spec.seed);
  if (spec.between_r >= 0.0) {
    // z = sqrt(b) g + sqrt(w - b) h_block + sqrt(1 - w) e
    const double a_global = std::sqrt(spec.between_r);
    const double a_block = std::sqrt(spec.within_r - spec.between_r);
    const double a_item = std::sqrt(1.0 - spec.within_r);
    std::vector<double> block_term(n_blocks);
    for (int s = 0; s < spec.n_subjects; ++s) {
      const double g = rng.normal();
      for (auto& h : block_term) h = rng.normal();
      for (int i = 0; i < n_items; ++i) {
        const double z = a_global * g +
                         a_block * block_term[static_cast<std::size_t>(block_of[static_cast<std::size_t>(i)])] +
                         a_item * rng.normal();
        out.responses.values(s, i) = discretize(z);
      }
    }
  } else {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(target_correlation(spec));
    const Eigen::MatrixXd factor =
        eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    Eigen::VectorXd g(n_items);
    for (int s = 0; s < spec.n_subjects; ++s) {
      for (int i = 0; i < n_items; ++i) g(i) = rng.normal();
      const Eigen::VectorXd z = factor * g;
      for (int i = 0; i < n_items; ++i) out.responses.values(s, i) = discretize(z(i));
    }
  }
  return out;
}

ResponseMatrix inject_missing(const ResponseMatrix& r, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw ParameterError("inject_missing: fraction must lie in [0, 1)");
  }
  ResponseMatrix out = r;
  if (out.missing.rows() != out.values.rows() || out.missing.cols() != out.values.cols()) {
    out.missing = MaskMatrix::Constant(out.values.rows(), out.values.cols(), false);
  }
  const auto cells = static_cast<std::size_t>(out.values.size());
  std::size_t wanted = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(cells)));
  if (wanted == 0) return out;
  // Selection sampling over row-major cell order.
  Rng rng(seed);
  const auto n_cols = static_cast<std::size_t>(out.values.cols());
  for (std::size_t cell = 0; cell < cells && wanted > 0; ++cell) {
    const std::size_t remaining = cells - cell;
    if (rng.uniform() * static_cast<double>(remaining) < static_cast<double>(wanted)) {
      const auto row = static_cast<Eigen::Index>(cell / n_cols);
      const auto col = static_cast<Eigen::Index>(cell % n_cols);
      out.missing(row, col) = true;
      out.values(row, col) = 0;
      --wanted;
    }
  }
  out.imputed_missing_fraction.reset();
  return out;
}

PlantedSpec parse_planted_spec(std::istream& in, const std::string& source) {
  PlantedSpec spec;
  std::optional<int> n_blocks;
  std::optional<int> block_size;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::string_view text(line);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = csv::trim(text);
    if (text.empty() || text.front() == '[') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, row, 0, "expected 'key = value'");
    const std::string key(csv::trim(text.substr(0, eq)));
    std::string_view value = csv::trim(text.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    auto as_int = [&](std::string_view v) {
      int out = 0;
      if (!csv::parse_int(csv::trim(v), out)) {
        throw ParseError(source, row, 0, "'" + key + "' expects an integer");
      }
      return out;
    };
    auto as_double = [&](std::string_view v) {
      double out = 0.0;
      if (!csv::parse_double(csv::trim(v), out)) {
        throw ParseError(source, row, 0, "'" + key + "' expects a number");
      }
      return out;
    };
    if (key == "block_sizes") {
      if (!value.empty() && value.front() == '[') value.remove_prefix(1);
      if (!value.empty() && value.back() == ']') value.remove_suffix(1);
      spec.block_sizes.clear();
      for (const auto& field : csv::split_line(value)) spec.block_sizes.push_back(as_int(field));
    } else if (key == "n_blocks") {
      n_blocks = as_int(value);
    } else if (key == "block_size") {
      block_size = as_int(value);
    } else if (key == "n_subjects") {
      spec.n_subjects = as_int(value);
    } else if (key == "within_r") {
      spec.within_r = as_double(value);
    } else if (key == "between_r") {
      spec.between_r = as_double(value);
    } else if (key == "scale_min") {
      spec.schema.scale_min = as_int(value);
    } else if (key == "scale_max") {
      spec.schema.scale_max = as_int(value);
    } else if (key == "seed") {
      std::uint64_t seed = 0;
      const auto v = csv::trim(value);
      const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
      if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ParseError(source, row, 0, "'seed' expects a non-negative integer");
      }
      spec.seed = seed;
    } else {
      throw ParseError(source, row, 0, "unknown key '" + key + "'");
    }
  }
  if (n_blocks || block_size) {
    if (!n_blocks || !block_size) {
      throw ParseError(source, 0, 0, "n_blocks and block_size must be given together");
    }
    if (!spec.block_sizes.empty()) {
      throw ParseError(source, 0, 0, "give either block_sizes or n_blocks + block_size");
    }
    if (*n_blocks < 1) throw ParseError(source, 0, 0, "n_blocks must be positive");
    spec.block_sizes.assign(static_cast<std::size_t>(*n_blocks), *block_size);
  }
  return spec;
}

PlantedSpec load_planted_spec(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  return parse_planted_spec(in, path.string());
}

PlantedSpec preset(const std::string& name) {
  PlantedSpec spec;
  if (name == "paper-shape") {
    spec.block_sizes = {60, 60, 60, 60, 60};
    spec.n_subjects = 20993;
    spec.within_r = 0.3;
    spec.between_r = 0.0;
  } else if (name == "tiny") {
    spec.block_sizes = {10, 10, 10};
    spec.n_subjects = 500;
    spec.within_r = 0.4;
    spec.between_r = 0.0;
  } else {
    throw ParameterError("unknown preset '" + name + "' (expected paper-shape or tiny)");
  }
  return spec;
}

std::vector<std::string> preset_names() { return {"paper-shape", "tiny"}; }

}  // namespace sclust
