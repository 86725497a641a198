#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "sclust/error.hpp"
#include "sclust/simgraph.hpp"
#include "sclust/synth.hpp"

using namespace sclust;

namespace {

PlantedSpec spec_of(std::vector<int> blocks, int subjects, double within, double between,
                    std::uint64_t seed) {
  PlantedSpec s;
  s.block_sizes = std::move(blocks);
  s.n_subjects = subjects;
  s.within_r = within;
  s.between_r = between;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("a single block is one cluster") {
  const auto d = generate(spec_of({8}, 50, 0.3, 0.0, 1));
  CHECK(d.truth.k == 1);
  CHECK(d.truth.labels == std::vector<int>(8, 0));
  CHECK(d.responses.n_items() == 8);
  CHECK(d.responses.n_subjects() == 50);
}

TEST_CASE("ground truth has the configured block sizes") {
  const auto d = generate(spec_of({3, 7, 2, 5}, 40, 0.3, 0.1, 2));
  CHECK(d.truth.cluster_sizes() == std::vector<int>{3, 7, 2, 5});
  CHECK(d.truth.canonical);
  CHECK(d.truth.item_ids.front() == "q001");
  CHECK(d.truth.item_ids.back() == "q017");
  CHECK(d.responses.item_ids == d.truth.item_ids);
  REQUIRE(d.metadata.size() == 17);
  CHECK(d.metadata[0].domain_label == "B1");
  CHECK(d.metadata[16].domain_label == "B4");
  CHECK(d.responses.values.minCoeff() >= 1);
  CHECK(d.responses.values.maxCoeff() <= 5);
  CHECK(d.responses.missing_count() == 0);
}

TEST_CASE("generation is deterministic in the seed") {
  const auto s = spec_of({4, 4}, 200, 0.5, -0.1, 9);
  const auto a = generate(s);
  const auto b = generate(s);
  CHECK(a.responses.values == b.responses.values);
  auto t = s;
  t.seed = 10;
  CHECK_FALSE(generate(t).responses.values == a.responses.values);
}

TEST_CASE("equal-probability thresholds") {
  const auto t = equal_probability_thresholds(5);
  REQUIRE(t.size() == 4);
  CHECK(t[0] == doctest::Approx(-0.8416212335729143));
  CHECK(t[1] == doctest::Approx(-0.2533471031357997));
  CHECK(t[2] == doctest::Approx(0.2533471031357997));
  CHECK(t[3] == doctest::Approx(0.8416212335729143));
  const auto d = generate(spec_of({5, 5}, 20000, 0.3, 0.0, 4));
  for (int level = 1; level <= 5; ++level) {
    const double share =
        static_cast<double>((d.responses.values.col(0).array() == level).count()) / 20000.0;
    CHECK(share == doctest::Approx(0.2).epsilon(0.1));
  }
}

TEST_CASE("within-block correlation matches the attenuation oracle") {
  const auto d = generate(spec_of({60, 60, 60, 60, 60}, 20000, 0.3, 0.0, 20));
  const auto c = correlations(d.responses).values;
  double within = 0.0;
  double between = 0.0;
  long n_within = 0;
  long n_between = 0;
  for (int i = 0; i < 300; ++i) {
    for (int j = i + 1; j < 300; ++j) {
      if (i / 60 == j / 60) {
        within += c(i, j);
        ++n_within;
      } else {
        between += c(i, j);
        ++n_between;
      }
    }
  }
  within /= static_cast<double>(n_within);
  between /= static_cast<double>(n_between);
  CHECK(std::abs(within - oracle::kAttenuated5Level_r03) < 0.03);
  CHECK(std::abs(between) < 0.01);
}

TEST_CASE("target correlation and validation") {
  const auto t = target_correlation(spec_of({2, 3}, 10, 0.4, 0.1, 1));
  CHECK(t.rows() == 5);
  CHECK(t(0, 0) == 1.0);
  CHECK(t(0, 1) == 0.4);
  CHECK(t(0, 2) == 0.1);
  CHECK(t(3, 4) == 0.4);
  CHECK_THROWS_AS(validate(spec_of({}, 10, 0.3, 0.0, 1)), ParameterError);
  CHECK_THROWS_AS(validate(spec_of({1, 4}, 10, 0.3, 0.0, 1)), ParameterError);
  CHECK_THROWS_AS(validate(spec_of({4}, 1, 0.3, 0.0, 1)), ParameterError);
  CHECK_THROWS_AS(validate(spec_of({4}, 10, 1.0, 0.0, 1)), ParameterError);
  CHECK_THROWS_AS(validate(spec_of({4, 4}, 10, 0.3, 0.3, 1)), ParameterError);
  // Strongly negative between-block correlation across many blocks is not PSD.
  CHECK_THROWS_AS(validate(spec_of({5, 5, 5}, 10, 0.5, -0.5, 1)), ParameterError);
  CHECK_THROWS_AS(generate(spec_of({5, 5, 5}, 10, 0.5, -0.5, 1)), ParameterError);
  CHECK_NOTHROW(validate(spec_of({5, 5}, 10, 0.5, -0.2, 1)));
}

TEST_CASE("negative between-block correlation is honored") {
  const auto d = generate(spec_of({6, 6}, 20000, 0.5, -0.2, 3));
  const auto c = correlations(d.responses).values;
  CHECK(c.block(0, 6, 6, 6).mean() < -0.1);
  CHECK(c(0, 1) > 0.3);
}

TEST_CASE("missing-cell injection") {
  PlantedSpec s = spec_of({300}, 20993, 0.3, 0.0, 1);
  ResponseMatrix r;
  r.schema = s.schema;
  r.values = Eigen::MatrixXi::Constant(20993, 300, 3);
  r.missing = MaskMatrix::Constant(20993, 300, false);
  for (int i = 0; i < 300; ++i) r.item_ids.push_back("x" + std::to_string(i));
  const auto masked = inject_missing(r, 0.005, 7);
  CHECK(masked.missing_count() == 31490);
  CHECK(std::abs(masked.missing_fraction() - 0.005) <= 1.0 / (20993.0 * 300.0));
  CHECK((masked.values.array() == 0).count() == 31490);
  CHECK(inject_missing(r, 0.005, 7).missing.cwiseEqual(masked.missing).all());

  const auto none = inject_missing(r, 0.0, 7);
  CHECK(none.values == r.values);
  CHECK(none.missing_count() == 0);

  const auto filled = impute_neutral(masked);
  CHECK(filled.missing_count() == 0);
  CHECK(filled.values == r.values);

  CHECK_THROWS_AS(inject_missing(r, 1.0, 1), ParameterError);
  CHECK_THROWS_AS(inject_missing(r, -0.1, 1), ParameterError);
}

TEST_CASE("spec documents") {
  std::istringstream doc(
      "# planted data\n"
      "[planted]\n"
      "block_sizes = [10, 12, 8]\n"
      "n_subjects = 400   # subjects\n"
      "within_r = 0.35\n"
      "between_r = -0.05\n"
      "seed = 18446744073709551615\n");
  const auto s = parse_planted_spec(doc);
  CHECK(s.block_sizes == std::vector<int>{10, 12, 8});
  CHECK(s.n_subjects == 400);
  CHECK(s.within_r == 0.35);
  CHECK(s.between_r == -0.05);
  CHECK(s.seed == 18446744073709551615ULL);

  std::istringstream uniform("n_blocks = 3\nblock_size = '4'\nn_subjects = 10\n");
  CHECK(parse_planted_spec(uniform).block_sizes == std::vector<int>{4, 4, 4});

  std::istringstream unknown("colour = blue\n");
  CHECK_THROWS_AS(parse_planted_spec(unknown, "x.toml"), ParseError);
  std::istringstream bad_number("within_r = high\n");
  CHECK_THROWS_AS(parse_planted_spec(bad_number), ParseError);
  std::istringstream half("n_blocks = 3\n");
  CHECK_THROWS_AS(parse_planted_spec(half), ParseError);
  CHECK_THROWS_AS(load_planted_spec("/nonexistent/spec.toml"), IoError);
}

TEST_CASE("presets") {
  const auto names = preset_names();
  CHECK(std::find(names.begin(), names.end(), "paper-shape") != names.end());
  CHECK(std::find(names.begin(), names.end(), "tiny") != names.end());
  const auto p = preset("paper-shape");
  CHECK(p.n_items() == 300);
  CHECK(p.n_subjects == 20993);
  for (const auto& name : names) CHECK_NOTHROW(validate(preset(name)));
  CHECK_THROWS_AS(preset("nope"), ParameterError);
}
