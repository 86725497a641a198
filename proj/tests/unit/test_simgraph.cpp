#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sclust/error.hpp"
#include "sclust/simgraph.hpp"

using namespace sclust;

namespace {

CorrelationMatrix corr_of(const Eigen::MatrixXd& c) {
  CorrelationMatrix out;
  out.values = c;
  for (Eigen::Index i = 0; i < c.rows(); ++i) out.item_ids.push_back("i" + std::to_string(i));
  return out;
}

Eigen::MatrixXd random_correlation(int n, std::mt19937_64& gen) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(3 * n, n);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = z(gen);
  return correlations(x).values;
}

const double kCs[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
const double kSigmas[] = {0.4, 0.5, 0.75, 1.0};

}  // namespace

TEST_CASE("identical items correlate 1, reversed items -1") {
  ResponseMatrix r;
  r.values.resize(5, 3);
  r.values << 1, 1, 5, 2, 2, 4, 5, 5, 1, 3, 3, 3, 4, 4, 2;
  r.missing = MaskMatrix::Constant(5, 3, false);
  r.item_ids = {"a", "b", "c"};
  const auto c = correlations(r);
  CHECK(c.values(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.values(0, 2) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(c.values(1, 1) == 1.0);
  CHECK(c.item_ids == r.item_ids);
}

TEST_CASE("hand dataset matches textbook Pearson") {
  Eigen::MatrixXd x(4, 3);
  x << 1, 2, 5,  //
      3, 2, 1,   //
      2, 4, 2,   //
      5, 5, 3;
  const auto c = correlations(x);
  auto col = [&](int j) {
    std::vector<double> v;
    for (int i = 0; i < 4; ++i) v.push_back(x(i, j));
    return v;
  };
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double expected = i == j ? 1.0 : oracle::pearson(col(i), col(j));
      CHECK(std::abs(c.values(i, j) - expected) < 1e-12);
    }
  }
  // Values also frozen from an independent statistics package.
  CHECK(std::abs(c.values(0, 1) - 0.6831300510639733) < 1e-12);
  CHECK(std::abs(c.values(0, 2) - -0.37142857142857144) < 1e-12);
}

TEST_CASE("correlation matrix invariants on random data") {
  std::mt19937_64 gen(1);
  for (int rep = 0; rep < 20; ++rep) {
    const auto c = random_correlation(12, gen);
    CHECK(c.isApprox(c.transpose(), 0.0));
    CHECK((c.diagonal().array() == 1.0).all());
    CHECK(c.maxCoeff() <= 1.0 + 1e-12);
    CHECK(c.minCoeff() >= -1.0 - 1e-12);
  }
}

TEST_CASE("zero-variance item is named") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 3, 2, 3, 3, 3, 4, 3;
  try {
    correlations(x, {"good", "flat"});
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("flat") != std::string::npos);
  }
}

TEST_CASE("missing cells must be imputed first") {
  ResponseMatrix r;
  r.values = Eigen::MatrixXi::Ones(3, 2);
  r.values(1, 0) = 2;
  r.values(2, 1) = 2;
  r.missing = MaskMatrix::Constant(3, 2, false);
  r.missing(0, 0) = true;
  r.item_ids = {"a", "b"};
  CHECK_THROWS_AS(correlations(r), DataError);
}

TEST_CASE("distance closed forms") {
  for (double c : kCs) {
    CHECK(correlation_to_distance(c, DistanceVariant::paper_literal) ==
          doctest::Approx(std::pow((1 - c) / 2, 2)).epsilon(1e-15));
    CHECK(correlation_to_distance(c, DistanceVariant::chord) ==
          doctest::Approx(std::sqrt((1 - c) / 2)).epsilon(1e-15));
  }
  CHECK(correlation_to_distance(1.0, DistanceVariant::paper_literal) == 0.0);
  CHECK(correlation_to_distance(1.0, DistanceVariant::chord) == 0.0);
  CHECK(correlation_to_distance(-1.0, DistanceVariant::paper_literal) == 1.0);
  CHECK(correlation_to_distance(-1.0, DistanceVariant::chord) == 1.0);
  CHECK(correlation_to_distance(0.0, DistanceVariant::paper_literal) == 0.25);
  CHECK(std::abs(correlation_to_distance(0.0, DistanceVariant::chord) - 0.7071067811865476) <
        1e-15);
}

TEST_CASE("kernel closed forms") {
  CHECK(distance_to_weight(0.0, 0.3, KernelVariant::ratio_squared) == 1.0);
  CHECK(distance_to_weight(0.0, 0.3, KernelVariant::plain_ratio) == 1.0);
  CHECK(std::abs(distance_to_weight(1.0, 1.0, KernelVariant::ratio_squared) -
                 0.36787944117144233) < 1e-15);
  for (double s : kSigmas) {
    for (double d : {0.1, 0.25, 0.7}) {
      CHECK(std::abs(distance_to_weight(d, s, KernelVariant::ratio_squared) -
                     std::exp(-(d / s) * (d / s))) < 1e-15);
      CHECK(std::abs(distance_to_weight(d, s, KernelVariant::plain_ratio) - std::exp(-d / s)) <
            1e-15);
    }
  }
}

TEST_CASE("adjacency matrix entries, diagonal and degrees") {
  std::mt19937_64 gen(2);
  const auto c = corr_of(random_correlation(15, gen));
  for (auto dv : {DistanceVariant::paper_literal, DistanceVariant::chord}) {
    const auto d = distances(c, dv);
    CHECK((d.values.diagonal().array() == 0.0).all());
    CHECK(d.values.isApprox(d.values.transpose(), 0.0));
    CHECK(d.values.minCoeff() >= 0.0);
    CHECK(d.values.maxCoeff() <= 1.0);
    for (auto kv : {KernelVariant::ratio_squared, KernelVariant::plain_ratio}) {
      const auto g = gaussian_adjacency(d, 0.5, kv);
      CHECK((g.adjacency.diagonal().array() == 1.0).all());
      CHECK(g.adjacency.isApprox(g.adjacency.transpose(), 0.0));
      CHECK(g.adjacency.minCoeff() > 0.0);
      CHECK(g.adjacency.maxCoeff() <= 1.0);
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        CHECK(std::abs(g.degrees(i) - g.adjacency.row(i).sum()) < 1e-10 * 15);
        for (Eigen::Index j = 0; j < g.size(); ++j) {
          if (i != j) CHECK(g.adjacency(i, j) < 1.0);
          CHECK(g.adjacency(i, j) == distance_to_weight(d.values(i, j), 0.5, kv));
        }
      }
      const auto z = gaussian_adjacency(d, 0.5, kv, DiagonalPolicy::zero);
      CHECK((z.adjacency.diagonal().array() == 0.0).all());
      CHECK(std::abs(z.degrees.sum() - (g.degrees.sum() - 15.0)) < 1e-9);
    }
  }
}

TEST_CASE("sigma must be positive") {
  const auto d = distances(corr_of(Eigen::MatrixXd::Identity(3, 3)), DistanceVariant::chord);
  CHECK_THROWS_AS(gaussian_adjacency(d, 0.0), ParameterError);
  CHECK_THROWS_AS(gaussian_adjacency(d, -1.0), ParameterError);
}

TEST_CASE("adjacency is nondecreasing in sigma") {
  std::mt19937_64 gen(3);
  const auto d = distances(corr_of(random_correlation(20, gen)), DistanceVariant::paper_literal);
  for (auto kv : {KernelVariant::ratio_squared, KernelVariant::plain_ratio}) {
    const auto lo = gaussian_adjacency(d, 0.4, kv);
    const auto hi = gaussian_adjacency(d, 0.75, kv);
    CHECK(((hi.adjacency - lo.adjacency).array() >= 0.0).all());
  }
}

TEST_CASE("adjacency strictly increases with correlation") {
  for (auto dv : {DistanceVariant::paper_literal, DistanceVariant::chord}) {
    for (auto kv : {KernelVariant::ratio_squared, KernelVariant::plain_ratio}) {
      for (double s : kSigmas) {
        double prev = -1.0;
        for (int i = 0; i <= 40; ++i) {
          const double c = -1.0 + 0.05 * i;
          const double a = distance_to_weight(correlation_to_distance(c, dv), s, kv);
          CHECK(a > prev);
          prev = a;
        }
      }
    }
  }
}

TEST_CASE("tiny weights underflow to exact zero") {
  CorrelationMatrix c = corr_of(Eigen::MatrixXd::Identity(2, 2));
  c.values(0, 1) = c.values(1, 0) = -1.0;
  const auto d = distances(c, DistanceVariant::chord);
  // exp(-680) is about 5e-296 and survives; exp(-700) is about 1e-304,
  // representable but below the clamp.
  const auto g = gaussian_adjacency(d, 1.0 / 680.0, KernelVariant::plain_ratio);
  CHECK(g.adjacency(0, 1) > 0.0);
  const auto g2 = gaussian_adjacency(d, 1.0 / 700.0, KernelVariant::plain_ratio);
  CHECK(g2.adjacency(0, 1) == 0.0);
  CHECK(kAdjacencyUnderflow == 1e-300);
}

TEST_CASE("permutation equivariance of c, d and a") {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(40, 10);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = z(gen);
  const auto p = oracle::random_permutation(10, gen);
  Eigen::MatrixXd xp(40, 10);
  for (int j = 0; j < 10; ++j) xp.col(j) = x.col(p[static_cast<std::size_t>(j)]);

  const auto c = correlations(x);
  const auto cp = correlations(xp);
  CHECK((cp.values - oracle::permute_symmetric(c.values, p)).cwiseAbs().maxCoeff() < 1e-14);
  const auto a = gaussian_adjacency(distances(c, DistanceVariant::chord), 0.5).adjacency;
  const auto ap = gaussian_adjacency(distances(cp, DistanceVariant::chord), 0.5).adjacency;
  CHECK((ap - oracle::permute_symmetric(a, p)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("restrict takes the principal submatrix in the given order") {
  std::mt19937_64 gen(6);
  const auto d = distances(corr_of(random_correlation(8, gen)), DistanceVariant::chord);
  const std::vector<int> items = {1, 4, 6};
  const auto sub = restrict(d, items);
  REQUIRE(sub.size() == 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(sub.values(i, j) == d.values(items[i], items[j]));
    CHECK(sub.item_ids[static_cast<std::size_t>(i)] ==
          d.item_ids[static_cast<std::size_t>(items[static_cast<std::size_t>(i)])]);
  }
}

TEST_CASE("connected components") {
  std::mt19937_64 gen(7);
  SUBCASE("two disconnected blocks") {
    SimilarityGraph g;
    g.adjacency = oracle::block_adjacency({3, 4}, gen);
    const auto comps = connected_components(g);
    CHECK(comps.count == 2);
    CHECK(comps.labels == std::vector<int>{0, 0, 0, 1, 1, 1, 1});
  }
  SUBCASE("complete graph") {
    std::mt19937_64 g2(8);
    SimilarityGraph g;
    g.adjacency = oracle::block_adjacency({9}, g2);
    CHECK(connected_components(g).count == 1);
  }
  SUBCASE("labels follow the smallest member") {
    SimilarityGraph g;
    g.adjacency = Eigen::MatrixXd::Identity(5, 5);
    g.adjacency(0, 3) = g.adjacency(3, 0) = 0.5;
    g.adjacency(1, 4) = g.adjacency(4, 1) = 0.5;
    const auto comps = connected_components(g);
    CHECK(comps.count == 3);
    CHECK(comps.labels == std::vector<int>{0, 1, 2, 0, 1});
  }
  SUBCASE("edges at or below epsilon are ignored") {
    SimilarityGraph g;
    g.adjacency = Eigen::MatrixXd::Identity(2, 2);
    g.adjacency(0, 1) = g.adjacency(1, 0) = 1e-13;
    CHECK(connected_components(g).count == 2);
    CHECK(connected_components(g, 1e-14).count == 1);
  }
}

TEST_CASE("variant names and tags") {
  CHECK(transform_tag(DistanceVariant::paper_literal, KernelVariant::ratio_squared) ==
        "paper_literal+ratio_squared");
  CHECK(transform_tag(DistanceVariant::chord, KernelVariant::plain_ratio, DiagonalPolicy::zero) ==
        "chord+plain_ratio+zero_diagonal");
  CHECK(parse_distance_variant("chord") == DistanceVariant::chord);
  CHECK(parse_kernel_variant("plain_ratio") == KernelVariant::plain_ratio);
  CHECK_THROWS_AS(parse_distance_variant("euclid"), ParameterError);
  CHECK_THROWS_AS(parse_kernel_variant("gauss"), ParameterError);
  const auto d = distances(corr_of(Eigen::MatrixXd::Identity(2, 2)), DistanceVariant::chord);
  CHECK(gaussian_adjacency(d, 0.5).transform_tag == "chord+ratio_squared");
}
