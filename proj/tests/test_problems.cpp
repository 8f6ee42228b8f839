#include <doctest.h>

#include <cmath>
#include <numbers>

#include "noda/errors.hpp"
#include "noda/oracle.hpp"
#include "noda/problems.hpp"
#include "noda/sparse_matrix.hpp"

using namespace noda;
using namespace noda::problems;

namespace {

bool is_m_matrix_structure(const SparseMatrix& m) {
  for (std::size_t r = 0; r < m.nrows; ++r) {
    bool diag_positive = false;
    for (std::size_t k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) {
      if (m.col_indices[k] == r) {
        diag_positive = m.values[k] > 0.0;
      } else if (m.values[k] > 0.0) {
        return false;
      }
    }
    if (!diag_positive) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE_BEGIN("problems");

TEST_CASE("laplacian_2d closed forms") {
  const SparseMatrix l2 = laplacian_2d(2);
  CHECK(l2.nrows == 4);
  const double s2 = std::sin(std::numbers::pi / 6.0);
  CHECK(8.0 * s2 * s2 == doctest::Approx(2.0));
  CHECK(oracle::sigma_min_oracle(l2) == doctest::Approx(2.0).epsilon(1e-11));

  const SparseMatrix l3 = laplacian_2d(3);
  CHECK(oracle::sigma_min_oracle(l3) ==
        doctest::Approx(4.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-11));

  // The m = 31 value comes from the closed form evaluated at build time.
  ProblemSpec spec;
  spec.kind = ProblemSpec::Kind::Laplacian2D;
  spec.m = 31;
  const auto built = build(spec);
  const double s31 = std::sin(std::numbers::pi / 64.0);
  CHECK(*built.sigma_min == doctest::Approx(8.0 * s31 * s31).epsilon(1e-15));
  CHECK(built.matrix.nrows == 961);
}

TEST_CASE("laplacian structure is a symmetric irreducible M-matrix") {
  const SparseMatrix l = laplacian_2d(6);
  CHECK(is_m_matrix_structure(l));
  CHECK(is_symmetric(l));
  CHECK(pattern_connected(l));
}

TEST_CASE("graph_m_matrix forced single edge") {
  const SparseMatrix m = graph_m_matrix(2, 2.0, 0.5, 9);
  CHECK(m.nrows == 2);
  CHECK(matvec(m, {1, 0}) == Vector{1.5, -1.0});
  CHECK(matvec(m, {0, 1}) == Vector{-1.0, 1.5});
  CHECK(oracle::sigma_min_oracle(m) == doctest::Approx(0.5).epsilon(1e-11));
}

TEST_CASE("graph_m_matrix n=300 is connected and matches the oracle") {
  const SparseMatrix m = graph_m_matrix(300, 0.15, 0.5, 42);
  CHECK(pattern_connected(m));
  CHECK(is_m_matrix_structure(m));
  // sigma_min = max row sum + slack - rho(B), so it sits between the slack
  // and the largest diagonal entry.
  const double sigma = oracle::sigma_min_oracle(m);
  CHECK(sigma >= 0.5 - 1e-9);
  CHECK(sigma < norm_inf(m));
}

TEST_CASE("generators are deterministic") {
  const SparseMatrix a = graph_m_matrix(120, 0.2, 0.5, 7);
  const SparseMatrix b = graph_m_matrix(120, 0.2, 0.5, 7);
  CHECK(a.row_offsets == b.row_offsets);
  CHECK(a.col_indices == b.col_indices);
  CHECK(a.values == b.values);

  const SparseMatrix p = m_product(30, 5);
  const SparseMatrix q = m_product(30, 5);
  CHECK(p.values == q.values);
}

TEST_CASE("m_product: 2x2 products stay Z-matrices, so generation fails") {
  CHECK_THROWS_AS(m_product(2, 1), GenerationFailed);
}

TEST_CASE("a vanishing radius exhausts the connectivity retries") {
  CHECK_THROWS_AS(random_geometric_adjacency(4, 1e-9, 1), DisconnectedGraph);
}

TEST_CASE("m_product n=3 with unit tridiagonal factors gains a positive entry") {
  // tridiag(-1,2,-1)^2 has (0,2) entry (-1)(-1) = 1 > 0.
  const SparseMatrix t = tridiag_m_matrix(3);
  // Direct dense product check.
  const auto td = oracle::densify(t);
  double entry02 = 0.0;
  for (int k = 0; k < 3; ++k) {
    entry02 += td.at(0, k) * td.at(k, 2);
  }
  CHECK(entry02 == 1.0);

  // The generated product is monotone (dense inverse nonnegative) and not a
  // Z-matrix.
  const SparseMatrix prod = m_product(3, 1);
  CHECK(!is_m_matrix_structure(prod));
  const auto inv = oracle::dense_inverse(oracle::densify(prod));
  for (double v : inv.data) {
    CHECK(v >= -1e-12);
  }
}

TEST_CASE("m_product n=50 is monotone with a valid oracle value") {
  const SparseMatrix prod = m_product(50, 7);
  CHECK(pattern_connected(prod));
  const double sigma = oracle::sigma_min_oracle(prod);
  CHECK(sigma > 0.0);
  const auto inv = oracle::dense_inverse(oracle::densify(prod));
  for (double v : inv.data) {
    CHECK(v >= -1e-12);
  }
}

TEST_CASE("build dispatch attaches closed forms") {
  ProblemSpec lap;
  lap.kind = ProblemSpec::Kind::Laplacian2D;
  lap.m = 31;
  CHECK(build(lap).sigma_min.has_value());

  ProblemSpec aug;
  aug.kind = ProblemSpec::Kind::AugmentedSvd;
  auto inner = std::make_shared<ProblemSpec>();
  inner->kind = ProblemSpec::Kind::TridiagMMatrix;
  inner->n = 50;
  aug.inner = inner;
  const auto built = build(aug);
  CHECK(built.matrix.nrows == 100);
  CHECK(*built.sigma_min ==
        doctest::Approx(2.0 - 2.0 * std::cos(std::numbers::pi / 51.0))
            .epsilon(1e-15));

  ProblemSpec graph;
  graph.kind = ProblemSpec::Kind::GraphMMatrix;
  graph.n = 40;
  graph.radius = 0.4;
  graph.seed = 3;
  CHECK(!build(graph).sigma_min.has_value());
}

TEST_CASE("problem specs round-trip through JSON") {
  const auto j = nlohmann::json::parse(R"({"kind":"laplacian2d","m":31})");
  const ProblemSpec spec = ProblemSpec::from_json(j);
  CHECK(spec.kind == ProblemSpec::Kind::Laplacian2D);
  CHECK(spec.m == 31);
  CHECK(ProblemSpec::from_json(spec.to_json()).m == 31);

  const auto ja = nlohmann::json::parse(
      R"({"kind":"augmented","inner":{"kind":"tridiag","n":50}})");
  const ProblemSpec aug = ProblemSpec::from_json(ja);
  REQUIRE(aug.inner);
  CHECK(aug.inner->n == 50);
}

TEST_CASE("every generator yields connected irreducible patterns") {
  CHECK(pattern_connected(tridiag_m_matrix(25)));
  CHECK(pattern_connected(m_product(25, 11)));
  CHECK(pattern_connected(random_geometric_adjacency(80, 0.25, 13)));
}

TEST_CASE("dense-inverse nonnegativity holds for every generator at n <= 60") {
  std::vector<SparseMatrix> mats;
  mats.push_back(laplacian_2d(7));  // n = 49
  mats.push_back(tridiag_m_matrix(60));
  mats.push_back(graph_m_matrix(60, 0.3, 0.5, 4));
  mats.push_back(m_product(60, 13));
  for (const SparseMatrix& m : mats) {
    const auto inv = oracle::dense_inverse(oracle::densify(m));
    for (double v : inv.data) {
      CHECK(v >= -1e-12);
    }
  }
}

TEST_SUITE_END();
