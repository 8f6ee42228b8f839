#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "noda/sparse_matrix.hpp"

namespace noda::problems {

/// xoshiro256** seeded through splitmix64, so a seed means the same stream on
/// every platform. Constants are the reference ones (Blackman & Vigna):
/// splitmix64 increment 0x9e3779b97f4a7c15, multipliers 0xbf58476d1ce4e5b9
/// and 0x94d049bb133111eb; xoshiro star multipliers 5 and 9, rotations 7 and
/// 45. uniform() maps the top 53 bits to [0, 1).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next();
  double uniform();

 private:
  std::uint64_t s_[4];
};

struct ProblemSpec {
  enum class Kind { Laplacian2D, GraphMMatrix, TridiagMMatrix, MProduct, AugmentedSvd };

  Kind kind = Kind::Laplacian2D;
  std::size_t m = 2;            // Laplacian2D grid size
  std::size_t n = 2;            // other generators
  double radius = 0.15;         // GraphMMatrix
  double sigma_slack = 0.5;     // GraphMMatrix
  std::uint64_t seed = 1;       // GraphMMatrix, MProduct
  std::shared_ptr<const ProblemSpec> inner;  // AugmentedSvd

  std::string describe() const;

  static ProblemSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct BuiltProblem {
  SparseMatrix matrix;
  std::optional<double> sigma_min;  // closed form when available
  std::string description;
};

// n = m^2 five-point Dirichlet Laplacian on an m x m grid: diagonal 4,
// grid-neighbor entries -1. sigma_min = 8 sin^2(pi / (2(m+1))).
SparseMatrix laplacian_2d(std::size_t m);

// tridiag(-1, 2, -1); sigma_min = 2 - 2 cos(pi / (n+1)).
SparseMatrix tridiag_m_matrix(std::size_t n);

// Binary adjacency of a random geometric graph on n points in the unit
// square (edge when distance < radius). Retries seed+1 while disconnected,
// up to `attempts` times; throws DisconnectedGraph after that.
SparseMatrix random_geometric_adjacency(std::size_t n, double radius,
                                        std::uint64_t seed,
                                        std::size_t attempts = 20);

// M = sigma I - B with B the adjacency above and sigma = max row sum of B
// plus sigma_slack, so M is a nonsingular irreducible M-matrix.
SparseMatrix graph_m_matrix(std::size_t n, double radius, double sigma_slack,
                            std::uint64_t seed);

// Product of two seeded random diagonally dominant tridiagonal M-matrices:
// monotone but (generically) not an M-matrix. Regenerates with seed+1 when
// the product happens to be a Z-matrix; throws GenerationFailed after 10
// attempts.
SparseMatrix m_product(std::size_t n, std::uint64_t seed);

// Connectivity of the symmetrized sparsity pattern (irreducibility check for
// structurally symmetric matrices).
bool pattern_connected(const SparseMatrix& m);

BuiltProblem build(const ProblemSpec& spec);

}  // namespace noda::problems
