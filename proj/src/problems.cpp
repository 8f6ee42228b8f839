#include "noda/problems.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "noda/errors.hpp"

namespace noda::problems {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& s : s_) {
    s = splitmix64(sm);
  }
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

SparseMatrix laplacian_2d(std::size_t m) {
  if (m < 2) {
    throw Error("laplacian_2d: grid size must be at least 2");
  }
  const std::size_t n = m * m;
  std::vector<Triplet> t;
  t.reserve(5 * n);
  auto idx = [m](std::size_t x, std::size_t y) { return y * m + x; };
  for (std::size_t y = 0; y < m; ++y) {
    for (std::size_t x = 0; x < m; ++x) {
      const std::size_t i = idx(x, y);
      t.push_back({i, i, 4.0});
      if (x > 0) t.push_back({i, idx(x - 1, y), -1.0});
      if (x + 1 < m) t.push_back({i, idx(x + 1, y), -1.0});
      if (y > 0) t.push_back({i, idx(x, y - 1), -1.0});
      if (y + 1 < m) t.push_back({i, idx(x, y + 1), -1.0});
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix tridiag_m_matrix(std::size_t n) {
  if (n < 2) {
    throw Error("tridiag_m_matrix: n must be at least 2");
  }
  std::vector<Triplet> t;
  t.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0});
    if (i > 0) t.push_back({i, i - 1, -1.0});
    if (i + 1 < n) t.push_back({i, i + 1, -1.0});
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

bool pattern_connected(const SparseMatrix& m) {
  if (m.nrows != m.ncols || m.nrows == 0) return false;
  const std::size_t n = m.nrows;
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) {
      const std::size_t c = m.col_indices[k];
      if (c != r) {
        adj[r].push_back(c);
        adj[c].push_back(r);
      }
    }
  }
  std::vector<char> seen(n, 0);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop();
    for (std::size_t v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
    }
  }
  return count == n;
}

SparseMatrix random_geometric_adjacency(std::size_t n, double radius,
                                        std::uint64_t seed,
                                        std::size_t attempts) {
  if (n < 2 || !(radius > 0.0)) {
    throw Error("random_geometric_adjacency: need n >= 2 and radius > 0");
  }
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    Rng rng(seed + attempt);
    std::vector<double> px(n), py(n);
    for (std::size_t i = 0; i < n; ++i) {
      px[i] = rng.uniform();
      py[i] = rng.uniform();
    }
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = px[i] - px[j];
        const double dy = py[i] - py[j];
        if (std::sqrt(dx * dx + dy * dy) < radius) {
          t.push_back({i, j, 1.0});
          t.push_back({j, i, 1.0});
        }
      }
    }
    SparseMatrix b = SparseMatrix::from_triplets(n, n, std::move(t));
    if (pattern_connected(b)) {
      return b;
    }
  }
  throw DisconnectedGraph("random_geometric_adjacency: no connected graph in " +
                          std::to_string(attempts) + " attempts");
}

SparseMatrix graph_m_matrix(std::size_t n, double radius, double sigma_slack,
                            std::uint64_t seed) {
  if (!(sigma_slack > 0.0)) {
    throw Error("graph_m_matrix: sigma_slack must be positive");
  }
  const SparseMatrix b = random_geometric_adjacency(n, radius, seed);
  double max_row_sum = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t k = b.row_offsets[r]; k < b.row_offsets[r + 1]; ++k) {
      s += b.values[k];
    }
    max_row_sum = std::max(max_row_sum, s);
  }
  const double sigma = max_row_sum + sigma_slack;
  std::vector<Triplet> t;
  t.reserve(b.nnz() + n);
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, sigma});
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = b.row_offsets[r]; k < b.row_offsets[r + 1]; ++k) {
      t.push_back({r, b.col_indices[k], -b.values[k]});
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

namespace {

// Random strictly diagonally dominant tridiagonal M-matrix.
SparseMatrix random_tridiag_m_matrix(std::size_t n, Rng& rng) {
  std::vector<double> lower(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    upper[i] = 0.25 + 0.75 * rng.uniform();
    lower[i + 1] = 0.25 + 0.75 * rng.uniform();
  }
  std::vector<Triplet> t;
  t.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double offsum = lower[i] + upper[i];
    t.push_back({i, i, offsum + 0.1 + 0.9 * rng.uniform()});
    if (i > 0) t.push_back({i, i - 1, -lower[i]});
    if (i + 1 < n) t.push_back({i, i + 1, -upper[i]});
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

// Banded sparse product; both factors are tridiagonal so the result has
// bandwidth two.
SparseMatrix tridiag_product(const SparseMatrix& m1, const SparseMatrix& m2) {
  const std::size_t n = m1.nrows;
  std::vector<Triplet> t;
  t.reserve(5 * n);
  std::vector<double> row(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= 2 ? i - 2 : 0;
    const std::size_t hi = std::min(n - 1, i + 2);
    for (std::size_t k = m1.row_offsets[i]; k < m1.row_offsets[i + 1]; ++k) {
      const std::size_t mid = m1.col_indices[k];
      const double v1 = m1.values[k];
      for (std::size_t k2 = m2.row_offsets[mid]; k2 < m2.row_offsets[mid + 1];
           ++k2) {
        row[m2.col_indices[k2]] += v1 * m2.values[k2];
      }
    }
    for (std::size_t j = lo; j <= hi; ++j) {
      if (row[j] != 0.0) {
        t.push_back({i, j, row[j]});
        row[j] = 0.0;
      }
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

bool has_positive_off_diagonal(const SparseMatrix& m) {
  for (std::size_t r = 0; r < m.nrows; ++r) {
    for (std::size_t k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) {
      if (m.col_indices[k] != r && m.values[k] > 0.0) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

SparseMatrix m_product(std::size_t n, std::uint64_t seed) {
  if (n < 2) {
    throw Error("m_product: n must be at least 2");
  }
  for (std::size_t attempt = 0; attempt < 10; ++attempt) {
    Rng rng(seed + attempt);
    const SparseMatrix m1 = random_tridiag_m_matrix(n, rng);
    const SparseMatrix m2 = random_tridiag_m_matrix(n, rng);
    SparseMatrix prod = tridiag_product(m1, m2);
    if (has_positive_off_diagonal(prod)) {
      return prod;
    }
  }
  throw GenerationFailed(
      "m_product: every candidate product was still an M-matrix");
}

std::string ProblemSpec::describe() const {
  switch (kind) {
    case Kind::Laplacian2D:
      return "laplacian2d m=" + std::to_string(m);
    case Kind::GraphMMatrix:
      return "graph M-matrix n=" + std::to_string(n) + " radius=" +
             std::to_string(radius) + " seed=" + std::to_string(seed);
    case Kind::TridiagMMatrix:
      return "tridiag(-1,2,-1) n=" + std::to_string(n);
    case Kind::MProduct:
      return "M-matrix product n=" + std::to_string(n) + " seed=" +
             std::to_string(seed);
    case Kind::AugmentedSvd:
      return "augmented [0 M; M^T 0] of " +
             (inner ? inner->describe() : std::string("?"));
  }
  return "?";
}

ProblemSpec ProblemSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw Error("problem spec: expected an object with a \"kind\" key");
  }
  const std::string kind = j.at("kind").get<std::string>();
  ProblemSpec spec;
  if (kind == "laplacian2d") {
    spec.kind = Kind::Laplacian2D;
    spec.m = j.at("m").get<std::size_t>();
  } else if (kind == "graph") {
    spec.kind = Kind::GraphMMatrix;
    spec.n = j.at("n").get<std::size_t>();
    spec.radius = j.value("radius", 0.15);
    spec.sigma_slack = j.value("sigma_slack", 0.5);
    spec.seed = j.value("seed", std::uint64_t{1});
  } else if (kind == "tridiag") {
    spec.kind = Kind::TridiagMMatrix;
    spec.n = j.at("n").get<std::size_t>();
  } else if (kind == "mproduct") {
    spec.kind = Kind::MProduct;
    spec.n = j.at("n").get<std::size_t>();
    spec.seed = j.value("seed", std::uint64_t{1});
  } else if (kind == "augmented") {
    spec.kind = Kind::AugmentedSvd;
    spec.inner = std::make_shared<const ProblemSpec>(
        from_json(j.at("inner")));
  } else {
    throw Error("problem spec: unknown kind \"" + kind + "\"");
  }
  return spec;
}

nlohmann::json ProblemSpec::to_json() const {
  nlohmann::json j;
  switch (kind) {
    case Kind::Laplacian2D:
      j["kind"] = "laplacian2d";
      j["m"] = m;
      break;
    case Kind::GraphMMatrix:
      j["kind"] = "graph";
      j["n"] = n;
      j["radius"] = radius;
      j["sigma_slack"] = sigma_slack;
      j["seed"] = seed;
      break;
    case Kind::TridiagMMatrix:
      j["kind"] = "tridiag";
      j["n"] = n;
      break;
    case Kind::MProduct:
      j["kind"] = "mproduct";
      j["n"] = n;
      j["seed"] = seed;
      break;
    case Kind::AugmentedSvd:
      j["kind"] = "augmented";
      j["inner"] = inner ? inner->to_json() : nlohmann::json();
      break;
  }
  return j;
}

BuiltProblem build(const ProblemSpec& spec) {
  using std::numbers::pi;
  BuiltProblem out;
  out.description = spec.describe();
  switch (spec.kind) {
    case ProblemSpec::Kind::Laplacian2D: {
      out.matrix = laplacian_2d(spec.m);
      const double s = std::sin(pi / (2.0 * (static_cast<double>(spec.m) + 1.0)));
      out.sigma_min = 8.0 * s * s;
      break;
    }
    case ProblemSpec::Kind::GraphMMatrix:
      out.matrix = graph_m_matrix(spec.n, spec.radius, spec.sigma_slack,
                                  spec.seed);
      break;
    case ProblemSpec::Kind::TridiagMMatrix:
      out.matrix = tridiag_m_matrix(spec.n);
      out.sigma_min = 2.0 - 2.0 * std::cos(pi / (static_cast<double>(spec.n) + 1.0));
      break;
    case ProblemSpec::Kind::MProduct:
      out.matrix = m_product(spec.n, spec.seed);
      break;
    case ProblemSpec::Kind::AugmentedSvd: {
      if (!spec.inner) {
        throw Error("augmented problem spec has no inner spec");
      }
      BuiltProblem base = build(*spec.inner);
      out.matrix = augment(base.matrix);
      // Inner generators with closed forms are symmetric positive definite,
      // so their singular values equal their eigenvalues.
      if (base.sigma_min &&
          (spec.inner->kind == ProblemSpec::Kind::Laplacian2D ||
           spec.inner->kind == ProblemSpec::Kind::TridiagMMatrix)) {
        out.sigma_min = base.sigma_min;
      }
      break;
    }
  }
  return out;
}

}  // namespace noda::problems
