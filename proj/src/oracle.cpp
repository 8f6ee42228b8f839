#include "noda/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "noda/errors.hpp"

namespace noda::oracle {

namespace {

constexpr std::size_t kDenseSizeGuard = 512;
constexpr double kPivotFloor = 1e-300;

struct LuFactors {
  DenseMatrix lu;                 // L below diagonal (unit), U on/above
  std::vector<std::size_t> perm;  // row permutation
  int sign = 1;
};

LuFactors lu_factorize(DenseMatrix a) {
  if (a.nrows != a.ncols) {
    throw DimensionError("lu_factorize: matrix must be square");
  }
  const std::size_t n = a.nrows;
  LuFactors f;
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    f.perm[i] = i;
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double big = std::abs(a.at(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = std::abs(a.at(i, k));
      if (m > big) {
        big = m;
        piv = i;
      }
    }
    if (big <= kPivotFloor) {
      throw SingularMatrix("lu_factorize: pivot " + std::to_string(k) +
                           " below threshold");
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a.at(k, j), a.at(piv, j));
      }
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = a.at(i, k) / a.at(k, k);
      a.at(i, k) = l;
      for (std::size_t j = k + 1; j < n; ++j) {
        a.at(i, j) -= l * a.at(k, j);
      }
    }
  }
  f.lu = std::move(a);
  return f;
}

Vector lu_solve(const LuFactors& f, const Vector& b) {
  const std::size_t n = f.lu.nrows;
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = b[f.perm[i]];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      x[i] -= f.lu.at(i, j) * x[j];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) {
      x[i] -= f.lu.at(i, j) * x[j];
    }
    x[i] /= f.lu.at(i, i);
  }
  return x;
}

}  // namespace

DenseMatrix densify(const SparseMatrix& m) {
  DenseMatrix d(m.nrows, m.ncols);
  for (std::size_t r = 0; r < m.nrows; ++r) {
    for (std::size_t k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) {
      d.at(r, m.col_indices[k]) = m.values[k];
    }
  }
  return d;
}

Vector dense_lu_solve(const DenseMatrix& a, const Vector& b) {
  if (a.nrows != b.size()) {
    throw DimensionError("dense_lu_solve: dimension mismatch");
  }
  return lu_solve(lu_factorize(a), b);
}

double dense_determinant(const DenseMatrix& a) {
  LuFactors f;
  try {
    f = lu_factorize(a);
  } catch (const SingularMatrix&) {
    return 0.0;
  }
  double det = f.sign;
  for (std::size_t i = 0; i < a.nrows; ++i) {
    det *= f.lu.at(i, i);
  }
  return det;
}

DenseMatrix dense_inverse(const DenseMatrix& a) {
  if (a.nrows != a.ncols) {
    throw DimensionError("dense_inverse: matrix must be square");
  }
  if (a.nrows > kDenseSizeGuard) {
    throw SizeGuard("dense_inverse: n = " + std::to_string(a.nrows) +
                    " exceeds the size guard");
  }
  const std::size_t n = a.nrows;
  const LuFactors f = lu_factorize(a);
  DenseMatrix inv(n, n);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Vector col = lu_solve(f, e);
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      inv.at(i, j) = col[i];
    }
  }
  return inv;
}

PerronResult perron_power(const DenseMatrix& b) {
  if (b.nrows != b.ncols || b.nrows == 0) {
    throw DimensionError("perron_power: matrix must be square and nonempty");
  }
  const std::size_t n = b.nrows;
  double max_abs = 0.0;
  for (double x : b.data) {
    max_abs = std::max(max_abs, std::abs(x));
  }
  for (double x : b.data) {
    // Tolerate inversion round-off; anything worse violates the precondition.
    if (x < -1e-9 * std::max(1.0, max_abs)) {
      throw Error("perron_power: matrix has significantly negative entries");
    }
  }

  // Iterate on B + I: preserves the Perron vector, shifts rho by exactly 1,
  // and makes cyclic (e.g. bipartite or augmented) matrices primitive.
  auto apply_shifted = [&](const Vector& v) {
    Vector w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = v[i];
      const double* row = &b.data[i * n];
      for (std::size_t j = 0; j < n; ++j) {
        const double e = row[j];
        if (e > 0.0) s += e * v[j];
      }
      w[i] = s;
    }
    return w;
  };

  Vector v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  constexpr std::size_t kMaxIters = 1000000;
  for (std::size_t k = 1; k <= kMaxIters; ++k) {
    Vector w = apply_shifted(v);
    const RatioBounds rb = ratio_extrema(w, v);
    const double rho_shifted = rb.max_ratio;
    if (rb.max_ratio - rb.min_ratio <=
        1e-12 * std::max(rho_shifted - 1.0, 1e-300)) {
      PerronResult res;
      res.rho = rho_shifted - 1.0;
      res.v = normalized(w);
      res.iterations = k;
      return res;
    }
    v = normalized(w);
  }
  throw NoConvergence(
      "perron_power: bracket failed to collapse within the iteration cap");
}

double sigma_min_oracle(const SparseMatrix& a) {
  if (a.nrows != a.ncols) {
    throw DimensionError("sigma_min_oracle: matrix must be square");
  }
  if (a.nrows > kDenseSizeGuard) {
    throw SizeGuard("sigma_min_oracle: n exceeds the size guard");
  }
  const DenseMatrix inv = dense_inverse(densify(a));
  const PerronResult p = perron_power(inv);
  return 1.0 / p.rho;
}

}  // namespace noda::oracle
