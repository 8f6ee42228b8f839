#include "noda/operators.hpp"

#include <string>

#include "noda/errors.hpp"

namespace noda {

OperatorSpec OperatorSpec::plain(const SparseMatrix& a) {
  return OperatorSpec(Kind::Plain, 0.0, a);
}

OperatorSpec OperatorSpec::shifted_monotone(double lambda_bar,
                                            const SparseMatrix& a) {
  return OperatorSpec(Kind::ShiftedMonotone, lambda_bar, a);
}

OperatorSpec OperatorSpec::shifted_nonneg(double lambda_hat,
                                          const SparseMatrix& b) {
  return OperatorSpec(Kind::ShiftedNonneg, lambda_hat, b);
}

OperatorSpec OperatorSpec::augmented(const SparseMatrix& m) {
  if (m.nrows != m.ncols) {
    throw DimensionError("augmented operator: matrix must be square");
  }
  return OperatorSpec(Kind::Augmented, 0.0, m);
}

OperatorSpec OperatorSpec::bordered_monotone(double lambda_bar,
                                             const SparseMatrix& a,
                                             const Vector& x) {
  if (a.nrows != a.ncols || a.ncols != x.size()) {
    throw DimensionError("bordered operator: dimension mismatch");
  }
  OperatorSpec op(Kind::BorderedMonotone, lambda_bar, a);
  op.border_x_ = x;
  op.border_ax_ = matvec(a, x);
  return op;
}

OperatorSpec OperatorSpec::bordered_nonneg(double lambda_hat,
                                           const SparseMatrix& b,
                                           const Vector& x) {
  if (b.nrows != b.ncols || b.ncols != x.size()) {
    throw DimensionError("bordered operator: dimension mismatch");
  }
  OperatorSpec op(Kind::BorderedNonneg, lambda_hat, b);
  op.border_x_ = x;
  return op;
}

std::size_t OperatorSpec::dim() const {
  switch (kind_) {
    case Kind::Plain:
    case Kind::ShiftedMonotone:
    case Kind::ShiftedNonneg:
      return matrix_->nrows;
    case Kind::Augmented:
      return 2 * matrix_->nrows;
    case Kind::BorderedMonotone:
    case Kind::BorderedNonneg:
      return matrix_->nrows + 1;
  }
  return 0;
}

Vector OperatorSpec::apply(const Vector& v) const {
  if (v.size() != dim()) {
    throw DimensionError("apply: vector length " + std::to_string(v.size()) +
                         " does not match operator dimension " +
                         std::to_string(dim()));
  }
  const std::size_t n = matrix_->nrows;
  switch (kind_) {
    case Kind::Plain:
      return matvec(*matrix_, v);
    case Kind::ShiftedMonotone: {
      Vector y = matvec(*matrix_, v);
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = shift_ * y[i] - v[i];
      }
      return y;
    }
    case Kind::ShiftedNonneg: {
      Vector y = matvec(*matrix_, v);
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = shift_ * v[i] - y[i];
      }
      return y;
    }
    case Kind::Augmented: {
      Vector top(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
      Vector bottom(v.begin() + static_cast<std::ptrdiff_t>(n), v.end());
      Vector y_top = matvec(*matrix_, bottom);
      Vector y_bottom = matvec_transpose(*matrix_, top);
      y_top.insert(y_top.end(), y_bottom.begin(), y_bottom.end());
      return y_top;
    }
    case Kind::BorderedMonotone: {
      // [[I - lambda*A, -A x], [-x^T, 0]] (w; s)
      Vector w(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
      const double s = v[n];
      Vector aw = matvec(*matrix_, w);
      Vector y(n + 1, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = w[i] - shift_ * aw[i] - s * border_ax_[i];
      }
      y[n] = -dot(border_x_, w);
      return y;
    }
    case Kind::BorderedNonneg: {
      // [[B - lambda*I, -x], [-x^T, 0]] (w; s)
      Vector w(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
      const double s = v[n];
      Vector bw = matvec(*matrix_, w);
      Vector y(n + 1, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = bw[i] - shift_ * w[i] - s * border_x_[i];
      }
      y[n] = -dot(border_x_, w);
      return y;
    }
  }
  throw Error("apply: unreachable");
}

Vector apply(const OperatorSpec& op, const Vector& v) { return op.apply(v); }

}  // namespace noda
