#pragma once

#include <cstddef>

#include "noda/sparse_matrix.hpp"
#include "noda/vector_ops.hpp"

namespace noda {

/// Matrix-free linear operator built on a borrowed SparseMatrix. Shifted and
/// bordered kinds are never assembled; apply() combines matvec with axpy
/// updates. The wrapped matrix must outlive the operator.
class OperatorSpec {
 public:
  enum class Kind {
    Plain,             // v -> A v
    ShiftedMonotone,   // v -> lambda * A v - v
    ShiftedNonneg,     // v -> lambda * v - B v
    Augmented,         // (u; w) -> (M w; M^T u)
    BorderedMonotone,  // [[I - lambda*A, -A x], [-x^T, 0]]
    BorderedNonneg,    // [[B - lambda*I, -x], [-x^T, 0]]
  };

  static OperatorSpec plain(const SparseMatrix& a);
  static OperatorSpec shifted_monotone(double lambda_bar, const SparseMatrix& a);
  static OperatorSpec shifted_nonneg(double lambda_hat, const SparseMatrix& b);
  static OperatorSpec augmented(const SparseMatrix& m);
  static OperatorSpec bordered_monotone(double lambda_bar, const SparseMatrix& a,
                                        const Vector& x);
  static OperatorSpec bordered_nonneg(double lambda_hat, const SparseMatrix& b,
                                      const Vector& x);

  Kind kind() const { return kind_; }
  double shift() const { return shift_; }
  const SparseMatrix& matrix() const { return *matrix_; }

  // Dimension of the induced linear map: n for plain/shifted, 2n for
  // augmented, n+1 for bordered kinds.
  std::size_t dim() const;

  Vector apply(const Vector& v) const;

 private:
  OperatorSpec(Kind kind, double shift, const SparseMatrix& m)
      : kind_(kind), shift_(shift), matrix_(&m) {}

  Kind kind_;
  double shift_;
  const SparseMatrix* matrix_;
  Vector border_x_;   // x for bordered kinds
  Vector border_ax_;  // A x, precomputed for BorderedMonotone
};

Vector apply(const OperatorSpec& op, const Vector& v);

}  // namespace noda
