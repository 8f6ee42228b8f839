#pragma once

#include <cstddef>
#include <vector>

#include "noda/operators.hpp"
#include "noda/vector_ops.hpp"

namespace noda {

struct InnerConfig {
  double tol_abs = 1e-10;            // target on the true residual ||op(y) - b||_2
  std::size_t max_iterations = 20000;
  std::size_t restart = 50;          // used by the nonsymmetric solver
};

struct InnerSolveOutcome {
  Vector y;
  double residual_norm = 0.0;        // recomputed true residual at exit
  std::size_t iterations = 0;
  bool converged = false;
  bool stagnated = false;            // solver hit its attainable accuracy
  std::vector<double> residual_history;  // per-iteration recurrence estimates
};

// MINRES with zero initial guess for symmetric (possibly indefinite)
// operators. converged=true implies the recomputed residual is <= tol_abs.
// In debug builds a randomized three-pair symmetry probe runs first. Throws
// Breakdown when the Lanczos recurrence dies with the residual still above
// tolerance; MaxIterations is reported via converged=false.
InnerSolveOutcome solve_symmetric(const OperatorSpec& op, const Vector& b,
                                  const InnerConfig& cfg);

// Restarted GMRES with zero initial guess. Stagnation (no true-residual
// decrease across a full restart cycle) is reported via the stagnated flag.
InnerSolveOutcome solve_general(const OperatorSpec& op, const Vector& rhs,
                                const InnerConfig& cfg);

// Solves an (n+1)-dimensional bordered system to near machine precision
// (tol_abs = max(1e-13, 1e-13 * ||rhs||)) via solve_general. The rhs must
// have a zero last entry. Throws SingularBorder when the solve stalls with a
// residual above 1e-6 * ||rhs||.
InnerSolveOutcome solve_bordered(const OperatorSpec& op, const Vector& rhs,
                                 const InnerConfig& cfg);

}  // namespace noda
