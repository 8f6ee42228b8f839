#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "noda/krylov.hpp"
#include "noda/sparse_matrix.hpp"
#include "noda/vector_ops.hpp"

namespace noda {

enum class Mode { NI, INI, MNI, MINI };

struct RelaxationStrategy {
  enum class Kind { ExactNI, FixedGamma, Adaptive };

  Kind kind = Kind::Adaptive;
  double gamma = 0.5;  // FixedGamma only

  static RelaxationStrategy exact_ni() { return {Kind::ExactNI, 0.0}; }
  static RelaxationStrategy fixed(double gamma) {
    return {Kind::FixedGamma, gamma};
  }
  static RelaxationStrategy adaptive() { return {Kind::Adaptive, 0.0}; }

  std::string name() const;
};

struct SolverConfig {
  RelaxationStrategy strategy{};
  double outer_tol = 1e-10;
  std::size_t max_outer = 500;
  InnerConfig inner{};
  Mode mode = Mode::INI;
  // When unset, symmetry is probed once per run to pick the inner solver.
  std::optional<bool> symmetric_hint{};
  // Run every outer step through the bordered system (NI/MNI equivalence
  // testing); only meaningful for MNI.
  bool force_bordered = false;
};

/// Current shift (lambda_bar, or lambda_hat in the B-form algorithms) and a
/// unit positive iterate.
struct OuterState {
  double lambda_bar = 0.0;
  Vector x;
  std::size_t k = 0;
};

struct StepRecord {
  std::size_t k = 0;
  double lambda_bar = 0.0;
  double gamma_k = 0.0;
  double xi_k = 0.0;  // achieved (recomputed) inner residual
  std::size_t inner_iterations = 0;
  double outer_residual = 0.0;
  double min_x = 0.0;
  bool positive = false;
  bool used_bordered = false;
  std::optional<double> eps_bar;  // (lambda - rho)/rho when the true value is known
  // Tightening re-solves taken by the positivity guard (not part of the
  // serialized trace schema).
  std::size_t retries = 0;
};

enum class RunStatus { Converged, MaxOuterReached, Failed };

struct ConvergenceTrace {
  std::vector<StepRecord> records;
  RunStatus outcome = RunStatus::Failed;
  std::string failure_reason;
};

struct RunResult {
  double value = 0.0;  // sigma_min estimate (A-form) or rho(B) (B-form)
  Vector x;
  ConvergenceTrace trace;
  std::size_t total_inner_iterations = 0;
};

// Manufactures a starting shift lambda_bar_0 > rho(A^{-1}) from one accurate
// solve A w = x0: max(w/x0) * (1 + 1e-8) + 1e-12. Retries once at tol/100
// when w comes back with a nonpositive component, then throws
// NonPositiveSolution.
double initial_shift(const SparseMatrix& a, const Vector& x0,
                     const InnerConfig& inner, bool symmetric);

// max(gamma_k * min(x_k) / lambda_bar_k, 1e-13) — the practical inner
// tolerance with sep(0, A) replaced by 1/lambda_bar.
double inner_tolerance(const OuterState& state, double gamma_k);

// || A x - x / lambda_bar || / sqrt(norm1(A) * norm_inf(A)). Run loops cache
// the norm product; this standalone form recomputes it.
double outer_residual(const SparseMatrix& a, const OuterState& state);

// Re-solves with a ten-fold tighter tolerance (up to four times) while the
// solution has a nonpositive component; throws PositivityLost when all
// attempts come back nonpositive.
InnerSolveOutcome positivity_guard(const OperatorSpec& op, const Vector& rhs,
                                   InnerSolveOutcome first, double tol,
                                   const InnerConfig& inner, bool symmetric,
                                   std::size_t& retries,
                                   std::size_t& total_iterations);

// One INI step: solve (lambda_bar A - I) y = A x to the inner tolerance,
// guard positivity, update lambda_bar by the damped min-ratio, normalize.
// This standalone form probes symmetry per call; whole iterations should go
// through run_* which caches that.
std::pair<OuterState, StepRecord> ini_step(const SparseMatrix& a,
                                           const OuterState& state,
                                           double gamma_k,
                                           const SolverConfig& cfg);

// One exact-NI step on a nonnegative matrix: solve (lambda_hat I - B) y = x
// to 1e-14, normalize, recompute the max-ratio shift.
std::pair<OuterState, StepRecord> ni_step(const SparseMatrix& b,
                                          const OuterState& state,
                                          const SolverConfig& cfg);

// One bordered step (rank-one update form). monotone_form selects the A-form
// (blocks I - lambda*A and -A x) versus the B-form (B - lambda*I and -x).
std::pair<OuterState, StepRecord> mni_bordered_step(const SparseMatrix& m,
                                                    const OuterState& state,
                                                    const SolverConfig& cfg,
                                                    bool monotone_form);

// Inexact Noda iteration on a monotone matrix; returns the sigma_min
// estimate 1/lambda_bar and the positive unit eigenvector.
RunResult run_ini(const SparseMatrix& a, const SolverConfig& cfg,
                  std::optional<Vector> x0 = {},
                  std::optional<double> true_sigma_min = {});

// Exact Noda iteration on a nonnegative irreducible matrix; returns the
// Perron root estimate and vector.
RunResult run_ni(const SparseMatrix& b, const SolverConfig& cfg,
                 std::optional<Vector> x0 = {},
                 std::optional<double> true_rho = {});

// Modified NI: NI steps while || B x - lambda_hat x || > sqrt(outer_tol),
// bordered steps afterwards.
RunResult run_mni(const SparseMatrix& b, const SolverConfig& cfg,
                  std::optional<Vector> x0 = {},
                  std::optional<double> true_rho = {});

// Modified INI on a monotone matrix: INI phase down to sqrt(outer_tol) on
// the normalized residual, then bordered steps.
RunResult run_mini(const SparseMatrix& a, const SolverConfig& cfg,
                   std::optional<Vector> x0 = {},
                   std::optional<double> true_sigma_min = {});

}  // namespace noda
