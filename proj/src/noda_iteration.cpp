#include "noda/noda_iteration.hpp"

#include <cmath>
#include <string>

#include "noda/errors.hpp"
#include "noda/operators.hpp"

namespace noda {

namespace {

constexpr double kExactNiInnerTol = 1e-14;
constexpr double kInnerTolFloor = 1e-13;
constexpr double kDegenerateRhsNorm = 1e-15;

Vector default_x0(std::size_t n) {
  return Vector(n, 1.0 / std::sqrt(static_cast<double>(n)));
}

void check_square(const SparseMatrix& m, const char* who) {
  if (m.nrows != m.ncols || m.nrows == 0) {
    throw DimensionError(std::string(who) + ": matrix must be square");
  }
}

Vector prepared_x0(const SparseMatrix& m, const std::optional<Vector>& x0) {
  Vector x = x0 ? *x0 : default_x0(m.nrows);
  if (x.size() != m.nrows) {
    throw DimensionError("starting vector length mismatch");
  }
  if (!all_finite(x) || !all_positive(x)) {
    throw Error("starting vector must be finite and strictly positive");
  }
  return normalized(x);
}

InnerSolveOutcome run_inner(const OperatorSpec& op, const Vector& rhs,
                            const InnerConfig& cfg, bool symmetric) {
  return symmetric ? solve_symmetric(op, rhs, cfg)
                   : solve_general(op, rhs, cfg);
}

// Shared per-run bookkeeping: symmetry routing, cached stopping-criterion
// scale, optional true eigenvalue for eps_bar logging.
struct Engine {
  const SparseMatrix& m;
  const SolverConfig& cfg;
  bool b_form;  // B-form: shifted-nonneg solves, absolute residual test
  bool symmetric;
  double norm_scale;
  std::optional<double> rho_true;

  Engine(const SparseMatrix& matrix, const SolverConfig& config, bool bform,
         std::optional<double> true_rho)
      : m(matrix),
        cfg(config),
        b_form(bform),
        symmetric(config.symmetric_hint ? *config.symmetric_hint
                                        : is_symmetric(matrix)),
        norm_scale(std::sqrt(norm1(matrix) * norm_inf(matrix))),
        rho_true(true_rho) {}

  double residual(const OuterState& s) const {
    Vector r = matvec(m, s.x);
    if (b_form) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] -= s.lambda_bar * s.x[i];
      }
      return norm2(r);
    }
    const double inv = 1.0 / s.lambda_bar;
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] -= inv * s.x[i];
    }
    return norm2(r) / norm_scale;
  }

  std::optional<double> eps_bar(double lambda) const {
    if (!rho_true) return std::nullopt;
    return (lambda - *rho_true) / *rho_true;
  }

  double gamma_for_step(std::size_t k, std::optional<double> prev_lambda,
                        double lambda) const {
    switch (cfg.strategy.kind) {
      case RelaxationStrategy::Kind::ExactNI:
        return 0.0;
      case RelaxationStrategy::Kind::FixedGamma:
        return cfg.strategy.gamma;
      case RelaxationStrategy::Kind::Adaptive:
        // First step has no previous shift; fall back to an exact-floor solve.
        if (k == 0 || !prev_lambda) return 0.0;
        return (*prev_lambda - lambda) / *prev_lambda;
    }
    return 0.0;
  }

  std::pair<OuterState, StepRecord> ini_step(const OuterState& state,
                                             double gamma_k) const;
  std::pair<OuterState, StepRecord> ni_step(const OuterState& state) const;
  std::pair<OuterState, StepRecord> bordered_step(const OuterState& state) const;
};

std::pair<OuterState, StepRecord> Engine::ini_step(const OuterState& state,
                                                   double gamma_k) const {
  const bool exact = cfg.strategy.kind == RelaxationStrategy::Kind::ExactNI;
  const double tol =
      exact ? kExactNiInnerTol : inner_tolerance(state, gamma_k);
  const Vector rhs = matvec(m, state.x);
  const OperatorSpec op = OperatorSpec::shifted_monotone(state.lambda_bar, m);

  InnerConfig icfg = cfg.inner;
  icfg.tol_abs = tol;
  std::size_t total_iterations = 0;
  InnerSolveOutcome out = run_inner(op, rhs, icfg, symmetric);
  total_iterations += out.iterations;
  std::size_t retries = 0;
  out = positivity_guard(op, rhs, std::move(out), tol, cfg.inner, symmetric,
                         retries, total_iterations);

  // Whether the achieved residual honors the inner-tolerance bound. When the
  // solver could not attain it (the shifted system is near its floating-point
  // accuracy floor), widen the update damping so the shift provably stays
  // above rho(A^{-1}); the positivity flag records that this step's
  // positivity was no longer guaranteed by the bound.
  const bool bound_met = out.residual_norm <= 1.01 * tol;
  double gamma_update = gamma_k;
  if (!bound_met) {
    const double achieved_gamma =
        out.residual_norm * state.lambda_bar / min_value(state.x);
    gamma_update = std::min(0.99, std::max(gamma_k, achieved_gamma));
  }

  const double mr = min_ratio(state.x, out.y);
  const double lambda_new = state.lambda_bar - (1.0 - gamma_update) * mr;
  OuterState next{lambda_new, normalized(out.y), state.k + 1};

  StepRecord rec;
  rec.k = next.k;
  rec.lambda_bar = lambda_new;
  rec.gamma_k = gamma_k;
  rec.xi_k = out.residual_norm;
  rec.inner_iterations = total_iterations;
  rec.outer_residual = residual(next);
  rec.min_x = min_value(next.x);
  rec.positive = rec.min_x > 0.0 && bound_met;
  rec.used_bordered = false;
  rec.eps_bar = eps_bar(lambda_new);
  rec.retries = retries;
  return {std::move(next), std::move(rec)};
}

std::pair<OuterState, StepRecord> Engine::ni_step(const OuterState& state) const {
  // Exact NI on the nonnegative matrix: (lambda_hat I - B) y = x.
  const OperatorSpec op = OperatorSpec::shifted_nonneg(state.lambda_bar, m);
  InnerConfig icfg = cfg.inner;
  icfg.tol_abs = kExactNiInnerTol;
  std::size_t total_iterations = 0;
  InnerSolveOutcome out = run_inner(op, state.x, icfg, symmetric);
  total_iterations += out.iterations;
  std::size_t retries = 0;
  out = positivity_guard(op, state.x, std::move(out), kExactNiInnerTol,
                         cfg.inner, symmetric, retries, total_iterations);

  OuterState next;
  next.x = normalized(out.y);
  // Max-ratio shift update; it stays above rho for any positive iterate.
  next.lambda_bar = max_ratio(matvec(m, next.x), next.x);
  next.k = state.k + 1;

  StepRecord rec;
  rec.k = next.k;
  rec.lambda_bar = next.lambda_bar;
  rec.gamma_k = 0.0;
  rec.xi_k = out.residual_norm;
  rec.inner_iterations = total_iterations;
  rec.outer_residual = residual(next);
  rec.min_x = min_value(next.x);
  rec.positive = rec.min_x > 0.0 && out.residual_norm <= 1.01 * kExactNiInnerTol;
  rec.used_bordered = false;
  rec.eps_bar = eps_bar(next.lambda_bar);
  rec.retries = retries;
  return {std::move(next), std::move(rec)};
}

std::pair<OuterState, StepRecord> Engine::bordered_step(
    const OuterState& state) const {
  const std::size_t n = m.nrows;
  const Vector mx = matvec(m, state.x);
  Vector rhs(n + 1, 0.0);
  if (b_form) {
    // (lambda_hat I - B) x
    for (std::size_t i = 0; i < n; ++i) {
      rhs[i] = state.lambda_bar * state.x[i] - mx[i];
    }
  } else {
    // lambda_bar A x - x
    for (std::size_t i = 0; i < n; ++i) {
      rhs[i] = state.lambda_bar * mx[i] - state.x[i];
    }
  }

  // Fixed-point guard: at the exact eigenpair the rhs vanishes. The
  // threshold tracks the rounding floor of the subtraction forming it.
  const double rhs_scale =
      b_form ? std::abs(state.lambda_bar) + norm2(mx)
             : std::abs(state.lambda_bar) * norm2(mx) + 1.0;
  const double degenerate_threshold =
      std::max(kDegenerateRhsNorm, 16.0 * 2.22e-16 * rhs_scale);
  Vector top(rhs.begin(), rhs.end() - 1);
  if (norm2(top) <= degenerate_threshold) {
    // At the exact eigenpair the update degenerates to 0/0; report the state
    // unchanged and let the caller declare convergence.
    StepRecord rec;
    rec.k = state.k;
    rec.lambda_bar = state.lambda_bar;
    rec.outer_residual = residual(state);
    rec.min_x = min_value(state.x);
    rec.positive = rec.min_x > 0.0;
    rec.used_bordered = true;
    rec.eps_bar = eps_bar(state.lambda_bar);
    return {state, std::move(rec)};
  }

  const OperatorSpec op =
      b_form ? OperatorSpec::bordered_nonneg(state.lambda_bar, m, state.x)
             : OperatorSpec::bordered_monotone(state.lambda_bar, m, state.x);
  const InnerSolveOutcome out = solve_bordered(op, rhs, cfg.inner);

  const double delta = out.y[n];
  // Near the eigenpair delta tends to 0 and can drop under the solve's own
  // resolution (roughly the achieved residual amplified by the bordered
  // inverse); below that, its sign carries no information.
  const double delta_floor =
      1e3 * out.residual_norm +
      1e-14 * std::max(1.0, std::abs(state.lambda_bar));
  if (!b_form && std::abs(delta) <= delta_floor) {
    // The eigenvalue update would divide by an unresolved delta (the 0/0
    // regime); report the state unchanged so the caller declares convergence.
    StepRecord rec;
    rec.k = state.k;
    rec.lambda_bar = state.lambda_bar;
    rec.outer_residual = residual(state);
    rec.min_x = min_value(state.x);
    rec.positive = rec.min_x > 0.0;
    rec.used_bordered = true;
    rec.eps_bar = eps_bar(state.lambda_bar);
    return {state, std::move(rec)};
  }
  if (delta > delta_floor) {
    throw DeltaSignError("bordered step: delta = " + std::to_string(delta) +
                         " is not negative");
  }
  // B-form updates via the max ratio and never divide by delta, so an
  // unresolved delta sign just falls through to the monotone-decrease guard.
  Vector w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = state.x[i] + out.y[i];
  }
  if (!all_positive(w)) {
    throw PositivityLost("bordered step: updated iterate is not positive");
  }

  OuterState next;
  next.x = normalized(w);
  next.k = state.k + 1;
  if (b_form) {
    next.lambda_bar = max_ratio(matvec(m, next.x), next.x);
  } else {
    // y = -(x + dy)/delta solves (lambda A - I) y = A x exactly; the damped
    // update with gamma = 0 is then the plain min-ratio decrease.
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = -w[i] / delta;
    }
    next.lambda_bar = state.lambda_bar - min_ratio(state.x, y);
  }

  StepRecord rec;
  rec.k = next.k;
  rec.lambda_bar = next.lambda_bar;
  rec.gamma_k = 0.0;
  rec.xi_k = out.residual_norm;
  rec.inner_iterations = out.iterations;
  rec.outer_residual = residual(next);
  rec.min_x = min_value(next.x);
  rec.positive = rec.min_x > 0.0;
  rec.used_bordered = true;
  rec.eps_bar = eps_bar(next.lambda_bar);
  return {std::move(next), std::move(rec)};
}

// Outer loop shared by all four algorithm variants.
RunResult outer_loop(const Engine& eng, OuterState state, bool bordered_switch,
                     bool always_bordered) {
  const SolverConfig& cfg = eng.cfg;
  RunResult result;
  result.x = state.x;
  result.trace.outcome = RunStatus::MaxOuterReached;

  const double switch_threshold = std::sqrt(cfg.outer_tol);
  std::optional<double> prev_lambda;

  for (std::size_t k = 0; k < cfg.max_outer; ++k) {
    const double res = eng.residual(state);
    if (res <= cfg.outer_tol) {
      result.trace.outcome = RunStatus::Converged;
      break;
    }

    const bool use_bordered =
        always_bordered || (bordered_switch && res <= switch_threshold);

    std::pair<OuterState, StepRecord> step;
    if (use_bordered) {
      step = eng.bordered_step(state);
      if (step.first.k == state.k) {
        // Degenerate bordered fixed point: declare convergence.
        result.trace.outcome = RunStatus::Converged;
        break;
      }
    } else if (eng.b_form) {
      step = eng.ni_step(state);
    } else {
      const double gamma =
          eng.gamma_for_step(k, prev_lambda, state.lambda_bar);
      step = eng.ini_step(state, gamma);
    }

    result.total_inner_iterations += step.second.inner_iterations;

    if (!(step.first.lambda_bar < state.lambda_bar)) {
      // The shift update underflowed at working precision; no further
      // progress is possible.
      result.trace.outcome = RunStatus::Failed;
      result.trace.failure_reason =
          "eigenvalue update stalled at floating-point resolution";
      break;
    }

    prev_lambda = state.lambda_bar;
    state = std::move(step.first);
    result.trace.records.push_back(std::move(step.second));
  }

  result.value = eng.b_form ? state.lambda_bar : 1.0 / state.lambda_bar;
  result.x = state.x;
  return result;
}

void check_nonnegative(const SparseMatrix& b) {
  for (double v : b.values) {
    if (v < 0.0) {
      throw Error("B-form iteration requires a nonnegative matrix");
    }
  }
}

}  // namespace

std::string RelaxationStrategy::name() const {
  switch (kind) {
    case Kind::ExactNI:
      return "exact";
    case Kind::FixedGamma:
      return "gamma=" + std::to_string(gamma);
    case Kind::Adaptive:
      return "adaptive";
  }
  return "?";
}

double initial_shift(const SparseMatrix& a, const Vector& x0,
                     const InnerConfig& inner, bool symmetric) {
  check_square(a, "initial_shift");
  const OperatorSpec op = OperatorSpec::plain(a);
  InnerConfig cfg = inner;
  cfg.tol_abs = 1e-12;
  bool usable = false;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const InnerSolveOutcome out = run_inner(op, x0, cfg, symmetric);
    // A best-effort solve at the solver's accuracy floor is still a valid
    // shift source as long as the inflation covers its error:
    // |change in max(w/x0)| <= ||A^{-1} f|| / min(x0).
    const bool solid = out.converged ||
                       out.residual_norm <= 1e-6 * norm2(x0);
    usable = usable || solid;
    if (solid && all_positive(out.y)) {
      const double rel_error = 8.0 * out.residual_norm / min_value(x0);
      return max_ratio(out.y, x0) * (1.0 + 1e-8 + rel_error) + 1e-12;
    }
    cfg.tol_abs /= 100.0;
  }
  if (!usable) {
    throw Error("initial_shift: the starting solve A w = x0 did not converge");
  }
  throw NonPositiveSolution(
      "initial_shift: A^{-1} x0 has a nonpositive component (is A monotone?)");
}

double inner_tolerance(const OuterState& state, double gamma_k) {
  return std::max(gamma_k * min_value(state.x) / state.lambda_bar,
                  kInnerTolFloor);
}

double outer_residual(const SparseMatrix& a, const OuterState& state) {
  Vector r = matvec(a, state.x);
  const double inv = 1.0 / state.lambda_bar;
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] -= inv * state.x[i];
  }
  return norm2(r) / std::sqrt(norm1(a) * norm_inf(a));
}

InnerSolveOutcome positivity_guard(const OperatorSpec& op, const Vector& rhs,
                                   InnerSolveOutcome first, double tol,
                                   const InnerConfig& inner, bool symmetric,
                                   std::size_t& retries,
                                   std::size_t& total_iterations) {
  retries = 0;
  InnerSolveOutcome out = std::move(first);
  double current_tol = tol;
  while (!all_positive(out.y)) {
    if (retries == 4) {
      throw PositivityLost(
          "positivity guard exhausted its retries with a nonpositive iterate");
    }
    current_tol *= 0.1;
    InnerConfig cfg = inner;
    cfg.tol_abs = current_tol;
    out = run_inner(op, rhs, cfg, symmetric);
    total_iterations += out.iterations;
    ++retries;
  }
  return out;
}

std::pair<OuterState, StepRecord> ini_step(const SparseMatrix& a,
                                           const OuterState& state,
                                           double gamma_k,
                                           const SolverConfig& cfg) {
  check_square(a, "ini_step");
  Engine eng(a, cfg, /*bform=*/false, std::nullopt);
  return eng.ini_step(state, gamma_k);
}

std::pair<OuterState, StepRecord> ni_step(const SparseMatrix& b,
                                          const OuterState& state,
                                          const SolverConfig& cfg) {
  check_square(b, "ni_step");
  check_nonnegative(b);
  Engine eng(b, cfg, /*bform=*/true, std::nullopt);
  return eng.ni_step(state);
}

std::pair<OuterState, StepRecord> mni_bordered_step(const SparseMatrix& m,
                                                    const OuterState& state,
                                                    const SolverConfig& cfg,
                                                    bool monotone_form) {
  check_square(m, "mni_bordered_step");
  Engine eng(m, cfg, /*bform=*/!monotone_form, std::nullopt);
  return eng.bordered_step(state);
}

RunResult run_ini(const SparseMatrix& a, const SolverConfig& cfg,
                  std::optional<Vector> x0,
                  std::optional<double> true_sigma_min) {
  check_square(a, "run_ini");
  std::optional<double> rho;
  if (true_sigma_min) rho = 1.0 / *true_sigma_min;
  Engine eng(a, cfg, /*bform=*/false, rho);

  OuterState state;
  state.x = prepared_x0(a, x0);
  state.lambda_bar = initial_shift(a, state.x, cfg.inner, eng.symmetric);
  return outer_loop(eng, std::move(state), /*bordered_switch=*/false,
                    /*always_bordered=*/false);
}

RunResult run_ni(const SparseMatrix& b, const SolverConfig& cfg,
                 std::optional<Vector> x0, std::optional<double> true_rho) {
  check_square(b, "run_ni");
  check_nonnegative(b);
  Engine eng(b, cfg, /*bform=*/true, true_rho);

  OuterState state;
  state.x = prepared_x0(b, x0);
  state.lambda_bar = max_ratio(matvec(b, state.x), state.x);
  return outer_loop(eng, std::move(state), /*bordered_switch=*/false,
                    /*always_bordered=*/false);
}

RunResult run_mni(const SparseMatrix& b, const SolverConfig& cfg,
                  std::optional<Vector> x0, std::optional<double> true_rho) {
  check_square(b, "run_mni");
  check_nonnegative(b);
  Engine eng(b, cfg, /*bform=*/true, true_rho);

  OuterState state;
  state.x = prepared_x0(b, x0);
  state.lambda_bar = max_ratio(matvec(b, state.x), state.x);
  return outer_loop(eng, std::move(state), /*bordered_switch=*/true,
                    cfg.force_bordered);
}

RunResult run_mini(const SparseMatrix& a, const SolverConfig& cfg,
                   std::optional<Vector> x0,
                   std::optional<double> true_sigma_min) {
  check_square(a, "run_mini");
  std::optional<double> rho;
  if (true_sigma_min) rho = 1.0 / *true_sigma_min;
  Engine eng(a, cfg, /*bform=*/false, rho);

  OuterState state;
  state.x = prepared_x0(a, x0);
  state.lambda_bar = initial_shift(a, state.x, cfg.inner, eng.symmetric);
  return outer_loop(eng, std::move(state), /*bordered_switch=*/true,
                    /*always_bordered=*/false);
}

}  // namespace noda
