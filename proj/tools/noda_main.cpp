// Command-line front end: solve one problem with a chosen Noda-iteration
// variant, or compare several variants on the same problem.

#include <chrono>
#include <filesystem>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "noda/errors.hpp"
#include "noda/matrix_market.hpp"
#include "noda/noda_iteration.hpp"
#include "noda/problems.hpp"
#include "noda/trace_io.hpp"

namespace {

using nlohmann::json;

struct ProblemInput {
  std::string matrix_path;
  std::string generate_spec;
  bool svd = false;
};

struct LoadedProblem {
  noda::SparseMatrix matrix;
  std::optional<double> sigma_min;
  std::string description;
};

LoadedProblem load_problem(const ProblemInput& in) {
  LoadedProblem p;
  if (!in.matrix_path.empty()) {
    p.matrix = noda::read_matrix_market(in.matrix_path);
    p.description = in.matrix_path;
    if (in.svd) {
      p.matrix = noda::augment(p.matrix);
      p.description = "augmented " + p.description;
    }
    return p;
  }
  std::string text = in.generate_spec;
  if (!text.empty() && text[0] != '{') {
    std::ifstream f(text);
    if (!f) {
      throw noda::Error("cannot open problem spec file: " + text);
    }
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  noda::problems::ProblemSpec spec =
      noda::problems::ProblemSpec::from_json(json::parse(text));
  if (in.svd && spec.kind != noda::problems::ProblemSpec::Kind::AugmentedSvd) {
    noda::problems::ProblemSpec wrapped;
    wrapped.kind = noda::problems::ProblemSpec::Kind::AugmentedSvd;
    wrapped.inner = std::make_shared<const noda::problems::ProblemSpec>(spec);
    spec = wrapped;
  }
  noda::problems::BuiltProblem built = noda::problems::build(spec);
  p.matrix = std::move(built.matrix);
  p.sigma_min = built.sigma_min;
  p.description = built.description;
  return p;
}

struct MethodSpec {
  std::string label;
  noda::Mode mode;
  noda::RelaxationStrategy strategy;
};

MethodSpec parse_method(const std::string& text) {
  std::string name = text;
  std::string arg;
  if (const auto pos = text.find(':'); pos != std::string::npos) {
    name = text.substr(0, pos);
    arg = text.substr(pos + 1);
  }
  MethodSpec m;
  m.label = text;
  if (name == "ni") {
    m.mode = noda::Mode::NI;
    m.strategy = noda::RelaxationStrategy::exact_ni();
  } else if (name == "mni") {
    m.mode = noda::Mode::MNI;
    m.strategy = noda::RelaxationStrategy::exact_ni();
  } else if (name == "ini" || name == "mini") {
    m.mode = name == "ini" ? noda::Mode::INI : noda::Mode::MINI;
    if (arg.empty() || arg == "adaptive") {
      m.strategy = noda::RelaxationStrategy::adaptive();
    } else {
      const double gamma = std::stod(arg);
      if (!(gamma > 0.0 && gamma < 1.0)) {
        throw noda::Error("gamma must lie in (0, 1): " + text);
      }
      m.strategy = noda::RelaxationStrategy::fixed(gamma);
    }
  } else {
    throw noda::Error("unknown method: " + text);
  }
  return m;
}

bool matrix_is_nonnegative(const noda::SparseMatrix& m) {
  for (double v : m.values) {
    if (v < 0.0) return false;
  }
  return true;
}

struct RunReport {
  std::string method;
  noda::RunResult result;
  double wall_seconds = 0.0;
  bool b_form = false;
  bool converged = false;
};

RunReport execute(const MethodSpec& method, const LoadedProblem& problem,
                  double tol, std::size_t max_outer) {
  noda::SolverConfig cfg;
  cfg.strategy = method.strategy;
  cfg.outer_tol = tol;
  cfg.max_outer = max_outer;
  cfg.mode = method.mode;

  RunReport rep;
  rep.method = method.label;

  const bool nonneg = matrix_is_nonnegative(problem.matrix);
  const auto t0 = std::chrono::steady_clock::now();
  switch (method.mode) {
    case noda::Mode::NI:
      if (nonneg) {
        rep.b_form = true;
        rep.result = noda::run_ni(problem.matrix, cfg);
      } else {
        // Exact-solve INI is the NI-equivalent iteration for a monotone
        // matrix that is not itself nonnegative.
        rep.result = noda::run_ini(problem.matrix, cfg, {}, problem.sigma_min);
      }
      break;
    case noda::Mode::MNI:
      if (!nonneg) {
        throw noda::Error(
            "mni operates on a nonnegative matrix; use mini for monotone "
            "matrices");
      }
      rep.b_form = true;
      rep.result = noda::run_mni(problem.matrix, cfg);
      break;
    case noda::Mode::INI:
      rep.result = noda::run_ini(problem.matrix, cfg, {}, problem.sigma_min);
      break;
    case noda::Mode::MINI:
      rep.result = noda::run_mini(problem.matrix, cfg, {}, problem.sigma_min);
      break;
  }
  const auto t1 = std::chrono::steady_clock::now();
  rep.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  rep.converged = rep.result.trace.outcome == noda::RunStatus::Converged;
  return rep;
}

json summary_json(const RunReport& rep, const LoadedProblem& problem,
                  const std::string& trace_path, bool svd) {
  const auto& trace = rep.result.trace;
  const std::size_t outer = trace.records.size();
  const std::size_t inner = rep.result.total_inner_iterations;
  json s;
  s["method"] = rep.method;
  s["problem"] = problem.description;
  s["n"] = problem.matrix.nrows;
  if (rep.b_form) {
    s["rho"] = rep.result.value;
    s["sigma_min"] = nullptr;
  } else {
    s["sigma_min"] = rep.result.value;
  }
  s["converged"] = rep.converged;
  switch (trace.outcome) {
    case noda::RunStatus::Converged:
      s["outcome"] = "converged";
      break;
    case noda::RunStatus::MaxOuterReached:
      s["outcome"] = "max_outer_reached";
      break;
    case noda::RunStatus::Failed:
      s["outcome"] = "failed";
      s["failure_reason"] = trace.failure_reason;
      break;
  }
  s["outer_iterations"] = outer;
  s["inner_iterations"] = inner;
  s["i_ave"] = outer == 0
                   ? 0
                   : static_cast<long long>(std::llround(
                         static_cast<double>(inner) / static_cast<double>(outer)));
  s["wall_time_seconds"] = rep.wall_seconds;
  s["positivity"] =
      !rep.result.x.empty() && noda::min_value(rep.result.x) > 0.0;
  s["trace_path"] = trace_path.empty() ? json() : json(trace_path);
  if (svd && !rep.b_form) {
    const std::size_t n = problem.matrix.nrows / 2;
    noda::Vector left(rep.result.x.begin(),
                      rep.result.x.begin() + static_cast<std::ptrdiff_t>(n));
    noda::Vector right(rep.result.x.begin() + static_cast<std::ptrdiff_t>(n),
                       rep.result.x.end());
    s["left_singular_vector"] = noda::normalized(left);
    s["right_singular_vector"] = noda::normalized(right);
  }
  return s;
}

int cmd_solve(const ProblemInput& input, const std::string& method_text,
              double tol, std::size_t max_outer, const std::string& trace_path,
              const std::string& trace_format) {
  const LoadedProblem problem = load_problem(input);
  const MethodSpec method = parse_method(method_text);
  const RunReport rep = execute(method, problem, tol, max_outer);

  if (!trace_path.empty()) {
    const noda::TraceFormat fmt = trace_format == "json"
                                      ? noda::TraceFormat::Json
                                      : noda::TraceFormat::Csv;
    noda::trace_emit(rep.result.trace, fmt, trace_path);
  }
  std::cout << summary_json(rep, problem, trace_path, input.svd).dump()
            << std::endl;
  return rep.converged ? 0 : 2;
}

int cmd_compare(const ProblemInput& input, const std::string& methods_text,
                double tol, std::size_t max_outer,
                const std::string& trace_dir) {
  const LoadedProblem problem = load_problem(input);

  std::vector<std::string> labels;
  std::stringstream ss(methods_text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) labels.push_back(item);
  }
  if (labels.empty()) {
    throw noda::Error("--methods needs at least one method");
  }

  json rows = json::array();
  bool all_converged = true;
  std::printf("problem: %s (n=%zu)\n", problem.description.c_str(),
              problem.matrix.nrows);
  std::printf("%-14s %8s %8s %6s %10s  %s\n", "Method", "I_outer", "I_inner",
              "I_ave", "CPU(s)", "Positivity");
  for (const std::string& label : labels) {
    try {
      const MethodSpec method = parse_method(label);
      RunReport rep = execute(method, problem, tol, max_outer);
      if (!trace_dir.empty()) {
        std::filesystem::create_directories(trace_dir);
        std::string name = label;
        for (char& c : name) {
          if (c == ':' || c == '.') c = '_';
        }
        noda::trace_emit(rep.result.trace, noda::TraceFormat::Csv,
                         trace_dir + "/" + name + ".csv");
      }
      const std::size_t outer = rep.result.trace.records.size();
      const std::size_t inner = rep.result.total_inner_iterations;
      const long long iave =
          outer == 0 ? 0
                     : static_cast<long long>(std::llround(
                           static_cast<double>(inner) /
                           static_cast<double>(outer)));
      const bool positive =
          !rep.result.x.empty() && noda::min_value(rep.result.x) > 0.0;
      std::printf("%-14s %8zu %8zu %6lld %10.3f  %s%s\n", label.c_str(), outer,
                  inner, iave, rep.wall_seconds, positive ? "Yes" : "No",
                  rep.converged ? "" : "  [not converged]");
      rows.push_back(summary_json(rep, problem, "", false));
      all_converged = all_converged && rep.converged;
    } catch (const std::exception& e) {
      std::printf("%-14s failed: %s\n", label.c_str(), e.what());
      json row;
      row["method"] = label;
      row["error"] = e.what();
      rows.push_back(row);
      all_converged = false;
    }
  }
  std::cout << rows.dump() << std::endl;
  return all_converged ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smallest eigenpairs of monotone matrices by Noda-type "
               "inner-outer iterations"};
  app.require_subcommand(1);

  ProblemInput input;
  std::string method = "ini";
  std::string methods;
  double tol = 1e-10;
  std::size_t max_outer = 500;
  std::string trace_path;
  std::string trace_format = "csv";
  std::string trace_dir;
  double gamma = -1.0;
  bool adaptive = false;

  CLI::App* solve = app.add_subcommand("solve", "run one method");
  solve->add_option("--matrix", input.matrix_path,
                    "Matrix Market file with the problem matrix");
  solve->add_option("--generate", input.generate_spec,
                    "problem spec (inline JSON or a path to one)");
  solve->add_option("--method", method, "ni | ini | mini | mni");
  solve->add_option("--gamma", gamma, "fixed relaxation factor in (0,1)");
  solve->add_flag("--adaptive", adaptive, "adaptive relaxation factors");
  solve->add_option("--tol", tol, "outer stopping tolerance");
  solve->add_option("--max-outer", max_outer, "outer iteration cap");
  solve->add_option("--trace", trace_path, "write the convergence trace here");
  solve->add_option("--format", trace_format, "trace format: csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  solve->add_flag("--svd", input.svd,
                  "augment the matrix and report its smallest singular triplet");

  CLI::App* compare = app.add_subcommand(
      "compare", "run several methods on the identical problem");
  compare->add_option("--matrix", input.matrix_path, "Matrix Market file");
  compare->add_option("--generate", input.generate_spec, "problem spec");
  compare->add_option("--methods", methods,
                      "comma list, e.g. ini:0.8,ini:0.5,ni,ini:adaptive")
      ->required();
  compare->add_option("--tol", tol, "outer stopping tolerance");
  compare->add_option("--max-outer", max_outer, "outer iteration cap");
  compare->add_option("--trace-dir", trace_dir,
                      "write one CSV trace per method into this directory");
  compare->add_flag("--svd", input.svd, "augment the matrix first");

  CLI11_PARSE(app, argc, argv);

  try {
    if (input.matrix_path.empty() == input.generate_spec.empty()) {
      throw noda::Error("exactly one of --matrix or --generate is required");
    }
    if (solve->parsed()) {
      if (gamma > 0.0 && adaptive) {
        throw noda::Error("--gamma and --adaptive are mutually exclusive");
      }
      std::string method_text = method;
      if (method == "ini" || method == "mini") {
        if (gamma > 0.0) {
          std::ostringstream os;
          os << method << ":" << gamma;
          method_text = os.str();
        } else {
          method_text = method + ":adaptive";
        }
      }
      return cmd_solve(input, method_text, tol, max_outer, trace_path,
                       trace_format);
    }
    return cmd_compare(input, methods, tol, max_outer, trace_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
