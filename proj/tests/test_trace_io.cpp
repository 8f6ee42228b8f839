#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "noda/trace_io.hpp"

using namespace noda;

namespace {

ConvergenceTrace sample_trace(bool with_eps) {
  ConvergenceTrace t;
  t.outcome = RunStatus::Converged;
  for (std::size_t k = 1; k <= 3; ++k) {
    StepRecord r;
    r.k = k;
    r.lambda_bar = 3.0 / static_cast<double>(k) + 1e-13;
    r.gamma_k = 0.1 * static_cast<double>(k);
    r.xi_k = 1.7e-9 / static_cast<double>(k);
    r.inner_iterations = 10 * k;
    r.outer_residual = 1e-3 / static_cast<double>(k * k);
    r.min_x = 0.01 * static_cast<double>(k);
    r.positive = true;
    r.used_bordered = k == 3;
    if (with_eps) r.eps_bar = 1e-5 / static_cast<double>(k);
    t.records.push_back(r);
  }
  return t;
}

}  // namespace

TEST_SUITE_BEGIN("trace-io");

TEST_CASE("csv layout: header plus one line per step") {
  const std::string csv = trace_to_string(sample_trace(true), TraceFormat::Csv);
  std::stringstream ss(csv);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(ss, line)) {
    ++lines;
    if (lines == 1) {
      CHECK(line == kTraceCsvHeader);
    } else {
      CHECK(std::count(line.begin(), line.end(), ',') == 9);
    }
  }
  CHECK(lines == 4);
}

TEST_CASE("unknown eps_bar becomes an empty csv field and json null") {
  const std::string csv =
      trace_to_string(sample_trace(false), TraceFormat::Csv);
  std::stringstream ss(csv);
  std::string line;
  std::getline(ss, line);  // header
  while (std::getline(ss, line)) {
    CHECK(line.back() == ',');
  }
  const std::string json =
      trace_to_string(sample_trace(false), TraceFormat::Json);
  CHECK(json.find("\"eps_bar\": null") != std::string::npos);
}

TEST_CASE("json round trip is bit-exact") {
  const ConvergenceTrace t = sample_trace(true);
  const std::string json = trace_to_string(t, TraceFormat::Json);
  const auto records = trace_records_from_json(json);
  REQUIRE(records.size() == t.records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].k == t.records[i].k);
    CHECK(records[i].lambda_bar == t.records[i].lambda_bar);
    CHECK(records[i].gamma_k == t.records[i].gamma_k);
    CHECK(records[i].xi_k == t.records[i].xi_k);
    CHECK(records[i].inner_iterations == t.records[i].inner_iterations);
    CHECK(records[i].outer_residual == t.records[i].outer_residual);
    CHECK(records[i].min_x == t.records[i].min_x);
    CHECK(records[i].positive == t.records[i].positive);
    CHECK(records[i].used_bordered == t.records[i].used_bordered);
    CHECK(records[i].eps_bar == t.records[i].eps_bar);
  }
}

TEST_CASE("trace_emit writes the file") {
  const auto path =
      std::filesystem::temp_directory_path() / "noda_trace_test.csv";
  trace_emit(sample_trace(true), TraceFormat::Csv, path.string());
  std::ifstream f(path);
  std::string first;
  std::getline(f, first);
  CHECK(first == kTraceCsvHeader);
  std::filesystem::remove(path);
}

TEST_SUITE_END();
