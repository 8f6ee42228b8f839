#include "noda/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "noda/errors.hpp"

namespace noda {

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string trace_to_string(const ConvergenceTrace& trace, TraceFormat format) {
  std::ostringstream out;
  if (format == TraceFormat::Csv) {
    out << kTraceCsvHeader << "\n";
    for (const StepRecord& r : trace.records) {
      out << r.k << ',' << g17(r.lambda_bar) << ',' << g17(r.gamma_k) << ','
          << g17(r.xi_k) << ',' << r.inner_iterations << ','
          << g17(r.outer_residual) << ',' << g17(r.min_x) << ','
          << (r.positive ? 1 : 0) << ',' << (r.used_bordered ? 1 : 0) << ',';
      if (r.eps_bar) out << g17(*r.eps_bar);
      out << "\n";
    }
  } else {
    out << "[";
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
      const StepRecord& r = trace.records[i];
      out << (i == 0 ? "\n" : ",\n");
      out << "  {\"k\": " << r.k << ", \"lambda_bar\": " << g17(r.lambda_bar)
          << ", \"gamma_k\": " << g17(r.gamma_k) << ", \"xi_k\": " << g17(r.xi_k)
          << ", \"inner_iterations\": " << r.inner_iterations
          << ", \"outer_residual\": " << g17(r.outer_residual)
          << ", \"min_x\": " << g17(r.min_x)
          << ", \"positive\": " << (r.positive ? "true" : "false")
          << ", \"used_bordered\": " << (r.used_bordered ? "true" : "false")
          << ", \"eps_bar\": " << (r.eps_bar ? g17(*r.eps_bar) : "null") << "}";
    }
    out << "\n]\n";
  }
  return out.str();
}

void trace_emit(const ConvergenceTrace& trace, TraceFormat format,
                const std::string& path) {
  std::ofstream f(path);
  if (!f) {
    throw Error("cannot open trace file for writing: " + path);
  }
  f << trace_to_string(trace, format);
  if (!f) {
    throw Error("trace write failed: " + path);
  }
}

std::vector<StepRecord> trace_records_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_array()) {
    throw Error("trace JSON: expected an array of records");
  }
  std::vector<StepRecord> records;
  records.reserve(j.size());
  for (const auto& e : j) {
    StepRecord r;
    r.k = e.at("k").get<std::size_t>();
    r.lambda_bar = e.at("lambda_bar").get<double>();
    r.gamma_k = e.at("gamma_k").get<double>();
    r.xi_k = e.at("xi_k").get<double>();
    r.inner_iterations = e.at("inner_iterations").get<std::size_t>();
    r.outer_residual = e.at("outer_residual").get<double>();
    r.min_x = e.at("min_x").get<double>();
    r.positive = e.at("positive").get<bool>();
    r.used_bordered = e.at("used_bordered").get<bool>();
    if (!e.at("eps_bar").is_null()) {
      r.eps_bar = e.at("eps_bar").get<double>();
    }
    records.push_back(r);
  }
  return records;
}

}  // namespace noda
