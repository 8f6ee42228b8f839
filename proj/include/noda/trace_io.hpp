#pragma once

#include <string>
#include <vector>

#include "noda/noda_iteration.hpp"

namespace noda {

enum class TraceFormat { Csv, Json };

// CSV header used by trace_emit, in column order.
inline constexpr const char* kTraceCsvHeader =
    "k,lambda_bar,gamma_k,xi_k,inner_iterations,outer_residual,min_x,positive,"
    "used_bordered,eps_bar";

// Serializes a trace. CSV rows follow kTraceCsvHeader with booleans as 1/0
// and an empty eps_bar field when the true eigenvalue was unknown; JSON is
// an array of record objects with eps_bar null in that case. Floats carry 17
// significant digits so parsing them back is bit-exact.
std::string trace_to_string(const ConvergenceTrace& trace, TraceFormat format);

void trace_emit(const ConvergenceTrace& trace, TraceFormat format,
                const std::string& path);

// Parses the JSON form back into records (round-trip testing and tooling).
std::vector<StepRecord> trace_records_from_json(const std::string& text);

}  // namespace noda
