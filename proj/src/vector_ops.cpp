#include "noda/vector_ops.hpp"

#include <cmath>
#include <limits>

#include "noda/errors.hpp"

namespace noda {

double dot(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) {
    throw DimensionError("dot: length mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    s += u[i] * v[i];
  }
  return s;
}

double norm2(const Vector& v) {
  double s = 0.0;
  for (double x : v) {
    s += x * x;
  }
  return std::sqrt(s);
}

double min_value(const Vector& v) {
  if (v.empty()) {
    throw DimensionError("min_value: empty vector");
  }
  double m = v[0];
  for (double x : v) {
    if (x < m) m = x;
  }
  return m;
}

bool all_finite(const Vector& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

bool all_positive(const Vector& v) {
  for (double x : v) {
    if (!(x > 0.0)) return false;
  }
  return !v.empty();
}

Vector normalized(const Vector& v) {
  const double n = norm2(v);
  if (n == 0.0 || !std::isfinite(n)) {
    throw Error("normalized: zero or non-finite vector");
  }
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = v[i] / n;
  }
  return out;
}

RatioBounds ratio_extrema(const Vector& w, const Vector& v) {
  if (w.size() != v.size()) {
    throw DimensionError("ratio_extrema: length mismatch");
  }
  if (v.empty()) {
    throw DimensionError("ratio_extrema: empty vectors");
  }
  RatioBounds b{std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) {
      throw NonPositiveDenominator("ratio_extrema: denominator component " +
                                   std::to_string(i) + " is not positive");
    }
    const double r = w[i] / v[i];
    if (r < b.min_ratio) b.min_ratio = r;
    if (r > b.max_ratio) b.max_ratio = r;
  }
  return b;
}

double min_ratio(const Vector& w, const Vector& v) {
  return ratio_extrema(w, v).min_ratio;
}

double max_ratio(const Vector& w, const Vector& v) {
  return ratio_extrema(w, v).max_ratio;
}

}  // namespace noda
