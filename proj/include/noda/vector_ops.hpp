#pragma once

#include <vector>

namespace noda {

using Vector = std::vector<double>;

double dot(const Vector& u, const Vector& v);
double norm2(const Vector& v);
double min_value(const Vector& v);
bool all_finite(const Vector& v);
bool all_positive(const Vector& v);

// v / ||v||_2; throws Error on a zero vector.
Vector normalized(const Vector& v);

struct RatioBounds {
  double min_ratio;
  double max_ratio;
};

// Componentwise extrema of w_i / v_i. The denominator v must be strictly
// positive; ties resolve to the first index. Throws NonPositiveDenominator.
RatioBounds ratio_extrema(const Vector& w, const Vector& v);
double min_ratio(const Vector& w, const Vector& v);
double max_ratio(const Vector& w, const Vector& v);

}  // namespace noda
