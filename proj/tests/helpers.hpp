#pragma once

#include <cmath>
#include <initializer_list>

#include "fusionkit/numkit.hpp"

namespace fusionkit::test {

/// Matrix from columns given as initializer lists.
inline Mat cols(std::initializer_list<std::initializer_list<double>> columns) {
  const auto m = static_cast<Eigen::Index>(columns.begin()->size());
  Mat out(m, static_cast<Eigen::Index>(columns.size()));
  Eigen::Index c = 0;
  for (const auto& col : columns) {
    Eigen::Index r = 0;
    for (double x : col) out(r++, c) = x;
    ++c;
  }
  return out;
}

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Mat rows2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

inline const double kInvSqrt2 = std::sqrt(0.5);

}  // namespace fusionkit::test
