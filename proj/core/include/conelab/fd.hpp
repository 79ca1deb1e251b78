#pragma once

#include <utility>

namespace conelab {

// Centered differences at two steps combined by Richardson extrapolation
// (the h^2 error term cancels).
struct FdSteps {
  double h1 = 1e-3;
  double h2 = 1e-4;
};

// Second differences at 1e-4 sit on a roundoff floor of about eps / h^2
// (1e-8 once quadrature noise is included).  Wider steps keep both the
// floor and the extrapolated truncation error near 1e-10.
inline constexpr FdSteps kSecondSteps{2e-2, 5e-3};

template <class F>
double fd_first(F&& f, FdSteps s = {}) {
  auto d = [&](double h) { return (f(h) - f(-h)) / (2.0 * h); };
  const double a = d(s.h1), b = d(s.h2);
  const double r1 = s.h1 * s.h1, r2 = s.h2 * s.h2;
  return (r1 * b - r2 * a) / (r1 - r2);
}

template <class F>
double fd_second(F&& f, FdSteps s = kSecondSteps) {
  const double f0 = f(0.0);
  auto d = [&](double h) { return (f(h) - 2.0 * f0 + f(-h)) / (h * h); };
  const double a = d(s.h1), b = d(s.h2);
  const double r1 = s.h1 * s.h1, r2 = s.h2 * s.h2;
  return (r1 * b - r2 * a) / (r1 - r2);
}

// Same for any value type with +, - and scalar *.
template <class T, class F>
T fd_first_value(F&& f, FdSteps s = {}) {
  auto d = [&](double h) -> T { return (1.0 / (2.0 * h)) * (f(h) - f(-h)); };
  const T a = d(s.h1), b = d(s.h2);
  const double r1 = s.h1 * s.h1, r2 = s.h2 * s.h2;
  return (1.0 / (r1 - r2)) * (r1 * b - r2 * a);
}

template <class T, class F>
T fd_second_value(F&& f, FdSteps s = kSecondSteps) {
  const T f0 = f(0.0);
  auto d = [&](double h) -> T { return (1.0 / (h * h)) * (f(h) - 2.0 * f0 + f(-h)); };
  const T a = d(s.h1), b = d(s.h2);
  const double r1 = s.h1 * s.h1, r2 = s.h2 * s.h2;
  return (1.0 / (r1 - r2)) * (r1 * b - r2 * a);
}

}  // namespace conelab
