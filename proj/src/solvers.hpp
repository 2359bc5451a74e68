#pragma once

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cstdint>
#include <utility>

#include "metacd/errors.hpp"

namespace metacd::detail {

// Root of f on [lo, hi]; f(lo) and f(hi) must bracket a sign change.
template <class F>
double find_root(F&& f, double lo, double hi) {
  std::uintmax_t max_iter = 200;
  boost::math::tools::eps_tolerance<double> tol(52);
  auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, max_iter);
  if (max_iter >= 200) throw NumericError("root search did not converge");
  return 0.5 * (r.first + r.second);
}

// Minimum of f on [lo, hi]. Brent search; the golden-section limit caps the
// attainable x accuracy near sqrt(machine eps) relative.
template <class F>
std::pair<double, double> minimize_scalar(F&& f, double lo, double hi,
                                          int bits = 40) {
  std::uintmax_t max_iter = 500;
  return boost::math::tools::brent_find_minima(f, lo, hi, bits, max_iter);
}

template <class F>
std::pair<double, double> maximize_scalar(F&& f, double lo, double hi,
                                          int bits = 40) {
  auto [x, neg] = minimize_scalar([&f](double v) { return -f(v); }, lo, hi, bits);
  return {x, -neg};
}

}  // namespace metacd::detail
