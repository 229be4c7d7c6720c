#include "spikebench/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "spikebench/error.hpp"

namespace spikebench {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  double err = 0.0;
  double l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 18, rel_tol,
                                                                                 &err, &l1);
  if (!std::isfinite(v)) throw NumericalError("quadrature produced a non-finite value");
  return v;
}

}  // namespace spikebench
