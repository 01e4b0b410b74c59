#pragma once

#include <functional>
#include <span>

namespace pfdr {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

// Globally adaptive Gauss-Kronrod (7/15): the panel with the largest error
// estimate is bisected until the summed error is below
// max(abs_tol, rel_tol * |value|), a panel reaches max_depth bisections, or
// max_panels panels exist.
QuadratureResult integrate_gk15(const std::function<double(double)>& f, double lo, double hi,
                                double rel_tol = 1e-10, double abs_tol = 1e-300, int max_depth = 30,
                                int max_panels = 2000);

// Same, starting from the panels between consecutive breakpoints (sorted).
QuadratureResult integrate_gk15(const std::function<double(double)>& f, std::span<const double> breaks,
                                double rel_tol = 1e-10, double abs_tol = 1e-300, int max_depth = 30,
                                int max_panels = 2000);

} // namespace pfdr
