#pragma once

// Data-parallel evaluation kernels. Each kernel has an OpenMP version and a
// serial reference in kernels::serial; outputs are element-wise independent,
// so both produce bit-identical results for any thread count.

#include <cstddef>
#include <span>
#include <vector>

#include "pfdr/dp_sampler.hpp"
#include "pfdr/mixture.hpp"
#include "pfdr/pvalue_models.hpp"

namespace pfdr::kernels {

struct PfdrMatrix {
  std::size_t rows = 0; // draws
  std::size_t cols = 0; // gammas
  std::vector<double> values;
  std::size_t clipped = 0;

  double at(std::size_t draw, std::size_t gamma) const { return values[draw * cols + gamma]; }
};

// min(1, pi gamma / F(gamma)) for every (draw, gamma).
PfdrMatrix pfdr_draw_matrix(std::span<const PosteriorDraw> draws, std::span<const double> gammas);
// Posterior mean of F(x) = pi x + (1 - pi) H(x) at each grid point.
std::vector<double> posterior_mean_cdf(std::span<const PosteriorDraw> draws, std::span<const double> grid);
std::vector<double> model_cdf_grid(const PValueMixture& model, std::span<const double> grid);
std::vector<double> density_curve(const TestModel& model, double theta1, std::span<const double> xs);

namespace serial {
PfdrMatrix pfdr_draw_matrix(std::span<const PosteriorDraw> draws, std::span<const double> gammas);
std::vector<double> posterior_mean_cdf(std::span<const PosteriorDraw> draws, std::span<const double> grid);
std::vector<double> model_cdf_grid(const PValueMixture& model, std::span<const double> grid);
std::vector<double> density_curve(const TestModel& model, double theta1, std::span<const double> xs);
} // namespace serial

// Sets the OpenMP thread count; n <= 0 keeps the runtime default.
void set_threads(int n);
int max_threads();

} // namespace pfdr::kernels
