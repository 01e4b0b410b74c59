#include "pfdr/kernels.hpp"

#include <algorithm>
#include <exception>

#include <omp.h>

namespace pfdr::kernels {

namespace {

double draw_pfdr(const PosteriorDraw& d, double gamma, bool& clipped) {
  const double null_part = d.pi * gamma;
  const double f = null_part + (1.0 - d.pi) * mixture_cdf(gamma, d.g_draw);
  const double value = f > 0.0 ? null_part / f : 1.0;
  clipped = value > 1.0;
  return std::min(value, 1.0);
}

double mean_cdf_at(std::span<const PosteriorDraw> draws, double x) {
  double sum = 0.0;
  for (const PosteriorDraw& d : draws) sum += d.pi * x + (1.0 - d.pi) * mixture_cdf(x, d.g_draw);
  return sum / static_cast<double>(draws.size());
}

// Exceptions must not escape an OpenMP region; the first one is kept and
// rethrown after the loop.
class FirstError {
public:
  template <typename F>
  void run(F&& body) {
    try {
      body();
    } catch (...) {
#pragma omp critical(pfdr_kernel_error)
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

private:
  std::exception_ptr error_;
};

PfdrMatrix empty_matrix(std::size_t rows, std::size_t cols) {
  PfdrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.values.assign(rows * cols, 0.0);
  return m;
}

} // namespace

PfdrMatrix pfdr_draw_matrix(std::span<const PosteriorDraw> draws, std::span<const double> gammas) {
  PfdrMatrix m = empty_matrix(draws.size(), gammas.size());
  const auto rows = static_cast<std::ptrdiff_t>(draws.size());
  std::size_t clipped = 0;
  FirstError error;
#pragma omp parallel for schedule(static) reduction(+ : clipped)
  for (std::ptrdiff_t t = 0; t < rows; ++t) {
    error.run([&] {
      for (std::size_t j = 0; j < gammas.size(); ++j) {
        bool c = false;
        m.values[t * m.cols + j] = draw_pfdr(draws[t], gammas[j], c);
        clipped += c ? 1 : 0;
      }
    });
  }
  error.rethrow();
  m.clipped = clipped;
  return m;
}

std::vector<double> posterior_mean_cdf(std::span<const PosteriorDraw> draws, std::span<const double> grid) {
  std::vector<double> out(grid.size());
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  FirstError error;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) error.run([&] { out[k] = mean_cdf_at(draws, grid[k]); });
  error.rethrow();
  return out;
}

std::vector<double> model_cdf_grid(const PValueMixture& model, std::span<const double> grid) {
  std::vector<double> out(grid.size());
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  FirstError error;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) error.run([&] { out[k] = model_cdf(grid[k], model); });
  error.rethrow();
  return out;
}

std::vector<double> density_curve(const TestModel& model, double theta1, std::span<const double> xs) {
  std::vector<double> out(xs.size());
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
  FirstError error;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t k = 0; k < n; ++k) error.run([&] { out[k] = pvalue_density(model, theta1, xs[k]); });
  error.rethrow();
  return out;
}

namespace serial {

PfdrMatrix pfdr_draw_matrix(std::span<const PosteriorDraw> draws, std::span<const double> gammas) {
  PfdrMatrix m = empty_matrix(draws.size(), gammas.size());
  for (std::size_t t = 0; t < draws.size(); ++t) {
    for (std::size_t j = 0; j < gammas.size(); ++j) {
      bool c = false;
      m.values[t * m.cols + j] = draw_pfdr(draws[t], gammas[j], c);
      m.clipped += c ? 1 : 0;
    }
  }
  return m;
}

std::vector<double> posterior_mean_cdf(std::span<const PosteriorDraw> draws, std::span<const double> grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double x : grid) out.push_back(mean_cdf_at(draws, x));
  return out;
}

std::vector<double> model_cdf_grid(const PValueMixture& model, std::span<const double> grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double x : grid) out.push_back(model_cdf(x, model));
  return out;
}

std::vector<double> density_curve(const TestModel& model, double theta1, std::span<const double> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(pvalue_density(model, theta1, x));
  return out;
}

} // namespace serial

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

} // namespace pfdr::kernels
