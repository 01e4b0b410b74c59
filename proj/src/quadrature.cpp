#include "pfdr/quadrature.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace pfdr {

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double kronrod;
  double gauss;
};

Panel gk15(const std::function<double(double)>& f, double lo, double hi) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(centre);
  double k = fc * kKronrodWeights[7];
  double g = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(centre - dx) + f(centre + dx);
    k += kKronrodWeights[j] * sum;
    if (j % 2 == 1) g += kGaussWeights[j / 2] * sum;
  }
  return {k * half, g * half};
}

struct Item {
  double lo;
  double hi;
  double value;
  double error;
  int depth;
  bool operator<(const Item& other) const { return error < other.error; }
};

Item make_item(const std::function<double(double)>& f, double lo, double hi, int depth) {
  const Panel p = gk15(f, lo, hi);
  return {lo, hi, p.kronrod, std::fabs(p.kronrod - p.gauss), depth};
}

} // namespace

QuadratureResult integrate_gk15(const std::function<double(double)>& f, std::span<const double> breaks,
                                double rel_tol, double abs_tol, int max_depth, int max_panels) {
  QuadratureResult out;
  std::priority_queue<Item> open;
  std::vector<Item> done;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    const Item item = make_item(f, breaks[i], breaks[i + 1], 0);
    out.evaluations += 15;
    value += item.value;
    error += item.error;
    open.push(item);
  }
  int panels = static_cast<int>(open.size());
  while (!open.empty() && error > std::max(abs_tol, rel_tol * std::fabs(value)) && panels < max_panels) {
    const Item worst = open.top();
    open.pop();
    if (worst.depth >= max_depth) {
      done.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Item left = make_item(f, worst.lo, mid, worst.depth + 1);
    const Item right = make_item(f, mid, worst.hi, worst.depth + 1);
    out.evaluations += 30;
    ++panels;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    open.push(left);
    open.push(right);
  }
  // resum to avoid drift from the running updates
  while (!open.empty()) {
    done.push_back(open.top());
    open.pop();
  }
  std::sort(done.begin(), done.end(), [](const Item& a, const Item& b) { return a.lo < b.lo; });
  for (const Item& item : done) {
    out.value += item.value;
    out.error += item.error;
  }
  return out;
}

QuadratureResult integrate_gk15(const std::function<double(double)>& f, double lo, double hi,
                                double rel_tol, double abs_tol, int max_depth, int max_panels) {
  const double breaks[2] = {lo, hi};
  return integrate_gk15(f, std::span<const double>(breaks), rel_tol, abs_tol, max_depth, max_panels);
}

} // namespace pfdr
