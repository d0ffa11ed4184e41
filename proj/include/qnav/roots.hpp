#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qnav {

/// Bisection on a bracket with f(lo), f(hi) of opposite sign, until hi − lo ≤ tol.
template <class F>
double bisect(F&& f, double lo, double hi, double f_lo, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// All sign changes of f on [lo, hi] over `panels` equal panels, each refined
/// by bisection. Exact zeros at panel nodes are reported as roots.
template <class F>
std::vector<double> scan_roots(F&& f, double lo, double hi, std::size_t panels, double tol) {
  if (panels < 1 || !(hi > lo)) throw std::invalid_argument("scan_roots needs lo < hi and panels >= 1");
  std::vector<double> xs(panels + 1), fs(panels + 1);
  for (std::size_t i = 0; i <= panels; ++i) {
    xs[i] = i == panels ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(panels);
    fs[i] = f(xs[i]);
  }
  std::vector<double> roots;
  for (std::size_t i = 0; i <= panels; ++i) {
    if (fs[i] == 0.0) {
      roots.push_back(xs[i]);
      continue;
    }
    if (i < panels && fs[i + 1] != 0.0 && std::signbit(fs[i]) != std::signbit(fs[i + 1]))
      roots.push_back(bisect(f, xs[i], xs[i + 1], fs[i], tol));
  }
  return roots;
}

}  // namespace qnav
