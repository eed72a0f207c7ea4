#include "qgate/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qgate {

void NelderMeadOptions::validate() const {
  if (reflection <= 0) throw ConfigError("simplex.reflection: must be > 0");
  if (expansion <= 1) throw ConfigError("simplex.expansion: must be > 1");
  if (contraction <= 0 || contraction >= 1)
    throw ConfigError("simplex.contraction: must be in (0,1)");
  if (shrink <= 0 || shrink >= 1) throw ConfigError("simplex.shrink: must be in (0,1)");
  if (max_evaluations < 1) throw ConfigError("simplex.max_evaluations: must be >= 1");
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, const std::vector<double>& steps,
                             const NelderMeadOptions& opt) {
  opt.validate();
  const size_t n = x0.size();
  if (steps.size() != n) throw std::invalid_argument("nelder_mead: steps/x0 size mismatch");

  NelderMeadResult result;
  std::vector<std::vector<double>> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    return f(x);
  };

  for (size_t i = 1; i <= n; ++i) xs[i][i - 1] += steps[i - 1];
  for (size_t i = 0; i <= n && result.evaluations < opt.max_evaluations; ++i) fs[i] = eval(xs[i]);
  if (result.evaluations < static_cast<int>(n + 1)) {
    // Budget exhausted during the initial simplex; report the best of what ran.
    size_t best = 0;
    for (size_t i = 1; i < static_cast<size_t>(result.evaluations); ++i)
      if (fs[i] < fs[best]) best = i;
    result.best_x = xs[best];
    result.best_f = fs[best];
    return result;
  }

  std::vector<size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);

  while (true) {
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return fs[a] < fs[b]; });
    const size_t best = order[0], worst = order[n], second_worst = order[n - 1];

    if (fs[worst] - fs[best] < opt.tolerance) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= opt.max_evaluations) break;

    for (size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (size_t i = 0; i <= n; ++i)
        if (i != worst) s += xs[i][j];
      centroid[j] = s / n;
    }

    for (size_t j = 0; j < n; ++j) xr[j] = centroid[j] + opt.reflection * (centroid[j] - xs[worst][j]);
    const double fr = eval(xr);

    if (fr < fs[best]) {
      for (size_t j = 0; j < n; ++j) xe[j] = centroid[j] + opt.expansion * (xr[j] - centroid[j]);
      const double fe = eval(xe);
      if (fe < fr) {
        xs[worst] = xe;
        fs[worst] = fe;
      } else {
        xs[worst] = xr;
        fs[worst] = fr;
      }
      continue;
    }
    if (fr < fs[second_worst]) {
      xs[worst] = xr;
      fs[worst] = fr;
      continue;
    }

    bool outside = fr < fs[worst];
    if (outside) {
      for (size_t j = 0; j < n; ++j) xc[j] = centroid[j] + opt.contraction * (xr[j] - centroid[j]);
    } else {
      for (size_t j = 0; j < n; ++j)
        xc[j] = centroid[j] - opt.contraction * (centroid[j] - xs[worst][j]);
    }
    const double fc = eval(xc);
    if ((outside && fc <= fr) || (!outside && fc < fs[worst])) {
      xs[worst] = xc;
      fs[worst] = fc;
      continue;
    }

    // Shrink toward the best vertex.
    for (size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (size_t j = 0; j < n; ++j)
        xs[i][j] = xs[best][j] + opt.shrink * (xs[i][j] - xs[best][j]);
      if (result.evaluations >= opt.max_evaluations) break;
      fs[i] = eval(xs[i]);
    }
  }

  size_t best = 0;
  for (size_t i = 1; i <= n; ++i)
    if (fs[i] < fs[best]) best = i;
  result.best_x = xs[best];
  result.best_f = fs[best];
  return result;
}

}  // namespace qgate
