#pragma once

#include <functional>
#include <vector>

#include "qgate/types.hpp"

namespace qgate {

struct NelderMeadOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  int max_evaluations = 400;
  double tolerance = 1e-10;  // stop when max f - min f over the simplex is below

  void validate() const;
};

struct NelderMeadResult {
  std::vector<double> best_x;
  double best_f = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Downhill simplex minimization of f over R^n. The initial simplex has
// vertices x0 and x0 + steps[i]*e_i. Every objective call counts toward
// max_evaluations.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, const std::vector<double>& steps,
                             const NelderMeadOptions& opt);

}  // namespace qgate
