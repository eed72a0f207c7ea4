#include <doctest.h>

#include "qgate/nelder_mead.hpp"

using namespace qgate;

TEST_CASE("quadratic bowl converges to the minimum") {
  auto f = [](const std::vector<double>& x) {
    return (x[0] - 1.0) * (x[0] - 1.0) + (x[1] - 2.0) * (x[1] - 2.0);
  };
  NelderMeadOptions opt;
  opt.max_evaluations = 200;
  opt.tolerance = 1e-14;
  auto res = nelder_mead(f, {0.0, 0.0}, {0.5, 0.5}, opt);
  CHECK(res.converged);
  CHECK(res.evaluations <= 200);
  CHECK(std::abs(res.best_x[0] - 1.0) <= 1e-6);
  CHECK(std::abs(res.best_x[1] - 2.0) <= 1e-6);
  CHECK(res.best_f <= 1e-10);

  // Regression lock on the textbook trace: the evaluation count for this
  // exact start, steps, and coefficients.
  CHECK(res.evaluations == 111);
}

TEST_CASE("rosenbrock valley") {
  auto f = [](const std::vector<double>& x) {
    double a = 1.0 - x[0];
    double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  NelderMeadOptions opt;
  opt.max_evaluations = 2000;
  opt.tolerance = 1e-16;
  auto res = nelder_mead(f, {-1.2, 1.0}, {0.3, 0.3}, opt);
  CHECK(std::abs(res.best_x[0] - 1.0) <= 1e-4);
  CHECK(std::abs(res.best_x[1] - 1.0) <= 1e-4);
}

TEST_CASE("budget of one returns the initial vertex") {
  int calls = 0;
  auto f = [&](const std::vector<double>& x) {
    ++calls;
    return x[0] * x[0];
  };
  NelderMeadOptions opt;
  opt.max_evaluations = 1;
  auto res = nelder_mead(f, {3.0}, {1.0}, opt);
  CHECK(calls == 1);
  CHECK(res.evaluations == 1);
  CHECK(res.best_x[0] == 3.0);
  CHECK_FALSE(res.converged);
}

TEST_CASE("coefficient validation") {
  NelderMeadOptions opt;
  opt.expansion = 1.0;
  CHECK_THROWS_AS(opt.validate(), ConfigError);
  opt = {};
  opt.contraction = 1.5;
  CHECK_THROWS_AS(opt.validate(), ConfigError);
  opt = {};
  opt.shrink = 0.0;
  CHECK_THROWS_AS(opt.validate(), ConfigError);
  opt = {};
  opt.reflection = -1.0;
  CHECK_THROWS_AS(opt.validate(), ConfigError);
}

TEST_CASE("best value never increases across accepted steps") {
  // The accepted simplex best must never exceed the starting value, even on
  // a multimodal objective.
  auto f = [](const std::vector<double>& x) {
    return std::sin(3.0 * x[0]) + 0.1 * x[0] * x[0] + std::cos(2.0 * x[1]) + 0.05 * x[1] * x[1];
  };
  NelderMeadOptions opt;
  opt.max_evaluations = 500;
  opt.tolerance = 1e-12;
  auto res = nelder_mead(f, {2.0, -1.0}, {0.7, 0.7}, opt);
  CHECK(res.best_f <= f({2.0, -1.0}));
}
