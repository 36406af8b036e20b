#include <doctest.h>

#include <cmath>
#include <vector>

#include "ecall/errors.hpp"
#include "ecall/optimizer.hpp"

using namespace ecall;

TEST_CASE("a zero gradient with no decay leaves parameters unchanged") {
  AdamW opt(3, {.learning_rate = 0.1});
  std::vector<double> p{1.0, -2.0, 0.5};
  const std::vector<double> g{0.0, 0.0, 0.0};
  opt.step(p, g);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == -2.0);
  CHECK(p[2] == 0.5);
  CHECK(opt.step_count() == 1);
}

TEST_CASE("decoupled decay applies even with a zero gradient") {
  AdamW opt(1, {.learning_rate = 0.01, .weight_decay = 0.1});
  std::vector<double> p{1.0};
  opt.step(p, std::vector<double>{0.0});
  CHECK(p[0] == doctest::Approx(0.999).epsilon(1e-15));
}

TEST_CASE("the update drives a quadratic bowl to zero") {
  AdamW opt(1, {.learning_rate = 0.1});
  std::vector<double> p{1.0};
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> g{2.0 * p[0]};
    opt.step(p, g);
  }
  CHECK(std::abs(p[0]) < 1e-3);
}

TEST_CASE("step counts increment once per call and shapes are checked") {
  AdamW opt(2, {});
  std::vector<double> p{0.0, 0.0};
  for (int i = 1; i <= 5; ++i) {
    opt.step(p, std::vector<double>{1.0, -1.0});
    CHECK(opt.step_count() == i);
  }
  std::vector<double> wrong{0.0};
  CHECK_THROWS_AS(opt.step(wrong, std::vector<double>{1.0}), DimensionMismatch);
}

TEST_CASE("the first step moves by roughly the learning rate") {
  AdamW opt(1, {.learning_rate = 1e-3});
  std::vector<double> p{0.5};
  opt.step(p, std::vector<double>{3.7});
  // bias-corrected m^/sqrt(v^) is sign(g) on the first step
  CHECK(p[0] == doctest::Approx(0.5 - 1e-3).epsilon(1e-6));
}
