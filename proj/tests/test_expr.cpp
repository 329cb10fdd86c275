#include <doctest.h>

#include <cmath>

#include "circle/error.hpp"
#include "circle/expr.hpp"
#include "circle/trig.hpp"

using namespace circle;

TEST_CASE("expressions") {
  CHECK(evaluate_expression("(sqrt(5)-1)/2") == (std::sqrt(5.0) - 1) / 2);
  CHECK(evaluate_expression("1/pi") == 1 / kPi);
  CHECK(evaluate_expression("2^3^2") == 512.0);
  CHECK(evaluate_expression("-2^2") == -4.0);
  CHECK(evaluate_expression("1e-4 * 20") == doctest::Approx(2e-3));
  CHECK(evaluate_expression("golden") == (std::sqrt(5.0) - 1) / 2);
  CHECK(evaluate_expression("alpha + 0.01", Variables{{"alpha", 0.5}}) == 0.51);
  CHECK_THROWS_AS(evaluate_expression("alpha"), Error);
  CHECK_THROWS_AS(evaluate_expression("1 +"), Error);
  CHECK_THROWS_AS(evaluate_expression("(1"), Error);
  CHECK_THROWS_AS(evaluate_expression("foo(1)"), Error);
}
