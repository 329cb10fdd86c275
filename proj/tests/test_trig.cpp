#include <doctest.h>

#include <cmath>
#include <random>

#include "circle/error.hpp"
#include "circle/trig.hpp"

using namespace circle;

namespace {

TrigPoly random_poly(std::mt19937_64& rng, int n, double decay = 0.7) {
  std::normal_distribution<double> nd;
  TrigPoly f(n);
  f.set_coeff(0, nd(rng));
  for (int k = 1; k <= n; ++k) f.set_coeff(k, cd(nd(rng), nd(rng)) * std::pow(decay, k));
  return f;
}

// Direct summation in the real basis, independent of the complex storage.
double naive_eval(const TrigPoly& f, double t) {
  double s = f.coeff(0).real();
  for (int k = 1; k <= f.cutoff(); ++k) {
    const cd c = f.coeff(k);
    s += 2.0 * (c.real() * std::cos(k * t) - c.imag() * std::sin(k * t));
  }
  return s;
}

}  // namespace

TEST_CASE("eval examples") {
  const auto c1 = TrigPoly::cos_mode(1);
  CHECK(c1(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c1(kPi) == doctest::Approx(-1.0).epsilon(1e-15));
  const auto f = TrigPoly::cos_mode(1) + TrigPoly::sin_mode(3, 0.5);
  const double t = kPi / 2;
  const double oracle = std::cos(t) + 0.5 * std::sin(3 * t);
  CHECK(std::abs(f(t) - oracle) < 1e-15);
  CHECK(std::abs(f(t) + 0.5) < 1e-15);
}

TEST_CASE("real series have negligible imaginary part") {
  std::mt19937_64 rng(1);
  const auto f = random_poly(rng, 20);
  double cmax = 0.0;
  for (auto c : f.coeffs()) cmax = std::max(cmax, std::abs(c));
  for (int i = 0; i < 100; ++i) CHECK(std::abs(f.eval(0.063 * i).imag()) <= 1e-13 * cmax);
}

TEST_CASE("product examples") {
  const auto c = TrigPoly::cos_mode(1), s = TrigPoly::sin_mode(1);
  const auto cc = product(c, c);
  CHECK(std::abs(cc.mean() - 0.5) < 1e-15);
  CHECK(std::abs(cc.coeff(2) - cd(0.25, 0)) < 1e-15);
  CHECK(std::abs(cc.coeff(1)) < 1e-15);
  const auto zero = product(c, TrigPoly(3));
  for (auto z : zero.coeffs()) CHECK(std::abs(z) == 0.0);
  const auto cs = product(c, s);
  const auto target = TrigPoly::sin_mode(2, 0.5);
  for (int k = -2; k <= 2; ++k) CHECK(std::abs(cs.coeff(k) - target.coeff(k)) < 1e-15);
}

TEST_CASE("product is pointwise and norm-submultiplicative") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_poly(rng, 12), g = random_poly(rng, 9);
    const auto fg = product(f, g);
    CHECK(fg.cutoff() == 21);
    for (int i = 0; i < 50; ++i) {
      const double t = 0.1257 * i;
      CHECK(std::abs(fg(t) - f(t) * g(t)) <= 1e-12 * (1 + f.norm_s(0) * g.norm_s(0)));
    }
    for (double s : {0.0, 0.3}) CHECK(fg.norm_s(s) <= f.norm_s(s) * g.norm_s(s) * (1 + 1e-14));
  }
}

TEST_CASE("compose_rotation examples and inverse") {
  const auto c = TrigPoly::cos_mode(1);
  const auto r = compose_rotation(c, kPi);
  CHECK(std::abs(r.coeff(1) + c.coeff(1)) < 1e-15);
  const auto one = compose_rotation(TrigPoly::constant(1.0), 0.77);
  CHECK(one.mean() == 1.0);
  const auto q = compose_rotation(c, kPi / 2);
  const auto ms = TrigPoly::sin_mode(1, -1.0);
  CHECK(std::abs(q.coeff(1) - ms.coeff(1)) < 1e-15);
  std::mt19937_64 rng(3);
  const auto f = random_poly(rng, 30);
  const auto back = compose_rotation(compose_rotation(f, 1.234), -1.234);
  for (int k = -30; k <= 30; ++k) CHECK(std::abs(back.coeff(k) - f.coeff(k)) <= 1e-14);
}

TEST_CASE("eval matches direct summation and the SIMD batch path") {
  std::mt19937_64 rng(4);
  const auto f = random_poly(rng, 40, 0.9);
  std::vector<double> th(257);
  for (size_t i = 0; i < th.size(); ++i) th[i] = -3.0 + 0.037 * i;
  const auto batch = f.eval_batch(th);
  for (size_t i = 0; i < th.size(); ++i) {
    CHECK(std::abs(f(th[i]) - naive_eval(f, th[i])) < 1e-12);
    CHECK(std::abs(batch[i] - naive_eval(f, th[i])) < 1e-12);
  }
  const auto grid = f.sample(128);
  for (int j = 0; j < 128; ++j) CHECK(std::abs(grid[j] - naive_eval(f, kTwoPi * j / 128)) < 1e-12);
  const auto back = TrigPoly::from_grid(grid, 40);
  for (int k = -40; k <= 40; ++k) CHECK(std::abs(back.coeff(k) - f.coeff(k)) < 1e-14);
}

TEST_CASE("norms and mean") {
  CHECK(TrigPoly::cos_mode(1).norm_s(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK((TrigPoly::constant(3.0) + TrigPoly::cos_mode(1)).mean() == 3.0);
  CHECK(std::abs(TrigPoly::cos_mode(1).norm_s(0.5) - std::exp(0.5)) < 1e-15);
  const auto f = TrigPoly::cos_mode(2, 2.0) + TrigPoly::sin_mode(5, 0.5);
  CHECK(f.sup_norm() <= f.norm_s(0.0) + 1e-15);
}

TEST_CASE("derivative") {
  const auto f = TrigPoly::sin_mode(3, 2.0);
  const auto d = f.derivative();
  for (int i = 0; i < 20; ++i) {
    const double t = 0.31 * i;
    CHECK(std::abs(d(t) - 6.0 * std::cos(3 * t)) < 1e-13);
  }
}

TEST_CASE("truncation records the discarded tail") {
  const auto f = TrigPoly::cos_mode(1) + TrigPoly::cos_mode(4, 0.2);
  const auto t = f.truncated(2);
  CHECK(t.cutoff() == 2);
  CHECK(std::abs(t.truncation_tail() - 0.2) < 1e-15);
}

TEST_CASE("invert_lift examples") {
  const CircleLift u(0.0, TrigPoly::sin_mode(1, 0.1));
  REQUIRE(u.monotone());
  CHECK(std::abs(invert_lift(u, 0.0, 1e-14)) < 1e-14);
  CHECK(std::abs(invert_lift(u, kPi, 1e-14) - kPi) < 1e-14);
  // bisection oracle
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid + 0.1 * std::sin(mid) < 0.5 ? lo : hi) = mid;
  }
  CHECK(std::abs(invert_lift(u, 0.5, 1e-14) - 0.5 * (lo + hi)) < 1e-12);
}

TEST_CASE("invert_lift recovers y on random points") {
  std::mt19937_64 rng(5);
  TrigPoly p = TrigPoly::sin_mode(1, 0.3) + TrigPoly::cos_mode(3, 0.05);
  const CircleLift u(0.4, p);
  std::uniform_real_distribution<double> ud(-20.0, 20.0);
  for (int i = 0; i < 10000; ++i) {
    const double y = ud(rng);
    CHECK(std::abs(u(invert_lift(u, y, 1e-13)) - y) <= 1e-13);
  }
}

TEST_CASE("invert_lift rejects non-monotone lifts") {
  const CircleLift u(0.0, TrigPoly::sin_mode(1, 1.5));
  CHECK_FALSE(u.monotone());
  CHECK_THROWS_AS(invert_lift(u, 0.3), Error);
}

TEST_CASE("map_values and denoised") {
  const auto f = TrigPoly::cos_mode(1, 0.5);
  const auto e = map_values(f, [](double x) { return std::exp(x); });
  for (int i = 0; i < 30; ++i) {
    const double t = 0.21 * i;
    CHECK(std::abs(e(t) - std::exp(0.5 * std::cos(t))) < 1e-14);
  }
  TrigPoly g = (TrigPoly::cos_mode(1) + TrigPoly::cos_mode(2, 1e-3)).padded(9);
  g.set_coeff(9, 1e-17);
  CHECK(g.denoised().cutoff() == 2);
}

TEST_CASE("json round trip") {
  std::mt19937_64 rng(6);
  const auto f = random_poly(rng, 7);
  nlohmann::json j = f;
  CHECK(j["N"] == 7);
  CHECK(j["coeffs"].size() == 15);
  const auto g = j.get<TrigPoly>();
  for (int k = -7; k <= 7; ++k) CHECK(g.coeff(k) == f.coeff(k));
}
