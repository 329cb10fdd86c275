#include <doctest.h>

#include <cmath>
#include <random>

#include "circle/error.hpp"
#include "circle/maps.hpp"

using namespace circle;

namespace {

Params params(double nu_minus_alpha, double eta, double eps) {
  Params p;
  p.alpha = certify(golden_mean(), 1.0, 1000);
  p.nu = p.alpha.alpha + nu_minus_alpha;
  p.eta = eta;
  p.eps = eps;
  return p;
}

// Direct formulas for P and Q in the raw chart.
Point oracle_Q(const Params& p, double f, double g, const Point& x) {
  const double e = std::exp(-kTwoPi * p.eta);
  return {x[0] + kTwoPi * p.nu + (1 - e) / p.eta * x[1] + p.eps * f, x[1] * e + p.eps * g};
}

}  // namespace

TEST_CASE("eval_P examples") {
  const auto p = params(0.2, 0.1, 0.0);
  const auto z = eval_P(p, Frame::raw(), {0.7, 0.0});
  CHECK(std::abs(z[0] - (0.7 + kTwoPi * p.nu)) < 1e-15);
  CHECK(z[1] == 0.0);
  const auto q = params(0.0, 0.1, 0.0);
  const auto w = eval_P(q, Frame::russ_r(), {0.3, 0.0});
  CHECK(std::abs(w[0] - (0.3 + kTwoPi * q.alpha.alpha)) < 1e-15);
  CHECK(std::abs(w[1]) < 1e-15);
  const auto r = params(0.05, 0.1, 0.0);
  const auto v = eval_P(r, Frame::russ_r(), {0.0, 0.0});
  CHECK(std::abs(v[1] - kTwoPi * 0.1 * 0.05) < 1e-15);
  CHECK(std::abs(v[1] - 0.0314159) < 1e-6);
}

TEST_CASE("tau and r_alpha") {
  const auto p = params(0.0, 0.1, 0.0);
  CHECK(translation_tau(p) == 0.0);
  CHECK(radius_r_alpha(p) == 0.0);
  // bracket 1 + 2 pi eta / (e^{-2 pi eta} - 1) = -pi eta + O(eta^2)
  const auto s = params(1.0, 1e-6, 0.0);
  const double x = kTwoPi * 1e-6;
  const double series = -x / 2 - x * x / 12;
  CHECK(std::abs(radius_r_alpha(s) - series) <= 1e-5 * std::abs(series));
  CHECK(std::abs(radius_r_alpha(s)) < 1e-5);
  // on the circle r = r_alpha (dio_shift chart) P is the rotation by 2 pi alpha
  // followed by the vertical translation tau
  const auto c = params(0.05, 0.1, 0.0);
  const double ra = radius_r_alpha(c);
  for (double th : {0.0, 1.0, 2.5}) {
    const Point raw = from_frame(c, Frame::dio_shift(), {th, ra});
    const Point img = to_frame(c, Frame::dio_shift(), eval_P(c, Frame::raw(), raw));
    CHECK(std::abs(img[1] - ra - translation_tau(c)) < 1e-15);
    CHECK(std::abs(img[0] - th - kTwoPi * c.alpha.alpha) < 1e-14);
  }
}

TEST_CASE("eval_Q examples") {
  const auto pert = Perturbation::sin_cos(1.0);
  Params p = params(0.0, 0.1, 0.0);
  p.nu = 0.3;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const Point x{3 * ud(rng), ud(rng)};
    const auto a = eval_Q(p, pert, Frame::raw(), x), b = eval_P(p, Frame::raw(), x);
    CHECK(a == b);
  }
  p.eps = 1e-3;
  const auto z = eval_Q(p, pert, Frame::raw(), {0.0, 0.0});
  CHECK(std::abs(z[0] - kTwoPi * 0.3) < 1e-15);
  CHECK(std::abs(z[1] - 1e-3) < 1e-18);
  for (int i = 0; i < 50; ++i) {
    const Point x{3 * ud(rng), ud(rng)};
    const auto o = oracle_Q(p, std::sin(x[0]), std::cos(x[0]), x);
    const auto q = eval_Q(p, pert, Frame::raw(), x);
    CHECK(std::abs(q[0] - o[0]) < 1e-14);
    CHECK(std::abs(q[1] - o[1]) < 1e-15);
    const auto orb = orbit(p, pert, Frame::raw(), x, 2);
    const auto twice = eval_Q(p, pert, Frame::raw(), q);
    CHECK(orb.back() == twice);
  }
  CHECK_THROWS_AS(eval_Q(p, pert, Frame::raw(), {0.0, 2.5}), Error);
}

TEST_CASE("jacobian") {
  const auto pert = Perturbation::sin_cos(1.0);
  const auto p0 = params(0.01, 0.1, 0.0);
  const auto J = jacobian_Q(p0, pert, Frame::raw(), {0.4, 0.2});
  const double e = std::exp(-kTwoPi * 0.1);
  CHECK(std::abs(J[0][0] - 1.0) < 1e-14);
  CHECK(std::abs(J[0][1] - (1 - e) / 0.1) < 1e-14);
  CHECK(std::abs(J[1][0]) < 1e-14);
  CHECK(std::abs(J[1][1] - std::exp(-0.2 * kPi)) < 1e-15);
  CHECK(std::abs(J[0][0] * J[1][1] - J[0][1] * J[1][0] - e) < 1e-14);

  const auto pert2 = Perturbation::make({TrigPoly::sin_mode(1), TrigPoly::cos_mode(2, 0.5)},
                                        {TrigPoly::cos_mode(1), TrigPoly::sin_mode(1, 0.3)});
  const auto p = params(0.01, 0.1, 1e-3);
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> ud(-0.9, 0.9);
  for (const Frame& fr : {Frame::raw(), Frame::dio_shift(), Frame::russ_r()}) {
    for (int i = 0; i < 20; ++i) {
      const Point x{3 * ud(rng), ud(rng) * 0.5};
      const auto Jq = jacobian_Q(p, pert2, fr, x);
      const double h = 1e-6;
      for (int c = 0; c < 2; ++c) {
        Point xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        const auto yp = eval_Q(p, pert2, fr, xp), ym = eval_Q(p, pert2, fr, xm);
        for (int r = 0; r < 2; ++r) {
          const double fd = (yp[r] - ym[r]) / (2 * h);
          CHECK(std::abs(Jq[r][c] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
        }
      }
    }
  }
}

TEST_CASE("frame round trips") {
  const auto p = params(0.03, 0.1, 1e-3);
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (const Frame& fr : {Frame::raw(), Frame::dio_shift(), Frame::russ_r()})
    for (int i = 0; i < 100; ++i) {
      const Point x{3 * ud(rng), ud(rng)};
      const auto y = from_frame(p, fr, to_frame(p, fr, x));
      CHECK(std::abs(y[0] - x[0]) <= 1e-10);
      CHECK(std::abs(y[1] - x[1]) <= 1e-10);
    }
}

TEST_CASE("unperturbed orbit on the russ_r circle rotates by alpha") {
  const auto p = params(0.0, 0.1, 0.0);
  const auto pts = orbit(p, Perturbation{}, Frame::russ_r(), {0.1, 0.0}, 4096);
  std::vector<double> th;
  for (const auto& z : pts) th.push_back(z[0]);
  CHECK(std::abs(rotation_number(th).value - p.alpha.alpha) < 1e-12);
}

TEST_CASE("derivative bounds") {
  const auto pert = Perturbation::make({TrigPoly::sin_mode(1), TrigPoly::sin_mode(1, 0.5)}, {TrigPoly::cos_mode(1)});
  // sup |d_theta f| = 1.5 at rho = 1, sup |d_rho f| = 0.5; both times 1.05
  CHECK(std::abs(pert.A_f - 1.5 * 1.05) < 1e-10);
  CHECK(std::abs(pert.A_g - 1.05) < 1e-10);
  CHECK(std::abs(pert.A - pert.A_f - pert.A_g) < 1e-15);
  CHECK(std::abs(derivative_bounds(pert.f).first - pert.A_f) < 1e-10);
  CHECK(std::abs(pert.C2_bound - 1.05 * 1.5) < 1e-3);
}

TEST_CASE("trapping annulus") {
  const auto pert = Perturbation::sin_cos(1.0);
  const auto a0 = trapping_annulus(params(0.0, 0.1, 0.0), pert);
  CHECK(a0.band == 0.0);
  CHECK(a0.verified);
  const auto a = trapping_annulus(params(0.0, 0.1, 1e-3), pert);
  CHECK(a.verified);
  const double e = std::exp(-kTwoPi * 0.1);
  CHECK(a.band <= 2.0 / (1 - e) * 0.1 * 1e-3 / 0.1);
  // oracle: rho' - rho changes sign on both edges
  for (int j = 0; j < 256; ++j) {
    const double th = kTwoPi * j / 256;
    CHECK(a.band * (e - 1) + 1e-3 * std::cos(th) < 0);
  }
  CHECK_THROWS_AS(trapping_annulus(params(0.0, -0.1, 1e-3), pert), Error);
}

TEST_CASE("perturbation json round trip") {
  const auto pert = Perturbation::make({TrigPoly::sin_mode(1), TrigPoly::sin_mode(1, 0.5)}, {TrigPoly::cos_mode(1)});
  nlohmann::json j = pert;
  CHECK(j["f"].size() == 2);
  CHECK(j["f"][1][0] == 1);
  const auto back = j.get<Perturbation>();
  CHECK(back.A_f == pert.A_f);
  CHECK(back.f.value(0.3, 0.2) == pert.f.value(0.3, 0.2));
  CHECK_THROWS_AS(nlohmann::json::parse(R"({"f": [[0]], "g": []})").get<Perturbation>(), Error);
}
