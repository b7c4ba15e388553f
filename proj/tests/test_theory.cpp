#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hagerlab/theory.hpp"
#include "oracles.hpp"

using namespace hagerlab;
using std::numbers::pi;

namespace {

FourierSymbol exp_minus_ix() { return FourierSymbol({{-1, {1.0, 0.0}}}); }

double s_max(const FourierSymbol& sym) { return sym.action(sym.im_mean()).s; }

}  // namespace

TEST_CASE("epsilon0 and the coupling round-trip") {
  const double h = 0.05;
  CHECK(epsilon0_from_delta(h, std::sqrt(h) * std::exp(-20.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(epsilon0_from_delta(h, std::exp(-1.0 / h)) ==
        doctest::Approx(1.0 + 0.5 * h * std::log(h)).epsilon(1e-12));
  CHECK(epsilon0_from_delta(h, std::sqrt(h)) == doctest::Approx(0.0));

  const ModelParams p = ModelParams::from_epsilon0(h, 0.925);
  CHECK(p.delta == doctest::Approx(std::sqrt(h) * std::exp(-0.925 / h)).epsilon(1e-12));

  const FourierSymbol g = exp_minus_ix();
  CHECK_THROWS_WITH_AS((void)ModelParams::from_epsilon0(h, 2.5, s_max(g)),
                       doctest::Contains("RegimeViolation"), Error);
  CHECK_THROWS_AS((void)ModelParams::from_delta(h, -1.0), Error);
}

TEST_CASE("phi factor branches, tails and spectrum zeros") {
  const FourierSymbol g = exp_minus_ix();
  const ModelParams p = ModelParams::from_epsilon0(0.05, 0.9);

  // Far off the line the factor is 1 up to a double-exponentially small tail.
  const PhiFactor off = phi_factor(g, p, Complex(0.3, 0.5));
  CHECK(off.re_phi == doctest::Approx(-2 * pi * 10.0).epsilon(1e-12));
  CHECK(std::abs(off.abs_one_minus_exp - 1.0) < 1e-26);

  // Midpoint between two spectrum points, on the line: e^Phi = -1.
  const PhiFactor mid = phi_factor(g, p, Complex(0.025, 0.0));
  CHECK(mid.abs_one_minus_exp == doctest::Approx(2.0).epsilon(1e-12));

  // On the unperturbed spectrum the factor vanishes (floating-point zero).
  const PhiFactor on = phi_factor(g, p, Complex(3 * 0.05, 0.0));
  CHECK(on.abs_one_minus_exp <= 5e-12);

  // Exactly representable spectrum point gives an exact zero; log_t0 refuses.
  const ModelParams ph = ModelParams::from_epsilon0(0.5, 0.2);
  CHECK(phi_factor(g, ph, Complex(0.5, 0.0)).abs_one_minus_exp == 0.0);
  CHECK_THROWS_WITH_AS((void)log_t0(g, ph, Complex(0.5, 0.0)),
                       doctest::Contains("OnSpectrum"), Error);
}

TEST_CASE("log t0 composes the symbol quantities") {
  const FourierSymbol g = exp_minus_ix();
  const double h = 0.05;
  const ModelParams p = ModelParams::from_epsilon0(h, 0.9);

  const double y = 0.5;
  const double expected = 0.5 * std::log(h) +
                          0.25 * std::log(oracles::w_exact_exp_minus_ix(y)) -
                          oracles::s_exact_exp_minus_ix(y) / h - 0.5 * std::log(pi);
  CHECK(log_t0(g, p, Complex(0.025, y)) == doctest::Approx(expected).epsilon(1e-10));

  // Approaching the line between spectrum points: |1 - e^Phi| -> 2.
  const double near = log_t0(g, p, Complex(0.025, 1e-9));
  const double lim = 0.5 * std::log(h) + std::log(2.0) - 2.0 / h - 0.5 * std::log(pi);
  CHECK(near == doctest::Approx(lim).epsilon(1e-6));

  CHECK_THROWS_AS((void)log_t0(g, p, Complex(0.0, 1.5)), Error);
}

TEST_CASE("log t0 decreases toward the line") {
  const FourierSymbol g = exp_minus_ix();
  const ModelParams p = ModelParams::from_epsilon0(0.05, 0.9);
  double prev = log_t0(g, p, Complex(0.31, -0.95));
  for (int i = 1; i <= 60; ++i) {
    const double y = -0.95 + 0.89 * i / 60.0;  // ends at -0.06, below the guard zone
    const double cur = log_t0(g, p, Complex(0.31, y));
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("density components: Weyl term, gamma-line value, deep interior") {
  const FourierSymbol g = exp_minus_ix();
  const double h = 0.05;

  // psi1 at the center: (1/2h) d2s = 20.
  const ModelParams p = ModelParams::from_epsilon0(h, 0.9, s_max(g));
  CHECK(density_components(g, p, Complex(0.0, 0.0)).psi1 ==
        doctest::Approx(20.0).epsilon(1e-10));

  // On the curve S = epsilon0 with corrections off: theta = sqrt(W)/pi.
  const double y0 = -0.3;
  const ModelParams pg = ModelParams::from_epsilon0(h, oracles::s_exact_exp_minus_ix(y0));
  const DensityValue at_gamma = density_components(g, pg, Complex(0.0, y0), false);
  CHECK(at_gamma.theta ==
        doctest::Approx(std::sqrt(oracles::w_exact_exp_minus_ix(y0)) / pi).epsilon(1e-9));

  // Deep interior: S - epsilon0 >> h ln(1/h), density collapses to psi1/pi.
  const ModelParams pd = ModelParams::from_epsilon0(h, 0.2);
  const DensityValue deep = density_components(g, pd, Complex(0.0, -0.1));
  CHECK(deep.theta < 1e-10);
  CHECK(std::exp(deep.log_psi2) < deep.psi1 * 1e-6);
  CHECK(deep.density == doctest::Approx(deep.psi1 / pi).epsilon(1e-5));
}

TEST_CASE("log-space round trip is exact where representable") {
  const FourierSymbol g = exp_minus_ix();
  const ModelParams p = ModelParams::from_epsilon0(0.05, 0.925);
  for (double y : {-0.45, -0.4, -0.38, 0.39, 0.42}) {
    const DensityValue dv = density_components(g, p, Complex(0.0, y));
    CHECK(std::log(std::exp(dv.log_theta)) == doctest::Approx(dv.log_theta).epsilon(1e-12));
    CHECK(std::log(std::exp(dv.log_psi2)) == doctest::Approx(dv.log_psi2).epsilon(1e-12));
  }
}

TEST_CASE("Poisson wedge identity links psi2 and theta") {
  const FourierSymbol g = exp_minus_ix();
  const double h = 0.05;
  const ModelParams p = ModelParams::from_epsilon0(h, 0.925);
  for (double y : {-0.65, -0.5, -0.4, 0.45, 0.6}) {
    REQUIRE(g.boundary_distance(Complex(0.0, y)) >= 0.3);
    const DensityValue dv = density_components(g, p, Complex(0.0, y));
    const double ds = g.action(y).ds;
    const double lhs = std::exp(dv.log_psi2);
    const double rhs = ds * ds / (h * h) * dv.theta;
    CHECK(std::abs(lhs - rhs) <= 0.2 * lhs);
  }
}

TEST_CASE("density vanishes beyond the gamma curves and is nonnegative") {
  const FourierSymbol g = exp_minus_ix();
  const ModelParams p = ModelParams::from_epsilon0(0.05, 0.925);
  const double eps_cbrt = std::cbrt(p.epsilon0);
  const double off = 5.0 * (p.h / eps_cbrt) * std::log(std::log(eps_cbrt / p.h));
  const double y_edge = gamma_im(g, p, 0.0, Side::plus) + off;
  CHECK(density_components(g, p, Complex(0.0, y_edge)).density == 0.0);
  for (int i = 1; i < 40; ++i) {
    const double y = -0.95 + 1.9 * i / 40.0;
    CHECK(density_components(g, p, Complex(0.1, y)).density >= 0.0);
  }
}

TEST_CASE("weyl count") {
  const FourierSymbol g = exp_minus_ix();
  const double h = 0.05;
  const ModelParams p = ModelParams::from_epsilon0(h, 0.9);

  // Limit of the full strip: (re1-re0)/h.
  const double inset = 1e-7;
  const Box full{-0.2, 0.2, -1.0 + inset, 1.0 - inset};
  CHECK(weyl_count(g, p, full) == doctest::Approx(0.4 / h).epsilon(2e-3));

  // Against the closed-form turning-point gap.
  const Box box{-0.2, 0.2, -0.4, 0.4};
  const double gap = [](double y) { return pi + 2 * std::asin(y); }(0.4);
  const double gap0 = pi + 2 * std::asin(-0.4);
  CHECK(weyl_count(g, p, box) ==
        doctest::Approx(0.4 / (2 * pi * h) * (gap - gap0)).epsilon(1e-9));

  CHECK(weyl_count(g, p, Box{-0.2, 0.2, 0.3, 0.3}) == 0.0);
  CHECK_THROWS_AS((void)weyl_count(g, p, Box{0.0, 1.0, -0.5, 1.5}), Error);
}

TEST_CASE("y levels solve S = epsilon0") {
  const FourierSymbol g = exp_minus_ix();
  const double h = 0.05;

  CHECK_THROWS_WITH_AS((void)y_levels(g, ModelParams::from_epsilon0(h, 2.0)),
                       doctest::Contains("RegimeViolation"), Error);

  const ModelParams p = ModelParams::from_epsilon0(h, 1.0);
  const auto [ym, yp] = y_levels(g, p);
  const double y_star =
      oracles::bisect([](double y) { return oracles::s_exact_exp_minus_ix(y) - 1.0; }, -0.99,
                      0.0);
  CHECK(ym == doctest::Approx(y_star).epsilon(1e-9));
  CHECK(yp == doctest::Approx(-y_star).epsilon(1e-9));
  CHECK(ym < g.im_mean());
  CHECK(yp > g.im_mean());

  const auto [ym2, yp2] = y_levels(g, ModelParams::from_epsilon0(h, 1e-4));
  CHECK(ym2 < -0.99);
  CHECK(yp2 > 0.99);
}

TEST_CASE("gamma curve: proximity to y levels and re-independence") {
  const FourierSymbol g = exp_minus_ix();
  const double h = 0.05;
  const ModelParams p = ModelParams::from_delta(h, std::exp(-1.0 / h));
  const auto [ym, yp] = y_levels(g, p);
  const double bound = 5.0 * h / std::cbrt(p.epsilon0);

  const double gm = gamma_im(g, p, 0.0, Side::minus);
  const double gp = gamma_im(g, p, 0.0, Side::plus);
  CHECK(std::abs(gm - ym) <= bound);
  CHECK(std::abs(gp - yp) <= bound);
  CHECK(std::abs(log_t0(g, p, Complex(0.0, gm)) - std::log(p.delta)) <= 1e-9);

  CHECK(std::abs(gamma_im(g, p, 0.4, Side::plus) - gamma_im(g, p, -0.2, Side::plus)) <=
        1e-8);

  // delta = sqrt(h) (epsilon0 = 0): no crossing inside the strip.
  const ModelParams p0 = ModelParams::from_delta(h, std::sqrt(h));
  CHECK_THROWS_WITH_AS((void)gamma_im(g, p0, 0.0, Side::minus),
                       doctest::Contains("NoRoot"), Error);
}

TEST_CASE("Gamma curve: density maximum near gamma") {
  const FourierSymbol g = exp_minus_ix();
  const double h = 0.05;
  const ModelParams p = ModelParams::from_delta(h, std::exp(-1.0 / h));

  const double Gm = Gamma_im(g, p, 0.0, Side::minus);
  const double Gp = Gamma_im(g, p, 0.0, Side::plus);
  const double gm = gamma_im(g, p, 0.0, Side::minus);
  const double gp = gamma_im(g, p, 0.0, Side::plus);
  // For these leading-order curves the peak sits inside gamma by
  // (3/4) h^2 S''/|S'|^3 + O(h^3): the density maximum in u = Theta is at
  // 1 - Psi1/(S'/h)^2 Theta-scale minus the prefactor drift, while gamma
  // pins u = 1 exactly.
  const ActionSample a = g.action(gm);
  const double structural = 0.75 * h * h * a.d2s / std::pow(std::abs(a.ds), 3);
  CHECK(std::abs(Gm - gm) <= 2.0 * structural);
  CHECK(std::abs(Gp - gp) <= 2.0 * structural);
  CHECK(gm < Gm);  // the maximum lies on the interior side
  CHECK(Gp < gp);

  auto dens = [&](double y) { return density_components(g, p, Complex(0.0, y)).density; };
  CHECK(dens(Gm) >= dens(Gm - h / 10));
  CHECK(dens(Gm) >= dens(Gm + h / 10));

  // Symmetric symbol: the two maxima mirror each other.
  CHECK(Gp == doctest::Approx(-Gm).epsilon(1e-8));
}

TEST_CASE("tunneling overlap prediction") {
  const FourierSymbol g = exp_minus_ix();
  const double h = 0.05;
  const ModelParams p = ModelParams::from_epsilon0(h, 0.925);

  const double y = 0.5;
  const Complex z(0.1, y);
  const double pred = tunneling_overlap_prediction(g, p, z);
  const double expect = 0.25 * std::log(oracles::w_exact_exp_minus_ix(y)) -
                        0.5 * std::log(pi * h) +
                        std::log(std::abs(oracles::ds_exact_exp_minus_ix(y))) -
                        oracles::s_exact_exp_minus_ix(y) / h;
  CHECK(pred == doctest::Approx(expect).epsilon(1e-10));

  // Algebraic identity linking the overlap and the resolvent laws.
  const PhiFactor phi = phi_factor(g, p, z);
  const double identity = std::log(std::abs(g.action(y).ds)) -
                          std::log(h * phi.abs_one_minus_exp);
  CHECK(pred - log_t0(g, p, z) == doctest::Approx(identity).epsilon(1e-10));

  CHECK_THROWS_WITH_AS((void)tunneling_overlap_prediction(g, p, Complex(0.0, 0.01)),
                       doctest::Contains("TooCloseToLine"), Error);
}

TEST_CASE("WKB quasimodes: norm, residual scale, overlap vs prediction") {
  const FourierSymbol g = exp_minus_ix();

  {
    const ModelParams p = ModelParams::from_epsilon0(0.1, 0.9);
    const WkbSample w = wkb_sample(g, p, Complex(0.0, 0.4), 16384);
    double norm_e = 0.0, norm_f = 0.0;
    for (int k = 0; k < 16384; ++k) {
      norm_e += std::norm(w.e_wkb[k]) * w.dx;
      norm_f += std::norm(w.f_wkb[k]) * w.dx;
    }
    CHECK(std::abs(std::sqrt(norm_e) - 1.0) <= 1e-8);
    CHECK(std::abs(std::sqrt(norm_f) - 1.0) <= 1e-8);

    const double s = oracles::s_exact_exp_minus_ix(0.4);
    CHECK(w.residual_bound <= 10.0 / 0.1 * std::exp(-s / 0.1));
    CHECK(w.residual_bound > 0.0);
  }

  {
    const double h = 0.05;
    const ModelParams p = ModelParams::from_epsilon0(h, 0.925);
    const Complex z(0.0, 0.5);
    const WkbSample w = wkb_sample(g, p, z, 32768);
    Complex overlap(0.0, 0.0);
    for (size_t k = 0; k < w.e_wkb.size(); ++k)
      overlap += w.e_wkb[k] * std::conj(w.f_wkb[k]);
    const double log_overlap = std::log(std::abs(overlap) * w.dx);
    CHECK(std::abs(log_overlap - tunneling_overlap_prediction(g, p, z)) <= 0.3);
  }

  CHECK_THROWS_WITH_AS(
      (void)wkb_sample(g, ModelParams::from_epsilon0(0.1, 0.9), Complex(0.0, 0.99), 4096),
      doctest::Contains("TooCloseToBoundary"), Error);
}

TEST_CASE("theory profile rows are self-consistent") {
  const FourierSymbol g = exp_minus_ix();
  const ModelParams p = ModelParams::from_epsilon0(0.05, 0.925);
  const auto rows = theory_profile(g, p, -0.9, 0.9, 61);
  REQUIRE(rows.size() == 61);
  for (const TheoryRow& r : rows) {
    CHECK(r.s == doctest::Approx(oracles::s_exact_exp_minus_ix(r.im_z)).epsilon(1e-9));
    CHECK(r.w == doctest::Approx(oracles::w_exact_exp_minus_ix(r.im_z)).epsilon(1e-9));
    CHECK(r.density >= 0.0);
  }
  CHECK(rows[30].psi1 == doctest::Approx(20.0).epsilon(1e-9));
}
