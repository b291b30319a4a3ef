#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "pimsim/meanfield.hpp"

using namespace pimsim;

namespace {

// independent re-derivation of the quintic coefficients used by the library
struct Coeffs {
    double c5, c3, c1;
};

Coeffs coeffs_oracle(const MFInputs& in) {
    const double kt = std::sqrt(in.kappa1 * in.kappann + in.kappa1 * in.kappa1) - in.kappa1;
    return {(in.kappann - 4.0 * kt) / 16.0, (in.kappann + 4.0 * kt) / 8.0,
            (3.0 * in.kappann + 4.0 * kt) / 16.0 - in.kappa1};
}

double residual_oracle(const MFInputs& in, double q_sq) {
    const Coeffs c = coeffs_oracle(in);
    const double q = std::sqrt(q_sq);
    return q * (c.c5 * q_sq * q_sq + c.c3 * q_sq - c.c1);
}

}  // namespace

TEST_CASE("kappann_tilde") {
    MFInputs in{0.01, 0.0, 0.3, 1.0, 1.0};
    CHECK(in.kappann_tilde() ==
          doctest::Approx(std::sqrt(0.01 * 0.3 + 1e-4) - 0.01).epsilon(1e-14));

    in.kappa1 = 0.0;
    CHECK(in.kappann_tilde() == 0.0);

    // small-kappa1 asymptote sqrt(kappa1 kappann)
    in.kappa1 = 1e-10;
    CHECK(in.kappann_tilde() ==
          doctest::Approx(std::sqrt(1e-10 * 0.3)).epsilon(1e-4));

    in.kappa1 = -1.0;
    CHECK_THROWS_AS(in.kappann_tilde(), DomainError);
}

TEST_CASE("phase names") {
    CHECK(phase_name(Phase::FerroCat) == "ferro_cat");
    CHECK(phase_name(Phase::CatOnly) == "cat_only");
    CHECK(phase_name(Phase::Trivial) == "trivial");
}

TEST_CASE("toy-model fixed point") {
    SUBCASE("reference point") {
        MeanFieldPoint p = toy_fixed_point({0.1, 0.1, 0.3, 1.0, 1.0});
        CHECK(p.Z_exp == doctest::Approx(0.6).epsilon(1e-14));
        CHECK(p.Q_sq == doctest::Approx(0.36).epsilon(1e-14));
        // |alpha|^2 = lam - (kappa1 + kappad + kappa1 <Z>)/2
        CHECK(p.alpha_sq == doctest::Approx(1.0 - 0.5 * (0.2 + 0.1 * 0.6)).epsilon(1e-14));
        CHECK(p.phase == Phase::FerroCat);
    }
    SUBCASE("no coupling means no order") {
        MeanFieldPoint p = toy_fixed_point({0.1, 0.0, 0.0, 1.0, 1.0});
        CHECK(p.Z_exp == 0.0);
        CHECK(p.Q_sq == 0.0);
        CHECK(p.phase == Phase::CatOnly);
    }
    SUBCASE("weak drive is trivial") {
        MeanFieldPoint p = toy_fixed_point({0.1, 0.1, 0.3, 0.05, 1.0});
        CHECK(p.alpha_sq == 0.0);
        CHECK(p.phase == Phase::Trivial);
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(toy_fixed_point({0.1, 0.1, 0.3, 1.0, 0.0}), DomainError);
    }
}

TEST_CASE("quintic residual against re-derived coefficients") {
    const MFInputs in{0.01, 0.0, 0.3, 1.0, 1.0};
    for (int i = 0; i <= 100; ++i) {
        const double q_sq = i / 100.0;
        CHECK(q_fixed_point_residual(in, q_sq) ==
              doctest::Approx(residual_oracle(in, q_sq)).epsilon(1e-13));
    }

    // at kappa1 = 0 the quintic factors as (q^2 + 3)(q^2 - 1) kappann q / 16,
    // so q^2 = 1 is an exact root
    const MFInputs lossless{0.0, 0.0, 0.3, 1.0, 1.0};
    CHECK(std::abs(q_fixed_point_residual(lossless, 1.0)) < 1e-15);
    CHECK(q_fixed_point_residual(lossless, 0.5) ==
          doctest::Approx(std::sqrt(0.5) * 3.5 * (-0.5) * 0.3 / 16.0).epsilon(1e-13));
}

TEST_CASE("photonic-Ising fixed point") {
    SUBCASE("vanishing loss restores full order") {
        MeanFieldPoint p = photonic_ising_fixed_point({1e-8, 0.0, 0.3, 1.0, 1.0});
        // root shift is 4 kappa1/kappann to leading order
        CHECK(std::abs(p.Q_sq - 1.0) < 1e-6);
        CHECK(p.phase == Phase::FerroCat);
    }
    SUBCASE("reference ferro point") {
        const MFInputs in{0.01, 0.0, 0.3, 1.0, 1.0};
        MeanFieldPoint p = photonic_ising_fixed_point(in);
        CHECK(p.Q_sq > 0.8);
        CHECK(p.Q_sq < 0.95);
        CHECK(std::abs(q_fixed_point_residual(in, p.Q_sq)) < 1e-12);
        CHECK(std::abs(residual_oracle(in, p.Q_sq)) < 1e-12);
        // dynamically attracting: the bracket changes sign downward through
        // the root as q^2 decreases
        CHECK(residual_oracle(in, p.Q_sq * 1.02) > 0.0);
        CHECK(residual_oracle(in, p.Q_sq * 0.98) < 0.0);
        // |alpha|^2 from the closed form
        const double kt = in.kappann_tilde();
        const double g = (-3.0 * in.kappann + 4.0 * kt) / 16.0 * p.Q_sq * p.Q_sq +
                         (in.kappann - 4.0 * kt) / 8.0 * p.Q_sq +
                         (in.kappann + 4.0 * kt) / 16.0;
        CHECK(p.alpha_sq ==
              doctest::Approx((2.0 - in.kappa1 - g) / 2.0).epsilon(1e-12));
        CHECK(p.phase == Phase::FerroCat);
    }
    SUBCASE("strong loss disorders first") {
        MeanFieldPoint p = photonic_ising_fixed_point({0.2, 0.0, 0.3, 1.0, 1.0});
        CHECK(p.Q_sq == 0.0);
        CHECK(p.alpha_sq > 0.0);
        CHECK(p.phase == Phase::CatOnly);
    }
    SUBCASE("dark cavity is trivial") {
        MeanFieldPoint p = photonic_ising_fixed_point({0.01, 2.0, 0.3, 1.0, 1.0});
        CHECK(p.Q_sq == 0.0);
        CHECK(p.alpha_sq == 0.0);
        CHECK(p.phase == Phase::Trivial);
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(photonic_ising_fixed_point({0.01, 0.0, 0.3, 1.0, -1.0}), DomainError);
    }
}

TEST_CASE("mean-field dynamics") {
    const MFInputs in{0.01, 0.0, 0.3, 1.0, 1.0};
    const MeanFieldPoint fp = photonic_ising_fixed_point(in);

    SUBCASE("relaxes onto the closed-form fixed point") {
        MeanFieldTrajectory tr = meanfield_ode(in, 0.5, {0.1, 0.0}, 400.0, 100);
        const double qf = tr.Q.back();
        const std::complex<double> a2(tr.a_sq_re.back(), tr.a_sq_im.back());
        CHECK(qf * qf == doctest::Approx(fp.Q_sq).epsilon(1e-6));
        CHECK(std::abs(a2) == doctest::Approx(fp.alpha_sq).epsilon(1e-6));
    }
    SUBCASE("symmetric sector stays symmetric") {
        MeanFieldTrajectory tr = meanfield_ode(in, 0.0, {0.1, 0.0}, 400.0, 100);
        for (double q : tr.Q) CHECK(q == 0.0);
        const double a_abs = std::abs(std::complex<double>(tr.a_sq_re.back(), tr.a_sq_im.back()));
        // with Q pinned at zero the cavity settles on the cat_only amplitude
        const double g0 = (in.kappann + 4.0 * in.kappann_tilde()) / 16.0;
        CHECK(a_abs == doctest::Approx((2.0 * in.lam - in.kappa1 - g0) / 2.0).epsilon(1e-6));
    }
    SUBCASE("odd symmetry of the order parameter") {
        MeanFieldTrajectory up = meanfield_ode(in, 0.3, {0.1, 0.0}, 50.0, 60);
        MeanFieldTrajectory dn = meanfield_ode(in, -0.3, {0.1, 0.0}, 50.0, 60);
        REQUIRE(up.Q.size() == dn.Q.size());
        for (std::size_t i = 0; i < up.Q.size(); ++i) {
            CHECK(up.Q[i] == doctest::Approx(-dn.Q[i]).epsilon(1e-9));
            CHECK(up.a_sq_re[i] == doctest::Approx(dn.a_sq_re[i]).epsilon(1e-9));
        }
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(meanfield_ode(in, 1.5, {0.1, 0.0}, 1.0), DomainError);
    }
}

TEST_CASE("phase diagram grid") {
    const std::vector<double> k1{0.001, 0.01, 0.1, 0.5, 1.0, 2.5};
    const std::vector<double> kd{0.0, 0.5, 2.0};
    auto cells = phase_diagram(k1, kd, 0.3, 1.0, 1.0);
    REQUIRE(cells.size() == k1.size() * kd.size());

    for (const auto& cell : cells) {
        MeanFieldPoint direct =
            photonic_ising_fixed_point({cell.kappa1, cell.kappad, 0.3, 1.0, 1.0});
        CHECK(cell.point.phase == direct.phase);
        CHECK(cell.point.Q_sq == doctest::Approx(direct.Q_sq).epsilon(1e-14));
        // trivial exactly when the |alpha|^2 numerator is non-positive
        const MFInputs in{cell.kappa1, cell.kappad, 0.3, 1.0, 1.0};
        const double g = (-3.0 * 0.3 + 4.0 * in.kappann_tilde()) / 16.0 * direct.Q_sq * direct.Q_sq +
                         (0.3 - 4.0 * in.kappann_tilde()) / 8.0 * direct.Q_sq +
                         (0.3 + 4.0 * in.kappann_tilde()) / 16.0;
        const bool dark = 2.0 * in.lam - in.kappa1 - 2.0 * in.kappad - g <= 0.0;
        CHECK((cell.point.phase == Phase::Trivial) == dark);
    }

    // monotone path in kappa1 at kappad = 0: order only degrades
    int last_rank = 0;
    for (const auto& cell : cells) {
        if (cell.kappad != 0.0) continue;
        const int rank = cell.point.phase == Phase::FerroCat  ? 0
                         : cell.point.phase == Phase::CatOnly ? 1
                                                              : 2;
        CHECK(rank >= last_rank);
        last_rank = rank;
    }
}
