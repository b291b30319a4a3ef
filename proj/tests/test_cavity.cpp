#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "pimsim/cavity.hpp"
#include "pimsim/lindblad.hpp"
#include "pimsim/operators.hpp"

using namespace pimsim;

namespace {

CavityParams params_for(double N, double kappa1, double kappad = 0.0,
                        double kappann = 0.0, double kappa2 = 1.0) {
    return {N * kappa2, kappa2, kappa1, kappad, kappann, FockSpace(default_cutoff(N))};
}

}  // namespace

TEST_CASE("cavity parameter bookkeeping") {
    auto p = params_for(8.0, 0.1);
    CHECK(p.N() == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(std::abs(p.alpha() - std::sqrt(8.0) * std::exp(Complex(0.0, -M_PI / 4.0))) < 1e-12);
    CHECK(p.nbar() == doctest::Approx((16.0 - 0.1) / 2.0).epsilon(1e-12));
    CHECK(std::norm(p.mu()) == doctest::Approx(p.nbar()).epsilon(1e-12));
    CHECK_THROWS_AS(params_for(8.0, -1.0), DomainError);
}

TEST_CASE("model 1") {
    SUBCASE("kappa1 = 0 leaves the coherent states dark") {
        auto p = params_for(6.0, 0.0);
        auto m = model1(p);
        REQUIRE(m.jumps.size() == 1);
        StateVector plus = coherent_state(p.alpha(), p.space);
        StateVector minus = coherent_state(-p.alpha(), p.space);
        CHECK((m.jumps[0].entries * plus.amplitudes).norm() < 1e-6);
        CHECK((m.jumps[0].entries * minus.amplitudes).norm() < 1e-6);
    }
    SUBCASE("rejects dephasing/recovery rates") {
        FockSpace s(20);
        CHECK_THROWS_AS(model1(CavityParams(4.0, 1.0, 0.0, 0.1, 0.0, s)), DomainError);
        CHECK_THROWS_AS(model1(CavityParams(4.0, 1.0, 0.0, 0.0, 0.1, s)), DomainError);
    }
}

TEST_CASE("model 2") {
    SUBCASE("idealized bit flip maps the even cat near the odd cat") {
        auto p = params_for(8.0, 0.04);
        auto m = model2(p);
        REQUIRE(m.jumps.size() == 2);
        auto [even, odd] = cat_states(p.alpha(), p.space);
        Vector image = m.jumps[1].entries * even.amplitudes;
        Matrix proj = Matrix::Identity(p.space.dim(), p.space.dim()) -
                      odd.amplitudes * odd.amplitudes.adjoint();
        CHECK((proj * image).norm() / image.norm() < 3.0 * std::exp(-2.0 * 8.0) + 1e-6);
    }
    SUBCASE("kappa1 = 0 reduces to model 1") {
        auto p = params_for(5.0, 0.0);
        auto m1 = model1(p);
        auto m2 = model2(p);
        REQUIRE(m1.jumps.size() == m2.jumps.size());
        CHECK((m1.jumps[0].entries - m2.jumps[0].entries).norm() == 0.0);
    }
    SUBCASE("steady states of models 1 and 2 converge") {
        auto p = params_for(8.0, 1e-3);
        StateVector bias = coherent_state(p.alpha(), p.space);
        auto r1 = steady_state_sector(model1(p), bias);
        auto r2 = steady_state_sector(model2(p), bias);
        Eigen::SelfAdjointEigenSolver<Matrix> es(r1.entries - r2.entries);
        const double trace_dist = 0.5 * es.eigenvalues().cwiseAbs().sum();
        CHECK(trace_dist < 0.05);
    }
}

TEST_CASE("toy model structure") {
    auto p = params_for(4.0, 0.1, 0.1, 0.3);
    auto m = toy_model(p);
    const int cd = p.space.dim();
    REQUIRE(m.jumps.size() == 4);
    CHECK(m.dim == 2 * cd);

    SUBCASE("l_nn annihilates the down sector") {
        // |down> is the first qubit basis vector
        Vector probe = Vector::Zero(2 * cd);
        for (int n = 0; n < cd; ++n) probe(n) = 1.0 / std::sqrt(double(cd));
        CHECK((m.jumps[3].entries * probe).norm() < 1e-14);
    }
    SUBCASE("l_1 flips the spin") {
        StateVector psi = tensor(StateVector(Vector{{1.0, 0.0}}),
                                 coherent_state(p.alpha(), p.space));
        Vector image = m.jumps[1].entries * psi.amplitudes;
        // the image lives entirely in the up sector
        CHECK(image.head(cd).norm() < 1e-14);
        CHECK(image.tail(cd).norm() > 0.1);
    }
    SUBCASE("codespace is dark without noise") {
        auto quiet = params_for(4.0, 0.0, 0.0, 0.0);
        auto mq = toy_model(quiet);
        StateVector psi = toy_initial_state(quiet);
        DensityMatrix rho = DensityMatrix::pure(psi);
        auto out = evolve(mq, rho, 3.0);
        CHECK((out.entries - rho.entries).norm() < 1e-8);
    }
    SUBCASE("initial state weights") {
        StateVector psi = toy_initial_state(p);
        CHECK(std::abs(psi.norm() - 1.0) < 1e-10);
        auto [even, odd] = cat_states(p.alpha(), p.space);
        Vector even_full = tensor(StateVector(Vector{{1.0, 0.0}}), even).amplitudes;
        CHECK(std::norm(even_full.dot(psi.amplitudes)) == doctest::Approx(0.2).epsilon(1e-9));
    }
}

TEST_CASE("toy model weak symmetry under photon parity") {
    // conjugation by I (x) Q: l_c, l_d commute, l_1 and l_nn anticommute.
    // The spin factor is a domain-wall marker, invariant under the global
    // flip, so the parity acts on the cavity alone.
    auto p = CavityParams(2.0, 1.0, 0.1, 0.1, 0.3, FockSpace(20));
    auto m = toy_model(p);
    Operator sym = tensor(identity(2, "spin"), parity(p.space));
    Matrix liou = build_liouvillian(m);
    const int d = m.dim;
    Matrix conj_super = Matrix::Zero(d * d, d * d);
    // superoperator of rho -> S rho S^dag, column stacking
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    const Complex v = sym.entries(i, k) * std::conj(sym.entries(j, l));
                    if (v != Complex(0.0, 0.0)) conj_super(j * d + i, l * d + k) += v;
                }
    CHECK((liou * conj_super - conj_super * liou).norm() < 1e-10 * liou.norm());
}

TEST_CASE("toy fidelity experiment basics") {
    SUBCASE("noiseless protocol returns fidelity 1") {
        auto curve = toy_fidelity_experiment(1.0, 0.0, 0.0, 0.0, {2.0, 4.0},
                                             RecoveryMode::KeepKnn, 4.0, 4.0);
        for (double f : curve.fidelity) CHECK(std::abs(f - 1.0) < 1e-7);
    }
    SUBCASE("fidelities stay inside [0, 1]") {
        auto curve = toy_fidelity_experiment(1.0, 0.1, 0.1, 0.3, {3.0},
                                             RecoveryMode::ZeroKnn, 5.0, 5.0);
        for (double f : curve.fidelity) {
            CHECK(f > -1e-8);
            CHECK(f < 1.0 + 1e-8);
        }
    }
}

TEST_CASE("overlap formula and scan") {
    SUBCASE("analytic overlap |<alpha|mu>|^2 over a 3x3 grid") {
        // the closed form is the leading order in kappa1 of
        // exp[-(sqrt(lam) - sqrt(lam - kappa1/2))^2]; the next correction
        // is ~kappa1^3/(128 lam^2), so the 1e-10 grid keeps kappa1 small
        for (double kappa1 : {1e-4, 3e-4, 1e-3}) {
            for (double lam : {2.0, 4.0, 8.0}) {
                const double kappa2 = 1.0;
                FockSpace s(default_cutoff(lam / kappa2 + 1.0));
                CavityParams p(lam, kappa2, kappa1, 0.0, 0.0, s);
                StateVector a = coherent_state(p.alpha(), s);
                StateVector mu = coherent_state(p.mu(), s);
                const double got = std::norm(a.amplitudes.dot(mu.amplitudes)) /
                                   (a.amplitudes.squaredNorm() * mu.amplitudes.squaredNorm());
                const double expect = std::exp(-kappa1 * kappa1 / (16.0 * kappa2 * lam));
                CHECK(std::abs(got - expect) < 1e-10);
            }
        }
    }
    SUBCASE("kappa1 = 0 falls back to sector evolution with overlap 1") {
        auto table = steady_overlap_scan(ModelFamily::Model2, {4.0}, {0.0});
        REQUIRE(table.size() == 1);
        CHECK(table[0].overlap == doctest::Approx(1.0).epsilon(1e-5));
    }
    SUBCASE("overlap grows with N at small kappa1") {
        auto table = steady_overlap_scan(ModelFamily::Model1, {2.0, 4.0, 6.0}, {1e-3});
        REQUIRE(table.size() == 3);
        CHECK(table[0].overlap < table[1].overlap);
        CHECK(table[1].overlap < table[2].overlap);
        CHECK(table[2].overlap > 0.99);
    }
}
