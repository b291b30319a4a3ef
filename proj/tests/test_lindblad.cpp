#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "pimsim/lindblad.hpp"
#include "pimsim/operators.hpp"
#include "pimsim/rng.hpp"

using namespace pimsim;

namespace {

Operator sigma_minus() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return {std::move(m), "qubit"};
}

LindbladModel amplitude_damping(double kappa) {
    Operator l = sigma_minus();
    l.entries *= std::sqrt(kappa);
    return LindbladModel::make(Operator(Matrix::Zero(2, 2), "qubit"), {l});
}

Matrix random_hermitian(int dim, Rng& rng) {
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            m(i, j) = Complex(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
    return 0.5 * (m + m.adjoint());
}

// Eq-by-eq right-hand side, written independently of the library code.
Matrix direct_rhs(const LindbladModel& model, const Matrix& rho) {
    const Complex im(0.0, 1.0);
    Matrix out = -im * (model.hamiltonian.entries * rho - rho * model.hamiltonian.entries);
    for (const auto& j : model.jumps) {
        const Matrix& l = j.entries;
        out += l * rho * l.adjoint();
        out -= 0.5 * (l.adjoint() * l * rho + rho * l.adjoint() * l);
    }
    return out;
}

}  // namespace

TEST_CASE("liouvillian construction") {
    SUBCASE("trivial model gives the zero matrix") {
        auto model = LindbladModel::make(Operator(Matrix::Zero(3, 3), "x"), {});
        CHECK(build_liouvillian(model).norm() == 0.0);
    }
    SUBCASE("amplitude damping spectrum, brute-force oracle") {
        const double kappa = 0.7;
        Matrix liou = build_liouvillian(amplitude_damping(kappa));
        Eigen::ComplexEigenSolver<Matrix> es(liou);  // independent of zgeev
        std::vector<double> re(4);
        for (int i = 0; i < 4; ++i) re[i] = es.eigenvalues()(i).real();
        std::sort(re.begin(), re.end());
        CHECK(re[0] == doctest::Approx(-kappa).epsilon(1e-10));
        CHECK(re[1] == doctest::Approx(-kappa / 2).epsilon(1e-10));
        CHECK(re[2] == doctest::Approx(-kappa / 2).epsilon(1e-10));
        CHECK(std::abs(re[3]) < 1e-12);

        auto spec = liouvillian_spectrum(amplitude_damping(kappa));
        CHECK(spec.n_zero_modes == 1);
        CHECK(spec.gap == doctest::Approx(kappa / 2).epsilon(1e-10));
    }
    SUBCASE("action matches the directly evaluated master equation") {
        Rng rng(12345);
        FockSpace s(7);
        Operator h(random_hermitian(8, rng), "cavity");
        Operator l1((random_hermitian(8, rng) * Complex(0.3, 0.1)).eval(), "cavity");
        Operator l2 = annihilation(s);
        auto model = LindbladModel::make(h, {l1, l2});
        Matrix liou = build_liouvillian(model);
        for (int trial = 0; trial < 20; ++trial) {
            Matrix rho = random_hermitian(8, rng);
            Eigen::Map<const Vector> v(rho.data(), 64);
            Vector lhs = liou * v;
            Matrix rhs = direct_rhs(model, rho);
            Eigen::Map<const Vector> w(rhs.data(), 64);
            CHECK((lhs - w).norm() < 1e-10 * std::max(1.0, w.norm()));
        }
    }
    SUBCASE("vec(I) is a left null vector") {
        Rng rng(7);
        Operator h(random_hermitian(4, rng), "x");
        Operator l((random_hermitian(4, rng) * Complex(0.2, 0.9)).eval(), "x");
        Matrix liou = build_liouvillian(LindbladModel::make(h, {l}));
        Matrix id = Matrix::Identity(4, 4);
        Eigen::Map<const Vector> vec_id(id.data(), 16);
        CHECK((vec_id.adjoint() * liou).norm() < 1e-10 * liou.norm());
    }
    SUBCASE("dimension and hermiticity validation") {
        Operator h(Matrix::Zero(2, 2), "x");
        Operator bad(Matrix::Zero(3, 3), "x");
        CHECK_THROWS_AS(LindbladModel::make(h, {bad}), DimensionMismatch);
        Matrix nh = Matrix::Zero(2, 2);
        nh(0, 1) = 1.0;
        CHECK_THROWS_AS(LindbladModel::make(Operator(nh, "x"), {}), DomainError);
    }
}

TEST_CASE("evolve") {
    SUBCASE("t = 0 is the identity map") {
        auto model = amplitude_damping(1.0);
        Matrix r = Matrix::Zero(2, 2);
        r(1, 1) = 1.0;
        auto out = evolve(model, {r}, 0.0);
        CHECK((out.entries - r).norm() == 0.0);
    }
    SUBCASE("damped cavity photon number decays exponentially") {
        FockSpace s(12);
        const double kappa = 0.8;
        Operator l = annihilation(s);
        l.entries *= std::sqrt(kappa);
        auto model = LindbladModel::make(Operator(Matrix::Zero(13, 13), "cavity"), {l});
        Matrix r = Matrix::Zero(13, 13);
        r(5, 5) = 1.0;  // n0 = 5
        for (double t : {0.3, 1.0, 2.5}) {
            auto out = evolve(model, {r}, t);
            const double n = (out.entries * number(s).entries).trace().real();
            CHECK(std::abs(n - 5.0 * std::exp(-kappa * t)) < 1e-6);
        }
    }
    SUBCASE("semigroup property and positivity") {
        Rng rng(99);
        Operator h(random_hermitian(5, rng), "x");
        Operator l((random_hermitian(5, rng) * Complex(0.4, 0.2)).eval(), "x");
        auto model = LindbladModel::make(h, {l});
        Matrix r = Matrix::Zero(5, 5);
        r(0, 0) = 0.5;
        r(4, 4) = 0.5;
        r(0, 4) = r(4, 0) = 0.3;
        auto one = evolve(model, {r}, 1.7);
        auto two = evolve(model, evolve(model, {r}, 0.9), 0.8);
        CHECK((one.entries - two.entries).norm() < 1e-8);
        CHECK(std::abs(one.trace_real() - 1.0) < 1e-8);
        Eigen::SelfAdjointEigenSolver<Matrix> es(one.entries);
        CHECK(es.eigenvalues().minCoeff() > -1e-7);
    }
    SUBCASE("two-photon model conserves parity expectation") {
        FockSpace s(24);
        const double lam = 2.0, kappa2 = 1.0;
        Operator a = annihilation(s);
        Matrix a2 = a.entries * a.entries;
        Operator h(((lam * (a2 + a2.adjoint()))).eval(), "cavity");
        Operator l2((std::sqrt(kappa2) * a2).eval(), "cavity");
        auto model = LindbladModel::make(h, {l2});
        StateVector psi = coherent_state(1.1, s);
        psi.amplitudes /= psi.norm();
        DensityMatrix rho = DensityMatrix::pure(psi);
        const double q0 = (rho.entries * parity(s).entries).trace().real();
        auto out = evolve(model, rho, 2.0);
        const double q1 = (out.entries * parity(s).entries).trace().real();
        CHECK(std::abs(q1 - q0) < 1e-6);
    }
}

TEST_CASE("steady state and gap") {
    SUBCASE("amplitude damping settles in the ground state") {
        auto rho = steady_state(amplitude_damping(0.6));
        CHECK(std::abs(rho.entries(0, 0).real() - 1.0) < 1e-10);
        CHECK(std::abs(rho.entries(1, 1).real()) < 1e-10);
    }
    SUBCASE("amplitude damping gap is kappa/2") {
        auto spec = dissipative_gap(amplitude_damping(1.0));
        CHECK(spec.gap == doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("two-photon-only cat model has a degenerate kernel") {
        FockSpace s(24);
        Operator a = annihilation(s);
        const Complex alpha2 = Complex(0.0, -4.0);  // alpha = e^{-i pi/4} * 2
        Matrix lc = a.entries * a.entries - alpha2 * Matrix::Identity(25, 25);
        auto model = LindbladModel::make(Operator(Matrix::Zero(25, 25), "cavity"),
                                         {Operator(lc, "cavity")});
        CHECK_THROWS_AS(steady_state(model), DegenerateSteadyState);
    }
    SUBCASE("gap is invariant under the jump gauge shift") {
        Rng rng(31);
        const Complex c(0.3, 0.0);
        Operator l((random_hermitian(4, rng) * Complex(0.5, 0.3)).eval(), "x");
        auto plain = LindbladModel::make(Operator(Matrix::Zero(4, 4), "x"), {l});
        Operator shifted((l.entries - c * Matrix::Identity(4, 4)).eval(), "x");
        // compensating Hamiltonian keeps the generator identical
        const Complex im(0.0, 1.0);
        Matrix h = -0.5 * im * (std::conj(-c) * l.entries - (-c) * l.entries.adjoint());
        auto gauged = LindbladModel::make(Operator((0.5 * (h + h.adjoint())).eval(), "x"),
                                          {shifted});
        auto sa = liouvillian_spectrum(plain);
        auto sb = liouvillian_spectrum(gauged);
        std::vector<Complex> ea(sa.eigenvalues.data(), sa.eigenvalues.data() + 16);
        std::vector<Complex> eb(sb.eigenvalues.data(), sb.eigenvalues.data() + 16);
        auto key = [](const Complex& x, const Complex& y) {
            return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
        };
        std::sort(ea.begin(), ea.end(), key);
        std::sort(eb.begin(), eb.end(), key);
        for (int i = 0; i < 16; ++i) CHECK(std::abs(ea[i] - eb[i]) < 1e-9);
        CHECK(std::abs(sa.gap - sb.gap) < 1e-9);
    }
}

TEST_CASE("trajectories") {
    SUBCASE("no jumps from the dark state") {
        auto model = amplitude_damping(1.0);
        StateVector ground(Vector{{1.0, 0.0}});
        auto res = trajectory(model, ground, 5.0, Rng(3));
        CHECK(res.jumps.empty());
        CHECK(std::abs(std::abs(res.state.amplitudes(0)) - 1.0) < 1e-10);
    }
    SUBCASE("jump times from the excited state are Exponential(kappa)") {
        const double kappa = 1.3;
        auto model = amplitude_damping(kappa);
        StateVector excited(Vector{{0.0, 1.0}});
        const int n = 10000;
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            auto res = trajectory(model, excited, 60.0 / kappa, Rng::stream(2024, i));
            REQUIRE(res.jumps.size() == 1);
            sum += res.jumps[0].time;
            sum_sq += res.jumps[0].time * res.jumps[0].time;
        }
        const double mean = sum / n;
        const double sd = std::sqrt((sum_sq / n - mean * mean) / (n - 1.0));
        CHECK(std::abs(mean - 1.0 / kappa) < 3.0 * sd);
    }
    SUBCASE("identical (seed, index) gives bit-identical jump logs") {
        auto model = amplitude_damping(0.9);
        StateVector excited(Vector{{0.0, 1.0}});
        auto a = trajectory(model, excited, 10.0, Rng::stream(55, 4));
        auto b = trajectory(model, excited, 10.0, Rng::stream(55, 4));
        REQUIRE(a.jumps.size() == b.jumps.size());
        for (std::size_t i = 0; i < a.jumps.size(); ++i) {
            CHECK(a.jumps[i].time == b.jumps[i].time);
            CHECK(a.jumps[i].channel == b.jumps[i].channel);
        }
    }
}

TEST_CASE("ensemble averaging on a random 3-level model") {
    Rng rng(404);
    Operator h(random_hermitian(3, rng), "x");
    Operator l1((random_hermitian(3, rng) * Complex(0.5, 0.1)).eval(), "x");
    Operator l2((random_hermitian(3, rng) * Complex(0.0, 0.4)).eval(), "x");
    auto model = LindbladModel::make(h, {l1, l2});
    Vector p0(3);
    p0 << 1.0, 0.0, 0.0;
    StateVector psi(p0);
    std::vector<Operator> obs;
    Matrix n1 = Matrix::Zero(3, 3);
    n1(1, 1) = 1.0;
    obs.emplace_back(n1, "x");
    const double t = 1.0;

    SUBCASE("matches exact evolution within 3 standard errors") {
        auto stats = ensemble_average(model, psi, t, 10000, obs, 17);
        auto exact = evolve(model, DensityMatrix::pure(psi), t);
        const double target = (exact.entries * n1).trace().real();
        CHECK(std::abs(stats.mean(0, 0) - target) < 3.0 * std::max(stats.stderr_(0, 0), 1e-6));
    }
    SUBCASE("n_traj = 1 equals a single trajectory") {
        auto one = ensemble_average(model, psi, t, 1, obs, 17);
        std::vector<double> cp{t};
        auto single = trajectory(model, psi, t, Rng::stream(17, 0), cp, obs);
        CHECK(one.mean(0, 0) == single.checkpoint_values(0, 0));
    }
    SUBCASE("stderr shrinks by half from 1000 to 4000 trajectories") {
        auto small = ensemble_average(model, psi, t, 1000, obs, 29);
        auto big = ensemble_average(model, psi, t, 4000, obs, 29);
        CHECK(small.stderr_(0, 0) / big.stderr_(0, 0) == doctest::Approx(2.0).epsilon(0.2));
    }
    SUBCASE("worker count does not change the result") {
        auto w1 = ensemble_average(model, psi, t, 200, obs, 8, 1);
        auto w3 = ensemble_average(model, psi, t, 200, obs, 8, 3);
        CHECK(w1.mean(0, 0) == w3.mean(0, 0));
    }
}
