#include "pimsim/meanfield.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>

#include "pimsim/detail/rk45.hpp"

namespace pimsim {

double MFInputs::kappann_tilde() const {
    if (kappa1 < 0.0 || kappann < 0.0) throw DomainError("MFInputs: negative rate");
    return std::sqrt(kappa1 * kappann + kappa1 * kappa1) - kappa1;
}

std::string phase_name(Phase p) {
    switch (p) {
        case Phase::FerroCat: return "ferro_cat";
        case Phase::CatOnly: return "cat_only";
        case Phase::Trivial: return "trivial";
    }
    return "?";
}

MeanFieldPoint toy_fixed_point(const MFInputs& in) {
    if (in.kappa2 <= 0.0) throw DomainError("toy_fixed_point: kappa2 must be > 0");
    const double z = (in.kappann + 2.0 * in.kappa1 > 0.0)
                         ? in.kappann / (in.kappann + 2.0 * in.kappa1)
                         : 0.0;
    double a_sq = (in.lam -
                   0.5 * (in.kappa1 + in.kappad +
                          (in.kappann + 2.0 * in.kappa1 > 0.0
                               ? in.kappa1 * in.kappann / (in.kappann + 2.0 * in.kappa1)
                               : 0.0))) /
                  in.kappa2;
    Phase phase = Phase::FerroCat;
    if (a_sq <= 0.0) {
        a_sq = 0.0;
        phase = Phase::Trivial;
    } else if (z == 0.0) {
        phase = Phase::CatOnly;
    }
    return {z * z, a_sq, z, phase};
}

namespace {

// Coefficients of the <Q> equation of motion written as
// -(1/2|alpha|^2) dQ/dt = c5 Q^5 + c3 Q^3 - c1 Q.
struct QuinticCoeffs {
    double c5, c3, c1;
};

QuinticCoeffs quintic(const MFInputs& in) {
    const double kt = in.kappann_tilde();
    return {(in.kappann - 4.0 * kt) / 16.0, (in.kappann + 4.0 * kt) / 8.0,
            (3.0 * in.kappann + 4.0 * kt) / 16.0 - in.kappa1};
}

// gamma polynomial kappann <P_k> + kappann_tilde <P_kt> entering the
// |alpha_MF|^2 numerator
double gamma_poly(const MFInputs& in, double q_sq) {
    const double kt = in.kappann_tilde();
    const double g4 = (-3.0 * in.kappann + 4.0 * kt) / 16.0;
    const double g2 = (in.kappann - 4.0 * kt) / 8.0;
    const double g0 = (in.kappann + 4.0 * kt) / 16.0;
    return g4 * q_sq * q_sq + g2 * q_sq + g0;
}

double alpha_sq_numerator(const MFInputs& in, double q_sq) {
    return 2.0 * in.lam - in.kappa1 - 2.0 * in.kappad - gamma_poly(in, q_sq);
}

// dq/dt = -q (c5 q^4 + c3 q^2 - c1) is attracting at q>0 iff the bracket
// has positive slope through zero there.
bool stable_root(const QuinticCoeffs& c, double q_sq) {
    return 5.0 * c.c5 * q_sq * q_sq + 3.0 * c.c3 * q_sq - c.c1 > 0.0;
}

}  // namespace

double q_fixed_point_residual(const MFInputs& in, double q_sq) {
    const QuinticCoeffs c = quintic(in);
    const double q = std::sqrt(q_sq);
    return q * (c.c5 * q_sq * q_sq + c.c3 * q_sq - c.c1);
}

MeanFieldPoint photonic_ising_fixed_point(const MFInputs& in) {
    if (in.kappa2 <= 0.0)
        throw DomainError("photonic_ising_fixed_point: kappa2 must be > 0");
    const QuinticCoeffs c = quintic(in);
    const double denom = 16.0 * c.c5;  // = kappann - 4 kappann_tilde

    double q_sq = 0.0;
    if (std::abs(denom) < 1e-12) {
        // vanishing leading coefficient: the quadratic in Q^2 is linear
        if (c.c3 > 0.0) {
            const double root = c.c1 / c.c3;
            if (root > 0.0 && root <= 1.0) q_sq = root;
        }
    } else {
        const double kt = in.kappann_tilde();
        const double radicand =
            in.kappann * in.kappann - 4.0 * in.kappa1 * (in.kappann - 4.0 * kt);
        if (radicand >= 0.0) {
            const double s = std::sqrt(radicand);
            const double roots[2] = {(2.0 * s - in.kappann - 4.0 * kt) / denom,
                                     (-2.0 * s - in.kappann - 4.0 * kt) / denom};
            bool found = false;
            for (const double r : roots) {
                if (r > 0.0 && r <= 1.0) {
                    if (!found || stable_root(c, r)) q_sq = r;
                    found = true;
                }
            }
        }
    }

    double a_sq = alpha_sq_numerator(in, q_sq);
    Phase phase;
    if (a_sq <= 0.0) {
        // <Q>^2 != 0 requires |alpha_MF|^2 != 0
        a_sq = 0.0;
        q_sq = 0.0;
        phase = Phase::Trivial;
    } else {
        a_sq /= 2.0 * in.kappa2;
        phase = q_sq > 0.0 ? Phase::FerroCat : Phase::CatOnly;
    }
    if (q_sq > 0.0 && std::abs(q_fixed_point_residual(in, q_sq)) > 1e-12)
        throw DomainError("photonic_ising_fixed_point: root fails the quintic residual");
    return {q_sq, a_sq, std::numeric_limits<double>::quiet_NaN(), phase};
}

MeanFieldTrajectory meanfield_ode(const MFInputs& in, double Q0, std::complex<double> a0,
                                  double t_final, int n_samples) {
    if (Q0 < -1.0 || Q0 > 1.0) throw DomainError("meanfield_ode: Q0 must be in [-1,1]");
    const QuinticCoeffs c = quintic(in);

    // state = (Q, Re a2, Im a2); thermodynamic-limit form of the <a^2>
    // equation (2|alpha|^2 + 1 -> 2|alpha|^2), matching the closed-form
    // fixed points
    auto rhs = [&](double, const Eigen::Vector3d& y) -> Eigen::Vector3d {
        const double q = y(0);
        const std::complex<double> a2(y(1), y(2));
        const double n = std::abs(a2);
        const double q_sq = q * q;
        const double dq = -2.0 * n * q * (c.c5 * q_sq * q_sq + c.c3 * q_sq - c.c1);
        const std::complex<double> da2 =
            -2.0 * in.kappa2 * n * a2 - std::complex<double>(0.0, 2.0 * in.lam) * n -
            (in.kappa1 + 2.0 * in.kappad + gamma_poly(in, q_sq)) * a2;
        return {dq, da2.real(), da2.imag()};
    };

    Eigen::Vector3d y(Q0, a0.real(), a0.imag());
    MeanFieldTrajectory traj;
    for (int k = 0; k <= n_samples; ++k) {
        const double t0 = t_final * k / double(n_samples);
        if (k > 0)
            detail::rk45_integrate(rhs, t_final * (k - 1) / double(n_samples), t0, y, 1e-10,
                                   1e-12);
        traj.times.push_back(t0);
        traj.Q.push_back(y(0));
        traj.a_sq_re.push_back(y(1));
        traj.a_sq_im.push_back(y(2));
    }
    return traj;
}

std::vector<PhaseDiagramCell> phase_diagram(const std::vector<double>& kappa1_values,
                                            const std::vector<double>& kappad_values,
                                            double kappann, double lam, double kappa2) {
    std::vector<PhaseDiagramCell> cells;
    cells.reserve(kappa1_values.size() * kappad_values.size());
    for (const double kd : kappad_values)
        for (const double k1 : kappa1_values) {
            if (k1 < 0.0 || kd < 0.0) throw DomainError("phase_diagram: negative grid value");
            const MFInputs in{k1, kd, kappann, lam, kappa2};
            cells.push_back({k1, kd, photonic_ising_fixed_point(in)});
        }
    return cells;
}

}  // namespace pimsim
