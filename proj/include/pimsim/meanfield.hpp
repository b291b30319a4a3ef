#pragma once

#include <complex>
#include <string>
#include <vector>

#include "pimsim/errors.hpp"

namespace pimsim {

struct MFInputs {
    double kappa1;
    double kappad;
    double kappann;
    double lam;
    double kappa2;

    // kappann_tilde = sqrt(kappa1 kappann + kappa1^2) - kappa1
    double kappann_tilde() const;
};

enum class Phase { FerroCat, CatOnly, Trivial };

std::string phase_name(Phase p);

struct MeanFieldPoint {
    double Q_sq;      // <Q>^2 in [0, 1]
    double alpha_sq;  // |alpha_MF|^2 >= 0
    double Z_exp;     // toy model only; NaN otherwise
    Phase phase;
};

// Toy-model fixed point: <Z> = kappann/(kappann + 2 kappa1) and
// kappa2 |alpha|^2 = lam - (kappa1 + kappad + kappa1 kappann/(kappann+2kappa1))/2,
// clamped at zero (phase Trivial).
MeanFieldPoint toy_fixed_point(const MFInputs& in);

// Photonic-Ising fixed point from the closed forms; the returned <Q>^2 is
// checked against the quintic equation of motion (residual < 1e-12) and
// forced to zero whenever alpha_sq = 0.
MeanFieldPoint photonic_ising_fixed_point(const MFInputs& in);

// Residual of the quintic fixed-point condition at <Q>^2 = q_sq.
double q_fixed_point_residual(const MFInputs& in, double q_sq);

struct MeanFieldTrajectory {
    std::vector<double> times;
    std::vector<double> Q;
    std::vector<double> a_sq_re;
    std::vector<double> a_sq_im;
};

// Integrates the coupled <Q>, <a^2> equations of motion.
MeanFieldTrajectory meanfield_ode(const MFInputs& in, double Q0, std::complex<double> a0,
                                  double t_final, int n_samples = 200);

struct PhaseDiagramCell {
    double kappa1;
    double kappad;
    MeanFieldPoint point;
};

// Grid classification over (kappa1, kappad); diagonal kappa_d = kappa_1
// scans pass the same list twice and read the matching cells.
std::vector<PhaseDiagramCell> phase_diagram(const std::vector<double>& kappa1_values,
                                            const std::vector<double>& kappad_values,
                                            double kappann, double lam, double kappa2);

}  // namespace pimsim
