#pragma once

#include <vector>

#include "pimsim/lindblad.hpp"
#include "pimsim/operators.hpp"

namespace pimsim {

// Parameters of the single-cavity and cavity-spin models. alpha points
// along e^{-i pi/4} with |alpha|^2 = N = lam / kappa2; mu carries the
// single-photon-loss shift.
struct CavityParams {
    double lam;
    double kappa2;
    double kappa1 = 0.0;
    double kappad = 0.0;
    double kappann = 0.0;
    FockSpace space;

    CavityParams(double lam_, double kappa2_, double kappa1_, double kappad_,
                 double kappann_, FockSpace space_);

    double N() const { return lam / kappa2; }
    Complex alpha() const;
    // mu = sqrt((2 lam - kappa1)/(2 kappa2)) e^{-i pi/4}
    Complex mu() const;
    double nbar() const { return (2.0 * lam - kappa1) / (2.0 * kappa2); }
};

// Jumps [L_c, L_1] with L_c = sqrt(kappa2)(a^2 - alpha^2), L_1 = sqrt(kappa1) a,
// H = 0 (gauge-eliminated form).
LindbladModel model1(const CavityParams& params);

// Jumps [L_c, E_1] with the idealized bit flip E_1 = sqrt(kappa1) a V.
LindbladModel model2(const CavityParams& params);

// Spin-cavity model: l_c, l_1 = sqrt(kappa1) X a, l_d = sqrt(kappad) n,
// l_nn = sqrt(kappann) |down><up| a. dim = 2 (n_max + 1).
LindbladModel toy_model(const CavityParams& params);

// psi = (1/sqrt5)|down>|a_e> + (2 e^{i pi/4}/sqrt5)|down>|a_o>
StateVector toy_initial_state(const CavityParams& params);

enum class RecoveryMode { KeepKnn, ZeroKnn };

struct FidelityCurve {
    std::vector<double> N_values;
    std::vector<double> fidelity;
    double T_noisy;
    double T_recovery;
    RecoveryMode mode;
};

// Noisy evolution for T_noisy, then noiseless recovery (kappa1 = kappad = 0,
// kappann kept or zeroed by `mode`) for T_recovery; fidelity <psi|rho_f|psi>.
// Each scan point re-derives its Fock cutoff from N. Deterministic.
FidelityCurve toy_fidelity_experiment(double kappa2, double kappa1, double kappad,
                                      double kappann, const std::vector<double>& N_values,
                                      RecoveryMode mode, double T_noisy = 15.0,
                                      double T_recovery = 15.0);

enum class ModelFamily { Model1, Model2 };

struct OverlapPoint {
    double N;
    double kappa1;
    double overlap;  // <mu|rho_ss|mu>
};

// Relaxation gap above the two-dimensional metastable manifold: slowest
// real part after excluding the two slowest modes. The classical-bit mode
// of the cat models decays exponentially slowly in |alpha|^2; at small
// drive it sits above the kernel tolerance and would otherwise be
// reported as the gap.
double metastable_gap(const LindbladModel& model);

// Steady-state overlap grid. For kappa1 = 0 the Liouvillian kernel is
// degenerate; the scan then falls back to long-time evolution from |alpha>
// (sector selection by initial state).
std::vector<OverlapPoint> steady_overlap_scan(ModelFamily family,
                                              const std::vector<double>& N_values,
                                              const std::vector<double>& kappa1_values,
                                              double kappa2 = 1.0);

}  // namespace pimsim
