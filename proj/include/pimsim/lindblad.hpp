#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pimsim/operators.hpp"
#include "pimsim/rng.hpp"

namespace pimsim {

struct LindbladModel {
    Operator hamiltonian;
    std::vector<Operator> jumps;  // rate prefactors sqrt(kappa) absorbed
    int dim;

    static LindbladModel make(Operator hamiltonian, std::vector<Operator> jumps);
};

struct DensityMatrix {
    Matrix entries;

    static DensityMatrix pure(const StateVector& psi);
    // Hermiticity/trace/positivity sanity check (tolerances per contract).
    void validate() const;
    double trace_real() const { return entries.trace().real(); }
};

struct SpectrumResult {
    Vector eigenvalues;
    double gap;
    double tol_zero;
    int n_zero_modes;
};

// Column-stacking vectorization: L acts on vec(rho), columns stacked.
Matrix build_liouvillian(const LindbladModel& model);

// e^{Lt}(rho0). Matrix exponential (scaling and squaring) for
// dim^2 <= 4096, adaptive embedded Runge-Kutta on rho otherwise.
DensityMatrix evolve(const LindbladModel& model, const DensityMatrix& rho0, double t);

DensityMatrix steady_state(const LindbladModel& model);

// Sector-projected variant for weak symmetries: every kernel candidate is
// mapped through rho -> (rho + S rho S^dag)/2 before uniqueness is decided.
// Needed when an exponentially slow mode (e.g. cat-coherence decay) is
// numerically indistinguishable from the kernel but lives in the
// antisymmetric sector.
DensityMatrix steady_state(const LindbladModel& model, const Operator& symmetry);

// Metastable sector state: when an exponentially slow mode makes the
// numerical kernel two-dimensional, returns the PSD-extremal element of
// the kernel with maximal overlap against |bias> (sector selection by
// initial condition). A one-dimensional kernel reduces to steady_state;
// more than two kernel modes raise DegenerateSteadyState.
DensityMatrix steady_state_sector(const LindbladModel& model, const StateVector& bias);

SpectrumResult liouvillian_spectrum(const LindbladModel& model);
SpectrumResult dissipative_gap(const LindbladModel& model);

struct JumpEvent {
    double time;
    int channel;
};

struct TrajectoryResult {
    StateVector state;  // normalized final state
    std::vector<JumpEvent> jumps;
    // one row per checkpoint time, one column per observable (real parts)
    Eigen::MatrixXd checkpoint_values;
};

// Monte Carlo wavefunction unraveling: integrate the non-Hermitian
// effective Schroedinger equation until |psi|^2 hits a uniform draw,
// locate the jump time by bisection, select the channel proportional to
// |L_j psi|^2, renormalize, repeat.
TrajectoryResult trajectory(const LindbladModel& model, const StateVector& psi0,
                            double t_final, Rng rng,
                            std::span<const double> checkpoints = {},
                            std::span<const Operator> observables = {});

struct EnsembleStats {
    // [checkpoint][observable]
    Eigen::MatrixXd mean;
    Eigen::MatrixXd stderr_;
};

// Deterministic for fixed (seed, n_traj) regardless of worker count:
// trajectory i always uses Rng::stream(seed, i) and results merge in
// index order.
EnsembleStats ensemble_average(const LindbladModel& model, const StateVector& psi0,
                               double t_final, int n_traj,
                               std::span<const Operator> observables,
                               std::uint64_t seed, int workers = 0,
                               std::span<const double> checkpoints = {});

}  // namespace pimsim
