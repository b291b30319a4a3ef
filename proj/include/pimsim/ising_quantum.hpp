#pragma once

#include "pimsim/ising.hpp"
#include "pimsim/lindblad.hpp"

namespace pimsim {

// Spin-1/2 Ising Lindbladian on an M x M periodic lattice: H = 0, uniform
// flips sqrt(Delta) X_i, 4-wall corrections sqrt(kappa) X_i P..., and the
// four rotational 3-wall jumps at rate kappa_tilde. Projector products on
// coinciding bonds (M = 2) collapse exactly as in the operator algebra, so
// the model stays faithful at the smallest sizes. Identically zero jumps
// are dropped. dim = 2^{M^2}; practical only for M <= 2 (trajectories) or
// M <= 3 (operator algebra checks).
LindbladModel ising_lattice_model(int M, const RateParams& rates);

// sum_i Z_i / M^2 as an operator on the same space
Operator lattice_magnetization(int M);

// basis state |config> of the lattice model
StateVector lattice_basis_state(const SpinConfig& config);

}  // namespace pimsim
