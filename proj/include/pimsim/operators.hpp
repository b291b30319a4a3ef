#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pimsim/errors.hpp"

namespace pimsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Truncated single-mode Fock space. Dimension is n_max + 1.
struct FockSpace {
    int n_max;
    double leak_tol = 1e-8;

    FockSpace(int n_max_, double leak_tol_ = 1e-8)
        : n_max(n_max_), leak_tol(leak_tol_) {
        if (n_max < 1) throw DomainError("FockSpace: n_max must be >= 1");
        if (leak_tol <= 0.0) throw DomainError("FockSpace: leak_tol must be > 0");
    }

    int dim() const { return n_max + 1; }
};

// Default cutoff for experiments whose largest coherent amplitude has
// |alpha|^2 = N. Keeps the coherent-state tail below ~1e-10.
int default_cutoff(double N);

// Dense operator with factor-structure metadata.
struct Operator {
    int dim;
    Matrix entries;
    std::string space_tag;

    Operator() : dim(0) {}
    Operator(Matrix m, std::string tag)
        : dim(static_cast<int>(m.rows())), entries(std::move(m)), space_tag(std::move(tag)) {}

    Operator adjoint() const { return {entries.adjoint(), space_tag}; }
};

struct StateVector {
    int dim;
    Vector amplitudes;

    StateVector() : dim(0) {}
    explicit StateVector(Vector v) : dim(static_cast<int>(v.size())), amplitudes(std::move(v)) {}

    double norm() const { return amplitudes.norm(); }
};

Operator annihilation(const FockSpace& space);
Operator creation(const FockSpace& space);
Operator number(const FockSpace& space);
Operator identity(int dim, const std::string& tag = "I");
Operator parity(const FockSpace& space);

// Qubit operators, basis {down, up} with Z|down> = +|down>.
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();

StateVector fock_state(int n, const FockSpace& space);
StateVector coherent_state(Complex alpha, const FockSpace& space);

// (even, odd) normalized cat states. Throws TruncationError on an
// inadequate cutoff and DomainError for the degenerate odd cat at alpha=0.
std::pair<StateVector, StateVector> cat_states(Complex alpha, const FockSpace& space);

// V = |a_e><a_e| + |a_o><a_o|, the rank-2 codespace projector.
Operator codespace_projector(Complex alpha, const FockSpace& space);

Operator tensor(std::span<const Operator> ops);
Operator tensor(const Operator& a, const Operator& b);
StateVector tensor(const StateVector& a, const StateVector& b);

// Diagonal entries -E_J e^{-x^2/2} L_n(x^2) of the rotating-wave Josephson
// Hamiltonian, evaluated as the diagonal of -E_J cos[x(a + a^dag)] through
// the spectral decomposition of the Hermitian quadrature. A convergence
// guard re-evaluates at n_max + 10 and requires the entries with
// n <= n_check to be stable to 1e-6.
Operator josephson_rwa_hamiltonian(double E_J, double x, const FockSpace& space,
                                   int n_check = -1);

// Same diagonal through the (scaled) Laguerre three-term recurrence on the
// bounded products e^{-x^2/2} L_n(x^2). Test-side cross-check route.
Eigen::VectorXd josephson_diagonal_laguerre(double E_J, double x, int n_max);

}  // namespace pimsim
