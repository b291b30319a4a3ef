#include "pimsim/operators.hpp"

#include <cmath>
#include <numbers>

namespace pimsim {

int default_cutoff(double N) {
    return static_cast<int>(std::ceil(N + 8.0 * std::sqrt(N) + 10.0));
}

Operator annihilation(const FockSpace& space) {
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    for (int n = 1; n <= space.n_max; ++n) m(n - 1, n) = std::sqrt(double(n));
    return {std::move(m), "cavity"};
}

Operator creation(const FockSpace& space) {
    return {annihilation(space).entries.adjoint(), "cavity"};
}

Operator number(const FockSpace& space) {
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    for (int n = 0; n <= space.n_max; ++n) m(n, n) = double(n);
    return {std::move(m), "cavity"};
}

Operator identity(int dim, const std::string& tag) {
    return {Matrix::Identity(dim, dim), tag};
}

Operator parity(const FockSpace& space) {
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    for (int n = 0; n <= space.n_max; ++n) m(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
    return {std::move(m), "cavity"};
}

Operator pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return {std::move(m), "qubit"};
}

Operator pauli_y() {
    Matrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return {std::move(m), "qubit"};
}

Operator pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return {std::move(m), "qubit"};
}

StateVector fock_state(int n, const FockSpace& space) {
    if (n < 0 || n > space.n_max) throw DomainError("fock_state: n out of range");
    Vector v = Vector::Zero(space.dim());
    v(n) = 1.0;
    return StateVector(std::move(v));
}

StateVector coherent_state(Complex alpha, const FockSpace& space) {
    const double n2 = std::norm(alpha);
    Vector v(space.dim());
    // amplitudes via the log-recurrence c_{n} = c_{n-1} * alpha / sqrt(n)
    v(0) = std::exp(-n2 / 2.0);
    for (int n = 1; n <= space.n_max; ++n) v(n) = v(n - 1) * alpha / std::sqrt(double(n));
    const double deficit = std::abs(1.0 - v.squaredNorm());
    if (deficit > space.leak_tol)
        throw TruncationError("coherent_state: norm deficit " + std::to_string(deficit) +
                              " exceeds leak_tol at n_max=" + std::to_string(space.n_max));
    return StateVector(std::move(v));
}

std::pair<StateVector, StateVector> cat_states(Complex alpha, const FockSpace& space) {
    if (std::abs(alpha) == 0.0)
        throw DomainError("cat_states: odd cat undefined at alpha=0");
    StateVector plus = coherent_state(alpha, space);
    StateVector minus = coherent_state(-alpha, space);
    Vector even = plus.amplitudes + minus.amplitudes;
    Vector odd = plus.amplitudes - minus.amplitudes;
    const double ne = even.norm(), no = odd.norm();
    if (no == 0.0) throw DomainError("cat_states: odd cat has zero norm");
    even /= ne;
    odd /= no;
    return {StateVector(std::move(even)), StateVector(std::move(odd))};
}

Operator codespace_projector(Complex alpha, const FockSpace& space) {
    auto [even, odd] = cat_states(alpha, space);
    Matrix v = even.amplitudes * even.amplitudes.adjoint() +
               odd.amplitudes * odd.amplitudes.adjoint();
    return {std::move(v), "cavity"};
}

Operator tensor(const Operator& a, const Operator& b) {
    Matrix m(a.dim * b.dim, a.dim * b.dim);
    for (int i = 0; i < a.dim; ++i)
        for (int j = 0; j < a.dim; ++j)
            m.block(i * b.dim, j * b.dim, b.dim, b.dim) = a.entries(i, j) * b.entries;
    return {std::move(m), a.space_tag + "⊗" + b.space_tag};
}

Operator tensor(std::span<const Operator> ops) {
    if (ops.empty()) throw DomainError("tensor: empty operator list");
    Operator acc = ops[0];
    for (std::size_t k = 1; k < ops.size(); ++k) acc = tensor(acc, ops[k]);
    return acc;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    Vector v(a.dim * b.dim);
    for (int i = 0; i < a.dim; ++i)
        v.segment(i * b.dim, b.dim) = a.amplitudes(i) * b.amplitudes;
    return StateVector(std::move(v));
}

namespace {

// diag of -E_J cos[x(a+a^dag)] on a cutoff-n_max space
Eigen::VectorXd josephson_diagonal_spectral(double E_J, double x, int n_max) {
    const int dim = n_max + 1;
    Eigen::MatrixXd quad = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 1; n <= n_max; ++n) {
        quad(n - 1, n) = x * std::sqrt(double(n));
        quad(n, n - 1) = quad(n - 1, n);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(quad);
    if (es.info() != Eigen::Success)
        throw EigensolverFailure("josephson_rwa_hamiltonian: quadrature eigensolve failed");
    const Eigen::VectorXd cosw = es.eigenvalues().array().cos();
    const Eigen::MatrixXd& u = es.eigenvectors();
    Eigen::VectorXd diag(dim);
    for (int n = 0; n < dim; ++n)
        diag(n) = -E_J * (u.row(n).array().square() * cosw.transpose().array()).sum();
    return diag;
}

}  // namespace

Operator josephson_rwa_hamiltonian(double E_J, double x, const FockSpace& space,
                                   int n_check) {
    if (x < 0.0) throw DomainError("josephson_rwa_hamiltonian: x must be >= 0");
    if (n_check < 0) n_check = space.n_max / 2;
    n_check = std::min(n_check, space.n_max);
    const Eigen::VectorXd diag = josephson_diagonal_spectral(E_J, x, space.n_max);
    const Eigen::VectorXd wider = josephson_diagonal_spectral(E_J, x, space.n_max + 10);
    const double drift =
        (diag.head(n_check + 1) - wider.head(n_check + 1)).cwiseAbs().maxCoeff();
    if (drift > 1e-6 * std::max(1.0, std::abs(E_J)))
        throw ConvergenceError(
            "josephson_rwa_hamiltonian: diagonal not converged at n_max=" +
            std::to_string(space.n_max) + " (drift " + std::to_string(drift) + ")");
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    for (int n = 0; n <= space.n_max; ++n) m(n, n) = diag(n);
    return {std::move(m), "cavity"};
}

Eigen::VectorXd josephson_diagonal_laguerre(double E_J, double x, int n_max) {
    // forward recurrence on f_n = e^{-x^2/2} L_n(x^2); the products stay
    // bounded by 1 even where L_n itself overflows
    const double x2 = x * x;
    Eigen::VectorXd f(n_max + 1);
    f(0) = std::exp(-x2 / 2.0);
    if (n_max >= 1) f(1) = f(0) * (1.0 - x2);
    for (int n = 1; n < n_max; ++n)
        f(n + 1) = ((2.0 * n + 1.0 - x2) * f(n) - n * f(n - 1)) / (n + 1.0);
    return -E_J * f;
}

}  // namespace pimsim
