#include "pimsim/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include "pimsim/detail/rk45.hpp"
#include "pimsim/parallel.hpp"

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace pimsim {

namespace {

// Dense non-Hermitian eigendecomposition via zgeev.
// with_vectors=false leaves `vectors` empty.
void zgeev_eig(Matrix a, Vector& values, Matrix& vectors, bool with_vectors) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    values.resize(n);
    if (with_vectors) vectors.resize(n, n);
    const lapack_int info = LAPACKE_zgeev(
        LAPACK_COL_MAJOR, 'N', with_vectors ? 'V' : 'N', n, a.data(), n,
        values.data(), nullptr, 1, with_vectors ? vectors.data() : nullptr,
        with_vectors ? n : 1);
    if (info != 0)
        throw EigensolverFailure("zgeev failed with info=" + std::to_string(info));
}

using Sparse = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

void append_kron(std::vector<Triplet>& out, const Matrix& a, const Matrix& b,
                 Complex scale) {
    const int d = static_cast<int>(a.rows());
    for (int aj = 0; aj < d; ++aj)
        for (int ai = 0; ai < d; ++ai) {
            const Complex av = a(ai, aj);
            if (av == Complex(0.0, 0.0)) continue;
            for (int bj = 0; bj < d; ++bj)
                for (int bi = 0; bi < d; ++bi) {
                    const Complex bv = b(bi, bj);
                    if (bv == Complex(0.0, 0.0)) continue;
                    out.emplace_back(ai * d + bi, aj * d + bj, scale * av * bv);
                }
        }
}

// Same generator as build_liouvillian, exact-zero entries dropped. The
// banded jump structure of the cavity models keeps this sparse enough for
// cheap matvecs in the large-dimension evolve path.
Sparse build_sparse_liouvillian(const LindbladModel& model) {
    const int d = model.dim;
    const Matrix id = Matrix::Identity(d, d);
    const Complex im(0.0, 1.0);
    std::vector<Triplet> trip;
    const Matrix& h = model.hamiltonian.entries;
    if (h.cwiseAbs().maxCoeff() > 0.0) {
        append_kron(trip, id, h, -im);
        append_kron(trip, h.transpose(), id, im);
    }
    for (const auto& jump : model.jumps) {
        const Matrix& l = jump.entries;
        const Matrix ldl = l.adjoint() * l;
        append_kron(trip, l.conjugate(), l, 1.0);
        append_kron(trip, id, ldl, -0.5);
        append_kron(trip, ldl.transpose(), id, -0.5);
    }
    Sparse liou(d * d, d * d);
    liou.setFromTriplets(trip.begin(), trip.end());
    liou.makeCompressed();
    return liou;
}

Matrix vec_to_matrix(const Vector& v, int dim) {
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Vector matrix_to_vec(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

// Right-hand side of the master equation evaluated in matrix form;
// cheaper than the dim^2 x dim^2 superoperator for large models.
struct MasterEqRhs {
    const Matrix* h;
    std::vector<std::pair<const Matrix*, Matrix>> jumps;  // (L, L^dag L)

    explicit MasterEqRhs(const LindbladModel& model) : h(&model.hamiltonian.entries) {
        for (const auto& j : model.jumps)
            jumps.emplace_back(&j.entries, (j.entries.adjoint() * j.entries).eval());
    }

    Matrix operator()(double, const Matrix& rho) const {
        const Complex im(0.0, 1.0);
        Matrix out = -im * ((*h) * rho - rho * (*h));
        for (const auto& [l, ldl] : jumps) {
            out.noalias() += (*l) * rho * l->adjoint();
            out.noalias() -= 0.5 * (ldl * rho + rho * ldl);
        }
        return out;
    }
};

}  // namespace

LindbladModel LindbladModel::make(Operator hamiltonian, std::vector<Operator> jumps) {
    const int dim = hamiltonian.dim;
    for (const auto& j : jumps)
        if (j.dim != dim) throw DimensionMismatch("LindbladModel: jump dim mismatch");
    if ((hamiltonian.entries - hamiltonian.entries.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw DomainError("LindbladModel: Hamiltonian not Hermitian");
    return {std::move(hamiltonian), std::move(jumps), dim};
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    return {psi.amplitudes * psi.amplitudes.adjoint()};
}

void DensityMatrix::validate() const {
    if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
        throw DomainError("DensityMatrix: not Hermitian");
    if (std::abs(entries.trace().real() - 1.0) > 1e-9 || std::abs(entries.trace().imag()) > 1e-9)
        throw DomainError("DensityMatrix: trace != 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (entries + entries.adjoint()));
    if (es.eigenvalues().minCoeff() < -1e-7)
        throw DomainError("DensityMatrix: negative eigenvalue " +
                          std::to_string(es.eigenvalues().minCoeff()));
}

Matrix build_liouvillian(const LindbladModel& model) {
    const int d = model.dim;
    const Matrix id = Matrix::Identity(d, d);
    const Complex im(0.0, 1.0);
    Matrix liou = Matrix::Zero(d * d, d * d);

    auto kron = [d](const Matrix& a, const Matrix& b) {
        Matrix out(d * d, d * d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                out.block(i * d, j * d, d, d) = a(i, j) * b;
        return out;
    };

    // column stacking: vec(A rho B) = (B^T kron A) vec(rho)
    const Matrix& h = model.hamiltonian.entries;
    liou -= im * (kron(id, h) - kron(h.transpose(), id));
    for (const auto& jump : model.jumps) {
        const Matrix& l = jump.entries;
        const Matrix ldl = l.adjoint() * l;
        liou += kron(l.conjugate(), l);
        liou -= 0.5 * kron(id, ldl);
        liou -= 0.5 * kron(ldl.transpose(), id);
    }
    return liou;
}

DensityMatrix evolve(const LindbladModel& model, const DensityMatrix& rho0, double t) {
    if (t < 0.0) throw DomainError("evolve: t must be >= 0");
    if (rho0.entries.rows() != model.dim) throw DimensionMismatch("evolve: rho dim");
    if (t == 0.0) return rho0;

    Matrix rho;
    // scaling-and-squaring of the full superoperator is cubic in dim^2;
    // above this size the vectorized sparse integrator wins by a wide
    // margin on a single core
    if (model.dim * model.dim <= 1024) {
        const Matrix propagator = (build_liouvillian(model) * t).exp();
        rho = vec_to_matrix((propagator * matrix_to_vec(rho0.entries)).eval(), model.dim);
    } else {
        const Sparse liou = build_sparse_liouvillian(model);
        // fall back to the matrix-form right-hand side if the generator is
        // effectively dense (e.g. projector-valued jumps)
        if (liou.nonZeros() < static_cast<long>(liou.rows()) * 64L) {
            auto rhs = [&liou](double, const Vector& v) -> Vector { return liou * v; };
            Vector y = matrix_to_vec(rho0.entries);
            detail::rk45_integrate(rhs, 0.0, t, y, 1e-9, 1e-12);
            rho = vec_to_matrix(y, model.dim);
        } else {
            MasterEqRhs rhs(model);
            rho = rho0.entries;
            detail::rk45_integrate(rhs, 0.0, t, rho, 1e-9, 1e-12);
        }
    }
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return {std::move(rho)};
}

SpectrumResult liouvillian_spectrum(const LindbladModel& model) {
    Vector values;
    Matrix vectors;
    zgeev_eig(build_liouvillian(model), values, vectors, false);
    const double radius = values.cwiseAbs().maxCoeff();
    const double tol_zero = 1e-10 * radius;
    int n_zero = 0;
    double gap = 0.0;
    for (int i = 0; i < values.size(); ++i) {
        if (std::abs(values(i)) < tol_zero) {
            ++n_zero;
        } else if (values(i).real() < -tol_zero) {
            const double decay = -values(i).real();
            if (gap == 0.0 || decay < gap) gap = decay;
        }
    }
    return {std::move(values), gap, tol_zero, n_zero};
}

SpectrumResult dissipative_gap(const LindbladModel& model) {
    return liouvillian_spectrum(model);
}

DensityMatrix steady_state(const LindbladModel& model) {
    const Matrix liou = build_liouvillian(model);
    Vector values;
    Matrix vectors;
    zgeev_eig(liou, values, vectors, true);
    const double radius = values.cwiseAbs().maxCoeff();
    const double tol_zero = 1e-10 * radius;

    int best = 0;
    for (int i = 0; i < values.size(); ++i)
        if (std::abs(values(i)) < std::abs(values(best))) best = i;
    // A physically slow mode (e.g. cat-coherence decay ~ e^{-2N}) can dip
    // below tol_zero while the kernel stays one-dimensional; degeneracy
    // requires a second eigenvalue at the same numerical-noise scale as
    // the kernel eigenvalue itself.
    const double noise_floor = 100.0 * std::max(std::abs(values(best)), 1e-14 * radius);
    int n_zero = 0;
    for (int i = 0; i < values.size(); ++i)
        if (std::abs(values(i)) < std::min(tol_zero, noise_floor)) ++n_zero;
    if (n_zero > 1)
        throw DegenerateSteadyState("steady_state: " + std::to_string(n_zero) +
                                    " eigenvalues at the kernel noise floor; select a "
                                    "sector or evolve from a chosen initial state");

    Matrix rho = vec_to_matrix(vectors.col(best), model.dim);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    const double residual = (liou * matrix_to_vec(rho)).norm();
    if (residual > 1e-8 * radius)
        throw EigensolverFailure("steady_state: residual " + std::to_string(residual) +
                                 " exceeds 1e-8 * spectral radius");
    return {std::move(rho)};
}

DensityMatrix steady_state(const LindbladModel& model, const Operator& symmetry) {
    if (symmetry.dim != model.dim) throw DimensionMismatch("steady_state: symmetry dim");
    const Matrix liou = build_liouvillian(model);
    Vector values;
    Matrix vectors;
    zgeev_eig(liou, values, vectors, true);
    const double radius = values.cwiseAbs().maxCoeff();
    const double tol_zero = 1e-10 * radius;

    std::vector<Matrix> survivors;
    for (int i = 0; i < values.size(); ++i) {
        if (std::abs(values(i)) >= tol_zero) continue;
        Matrix rho = vec_to_matrix(vectors.col(i), model.dim);
        rho = 0.5 * (rho + symmetry.entries * rho * symmetry.entries.adjoint()).eval();
        rho = 0.5 * (rho + rho.adjoint()).eval();
        if (rho.norm() < 1e-6) continue;  // candidate lived in the other sector
        survivors.push_back(std::move(rho));
    }
    if (survivors.empty())
        throw DegenerateSteadyState("steady_state: no kernel weight in the symmetric sector");
    for (std::size_t i = 1; i < survivors.size(); ++i) {
        const Complex ip = (survivors[0].adjoint() * survivors[i]).trace();
        if (std::abs(ip) / (survivors[0].norm() * survivors[i].norm()) < 1.0 - 1e-6)
            throw DegenerateSteadyState(
                "steady_state: kernel degenerate within the symmetric sector; select by "
                "long-time evolution");
    }
    Matrix rho = survivors[0];
    if (std::abs(rho.trace()) < 1e-8 * rho.norm())
        throw DegenerateSteadyState("steady_state: symmetric kernel candidate is traceless");
    rho /= rho.trace().real();
    const double residual = (liou * matrix_to_vec(rho)).norm();
    if (residual > 1e-8 * radius)
        throw EigensolverFailure("steady_state: residual " + std::to_string(residual) +
                                 " exceeds 1e-8 * spectral radius");
    return {std::move(rho)};
}

DensityMatrix steady_state_sector(const LindbladModel& model, const StateVector& bias) {
    if (bias.dim != model.dim) throw DimensionMismatch("steady_state_sector: bias dim");
    const Matrix liou = build_liouvillian(model);
    Vector values;
    Matrix vectors;
    zgeev_eig(liou, values, vectors, true);
    const double radius = values.cwiseAbs().maxCoeff();
    const double tol_zero = 1e-10 * radius;

    std::vector<int> kernel;
    for (int i = 0; i < values.size(); ++i)
        if (std::abs(values(i)) < tol_zero) kernel.push_back(i);
    if (kernel.empty()) {
        int best = 0;
        for (int i = 0; i < values.size(); ++i)
            if (std::abs(values(i)) < std::abs(values(best))) best = i;
        kernel.push_back(best);
    }
    if (kernel.size() > 2)
        throw DegenerateSteadyState("steady_state_sector: kernel dimension " +
                                    std::to_string(kernel.size()) +
                                    " > 2; select by long-time evolution");

    auto hermitize = [&](int i) {
        Matrix m = vec_to_matrix(vectors.col(i), model.dim);
        return (0.5 * (m + m.adjoint())).eval();
    };
    Matrix rho0;
    Matrix sigma;
    bool have_sigma = false;
    if (kernel.size() == 1) {
        rho0 = hermitize(kernel[0]);
        if (std::abs(rho0.trace()) < 1e-8 * rho0.norm())
            throw DegenerateSteadyState("steady_state_sector: traceless kernel candidate");
        rho0 /= rho0.trace().real();
    } else {
        // Frobenius-orthonormal basis of the hermitized kernel plane; the
        // raw candidates can be arbitrarily trace-poor mixtures.
        Matrix e1 = hermitize(kernel[0]);
        e1 /= e1.norm();
        Matrix e2 = hermitize(kernel[1]);
        e2 -= (e1.adjoint() * e2).trace().real() * e1;
        if (e2.norm() < 1e-8)
            throw DegenerateSteadyState("steady_state_sector: kernel plane collapsed");
        e2 /= e2.norm();
        const double t1 = e1.trace().real(), t2 = e2.trace().real();
        const double tn = t1 * t1 + t2 * t2;
        if (tn < 1e-16)
            throw DegenerateSteadyState("steady_state_sector: traceless kernel plane");
        rho0 = (t1 * e1 + t2 * e2) / tn;                     // trace 1
        sigma = (-t2 * e1 + t1 * e2) / std::sqrt(tn);        // traceless
        have_sigma = sigma.norm() > 1e-10;
        if (have_sigma) sigma /= sigma.norm();
    }

    if (have_sigma) {
        {
            auto min_eig = [&](double c) {
                Eigen::SelfAdjointEigenSolver<Matrix> es(rho0 + c * sigma,
                                                          Eigen::EigenvaluesOnly);
                return es.eigenvalues().minCoeff();
            };
            // PSD boundary in each direction; extreme points are the
            // sector states
            auto boundary = [&](double dir) {
                double lo = 0.0, hi = dir;
                while (min_eig(hi) > -1e-13 && std::abs(hi) < 1e6) hi *= 2.0;
                for (int it = 0; it < 100; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (min_eig(mid) > -1e-13 ? lo : hi) = mid;
                }
                return lo;
            };
            const Matrix plus = rho0 + boundary(1.0) * sigma;
            const Matrix minus = rho0 + boundary(-1.0) * sigma;
            const Vector& b = bias.amplitudes;
            const double op = (b.adjoint() * plus * b)(0, 0).real();
            const double om = (b.adjoint() * minus * b)(0, 0).real();
            rho0 = (op >= om) ? plus : minus;
        }
    }
    const double residual = (liou * matrix_to_vec(rho0)).norm();
    if (residual > 1e-8 * radius)
        throw EigensolverFailure("steady_state_sector: residual " +
                                 std::to_string(residual) + " exceeds 1e-8 * spectral radius");
    return {std::move(rho0)};
}

namespace {

struct SchrodingerRhs {
    const Matrix* h_eff;  // -i H - 1/2 sum L^dag L
    Vector operator()(double, const Vector& psi) const { return (*h_eff) * psi; }
};

}  // namespace

TrajectoryResult trajectory(const LindbladModel& model, const StateVector& psi0,
                            double t_final, Rng rng,
                            std::span<const double> checkpoints,
                            std::span<const Operator> observables) {
    if (std::abs(psi0.norm() - 1.0) > 1e-8)
        throw DomainError("trajectory: psi0 not normalized");

    const Complex im(0.0, 1.0);
    Matrix h_eff = -im * model.hamiltonian.entries;
    for (const auto& j : model.jumps)
        h_eff -= 0.5 * (j.entries.adjoint() * j.entries);

    SchrodingerRhs rhs{&h_eff};
    detail::Rk45<Vector, SchrodingerRhs> stepper(rhs, 1e-10, 1e-13);

    TrajectoryResult result;
    result.checkpoint_values.resize(static_cast<Eigen::Index>(checkpoints.size()),
                                    static_cast<Eigen::Index>(observables.size()));

    Vector psi = psi0.amplitudes;
    double t = 0.0;
    double threshold = rng.uniform_pos();
    std::size_t next_checkpoint = 0;

    // Records every pending checkpoint with time <= up_to by re-integrating
    // a copy of `state` (valid at time `from`) exactly to the checkpoint.
    auto record_until = [&](double from, const Vector& state, double up_to) {
        while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] <= up_to) {
            Vector probe = state;
            if (checkpoints[next_checkpoint] > from)
                detail::rk45_integrate(rhs, from, checkpoints[next_checkpoint], probe, 1e-10,
                                       1e-13);
            const Vector normed = probe / probe.norm();
            for (std::size_t k = 0; k < observables.size(); ++k)
                result.checkpoint_values(static_cast<Eigen::Index>(next_checkpoint),
                                         static_cast<Eigen::Index>(k)) =
                    normed.dot(observables[k].entries * normed).real();
            ++next_checkpoint;
        }
    };

    record_until(0.0, psi, 0.0);

    while (t < t_final) {
        const Vector psi_before = psi;
        const double t_before = t;
        const double h = stepper.step(t, t_final, psi);
        t += h;
        if (psi.squaredNorm() > threshold) {
            record_until(t_before, psi_before, t);
            continue;
        }

        // jump inside (t_before, t]; bisect to relative tolerance 1e-10
        double lo = t_before, hi = t;
        Vector psi_hi = psi;
        while ((hi - lo) > 1e-10 * std::max(hi, 1.0)) {
            const double mid = 0.5 * (lo + hi);
            Vector probe = psi_before;
            detail::rk45_integrate(rhs, t_before, mid, probe, 1e-10, 1e-13);
            if (probe.squaredNorm() > threshold) {
                lo = mid;
            } else {
                hi = mid;
                psi_hi = std::move(probe);
            }
        }
        const double t_jump = hi;
        record_until(t_before, psi_before, t_jump);

        // channel selection proportional to |L_j psi|^2
        std::vector<double> weights(model.jumps.size());
        double total = 0.0;
        for (std::size_t j = 0; j < model.jumps.size(); ++j) {
            weights[j] = (model.jumps[j].entries * psi_hi).squaredNorm();
            total += weights[j];
        }
        if (total <= 0.0)
            throw IntegrationError("trajectory: vanishing jump weights at located jump time");
        double draw = rng.uniform() * total;
        std::size_t channel = 0;
        for (; channel + 1 < weights.size(); ++channel) {
            if (draw < weights[channel]) break;
            draw -= weights[channel];
        }

        psi = model.jumps[channel].entries * psi_hi;
        psi /= psi.norm();
        result.jumps.push_back({t_jump, static_cast<int>(channel)});
        t = t_jump;
        threshold = rng.uniform_pos();
        stepper.reset();
    }

    // any checkpoint that coincides with t_final up to roundoff
    record_until(t, psi, t_final);

    psi /= psi.norm();
    result.state = StateVector(std::move(psi));
    return result;
}

EnsembleStats ensemble_average(const LindbladModel& model, const StateVector& psi0,
                               double t_final, int n_traj,
                               std::span<const Operator> observables,
                               std::uint64_t seed, int workers,
                               std::span<const double> checkpoints) {
    if (n_traj < 1) throw DomainError("ensemble_average: n_traj must be >= 1");

    std::vector<double> default_checkpoint{t_final};
    if (checkpoints.empty()) checkpoints = default_checkpoint;

    const auto rows = static_cast<Eigen::Index>(checkpoints.size());
    const auto cols = static_cast<Eigen::Index>(observables.size());
    std::vector<Eigen::MatrixXd> per_traj(n_traj);
    parallel_for(n_traj, workers, [&](int i) {
        auto res = trajectory(model, psi0, t_final,
                              Rng::stream(seed, static_cast<std::uint64_t>(i)),
                              checkpoints, observables);
        per_traj[i] = std::move(res.checkpoint_values);
    });

    EnsembleStats stats;
    stats.mean = Eigen::MatrixXd::Zero(rows, cols);
    stats.stderr_ = Eigen::MatrixXd::Zero(rows, cols);
    for (int i = 0; i < n_traj; ++i) stats.mean += per_traj[i];
    stats.mean /= n_traj;
    if (n_traj > 1) {
        for (int i = 0; i < n_traj; ++i)
            stats.stderr_ += (per_traj[i] - stats.mean).cwiseAbs2();
        stats.stderr_ = (stats.stderr_ / (n_traj - 1.0)).cwiseSqrt() / std::sqrt(double(n_traj));
    }
    return stats;
}

}  // namespace pimsim
