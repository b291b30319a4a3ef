#include "pimsim/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pimsim {

namespace {
const Complex kPhase = std::exp(Complex(0.0, -std::numbers::pi / 4.0));
}

CavityParams::CavityParams(double lam_, double kappa2_, double kappa1_, double kappad_,
                           double kappann_, FockSpace space_)
    : lam(lam_), kappa2(kappa2_), kappa1(kappa1_), kappad(kappad_), kappann(kappann_),
      space(space_) {
    if (lam < 0.0 || kappa2 <= 0.0 || kappa1 < 0.0 || kappad < 0.0 || kappann < 0.0)
        throw DomainError("CavityParams: invalid rates");
}

Complex CavityParams::alpha() const { return kPhase * std::sqrt(N()); }

Complex CavityParams::mu() const {
    const double shifted = (2.0 * lam - kappa1) / (2.0 * kappa2);
    if (shifted < 0.0) throw DomainError("CavityParams: mu undefined, 2 lam < kappa1");
    return kPhase * std::sqrt(shifted);
}

namespace {

Operator cat_stabilizer_jump(const CavityParams& p) {
    const Operator a = annihilation(p.space);
    const Complex alpha2 = p.alpha() * p.alpha();
    Matrix lc = std::sqrt(p.kappa2) *
                (a.entries * a.entries - alpha2 * Matrix::Identity(p.space.dim(), p.space.dim()));
    return {std::move(lc), "cavity"};
}

}  // namespace

LindbladModel model1(const CavityParams& p) {
    if (p.kappad != 0.0 || p.kappann != 0.0)
        throw DomainError("model1: kappad and kappann must be zero");
    const Operator a = annihilation(p.space);
    std::vector<Operator> jumps;
    jumps.push_back(cat_stabilizer_jump(p));
    if (p.kappa1 > 0.0)
        jumps.emplace_back((std::sqrt(p.kappa1) * a.entries).eval(), "cavity");
    return LindbladModel::make(Operator(Matrix::Zero(p.space.dim(), p.space.dim()), "cavity"),
                               std::move(jumps));
}

LindbladModel model2(const CavityParams& p) {
    if (p.kappad != 0.0 || p.kappann != 0.0)
        throw DomainError("model2: kappad and kappann must be zero");
    const Operator a = annihilation(p.space);
    std::vector<Operator> jumps;
    jumps.push_back(cat_stabilizer_jump(p));
    if (p.kappa1 > 0.0) {
        const Operator v = codespace_projector(p.alpha(), p.space);
        jumps.emplace_back((std::sqrt(p.kappa1) * a.entries * v.entries).eval(), "cavity");
    }
    return LindbladModel::make(Operator(Matrix::Zero(p.space.dim(), p.space.dim()), "cavity"),
                               std::move(jumps));
}

LindbladModel toy_model(const CavityParams& p) {
    const int cav_dim = p.space.dim();
    const Operator a = annihilation(p.space);
    const Operator id2 = identity(2, "qubit");
    const Operator idc = identity(cav_dim, "cavity");

    std::vector<Operator> jumps;
    jumps.push_back(tensor(id2, cat_stabilizer_jump(p)));
    if (p.kappa1 > 0.0) {
        Operator l1 = tensor(pauli_x(), a);
        l1.entries *= std::sqrt(p.kappa1);
        jumps.push_back(std::move(l1));
    }
    if (p.kappad > 0.0) {
        Operator ld = tensor(id2, number(p.space));
        ld.entries *= std::sqrt(p.kappad);
        jumps.push_back(std::move(ld));
    }
    if (p.kappann > 0.0) {
        // X (1 - Z)/2 = |down><up|
        Matrix down_up = Matrix::Zero(2, 2);
        down_up(0, 1) = 1.0;
        Operator lnn = tensor(Operator(std::move(down_up), "qubit"), a);
        lnn.entries *= std::sqrt(p.kappann);
        jumps.push_back(std::move(lnn));
    }
    return LindbladModel::make(
        Operator(Matrix::Zero(2 * cav_dim, 2 * cav_dim), "qubit⊗cavity"), std::move(jumps));
}

StateVector toy_initial_state(const CavityParams& p) {
    auto [even, odd] = cat_states(p.alpha(), p.space);
    StateVector down(Vector{{1.0, 0.0}});
    const Complex c1 = 1.0 / std::sqrt(5.0);
    const Complex c2 = 2.0 * std::exp(Complex(0.0, std::numbers::pi / 4.0)) / std::sqrt(5.0);
    StateVector psi = tensor(down, even);
    psi.amplitudes = c1 * psi.amplitudes + c2 * tensor(down, odd).amplitudes;
    return psi;
}

FidelityCurve toy_fidelity_experiment(double kappa2, double kappa1, double kappad,
                                      double kappann, const std::vector<double>& N_values,
                                      RecoveryMode mode, double T_noisy, double T_recovery) {
    FidelityCurve curve;
    curve.T_noisy = T_noisy;
    curve.T_recovery = T_recovery;
    curve.mode = mode;
    for (const double N : N_values) {
        const FockSpace space(default_cutoff(N));
        const CavityParams noisy(N * kappa2, kappa2, kappa1, kappad, kappann, space);
        const double knn_rec = (mode == RecoveryMode::KeepKnn) ? kappann : 0.0;
        const CavityParams quiet(N * kappa2, kappa2, 0.0, 0.0, knn_rec, space);

        const StateVector psi = toy_initial_state(noisy);
        DensityMatrix rho = DensityMatrix::pure(psi);
        rho = evolve(toy_model(noisy), rho, T_noisy);
        rho = evolve(toy_model(quiet), rho, T_recovery);
        const double fid = psi.amplitudes.dot(rho.entries * psi.amplitudes).real();
        curve.N_values.push_back(N);
        curve.fidelity.push_back(fid);
    }
    return curve;
}

double metastable_gap(const LindbladModel& model) {
    const SpectrumResult spec = liouvillian_spectrum(model);
    std::vector<double> re(spec.eigenvalues.size());
    for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i)
        re[i] = spec.eigenvalues(i).real();
    std::sort(re.begin(), re.end(),
              [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (re.size() < 3) throw DomainError("metastable_gap: spectrum too small");
    return -re[2];
}

std::vector<OverlapPoint> steady_overlap_scan(ModelFamily family,
                                              const std::vector<double>& N_values,
                                              const std::vector<double>& kappa1_values,
                                              double kappa2) {
    std::vector<OverlapPoint> table;
    for (const double N : N_values) {
        for (const double kappa1 : kappa1_values) {
            const FockSpace space(default_cutoff(N));
            const CavityParams p(N * kappa2, kappa2, kappa1, 0.0, 0.0, space);
            const LindbladModel model =
                (family == ModelFamily::Model1) ? model1(p) : model2(p);
            DensityMatrix rho;
            try {
                rho = steady_state_sector(model, coherent_state(p.alpha(), space));
            } catch (const DegenerateSteadyState&) {
                // kappa1 = 0 leaves a steady-state manifold; pick the
                // |alpha> sector by long-time evolution (t = 200/kappa2)
                rho = evolve(model, DensityMatrix::pure(coherent_state(p.alpha(), space)),
                             200.0 / kappa2);
            }
            const StateVector mu_state = coherent_state(p.mu(), space);
            const double overlap =
                mu_state.amplitudes.dot(rho.entries * mu_state.amplitudes).real();
            table.push_back({N, kappa1, overlap});
        }
    }
    return table;
}

}  // namespace pimsim
