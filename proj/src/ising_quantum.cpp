#include "pimsim/ising_quantum.hpp"

namespace pimsim {

namespace {

// Z_a Z_b bond sign and X_site action are diagonal-friendly; build dense
// matrices directly in the computational basis (site s = bit s, 0 = down,
// Z|down> = +1).
Matrix site_x(int site, int nsites) {
    const int dim = 1 << nsites;
    Matrix m = Matrix::Zero(dim, dim);
    for (int s = 0; s < dim; ++s) m(s ^ (1 << site), s) = 1.0;
    return m;
}

double z_sign(int state, int site) { return ((state >> site) & 1) ? -1.0 : 1.0; }

Matrix bond_projector(int a, int b, int sign, int nsites) {
    const int dim = 1 << nsites;
    Matrix m = Matrix::Zero(dim, dim);
    for (int s = 0; s < dim; ++s) {
        const double zz = z_sign(s, a) * z_sign(s, b);
        m(s, s) = 0.5 * (1.0 + sign * zz);
    }
    return m;
}

}  // namespace

LindbladModel ising_lattice_model(int M, const RateParams& rates) {
    const int nsites = M * M;
    if (nsites > 16) throw DomainError("ising_lattice_model: lattice too large");
    const int dim = 1 << nsites;
    auto idx = [M](int x, int y) { return ((y % M + M) % M) * M + ((x % M + M) % M); };

    std::vector<Operator> jumps;
    for (int y = 0; y < M; ++y) {
        for (int x = 0; x < M; ++x) {
            const int site = idx(x, y);
            const Matrix flip = site_x(site, nsites);
            if (rates.delta > 0.0)
                jumps.emplace_back((std::sqrt(rates.delta) * flip).eval(), "lattice");

            // the four bonds touching (x, y), in rotational order
            const std::pair<int, int> bonds[4] = {{site, idx(x + 1, y)},
                                                  {site, idx(x, y + 1)},
                                                  {idx(x - 1, y), site},
                                                  {idx(x, y - 1), site}};
            if (rates.kappa > 0.0) {
                Matrix proj = Matrix::Identity(dim, dim);
                for (const auto& [a, b] : bonds) proj = proj * bond_projector(a, b, -1, nsites);
                Matrix l4 = std::sqrt(rates.kappa) * flip * proj;
                if (l4.cwiseAbs().maxCoeff() > 0.0) jumps.emplace_back(std::move(l4), "lattice");
            }
            if (rates.kappa_tilde > 0.0) {
                for (int r = 0; r < 4; ++r) {
                    Matrix proj = Matrix::Identity(dim, dim);
                    for (int k = 0; k < 4; ++k)
                        proj = proj * bond_projector(bonds[k].first, bonds[k].second,
                                                     k == r ? +1 : -1, nsites);
                    Matrix l3 = std::sqrt(rates.kappa_tilde) * flip * proj;
                    if (l3.cwiseAbs().maxCoeff() > 0.0)
                        jumps.emplace_back(std::move(l3), "lattice");
                }
            }
        }
    }
    return LindbladModel::make(Operator(Matrix::Zero(dim, dim), "lattice"), std::move(jumps));
}

Operator lattice_magnetization(int M) {
    const int nsites = M * M;
    const int dim = 1 << nsites;
    Matrix m = Matrix::Zero(dim, dim);
    for (int s = 0; s < dim; ++s) {
        double z = 0.0;
        for (int site = 0; site < nsites; ++site) z += z_sign(s, site);
        m(s, s) = z / nsites;
    }
    return {std::move(m), "lattice"};
}

StateVector lattice_basis_state(const SpinConfig& config) {
    const int dim = 1 << config.sites();
    Vector v = Vector::Zero(dim);
    v(static_cast<int>(config.pack())) = 1.0;
    return StateVector(std::move(v));
}

}  // namespace pimsim
