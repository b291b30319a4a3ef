#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pimsim/errors.hpp"
#include "pimsim/rng.hpp"

namespace pimsim {

// (Delta, kappa, kappa_tilde, beta) linked by the detailed-balance
// relations kappa_tilde = sqrt(Delta kappa + Delta^2) - Delta and
// beta = ln[(kappa + Delta)/Delta] / 8.
struct RateParams {
    double delta;
    double kappa;
    double kappa_tilde;
    double beta;

    static RateParams from_rates(double delta, double kappa);
    static RateParams from_beta(double beta, double kappa);
    // Idealized-bit-flip mapping: Delta = N kappa1, kappa = N kappa_nn,
    // beta = ln[(kappa_nn + kappa1)/kappa1] / 8.
    static RateParams from_photonic(double kappa1, double kappa_nn, double N);
};

// M x M periodic lattice of binary spins (0 = down = Z+1, 1 = up) with a
// cached partition of sites into classes by misaligned-neighbor count.
// Neighbors are counted per direction, so the two bonds of an M=2 pair
// contribute twice; this matches the per-site projector products.
class SpinConfig {
public:
    static SpinConfig all_down(int M);
    static SpinConfig all_up(int M);
    static SpinConfig random(int M, Rng& rng);

    int size() const { return M_; }
    int sites() const { return M_ * M_; }
    int spin(int site) const { return spins_[site]; }
    int spin(int x, int y) const { return spins_[index(x, y)]; }
    int index(int x, int y) const { return ((y % M_ + M_) % M_) * M_ + ((x % M_ + M_) % M_); }

    int misaligned(int site) const { return cls_[site]; }
    int class_count(int n) const { return static_cast<int>(members_[n].size()); }
    // n-th member of a class; iteration order is implementation detail
    int class_member(int n, int k) const { return members_[n][k]; }

    void flip(int site);
    void set_spin(int site, int value);
    void flip_all();

    int count_up() const;
    // (sites_down - sites_up) / M^2, i.e. the Z magnetization density
    double magnetization() const;
    // misaligned count recomputed from the spin array, no cache
    int misaligned_fresh(int site) const;

    std::uint64_t pack() const;  // row-major bitmask, site 0 = LSB
    static SpinConfig unpack(std::uint64_t bits, int M);

private:
    explicit SpinConfig(int M);
    void rebuild_classes();
    void reclassify(int site);

    int M_;
    std::vector<std::uint8_t> spins_;
    std::vector<std::uint8_t> cls_;
    std::vector<std::int32_t> pos_;               // position within class vector
    std::array<std::vector<std::int32_t>, 5> members_;
    std::vector<std::int32_t> nbr_;               // 4 precomputed neighbors per site
};

// r = Delta + kappa_tilde [n=3] + kappa [n=4]
double flip_rate(const SpinConfig& config, int site, const RateParams& rates);

inline constexpr std::uint64_t kDefaultEventCap = 1'000'000'000ULL;

// Exact Gillespie realization of the classical master equation defined by
// flip_rate. Returns the event count. An optional observer fires at each
// checkpoint time with the configuration frozen at that instant.
std::uint64_t kmc_run(SpinConfig& config, const RateParams& rates, double T, Rng& rng,
                      std::span<const double> checkpoints = {},
                      const std::function<void(std::size_t, const SpinConfig&)>& observer = {},
                      std::uint64_t event_cap = kDefaultEventCap);

// Ising energy H_is = -sum_bonds Z Z of a packed configuration.
double ising_energy(std::uint64_t bits, int M);

// Full 2^{M^2} classical generator; column s holds rates out of state s.
Eigen::MatrixXd build_classical_generator(int M, const RateParams& rates);

// Kernel of the generator, asserted against exp(-beta H_is)/Z to total
// variation < 1e-10. M <= 3.
Eigen::VectorXd exact_stationary(int M, const RateParams& rates);
Eigen::VectorXd gibbs_distribution(int M, double beta);

enum class Decoder { GlobalMajority, ConnectedComponent };

// 0 if the decoded logical state is all-down, 1 if all-up. Exact ties are
// resolved by an unbiased coin; *tie reports whether one occurred.
int decode_majority(const SpinConfig& config, Rng& tie_rng, bool* tie = nullptr);
// Variant that flips the smallest connected minority components until a
// majority decision is possible; see documented decoder discussion.
int decode_component(const SpinConfig& config, Rng& tie_rng, bool* tie = nullptr);

struct MemoryExperimentResult {
    int M;
    double beta;
    double T;
    int n_traj;
    double success_prob;
    double stderr_;
    std::string decoder;
    double wall_time_s;
    std::uint64_t total_events;
    int n_ties;
};

MemoryExperimentResult memory_experiment(int M, double beta, double kappa, double T,
                                         int n_traj, std::uint64_t seed, int workers = 0,
                                         Decoder decoder = Decoder::GlobalMajority,
                                         bool start_up = false);

// One synchronous Toom (NEC) step: majority of {self, north, east}
// computed from the pre-step configuration, then independent noise flips
// with probability flip_prob.
void toom_step(SpinConfig& config, double flip_prob, Rng& rng);

}  // namespace pimsim
