#include "pimsim/ising.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "pimsim/parallel.hpp"

namespace pimsim {

RateParams RateParams::from_rates(double delta, double kappa) {
    if (delta < 0.0 || kappa < 0.0) throw DomainError("RateParams: rates must be >= 0");
    const double kappa_tilde =
        (delta > 0.0) ? std::sqrt(delta * kappa + delta * delta) - delta : 0.0;
    const double beta =
        (delta > 0.0) ? std::log((kappa + delta) / delta) / 8.0
                      : std::numeric_limits<double>::infinity();
    return {delta, kappa, kappa_tilde, beta};
}

RateParams RateParams::from_beta(double beta, double kappa) {
    if (beta <= 0.0) throw DomainError("RateParams: beta must be > 0");
    if (kappa <= 0.0) throw DomainError("RateParams: kappa must be > 0");
    const double delta = kappa / (std::exp(8.0 * beta) - 1.0);
    RateParams p = from_rates(delta, kappa);
    p.beta = beta;  // avoid round-trip noise in the stored value
    return p;
}

RateParams RateParams::from_photonic(double kappa1, double kappa_nn, double N) {
    if (kappa1 <= 0.0 || kappa_nn <= 0.0 || N <= 0.0)
        throw DomainError("RateParams: photonic parameters must be > 0");
    RateParams p = from_rates(N * kappa1, N * kappa_nn);
    // beta depends on the ratio only; the quoted formula is the same number
    p.beta = std::log((kappa_nn + kappa1) / kappa1) / 8.0;
    return p;
}

SpinConfig::SpinConfig(int M) : M_(M) {
    if (M < 2) throw DomainError("SpinConfig: M must be >= 2");
    const int n = M * M;
    spins_.assign(n, 0);
    cls_.assign(n, 0);
    pos_.assign(n, 0);
    nbr_.resize(4 * n);
    for (int y = 0; y < M; ++y) {
        for (int x = 0; x < M; ++x) {
            const int s = y * M + x;
            nbr_[4 * s + 0] = y * M + (x + 1) % M;
            nbr_[4 * s + 1] = y * M + (x + M - 1) % M;
            nbr_[4 * s + 2] = ((y + 1) % M) * M + x;
            nbr_[4 * s + 3] = ((y + M - 1) % M) * M + x;
        }
    }
    rebuild_classes();
}

SpinConfig SpinConfig::all_down(int M) { return SpinConfig(M); }

SpinConfig SpinConfig::all_up(int M) {
    SpinConfig c(M);
    std::fill(c.spins_.begin(), c.spins_.end(), std::uint8_t{1});
    c.rebuild_classes();
    return c;
}

SpinConfig SpinConfig::random(int M, Rng& rng) {
    SpinConfig c(M);
    for (auto& s : c.spins_) s = rng.coin() ? 1 : 0;
    c.rebuild_classes();
    return c;
}

int SpinConfig::misaligned_fresh(int site) const {
    int n = 0;
    for (int k = 0; k < 4; ++k) n += spins_[site] != spins_[nbr_[4 * site + k]];
    return n;
}

void SpinConfig::rebuild_classes() {
    for (auto& m : members_) m.clear();
    for (int s = 0; s < sites(); ++s) {
        const int n = misaligned_fresh(s);
        cls_[s] = static_cast<std::uint8_t>(n);
        pos_[s] = static_cast<std::int32_t>(members_[n].size());
        members_[n].push_back(s);
    }
}

void SpinConfig::reclassify(int site) {
    const int fresh = misaligned_fresh(site);
    const int old = cls_[site];
    if (fresh == old) return;
    // swap-remove from the old class vector
    auto& from = members_[old];
    const std::int32_t p = pos_[site];
    from[p] = from.back();
    pos_[from.back()] = p;
    from.pop_back();
    cls_[site] = static_cast<std::uint8_t>(fresh);
    pos_[site] = static_cast<std::int32_t>(members_[fresh].size());
    members_[fresh].push_back(site);
}

void SpinConfig::flip(int site) {
    spins_[site] ^= 1;
    reclassify(site);
    for (int k = 0; k < 4; ++k) reclassify(nbr_[4 * site + k]);
}

void SpinConfig::set_spin(int site, int value) {
    if (spins_[site] != value) flip(site);
}

void SpinConfig::flip_all() {
    for (auto& s : spins_) s ^= 1;
    // misalignment pattern is invariant under the global flip
}

int SpinConfig::count_up() const {
    int n = 0;
    for (auto s : spins_) n += s;
    return n;
}

double SpinConfig::magnetization() const {
    return 1.0 - 2.0 * double(count_up()) / double(sites());
}

std::uint64_t SpinConfig::pack() const {
    std::uint64_t bits = 0;
    for (int s = sites() - 1; s >= 0; --s) bits = (bits << 1) | spins_[s];
    return bits;
}

SpinConfig SpinConfig::unpack(std::uint64_t bits, int M) {
    SpinConfig c(M);
    for (int s = 0; s < M * M; ++s) c.spins_[s] = (bits >> s) & 1;
    c.rebuild_classes();
    return c;
}

double flip_rate(const SpinConfig& config, int site, const RateParams& rates) {
    const int n = config.misaligned(site);
    return rates.delta + (n == 3 ? rates.kappa_tilde : 0.0) + (n == 4 ? rates.kappa : 0.0);
}

std::uint64_t kmc_run(SpinConfig& config, const RateParams& rates, double T, Rng& rng,
                      std::span<const double> checkpoints,
                      const std::function<void(std::size_t, const SpinConfig&)>& observer,
                      std::uint64_t event_cap) {
    if (T < 0.0) throw DomainError("kmc_run: T must be >= 0");
    const double class_rate[5] = {rates.delta, rates.delta, rates.delta,
                                  rates.delta + rates.kappa_tilde,
                                  rates.delta + rates.kappa};
    double t = 0.0;
    std::uint64_t events = 0;
    std::size_t next_checkpoint = 0;
    auto deliver = [&](double up_to) {
        while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] <= up_to) {
            if (observer) observer(next_checkpoint, config);
            ++next_checkpoint;
        }
    };
    for (;;) {
        double total = 0.0;
        for (int n = 0; n < 5; ++n) total += class_rate[n] * config.class_count(n);
        if (total <= 0.0) break;
        const double wait = rng.exponential(total);
        if (t + wait > T) break;
        t += wait;
        deliver(t);
        // class proportional to c_n r(n), site uniform within the class
        double draw = rng.uniform() * total;
        int cls = -1;
        for (int n = 0; n < 5; ++n) {
            const double w = class_rate[n] * config.class_count(n);
            if (w <= 0.0) continue;
            cls = n;  // last nonempty class absorbs rounding slack
            if (draw < w) break;
            draw -= w;
        }
        const int k = static_cast<int>(rng.below(config.class_count(cls)));
        config.flip(config.class_member(cls, k));
        if (++events > event_cap)
            throw IntegrationError("kmc_run: event cap exceeded");
    }
    deliver(T);
    return events;
}

double ising_energy(std::uint64_t bits, int M) {
    double e = 0.0;
    auto spin = [&](int x, int y) {
        return (bits >> ((y % M) * M + (x % M))) & 1ULL;
    };
    for (int y = 0; y < M; ++y)
        for (int x = 0; x < M; ++x) {
            e += (spin(x, y) == spin(x + 1, y)) ? -1.0 : 1.0;
            e += (spin(x, y) == spin(x, y + 1)) ? -1.0 : 1.0;
        }
    return e;
}

Eigen::MatrixXd build_classical_generator(int M, const RateParams& rates) {
    if (M > 3) throw DomainError("build_classical_generator: M must be <= 3");
    const int nstates = 1 << (M * M);
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(nstates, nstates);
    for (int s = 0; s < nstates; ++s) {
        SpinConfig c = SpinConfig::unpack(static_cast<std::uint64_t>(s), M);
        for (int site = 0; site < M * M; ++site) {
            const double r = flip_rate(c, site, rates);
            const int target = s ^ (1 << site);
            gen(target, s) += r;
            gen(s, s) -= r;
        }
    }
    return gen;
}

Eigen::VectorXd gibbs_distribution(int M, double beta) {
    const int nstates = 1 << (M * M);
    Eigen::VectorXd p(nstates);
    for (int s = 0; s < nstates; ++s)
        p(s) = std::exp(-beta * ising_energy(static_cast<std::uint64_t>(s), M));
    return p / p.sum();
}

Eigen::VectorXd exact_stationary(int M, const RateParams& rates) {
    const Eigen::MatrixXd gen = build_classical_generator(M, rates);
    const int n = static_cast<int>(gen.rows());

    Eigen::EigenSolver<Eigen::MatrixXd> es(gen, false);
    const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
    int n_zero = 0;
    for (int i = 0; i < n; ++i)
        if (std::abs(es.eigenvalues()(i)) < 1e-10 * radius) ++n_zero;
    if (n_zero != 1)
        throw KernelDegeneracy("exact_stationary: kernel dimension " + std::to_string(n_zero));

    // bordered solve: replace one balance row by normalization
    Eigen::MatrixXd a = gen;
    a.row(0).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(0) = 1.0;
    Eigen::VectorXd pi = a.fullPivLu().solve(b);

    const Eigen::VectorXd gibbs = gibbs_distribution(M, rates.beta);
    const double tv = 0.5 * (pi - gibbs).cwiseAbs().sum();
    if (tv > 1e-10)
        throw KernelDegeneracy("exact_stationary: kernel deviates from Gibbs, TV=" +
                               std::to_string(tv));
    return pi;
}

int decode_majority(const SpinConfig& config, Rng& tie_rng, bool* tie) {
    const int up = config.count_up();
    const int down = config.sites() - up;
    if (tie) *tie = false;
    if (down > up) return 0;
    if (up > down) return 1;
    if (tie) *tie = true;
    return tie_rng.coin() ? 1 : 0;
}

int decode_component(const SpinConfig& config, Rng& tie_rng, bool* tie) {
    // flip minority connected components smallest first until one value
    // holds a strict global majority
    const int M = config.size();
    const int n = M * M;
    std::vector<std::uint8_t> spins(n);
    for (int s = 0; s < n; ++s) spins[s] = static_cast<std::uint8_t>(config.spin(s));

    for (;;) {
        int up = 0;
        for (auto s : spins) up += s;
        const int down = n - up;
        if (down > up) {
            if (tie) *tie = false;
            return 0;
        }
        if (up > down) {
            if (tie) *tie = false;
            return 1;
        }
        // tie: find the smallest connected component overall and flip it;
        // a tie with no domain walls cannot occur for even M^2 > 0 ties
        std::vector<int> comp(n, -1);
        int ncomp = 0;
        std::vector<int> comp_size;
        for (int s = 0; s < n; ++s) {
            if (comp[s] >= 0) continue;
            std::queue<int> q;
            q.push(s);
            comp[s] = ncomp;
            int size = 0;
            while (!q.empty()) {
                const int u = q.front();
                q.pop();
                ++size;
                const int x = u % M, y = u / M;
                const int nb[4] = {config.index(x + 1, y), config.index(x - 1, y),
                                   config.index(x, y + 1), config.index(x, y - 1)};
                for (int v : nb)
                    if (comp[v] < 0 && spins[v] == spins[u]) {
                        comp[v] = ncomp;
                        q.push(v);
                    }
            }
            comp_size.push_back(size);
            ++ncomp;
        }
        if (ncomp == 1) {
            // uniform lattice cannot tie; defensive fall-through to a coin
            if (tie) *tie = true;
            return tie_rng.coin() ? 1 : 0;
        }
        int smallest = 0;
        for (int c = 1; c < ncomp; ++c)
            if (comp_size[c] < comp_size[smallest]) smallest = c;
        if (comp_size[smallest] == n / 2 && ncomp == 2) {
            // two half-lattice domains: genuine tie
            if (tie) *tie = true;
            return tie_rng.coin() ? 1 : 0;
        }
        for (int s = 0; s < n; ++s)
            if (comp[s] == smallest) spins[s] ^= 1;
    }
}

MemoryExperimentResult memory_experiment(int M, double beta, double kappa, double T,
                                         int n_traj, std::uint64_t seed, int workers,
                                         Decoder decoder, bool start_up) {
    const auto t0 = std::chrono::steady_clock::now();
    const RateParams rates = RateParams::from_beta(beta, kappa);
    const int target = start_up ? 1 : 0;

    std::vector<std::uint8_t> success(n_traj, 0);
    std::vector<std::uint8_t> tied(n_traj, 0);
    std::vector<std::uint64_t> events(n_traj, 0);
    parallel_for(n_traj, workers, [&](int i) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
        SpinConfig config = start_up ? SpinConfig::all_up(M) : SpinConfig::all_down(M);
        events[i] = kmc_run(config, rates, T, rng);
        bool tie = false;
        const int bit = (decoder == Decoder::GlobalMajority)
                            ? decode_majority(config, rng, &tie)
                            : decode_component(config, rng, &tie);
        success[i] = (bit == target) ? 1 : 0;
        tied[i] = tie ? 1 : 0;
    });

    MemoryExperimentResult result;
    result.M = M;
    result.beta = beta;
    result.T = T;
    result.n_traj = n_traj;
    int wins = 0, ties = 0;
    std::uint64_t total_events = 0;
    for (int i = 0; i < n_traj; ++i) {
        wins += success[i];
        ties += tied[i];
        total_events += events[i];
    }
    result.success_prob = double(wins) / double(n_traj);
    result.stderr_ =
        std::sqrt(result.success_prob * (1.0 - result.success_prob) / double(n_traj));
    result.decoder =
        decoder == Decoder::GlobalMajority ? "global-majority" : "connected-component";
    result.total_events = total_events;
    result.n_ties = ties;
    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

void toom_step(SpinConfig& config, double flip_prob, Rng& rng) {
    if (flip_prob < 0.0 || flip_prob > 1.0)
        throw DomainError("toom_step: flip_prob must be in [0,1]");
    const int M = config.size();
    std::vector<std::uint8_t> next(config.sites());
    for (int y = 0; y < M; ++y)
        for (int x = 0; x < M; ++x) {
            const int votes = config.spin(x, y) + config.spin(x, y + 1) +  // north
                              config.spin(x + 1, y);                       // east
            next[y * M + x] = votes >= 2 ? 1 : 0;
        }
    for (int s = 0; s < config.sites(); ++s) {
        int v = next[s];
        if (flip_prob > 0.0 && rng.uniform() < flip_prob) v ^= 1;
        config.set_spin(s, v);
    }
}

}  // namespace pimsim
