#include "pimsim/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "pimsim/cavity.hpp"
#include "pimsim/ising.hpp"
#include "pimsim/lindblad.hpp"
#include "pimsim/meanfield.hpp"
#include "pimsim/operators.hpp"

namespace pimsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

}  // namespace

const ConfigSection* Config::find(const std::string& name) const {
    for (const auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

Config parse_config(const std::string& text) {
    Config config;
    std::istringstream stream(text);
    std::string line;
    int lineno = 0;
    ConfigSection* current = nullptr;
    while (std::getline(stream, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ParseError("line " + std::to_string(lineno) +
                                 ": unterminated section header '" + t + "'");
            const std::string name = trim(t.substr(1, t.size() - 2));
            if (name.empty())
                throw ParseError("line " + std::to_string(lineno) + ": empty section name");
            if (config.find(name))
                throw ParseError("line " + std::to_string(lineno) + ": duplicate section '" +
                                 name + "'");
            config.sections.push_back({name, {}});
            current = &config.sections.back();
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) +
                             ": expected 'key = value', got '" + t + "'");
        if (!current)
            throw ParseError("line " + std::to_string(lineno) +
                             ": entry before any section header");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ParseError("line " + std::to_string(lineno) + ": empty key");
        for (const auto& [k, v] : current->entries)
            if (k == key)
                throw ParseError("line " + std::to_string(lineno) + ": duplicate key '" + key +
                                 "' in section '" + current->name + "'");
        current->entries.emplace_back(key, value);
    }
    return config;
}

std::string kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::IsingMemory: return "ising-memory";
        case ExperimentKind::CavitySteady: return "cavity-steady";
        case ExperimentKind::GapScan: return "gap-scan";
        case ExperimentKind::ToyFidelity: return "toy-fidelity";
        case ExperimentKind::MeanfieldPhase: return "meanfield-phase";
        case ExperimentKind::OracleCheck: return "oracle-check";
        case ExperimentKind::ToomDemo: return "toom-demo";
    }
    return "?";
}

ExperimentKind kind_from_name(const std::string& name) {
    for (ExperimentKind k :
         {ExperimentKind::IsingMemory, ExperimentKind::CavitySteady, ExperimentKind::GapScan,
          ExperimentKind::ToyFidelity, ExperimentKind::MeanfieldPhase,
          ExperimentKind::OracleCheck, ExperimentKind::ToomDemo})
        if (kind_name(k) == name) return k;
    throw ParseError("unknown experiment kind '" + name + "'");
}

namespace {

enum class ParamType { Double, NonNegDouble, PositiveDouble, PositiveInt, DoubleList, Choice };

struct ParamRule {
    const char* key;
    ParamType type;
    bool required;
    const char* choices = nullptr;  // comma-separated for Choice
};

const std::vector<ParamRule>& rules_for(ExperimentKind kind) {
    static const std::vector<ParamRule> ising{
        {"M", ParamType::PositiveInt, true},
        {"beta", ParamType::PositiveDouble, true},
        {"kappa", ParamType::PositiveDouble, true},
        {"T", ParamType::PositiveDouble, true},
        {"n_traj", ParamType::PositiveInt, true},
        {"decoder", ParamType::Choice, false, "global,component"},
        {"start_up", ParamType::Choice, false, "0,1"},
    };
    static const std::vector<ParamRule> cavity{
        {"family", ParamType::Choice, true, "model1,model2"},
        {"N", ParamType::DoubleList, true},
        {"kappa1", ParamType::DoubleList, true},
        {"kappa2", ParamType::PositiveDouble, false},
    };
    static const std::vector<ParamRule> gap{
        {"lam_min", ParamType::PositiveDouble, true},
        {"lam_max", ParamType::PositiveDouble, true},
        {"n_points", ParamType::PositiveInt, true},
        {"kappa1", ParamType::NonNegDouble, true},
        {"kappa2", ParamType::PositiveDouble, false},
    };
    static const std::vector<ParamRule> toy{
        {"kappa1", ParamType::NonNegDouble, true},
        {"kappad", ParamType::NonNegDouble, true},
        {"kappann", ParamType::NonNegDouble, true},
        {"kappa2", ParamType::PositiveDouble, false},
        {"N", ParamType::DoubleList, true},
        {"mode", ParamType::Choice, true, "keep_knn,zero_knn"},
        {"T_noisy", ParamType::PositiveDouble, false},
        {"T_recovery", ParamType::PositiveDouble, false},
    };
    static const std::vector<ParamRule> meanfield{
        {"kappa1_min", ParamType::NonNegDouble, true},
        {"kappa1_max", ParamType::NonNegDouble, true},
        {"n_kappa1", ParamType::PositiveInt, true},
        {"kappad_min", ParamType::NonNegDouble, true},
        {"kappad_max", ParamType::NonNegDouble, true},
        {"n_kappad", ParamType::PositiveInt, true},
        {"kappann", ParamType::NonNegDouble, true},
        {"lam", ParamType::PositiveDouble, true},
        {"kappa2", ParamType::PositiveDouble, false},
    };
    static const std::vector<ParamRule> oracle{};
    static const std::vector<ParamRule> toom{
        {"M", ParamType::PositiveInt, true},
        {"steps", ParamType::PositiveInt, true},
        {"flip_prob", ParamType::NonNegDouble, true},
    };
    switch (kind) {
        case ExperimentKind::IsingMemory: return ising;
        case ExperimentKind::CavitySteady: return cavity;
        case ExperimentKind::GapScan: return gap;
        case ExperimentKind::ToyFidelity: return toy;
        case ExperimentKind::MeanfieldPhase: return meanfield;
        case ExperimentKind::OracleCheck: return oracle;
        case ExperimentKind::ToomDemo: return toom;
    }
    return oracle;
}

bool kind_is_stochastic(ExperimentKind kind) {
    return kind == ExperimentKind::IsingMemory || kind == ExperimentKind::ToomDemo;
}

bool parse_double_checked(const std::string& s, double* out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) return false;
    *out = v;
    return true;
}

void check_value(const ParamRule& rule, const std::string& value,
                 std::vector<std::string>& violations) {
    const std::string where = std::string("params.") + rule.key;
    double v = 0.0;
    switch (rule.type) {
        case ParamType::Double:
            if (!parse_double_checked(value, &v))
                violations.push_back(where + ": not a number ('" + value + "')");
            break;
        case ParamType::NonNegDouble:
            if (!parse_double_checked(value, &v))
                violations.push_back(where + ": not a number ('" + value + "')");
            else if (v < 0.0)
                violations.push_back(where + ": must be >= 0, got " + value);
            break;
        case ParamType::PositiveDouble:
            if (!parse_double_checked(value, &v))
                violations.push_back(where + ": not a number ('" + value + "')");
            else if (v <= 0.0)
                violations.push_back(where + ": must be > 0, got " + value);
            break;
        case ParamType::PositiveInt: {
            int n = 0;
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
            if (ec != std::errc() || ptr != value.data() + value.size() || n <= 0)
                violations.push_back(where + ": must be a positive integer, got '" + value + "'");
            break;
        }
        case ParamType::DoubleList: {
            const auto items = split(value, ',');
            if (items.empty()) violations.push_back(where + ": empty list");
            for (const auto& item : items)
                if (!parse_double_checked(item, &v) || v < 0.0) {
                    violations.push_back(where + ": list entries must be numbers >= 0, got '" +
                                         value + "'");
                    break;
                }
            break;
        }
        case ParamType::Choice: {
            const auto allowed = split(rule.choices, ',');
            if (std::find(allowed.begin(), allowed.end(), value) == allowed.end())
                violations.push_back(where + ": must be one of {" + rule.choices + "}, got '" +
                                     value + "'");
            break;
        }
    }
}

double param_double(const ExperimentSpec& spec, const std::string& key, double fallback) {
    const auto it = spec.params.find(key);
    if (it == spec.params.end()) return fallback;
    double v = 0.0;
    parse_double_checked(it->second, &v);
    return v;
}

double param_double(const ExperimentSpec& spec, const std::string& key) {
    return param_double(spec, key, 0.0);
}

int param_int(const ExperimentSpec& spec, const std::string& key) {
    return static_cast<int>(param_double(spec, key, 0.0));
}

std::vector<double> param_list(const ExperimentSpec& spec, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : split(spec.params.at(key), ',')) {
        double v = 0.0;
        parse_double_checked(item, &v);
        out.push_back(v);
    }
    return out;
}

std::string param_str(const ExperimentSpec& spec, const std::string& key,
                      const std::string& fallback) {
    const auto it = spec.params.find(key);
    return it == spec.params.end() ? fallback : it->second;
}

}  // namespace

ExperimentSpec parse_spec(const std::string& text) {
    const Config config = parse_config(text);
    const ConfigSection* experiment = config.find("experiment");
    if (!experiment) throw ParseError("missing [experiment] section");

    std::string kind_str;
    for (const auto& [k, v] : experiment->entries)
        if (k == "kind") kind_str = v;
    if (kind_str.empty()) throw ParseError("missing 'kind' in [experiment]");

    ExperimentSpec spec;
    spec.kind = kind_from_name(kind_str);  // ParseError on unknown kind

    std::vector<std::string> violations;
    for (const auto& [k, v] : experiment->entries) {
        if (k == "kind") continue;
        if (k == "seed") {
            std::uint64_t seed = 0;
            const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
            if (ec != std::errc() || ptr != v.data() + v.size())
                violations.push_back("experiment.seed: not a 64-bit unsigned integer ('" + v +
                                     "')");
            else {
                spec.seed = seed;
                spec.has_seed = true;
            }
        } else if (k == "workers") {
            int workers = 0;
            const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), workers);
            if (ec != std::errc() || ptr != v.data() + v.size() || workers < 0)
                violations.push_back("experiment.workers: must be an integer >= 0, got '" + v +
                                     "'");
            else
                spec.workers = workers;
        } else if (k == "output") {
            spec.output_path = v;
        } else {
            violations.push_back("experiment." + k + ": unknown key");
        }
    }

    const std::vector<ParamRule>& rules = rules_for(spec.kind);
    const ConfigSection* params = config.find("params");
    for (const auto& section : config.sections)
        if (section.name != "experiment" && section.name != "params")
            violations.push_back("[" + section.name + "]: unknown section");

    if (params) {
        for (const auto& [k, v] : params->entries) {
            const auto rule = std::find_if(rules.begin(), rules.end(),
                                           [&](const ParamRule& r) { return r.key == k; });
            if (rule == rules.end()) {
                violations.push_back("params." + k + ": unknown key for kind " +
                                     kind_name(spec.kind));
                continue;
            }
            check_value(*rule, v, violations);
            spec.params[k] = v;
        }
    }
    for (const ParamRule& rule : rules)
        if (rule.required && !spec.params.count(rule.key))
            violations.push_back(std::string("params.") + rule.key + ": required key missing");
    if (kind_is_stochastic(spec.kind) && !spec.has_seed)
        violations.push_back("experiment.seed: required for stochastic kind " +
                             kind_name(spec.kind));

    if (!violations.empty()) {
        std::string msg = "invalid spec:";
        for (const auto& v : violations) msg += "\n  - " + v;
        throw ValidationError(msg);
    }
    return spec;
}

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

namespace {

std::string format_u64(std::uint64_t value) {
    char buf[24];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

ResultTable run_ising_memory(const ExperimentSpec& spec) {
    const Decoder decoder = param_str(spec, "decoder", "global") == "component"
                                ? Decoder::ConnectedComponent
                                : Decoder::GlobalMajority;
    const auto r = memory_experiment(param_int(spec, "M"), param_double(spec, "beta"),
                                     param_double(spec, "kappa"), param_double(spec, "T"),
                                     param_int(spec, "n_traj"), spec.seed, spec.workers,
                                     decoder, param_str(spec, "start_up", "0") == "1");
    ResultTable table;
    table.columns = {"M",      "beta",         "kappa",   "T",      "n_traj",
                     "decoder", "success_prob", "stderr",  "n_ties", "total_events"};
    table.rows.push_back({format_u64(r.M), format_double(r.beta),
                          format_double(param_double(spec, "kappa")), format_double(r.T),
                          format_u64(r.n_traj), r.decoder, format_double(r.success_prob),
                          format_double(r.stderr_), format_u64(r.n_ties),
                          format_u64(r.total_events)});
    return table;
}

ResultTable run_cavity_steady(const ExperimentSpec& spec) {
    const ModelFamily family =
        param_str(spec, "family", "model1") == "model2" ? ModelFamily::Model2 : ModelFamily::Model1;
    const auto points = steady_overlap_scan(family, param_list(spec, "N"),
                                            param_list(spec, "kappa1"),
                                            param_double(spec, "kappa2", 1.0));
    ResultTable table;
    table.columns = {"family", "N", "kappa1", "overlap"};
    for (const auto& p : points)
        table.rows.push_back({param_str(spec, "family", "model1"), format_double(p.N),
                              format_double(p.kappa1), format_double(p.overlap)});
    return table;
}

ResultTable run_gap_scan(const ExperimentSpec& spec) {
    const double lo = param_double(spec, "lam_min");
    const double hi = param_double(spec, "lam_max");
    const int n = param_int(spec, "n_points");
    const double kappa1 = param_double(spec, "kappa1");
    const double kappa2 = param_double(spec, "kappa2", 1.0);
    ResultTable table;
    table.columns = {"lam", "gap_model1", "gap_model2"};
    for (int i = 0; i < n; ++i) {
        const double lam = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        FockSpace space(default_cutoff(hi / kappa2));
        CavityParams p(lam, kappa2, kappa1, 0.0, 0.0, space);
        table.rows.push_back({format_double(lam), format_double(metastable_gap(model1(p))),
                              format_double(metastable_gap(model2(p)))});
    }
    return table;
}

ResultTable run_toy_fidelity(const ExperimentSpec& spec) {
    const RecoveryMode mode = param_str(spec, "mode", "keep_knn") == "zero_knn"
                                  ? RecoveryMode::ZeroKnn
                                  : RecoveryMode::KeepKnn;
    const auto curve = toy_fidelity_experiment(
        param_double(spec, "kappa2", 1.0), param_double(spec, "kappa1"),
        param_double(spec, "kappad"), param_double(spec, "kappann"), param_list(spec, "N"),
        mode, param_double(spec, "T_noisy", 15.0), param_double(spec, "T_recovery", 15.0));
    ResultTable table;
    table.columns = {"N", "fidelity"};
    for (std::size_t i = 0; i < curve.N_values.size(); ++i)
        table.rows.push_back(
            {format_double(curve.N_values[i]), format_double(curve.fidelity[i])});
    return table;
}

ResultTable run_meanfield_phase(const ExperimentSpec& spec) {
    auto axis = [](double lo, double hi, int n) {
        std::vector<double> out;
        for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
        return out;
    };
    const auto cells = phase_diagram(
        axis(param_double(spec, "kappa1_min"), param_double(spec, "kappa1_max"),
             param_int(spec, "n_kappa1")),
        axis(param_double(spec, "kappad_min"), param_double(spec, "kappad_max"),
             param_int(spec, "n_kappad")),
        param_double(spec, "kappann"), param_double(spec, "lam"),
        param_double(spec, "kappa2", 1.0));
    ResultTable table;
    table.columns = {"kappa1", "kappad", "Q_sq", "alpha_sq", "phase"};
    for (const auto& c : cells)
        table.rows.push_back({format_double(c.kappa1), format_double(c.kappad),
                              format_double(c.point.Q_sq), format_double(c.point.alpha_sq),
                              phase_name(c.point.phase)});
    return table;
}

ResultTable run_toom_demo(const ExperimentSpec& spec) {
    const int M = param_int(spec, "M");
    const int steps = param_int(spec, "steps");
    const double flip_prob = param_double(spec, "flip_prob");
    Rng rng(spec.seed);
    SpinConfig config = SpinConfig::random(M, rng);
    ResultTable table;
    table.columns = {"step", "n_up", "magnetization"};
    table.rows.push_back({"0", format_u64(config.count_up()),
                          format_double(config.magnetization())});
    for (int s = 1; s <= steps; ++s) {
        toom_step(config, flip_prob, rng);
        table.rows.push_back({format_u64(s), format_u64(config.count_up()),
                              format_double(config.magnetization())});
    }
    return table;
}

ResultTable run_oracle_check() {
    ResultTable table;
    table.columns = {"oracle", "value", "threshold", "pass"};
    auto row = [&table](const std::string& name, double value, double threshold) {
        table.rows.push_back({name, format_double(value), format_double(threshold),
                              value < threshold ? "1" : "0"});
    };

    for (double beta : {0.1, 0.3, 0.6}) {
        const Eigen::VectorXd pi = exact_stationary(3, RateParams::from_beta(beta, 1.0));
        const Eigen::VectorXd gibbs = gibbs_distribution(3, beta);
        row("gibbs_tv_beta_" + format_double(beta), 0.5 * (pi - gibbs).cwiseAbs().sum(),
            1e-10);
    }

    {
        const double beta = 0.37;
        const RateParams rates = RateParams::from_beta(beta, 1.0);
        double worst = 0.0;
        for (std::uint64_t s = 0; s < 512; ++s) {
            SpinConfig config = SpinConfig::unpack(s, 3);
            const double e0 = ising_energy(s, 3);
            for (int site = 0; site < 9; ++site) {
                const double forward = flip_rate(config, site, rates);
                config.flip(site);
                const double backward = flip_rate(config, site, rates);
                const double boltz = std::exp(-beta * (ising_energy(config.pack(), 3) - e0));
                config.flip(site);
                worst = std::max(worst, std::abs(forward / backward - boltz) / boltz);
            }
        }
        row("detailed_balance_worst_rel", worst, 1e-12);
    }

    {
        double worst = 0.0;
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) {
                const MFInputs in{1e-4 * std::pow(500.0, i / 9.0), 0.0,
                                  0.05 + 0.45 * j / 9.0, 1.0, 1.0};
                const MeanFieldPoint p = photonic_ising_fixed_point(in);
                worst = std::max(worst, std::abs(q_fixed_point_residual(in, p.Q_sq)));
            }
        row("meanfield_residual_worst", worst, 1e-12);
    }

    {
        FockSpace deep(140);
        const Operator spectral = josephson_rwa_hamiltonian(1.0, 4.0, deep, 24);
        const Eigen::VectorXd laguerre = josephson_diagonal_laguerre(1.0, 4.0, deep.n_max);
        double worst = 0.0;
        for (int n = 0; n <= 24; ++n)
            worst = std::max(worst, std::abs(spectral.entries(n, n).real() - laguerre(n)));
        row("josephson_route_diff", worst, 1e-8);
    }

    {
        FockSpace s(12);
        LindbladModel damping = LindbladModel::make(
            Operator(Matrix::Zero(s.dim(), s.dim()), "fock"), {annihilation(s)});
        row("amplitude_damping_gap_err", std::abs(dissipative_gap(damping).gap - 0.5), 1e-9);
    }

    return table;
}

}  // namespace

RunResult run_experiment(const ExperimentSpec& spec) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult result;
    result.spec = spec;
    switch (spec.kind) {
        case ExperimentKind::IsingMemory: result.table = run_ising_memory(spec); break;
        case ExperimentKind::CavitySteady: result.table = run_cavity_steady(spec); break;
        case ExperimentKind::GapScan: result.table = run_gap_scan(spec); break;
        case ExperimentKind::ToyFidelity: result.table = run_toy_fidelity(spec); break;
        case ExperimentKind::MeanfieldPhase: result.table = run_meanfield_phase(spec); break;
        case ExperimentKind::OracleCheck: result.table = run_oracle_check(); break;
        case ExperimentKind::ToomDemo: result.table = run_toom_demo(spec); break;
    }
    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

RunResult sweep_experiment(const ExperimentSpec& base, const std::string& axis,
                           const std::vector<std::string>& values) {
    std::vector<std::string> violations;
    if (values.empty()) violations.push_back("sweep: empty value list");
    if (!base.params.count(axis))
        violations.push_back("sweep: axis '" + axis + "' is not a parameter of kind " +
                             kind_name(base.kind));
    for (const auto& v : values) {
        double d = 0.0;
        if (!parse_double_checked(v, &d))
            violations.push_back("sweep: value '" + v + "' is not numeric");
    }
    if (!violations.empty()) {
        std::string msg = "invalid sweep:";
        for (const auto& v : violations) msg += "\n  - " + v;
        throw ValidationError(msg);
    }

    RunResult combined;
    combined.spec = base;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < values.size(); ++i) {
        ExperimentSpec spec = base;
        spec.params[axis] = values[i];
        if (kind_is_stochastic(base.kind)) {
            // per-value derived stream from the shared master seed
            SplitMix64 sm(base.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
            spec.seed = sm.next();
        }
        // re-validate the overridden value through the kind's rule
        const auto& rules = rules_for(base.kind);
        const auto rule = std::find_if(rules.begin(), rules.end(),
                                       [&](const ParamRule& r) { return r.key == axis; });
        if (rule != rules.end()) {
            std::vector<std::string> bad;
            check_value(*rule, values[i], bad);
            if (!bad.empty()) throw ValidationError("invalid sweep:\n  - " + bad.front());
        }
        RunResult one = run_experiment(spec);
        if (combined.table.columns.empty()) combined.table.columns = one.table.columns;
        for (auto& r : one.table.rows) combined.table.rows.push_back(std::move(r));
    }
    combined.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return combined;
}

std::string to_csv(const ResultTable& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += row[c];
        }
        out += '\n';
    }
    return out;
}

ResultTable csv_parse(const std::string& text) {
    ResultTable table;
    std::istringstream stream(text);
    std::string line;
    bool header = true;
    while (std::getline(stream, line)) {
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (header) {
            table.columns = std::move(cells);
            header = false;
        } else {
            if (cells.size() != table.columns.size())
                throw ParseError("csv row width " + std::to_string(cells.size()) +
                                 " != header width " + std::to_string(table.columns.size()));
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

namespace {

nlohmann::json cell_json(const std::string& cell) {
    double v = 0.0;
    if (parse_double_checked(cell, &v)) {
        if (cell.find_first_of(".eE") == std::string::npos &&
            std::abs(v) < 9.0e15)  // integral literal
            return nlohmann::json(static_cast<std::int64_t>(v));
        return nlohmann::json(v);
    }
    return nlohmann::json(cell);
}

nlohmann::json spec_json(const ExperimentSpec& spec) {
    nlohmann::json j;
    j["kind"] = kind_name(spec.kind);
    if (spec.has_seed) j["seed"] = spec.seed;
    j["workers"] = spec.workers;
    if (!spec.output_path.empty()) j["output"] = spec.output_path;
    j["params"] = nlohmann::json::object();
    for (const auto& [k, v] : spec.params) j["params"][k] = v;
    return j;
}

}  // namespace

std::string to_json(const RunResult& result) {
    nlohmann::json j;
    j["spec"] = spec_json(result.spec);
    j["columns"] = result.table.columns;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : result.table.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& cell : row) r.push_back(cell_json(cell));
        j["rows"].push_back(std::move(r));
    }
    return j.dump(2) + "\n";
}

std::string metadata_json(const RunResult& result) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["schema"] = result.table.columns;
    j["spec"] = spec_json(result.spec);
    j["wall_time_s"] = result.wall_time_s;
    j["n_rows"] = result.table.rows.size();
    return j.dump(2) + "\n";
}

}  // namespace pimsim
