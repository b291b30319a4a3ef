#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pimsim/harness.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pimsim::ParseError("cannot open spec file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct OutputOptions {
    std::string out;
    std::string format = "csv";
    bool seed_set = false;
    std::uint64_t seed = 0;
    int workers = -1;
};

void apply_overrides(pimsim::ExperimentSpec& spec, const OutputOptions& opt) {
    if (opt.seed_set) {
        spec.seed = opt.seed;
        spec.has_seed = true;
    }
    if (opt.workers >= 0) spec.workers = opt.workers;
    if (!opt.out.empty()) spec.output_path = opt.out;
}

int emit(const pimsim::RunResult& result, const std::string& format) {
    const std::string body =
        format == "json" ? pimsim::to_json(result) : pimsim::to_csv(result.table);
    if (result.spec.output_path.empty()) {
        std::cout << body;
        return 0;
    }
    std::ofstream out(result.spec.output_path);
    if (!out) {
        std::cerr << "error: cannot write '" << result.spec.output_path << "'\n";
        return 1;
    }
    out << body;
    std::ofstream meta(result.spec.output_path + ".meta.json");
    meta << pimsim::metadata_json(result);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"passively protected quantum memory simulation suite"};
    app.require_subcommand(1);

    OutputOptions opt;
    std::string spec_path, axis;
    std::vector<std::string> values;

    auto add_common = [&opt](CLI::App* cmd) {
        cmd->add_option("--seed", opt.seed, "override the spec seed")
            ->each([&opt](const std::string&) { opt.seed_set = true; });
        cmd->add_option("--workers", opt.workers, "worker thread count");
        cmd->add_option("--out", opt.out, "output path (default: spec output or stdout)");
        cmd->add_option("--format", opt.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    CLI::App* run = app.add_subcommand("run", "run one experiment from a spec file");
    run->add_option("spec-file", spec_path, "experiment spec")->required();
    add_common(run);

    CLI::App* sweep = app.add_subcommand("sweep", "run a spec once per axis value");
    sweep->add_option("spec-file", spec_path, "experiment spec")->required();
    sweep->add_option("--axis", axis, "parameter key to sweep")->required();
    sweep->add_option("--values", values, "comma-separated values")
        ->required()
        ->delimiter(',');
    add_common(sweep);

    CLI::App* oracle = app.add_subcommand("oracle-check", "run the fast oracle suite");
    add_common(oracle);

    app.add_subcommand("version", "print version");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("version")) {
            std::cout << "pimsim " << pimsim::kVersion << "\n";
            return 0;
        }
        pimsim::ExperimentSpec spec;
        if (app.got_subcommand("oracle-check")) {
            spec.kind = pimsim::ExperimentKind::OracleCheck;
        } else {
            spec = pimsim::parse_spec(slurp(spec_path));
        }
        apply_overrides(spec, opt);

        pimsim::RunResult result = app.got_subcommand("sweep")
                                       ? pimsim::sweep_experiment(spec, axis, values)
                                       : pimsim::run_experiment(spec);
        int rc = emit(result, opt.format);
        if (rc == 0 && spec.kind == pimsim::ExperimentKind::OracleCheck)
            for (const auto& row : result.table.rows)
                if (row.back() != "1") rc = 1;
        return rc;
    } catch (const pimsim::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const pimsim::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
