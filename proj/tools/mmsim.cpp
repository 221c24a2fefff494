// Command-line front end: run a single scenario, sweep a grid, dump a receive
// trace, or evaluate the analytical state-count estimator.
//
// Exit codes: 0 success, 1 configuration/validation error, 2 simulation error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mmsim/metrics.hpp"
#include "mmsim/scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mmsim::ValidationError("--config", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw mmsim::ValidationError("--out", "cannot open '" + path + "' for writing");
    return out;
}

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string scheme_override;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config = true) {
    auto* c = cmd->add_option("--config", opts.config_path, "scenario JSON file");
    if (needs_config) c->required();
    cmd->add_option("--out", opts.out_path, "output path (default: stdout)");
    cmd->add_option("--seed", opts.seed, "override the config seed")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--scheme", opts.scheme_override, "override the config scheme")
        ->check(CLI::IsMember({"mnm", "cip", "hawaii"}));
}

void apply_overrides(mmsim::ScenarioConfig& cfg, const CommonOpts& opts) {
    if (opts.seed_set) cfg.seed = opts.seed;
    if (!opts.scheme_override.empty()) cfg.scheme = opts.scheme_override;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"intra-domain micro-mobility handover simulator"};
    app.require_subcommand(1);

    CommonOpts run_opts, sweep_opts, trace_opts;
    unsigned jobs = 1;

    CLI::App* run_cmd = app.add_subcommand("run", "run one scenario, emit a one-row CSV");
    add_common(run_cmd, run_opts);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a (scheme x delay x hops) grid");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--jobs", jobs, "parallel workers (rows stay in sweep order)")
        ->check(CLI::PositiveNumber);

    CLI::App* trace_cmd = app.add_subcommand("trace", "run one scenario, dump the receive trace");
    add_common(trace_cmd, trace_opts);

    std::uint64_t est_x = 0, est_y = 0, est_l = 0;
    std::string est_scope = "inter";
    CLI::App* est_cmd = app.add_subcommand("estimate", "analytical router-state count");
    est_cmd->add_option("--mns", est_x, "number of mobile nodes")->required();
    est_cmd->add_option("--cns", est_y, "correspondents per mobile")->required();
    est_cmd->add_option("--path-hops", est_l, "average path length in hops")->required();
    est_cmd->add_option("--scope", est_scope, "inter | intra")
        ->check(CLI::IsMember({"inter", "intra"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            mmsim::ScenarioConfig cfg = mmsim::parse_config(read_file(run_opts.config_path));
            apply_overrides(cfg, run_opts);
            mmsim::RunResult result = mmsim::run_scenario(cfg);
            std::ofstream file;
            std::ostream* out = &std::cout;
            if (!run_opts.out_path.empty()) {
                file = open_out(run_opts.out_path);
                out = &file;
            }
            mmsim::write_csv_header(*out, cfg.seed);
            mmsim::write_csv_row(*out, result);
        } else if (sweep_cmd->parsed()) {
            mmsim::SweepSpec spec = mmsim::parse_sweep(read_file(sweep_opts.config_path));
            apply_overrides(spec.base, sweep_opts);
            if (!sweep_opts.scheme_override.empty()) spec.schemes = {sweep_opts.scheme_override};
            std::vector<mmsim::RunResult> rows = mmsim::sweep(spec, jobs);
            std::ofstream file;
            std::ostream* out = &std::cout;
            if (!sweep_opts.out_path.empty()) {
                file = open_out(sweep_opts.out_path);
                out = &file;
            }
            mmsim::write_csv_header(*out, spec.base.seed);
            for (const mmsim::RunResult& row : rows) mmsim::write_csv_row(*out, row);
        } else if (trace_cmd->parsed()) {
            mmsim::ScenarioConfig cfg = mmsim::parse_config(read_file(trace_opts.config_path));
            apply_overrides(cfg, trace_opts);
            mmsim::RunResult result = mmsim::run_scenario(cfg);
            std::ofstream file;
            std::ostream* out = &std::cout;
            if (!trace_opts.out_path.empty()) {
                file = open_out(trace_opts.out_path);
                out = &file;
            }
            mmsim::write_trace_csv(*out, result);
        } else if (est_cmd->parsed()) {
            auto scope = est_scope == "intra" ? mmsim::StateScope::IntraDomain
                                              : mmsim::StateScope::InterDomain;
            std::cout << mmsim::state_count_estimate(est_x, est_y, est_l, scope) << "\n";
        }
    } catch (const mmsim::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const mmsim::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const mmsim::SimError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
