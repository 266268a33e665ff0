#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "fracsteer/errors.hpp"
#include "fracsteer/experiment.hpp"

// Command-line front end.  Exit codes: 0 success, 1 validation failure
// (configuration or standing conditions), 2 numeric failure, 3 I/O failure.

namespace {

struct CommonArgs {
    std::string config_path;
    std::string preset;
    long long grid = -1;  // -1 = keep the configured grid_size
    std::string out_path;
    bool force = false;
};

void add_source_options(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("config", a.config_path, "configuration file (JSON)");
    cmd->add_option("--preset", a.preset,
                    "use a built-in preset instead of a file (available: heat)");
    cmd->add_option("--grid", a.grid, "override the grid size M");
}

fracsteer::ExperimentConfig resolve(const CommonArgs& a) {
    using fracsteer::ValidationError;
    fracsteer::ExperimentConfig cfg;
    if (!a.preset.empty() && !a.config_path.empty())
        throw ValidationError(
            "give either a config file or --preset, not both");
    if (!a.preset.empty()) {
        if (a.preset != "heat")
            throw ValidationError("unknown preset '" + a.preset +
                                  "' (available: heat)");
        cfg = fracsteer::heat_preset();
    } else if (!a.config_path.empty()) {
        cfg = fracsteer::load_config(a.config_path);
    } else {
        throw ValidationError(
            "no configuration given: pass a config file or --preset heat");
    }
    if (a.grid >= 0) {
        cfg.grid_size = static_cast<std::size_t>(a.grid);
        fracsteer::validate_config(cfg);
    }
    if (!a.out_path.empty()) cfg.output_path = a.out_path;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional nonlocal steering toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version",
                         std::string("fracsteer ") + fracsteer::kToolVersion);

    CommonArgs args;
    double reg_a = 1e-3;

    CLI::App* verify =
        app.add_subcommand("verify", "check the standing conditions");
    add_source_options(verify, args);

    CLI::App* simulate = app.add_subcommand(
        "simulate", "solve the nonlocal system under a unit control");
    add_source_options(simulate, args);

    CLI::App* synthesize = app.add_subcommand(
        "synthesize", "steer toward target_x1 at one regularization level");
    add_source_options(synthesize, args);
    synthesize->add_option("--reg", reg_a, "regularization parameter a")
        ->required();

    CLI::App* sweep = app.add_subcommand(
        "sweep", "regularization sweep over a_grid, emitting CSV");
    add_source_options(sweep, args);
    sweep->add_option("--out", args.out_path, "override output_path");
    sweep->add_flag("--force", args.force,
                    "run even if the standing-condition checks fail");

    CLI::App* oracle = app.add_subcommand(
        "oracle-check", "cross-validate the solver against the stepper");
    add_source_options(oracle, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;  // help and version exit cleanly
    }

    try {
        if (verify->parsed()) {
            const auto rep = fracsteer::run_verify(resolve(args));
            std::fputs(rep.text.c_str(), stdout);
            return rep.all_hold ? 0 : 1;
        }
        if (simulate->parsed()) {
            const auto out = fracsteer::run_simulate(resolve(args));
            std::fputs(out.text.c_str(), stdout);
            return out.converged ? 0 : 2;
        }
        if (synthesize->parsed()) {
            const auto out = fracsteer::run_synthesize(resolve(args), reg_a);
            std::fputs(out.text.c_str(), stdout);
            return out.result.converged ? 0 : 2;
        }
        if (sweep->parsed()) {
            const auto out = fracsteer::run_sweep(resolve(args), args.force);
            if (out.path.empty()) {
                std::fputs(out.csv_text.c_str(), stdout);
            } else {
                std::printf("wrote %zu rows to %s (config %s)\n",
                            out.table.rows.size(), out.path.c_str(),
                            out.table.config_hash.c_str());
            }
            int bad = 0;
            for (const auto& r : out.table.rows)
                if (!r.converged) ++bad;
            if (bad > 0) {
                std::fprintf(stderr,
                             "warning: %d of %zu rows did not converge\n", bad,
                             out.table.rows.size());
                return 2;
            }
            return 0;
        }
        if (oracle->parsed()) {
            const auto d = fracsteer::run_oracle_check(resolve(args));
            std::fputs(d.text.c_str(), stdout);
            return d.all_ok ? 0 : 2;
        }
    } catch (const fracsteer::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const fracsteer::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const fracsteer::DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const fracsteer::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
