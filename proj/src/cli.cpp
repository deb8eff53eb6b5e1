#include "falcon/cli.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "falcon/config.hpp"
#include "falcon/plot.hpp"
#include "falcon/sim.hpp"
#include "falcon/verify.hpp"

namespace falcon {

namespace {

struct Overrides {
    std::uint64_t seed = 0;
    bool has_seed = false;
    long horizon = 0;
    bool has_horizon = false;
    std::string algo;
};

Experiment load_with_overrides(const std::string& config_path, const Overrides& ov) {
    Experiment e = load_config_file(config_path);
    if (ov.has_seed) e.seed = ov.seed;
    if (ov.has_horizon) e.horizon = ov.horizon;
    if (!ov.algo.empty()) e.algorithm = ov.algo;
    validate(e);
    return e;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
    std::vector<std::uint64_t> seeds;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        seeds.push_back(std::stoull(tok));
    }
    return seeds;
}

int do_run(const std::string& config_path, const Overrides& ov, const std::string& out_path,
           const std::string& plot_path) {
    const Experiment e = load_with_overrides(config_path, ov);
    const RunResult r = run(e);
    if (!out_path.empty()) {
        write_csv(r, out_path);
        // Sidecar echo of the effective config; feeding it back reproduces
        // this run byte for byte.
        write_text(out_path + ".config", serialize_config(r.config));
        std::cout << "csv: " << out_path << "\n";
        std::cout << "config echo: " << out_path << ".config\n";
    }
    if (!plot_path.empty()) {
        emit_plot(r, plot_path);
        std::cout << "plot: " << plot_path << "\n";
    }
    std::cout << "algorithm: " << e.algorithm << "\nseed: " << r.seed
              << "\nhorizon: " << r.horizon << "\nepochs: " << r.epochs_entered
              << "\noracle_calls: " << r.oracle_calls
              << "\nfinal_cum_regret: " << r.final_cum_regret
              << "\nfinal_cum_pseudo_regret: " << r.final_cum_pseudo_regret
              << "\nclamp_events: " << r.clamp_events
              << "\ntheoretical_bound: " << regret_bound(e, r.horizon) << "\n";
    return 0;
}

int do_replicate(const std::string& config_path, const Overrides& ov, const std::string& seeds_csv,
                 long num_seeds, std::uint64_t first_seed, const std::string& out_path,
                 int threads) {
    const Experiment e = load_with_overrides(config_path, ov);
    std::vector<std::uint64_t> seeds;
    if (!seeds_csv.empty()) {
        seeds = parse_seed_list(seeds_csv);
    } else {
        for (long i = 0; i < num_seeds; ++i) seeds.push_back(first_seed + static_cast<std::uint64_t>(i));
    }
    if (seeds.empty()) throw ConfigError("seeds", "no seeds given");
    const ReplicateSummary s = replicate(e, seeds, threads);
    const std::string json = summary_json(s);
    if (!out_path.empty()) {
        write_text(out_path, json);
        std::cout << "summary: " << out_path << "\n";
    } else {
        std::cout << json;
    }
    return 0;
}

int do_verify(const std::string& config_path, int instances, long draws, long horizon) {
    verify::SuiteOptions opts;
    opts.instances = instances;
    opts.equi_draws = draws;
    opts.horizon = horizon;
    if (!config_path.empty()) {
        const Experiment e = load_config_file(config_path);
        validate(e);
        if (e.env.type != "finite")
            throw ConfigError("env.type", "verification needs a finite environment");
        if (static_cast<double>(e.env.contexts) * std::log2(static_cast<double>(e.env.actions)) >
            20.0 + 1e-9)
            throw ConfigError("env.contexts",
                              "policy space exceeds 2^20; enumeration refused");
        opts.delta = e.delta;
        opts.seed = e.seed;
    }
    const verify::SuiteReport rep = verify::run_suite(opts);
    std::cout << rep.render();
    if (!rep.all_pass()) {
        std::cout << "verification FAILED\n";
        return 2;
    }
    std::cout << "verification passed (" << rep.checks.size() << " checks)\n";
    return 0;
}

int do_schedule_info(const std::string& config_path, const Overrides& ov, const std::string& kind,
                     const std::string& boundaries_csv) {
    Experiment e;
    if (!config_path.empty()) {
        e = load_config_file(config_path);
    } else {
        // Standalone mode: describe a schedule without a full experiment.
        e.env.contexts = 2;
        e.env.actions = 2;
        e.env.class_size = 4;
    }
    if (ov.has_seed) e.seed = ov.seed;
    if (ov.has_horizon) e.horizon = ov.horizon;
    if (!kind.empty()) e.schedule.kind = kind;
    if (!boundaries_csv.empty()) {
        e.schedule.boundaries.clear();
        for (std::uint64_t b : parse_seed_list(boundaries_csv))
            e.schedule.boundaries.push_back(static_cast<long>(b));
    }
    validate(e);
    const EpochSchedule s = make_schedule(e);
    const auto bounds = s.boundaries_up_to(e.horizon);
    std::cout << "kind: " << e.schedule.kind << "\nhorizon: " << e.horizon << "\nboundaries:";
    for (long b : bounds) std::cout << " " << b;
    std::cout << "\nepochs: " << bounds.size() << "\noracle_calls: " << (bounds.size() - 1)
              << "\n";
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"contextual bandit simulator: inverse-gap-weighting learners over offline regression oracles"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    std::string out_path;
    std::string plot_path;
    std::string seeds_csv;
    long num_seeds = 20;
    std::uint64_t first_seed = 1;
    int threads = 0;
    int instances = 20;
    long draws = 200000;
    long ver_horizon = 64;

    auto add_overrides = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config file")->required();
        cmd->add_option_function<std::uint64_t>(
               "--seed", [&](std::uint64_t v) { ov.seed = v; ov.has_seed = true; },
               "override run seed");
        cmd->add_option_function<long>(
               "--horizon", [&](long v) { ov.horizon = v; ov.has_horizon = true; },
               "override horizon");
        cmd->add_option("--algo", ov.algo, "override algorithm");
    };

    CLI::App* runc = app.add_subcommand("run", "single seeded run; optional CSV and SVG output");
    add_overrides(runc);
    runc->add_option("--out", out_path, "CSV output path (config echo goes to <out>.config)");
    runc->add_option("--plot", plot_path, "SVG regret plot path");

    CLI::App* repc = app.add_subcommand("replicate", "many seeds in parallel, JSON summary");
    add_overrides(repc);
    repc->add_option("--seeds", seeds_csv, "comma-separated seed list");
    repc->add_option("--num-seeds", num_seeds, "number of consecutive seeds (default 20)");
    repc->add_option("--first-seed", first_seed, "first seed for --num-seeds (default 1)");
    repc->add_option("--out", out_path, "JSON summary path (default: stdout)");
    repc->add_option("--threads", threads, "worker threads (default: hardware)");

    CLI::App* verc = app.add_subcommand("verify", "brute-force policy-space verification suite");
    verc->add_option("--config", config_path,
                     "optional config (must describe an enumerable finite environment)");
    verc->add_option("--instances", instances, "number of fuzzed instances (default 20)");
    verc->add_option("--draws", draws, "Monte Carlo draws per instance (default 200000)");
    verc->add_option("--horizon", ver_horizon, "rounds per kernel-generating run (default 64)");

    std::string sch_kind;
    std::string sch_boundaries;
    CLI::App* schc = app.add_subcommand("schedule-info", "print epoch boundaries for a schedule");
    schc->add_option("--config", config_path, "optional experiment config file");
    schc->add_option("--kind", sch_kind, "schedule kind: geometric | known-horizon | custom");
    schc->add_option_function<long>(
        "--horizon", [&](long v) { ov.horizon = v; ov.has_horizon = true; }, "horizon to expand up to");
    schc->add_option("--boundaries", sch_boundaries, "comma-separated boundaries for kind=custom");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (runc->parsed()) return do_run(config_path, ov, out_path, plot_path);
        if (repc->parsed())
            return do_replicate(config_path, ov, seeds_csv, num_seeds, first_seed, out_path,
                                threads);
        if (verc->parsed()) return do_verify(config_path, instances, draws, ver_horizon);
        if (schc->parsed()) return do_schedule_info(config_path, ov, sch_kind, sch_boundaries);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace falcon
