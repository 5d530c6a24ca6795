#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "kaclab/experiments.hpp"
#include "kaclab/inequality.hpp"
#include "kaclab/propagator.hpp"

using namespace kaclab;

int main(int argc, char** argv)
{
    CLI::App app{"Kac system/reservoir experiments"};
    app.require_subcommand(1, 1);
    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    int threads = 1;
    std::vector<std::string> overrides;
    for (const auto& name : experiment_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config_path, "key = value config file");
        sub->add_option("--seed", seed, "master seed (overrides the config)");
        sub->add_option("--threads", threads, "worker cap")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
        sub->add_option("--set", overrides, "extra key=value entries");
    }
    CLI11_PARSE(app, argc, argv);
    const std::string name = app.get_subcommands().front()->get_name();
    const bool have_seed = app.get_subcommands().front()->count("--seed") > 0;

    std::filesystem::path out = out_dir.empty() ? std::filesystem::path("kaclab-out") / name : std::filesystem::path(out_dir);
    try {
        Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError(kv, "--set expects key=value");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (out_dir.empty() && cfg.has("output.dir")) out = cfg.get_string("output.dir");
        RunOptions opt;
        if (have_seed) opt.seed = seed;
        opt.threads = threads;
        const auto rep = run_experiment(name, cfg, opt);
        write_report(rep, out);
        std::size_t failed = 0;
        for (const auto& r : rep.records) failed += r.pass ? 0 : 1;
        std::printf("%s: %s (%zu records, %zu failed) -> %s\n", name.c_str(), rep.pass() ? "pass" : "VIOLATION",
                    rep.records.size(), failed, out.string().c_str());
        for (const auto& r : rep.records)
            if (!r.pass)
                std::printf("  fail t=%.6g measured=%.6g bound=%.6g  %s\n", r.t, r.measured, r.bound, r.label.c_str());
        return rep.exit_code();
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        write_error_report(name, e.what(), out);
    } catch (const NotInL2& e) {
        std::fprintf(stderr, "initial state rejected: %s\n", e.what());
        write_error_report(name, e.what(), out);
    } catch (const CertificationError& e) {
        std::fprintf(stderr, "certification failed: %s\n", e.what());
        write_error_report(name, e.what(), out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        write_error_report(name, e.what(), out);
    }
    return 2;
}
