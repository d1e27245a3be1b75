// h2chain: offshore wind-to-hydrogen supply chain simulator.
// Subcommands run the pipeline stages (wake, lcoh, dispatch, trade) or the
// whole chain; outputs are plot-ready CSV/JSON files.

#include "h2/errors.hpp"
#include "h2/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

using h2::pipeline::RunConfig;

namespace {

struct GlobalFlags {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    int year = 0;
    std::string scenario;
    double blend_cap = -2.0;
};

RunConfig load_config(const GlobalFlags& f) {
    if (f.config_path.empty()) throw h2::InputError("--config <path> is required");
    RunConfig cfg = RunConfig::from_json_file(f.config_path);
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
    if (f.year > 0) cfg.year = f.year;
    if (!f.scenario.empty()) cfg.scenario = h2::lcoh::scenario_from_string(f.scenario);
    if (f.blend_cap > -1.5) cfg.blend_cap = f.blend_cap;
    return cfg;
}

void add_globals(CLI::App* cmd, GlobalFlags& f) {
    cmd->add_option("--config", f.config_path, "run configuration JSON")->required();
    cmd->add_option("--out", f.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", f.seed, "random seed (overrides config)");
    cmd->add_option("--year", f.year, "scenario year: 2030, 2040 or 2050");
    cmd->add_option("--scenario", f.scenario, "learning scenario: high, median or low");
    cmd->add_option("--blend-cap", f.blend_cap, "hydrogen blending cap (0, 0.2 or 1.0)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"offshore wind-to-hydrogen supply chain simulator"};
    app.require_subcommand(1);

    GlobalFlags flags;
    int rc = 0;
    auto run = [&](void (*fn)(const RunConfig&)) {
        return [&flags, fn, &rc]() {
            try {
                fn(load_config(flags));
            } catch (const h2::ModelOutcomeError& e) {
                std::fprintf(stderr, "model outcome: %s\n", e.what());
                rc = 1;
            } catch (const h2::InputError& e) {
                std::fprintf(stderr, "input error: %s\n", e.what());
                rc = 2;
            } catch (const h2::ValidationError& e) {
                std::fprintf(stderr, "validation error: %s\n", e.what());
                rc = 2;
            }
        };
    };

    add_globals(app.add_subcommand("wake", "capacity factors per grid cell"), flags);
    add_globals(app.add_subcommand("lcoh", "LCOH map and cost-supply curves"), flags);
    add_globals(app.add_subcommand("dispatch", "coordinated power-gas dispatch"), flags);
    add_globals(app.add_subcommand("trade", "international hydrogen trading"), flags);
    add_globals(app.add_subcommand("pipeline", "all stages in dependency order"), flags);

    app.get_subcommand("wake")->callback(run(h2::pipeline::cmd_wake));
    app.get_subcommand("lcoh")->callback(run(h2::pipeline::cmd_lcoh));
    app.get_subcommand("dispatch")->callback(run(h2::pipeline::cmd_dispatch));
    app.get_subcommand("trade")->callback(run(h2::pipeline::cmd_trade));
    app.get_subcommand("pipeline")->callback(run(h2::pipeline::cmd_pipeline));

    CLI11_PARSE(app, argc, argv);
    return rc;
}
