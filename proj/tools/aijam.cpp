// aijam: train models, run scenarios and benchmark agents.
#include "aijam/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

struct Overrides {
    std::vector<std::uint64_t> seeds;
    std::int64_t slots = 0;
    std::string jammer;
    std::string model;
};

void apply(const Overrides& o, aijam::ScenarioConfig& c) {
    if (!o.seeds.empty()) c.seeds = o.seeds;
    if (o.slots > 0) c.n_slots = o.slots;
    if (!o.jammer.empty()) {
        c.world.jammer.kind = aijam::parse_jammer_kind(o.jammer);
    }
    if (!o.model.empty()) c.model_path = o.model;
    c.validate();
}

void add_overrides(CLI::App* app, Overrides& o) {
    app->add_option("--seed", o.seeds, "Replace the configured seed list");
    app->add_option("--slots", o.slots, "Number of decision slots")->check(CLI::PositiveNumber);
    app->add_option("--jammer", o.jammer, "Jammer strategy")
        ->check(CLI::IsMember({"constant", "sweep", "random"}));
    app->add_option("--model", o.model, "Model file (overrides model_path)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active-inference anti-jamming simulator"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Print warnings");

    std::string config, out;
    std::vector<std::string> configs;
    int jobs = 1;
    Overrides ov;

    auto* train = app.add_subcommand("train", "Learn the clean-signal model offline");
    train->add_option("--config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
    train->add_option("--out", out, "Model file to write")->required();
    add_overrides(train, ov);

    auto* run = app.add_subcommand("run", "Run one agent over the configured seeds");
    run->add_option("--config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "Results directory")->required();
    run->add_option("-j,--jobs", jobs, "Seeds run concurrently")->check(CLI::PositiveNumber);
    add_overrides(run, ov);

    auto* bench = app.add_subcommand("bench", "Compare agents on common random numbers");
    bench->add_option("--configs", configs, "Scenario JSONs, one per agent")->required()->check(CLI::ExistingFile);
    bench->add_option("--out", out, "Results directory")->required();
    bench->add_option("-j,--jobs", jobs, "Seeds run concurrently")->check(CLI::PositiveNumber);
    add_overrides(bench, ov);

    auto* defaults = app.add_subcommand("defaults", "Print the default scenario with every key");

    CLI11_PARSE(app, argc, argv);
    aijam::set_warnings_enabled(verbose);

    try {
        if (*defaults) {
            std::cout << aijam::scenario_to_json(aijam::parse_scenario(aijam::Json::object())).dump(2) << '\n';
            return 0;
        }
        if (*train) {
            auto cfg = aijam::load_scenario(config);
            apply(ov, cfg);
            aijam::TrainReport report;
            const auto model = aijam::train(cfg, &report);
            aijam::save_model(model, out);
            std::cout << "model written to " << out << " (clean flag rate "
                      << report.overall_flag_rate << ")\n";
            return 0;
        }
        if (*run) {
            auto cfg = aijam::load_scenario(config);
            apply(ov, cfg);
            const auto s = aijam::run(cfg, out, jobs);
            std::cout << aijam::summary_json(s)["mean"].dump() << '\n';
            return 0;
        }
        if (*bench) {
            std::vector<aijam::ScenarioConfig> cfgs;
            for (const auto& p : configs) {
                cfgs.push_back(aijam::load_scenario(p));
                apply(ov, cfgs.back());
            }
            std::filesystem::create_directories(out);
            const auto b = aijam::bench(cfgs, out, jobs);
            aijam::write_bench_csv(b, std::cout);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "aijam: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
