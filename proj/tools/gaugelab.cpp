#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gaugelab/error.hpp"
#include "gaugelab/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"gaugelab: gauge-theory scenario runner"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "List scenarios");
    auto* run = app.add_subcommand("run", "Run a scenario and write JSON + CSV reports");
    std::string scenario, config_path, out_dir = "reports";
    std::uint64_t seed = 0;
    int workers = 0;
    run->add_option("scenario", scenario, "Scenario name")->required();
    run->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--seed", seed, "Base seed");
    run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        for (const auto& s : gaugelab::list_scenarios()) std::cout << s.name << "\t" << s.description << "\n";
        return 0;
    }
    try {
        gaugelab::ScenarioConfig cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw gaugelab::Error(gaugelab::ErrorKind::SchemaError, e.what());
            }
            cfg = gaugelab::ScenarioConfig::from_json(j);
        }
        cfg.scenario = scenario;
        if (run->count("--seed")) cfg.seed = seed;
        if (run->count("--workers")) cfg.workers = workers;
        const gaugelab::Report rep = gaugelab::run(cfg);
        gaugelab::write_report(rep, out_dir);
        std::cout << rep.scenario << ": " << rep.passed() << "/" << rep.cases.size() << " cases passed\n";
        for (std::size_t i = 0; i < rep.cases.size(); ++i)
            if (!rep.cases[i].pass)
                std::cout << "  case " << i << " failed" << (rep.cases[i].error.empty() ? "" : ": " + rep.cases[i].error)
                          << "\n";
        return rep.all_pass() ? 0 : 1;
    } catch (const gaugelab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
