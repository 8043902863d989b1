#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gaugelab/error.hpp"
#include "gaugelab/experiments.hpp"

using namespace gaugelab;

namespace {

struct Criterion {
    int id;
    std::vector<std::string> scenarios;
    double budget_s;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gaugelab acceptance suite"};
    std::string out = "acceptance_reports";
    int workers = 1;
    app.add_option("--out", out, "report directory");
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, {"lemma_area_fuzz"}, 60},
        {2, {"monopole_exactness"}, 5},
        {3, {"constants_euclidean", "constants_sphere"}, 30},
        {4, {"sphere_trivialization"}, 120},
        {5, {"exp_identities"}, 5},
        {6, {"product_trivialization"}, 60},
        {7, {"relative_flatten"}, 60},
        {8, {"coulomb_lemma"}, 180},
        {9, {"stable_triviality_threshold"}, 30},
        {10, {"torus_karea_growth"}, 30},
        {11, {"monopole_minimization"}, 120},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = true;
        int passed = 0, total = 0;
        std::string note;
        for (const auto& name : c.scenarios) {
            try {
                ScenarioConfig cfg;
                cfg.scenario = name;
                cfg.workers = workers;
                const Report r = run(cfg);
                write_report(r, out);
                passed += r.passed();
                total += static_cast<int>(r.cases.size());
                ok = ok && r.all_pass() && !r.cases.empty();
            } catch (const std::exception& e) {
                ok = false;
                note += std::string(" error: ") + e.what();
            }
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_s) {
            ok = false;
            note += " over budget";
        }
        std::string names;
        for (const auto& n : c.scenarios) names += (names.empty() ? "" : "+") + n;
        std::printf("%s %2d %s %d/%d cases %.1fs (budget %.0fs)%s\n", ok ? "PASS" : "FAIL", c.id, names.c_str(),
                    passed, total, secs, c.budget_s, note.c_str());
        std::fflush(stdout);
        failures += ok ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
