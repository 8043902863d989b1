#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaugelab/bundle.hpp"

namespace gaugelab {

struct ScenarioConfig {
    std::string scenario;
    std::uint64_t seed = 1;
    /// Number of randomized cases; 0 keeps the scenario default.
    int cases = 0;
    /// Sampling resolution; 0 keeps the scenario default.
    int resolution = 0;
    int workers = 1;
    /// Scenario-specific parameters (radii, degrees, mesh level, ...).
    nlohmann::json params = nlohmann::json::object();
    /// Tolerance overrides by name.
    nlohmann::json tolerances = nlohmann::json::object();

    static ScenarioConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    /// Throws UnknownScenario or PreconditionViolated.
    void validate() const;
    double tol(const std::string& key, double fallback) const;
    int cases_or(int fallback) const { return cases > 0 ? cases : fallback; }
    int resolution_or(int fallback) const { return resolution > 0 ? resolution : fallback; }
};

struct CaseResult {
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json measured = nlohmann::json::object();
    nlohmann::json bound = nlohmann::json::object();
    bool pass = false;
    /// Module error recorded for this case, empty when none.
    std::string error;
    nlohmann::json to_json() const;
};

struct Report {
    std::string scenario;
    nlohmann::json config;
    std::vector<CaseResult> cases;
    nlohmann::json extra = nlohmann::json::object();
    std::string timestamp;

    int passed() const;
    bool all_pass() const { return passed() == static_cast<int>(cases.size()); }
    nlohmann::json to_json() const;
    /// RFC 4180 table mirroring the cases.
    std::string to_csv() const;
};

/// Writes <dir>/<scenario>.json and <dir>/<scenario>.csv.
void write_report(const Report& r, const std::filesystem::path& dir);

struct ScenarioInfo {
    std::string name;
    std::string description;
};

const std::vector<ScenarioInfo>& list_scenarios();

/// Runs the named scenario; cases run on `workers` threads and are merged in order.
Report run(const ScenarioConfig& cfg);

/// Case body executed by the worker pool.
using CaseFn = std::function<CaseResult()>;
/// Runs the cases (exceptions become failed cases with the error recorded).
std::vector<CaseResult> run_cases(const std::vector<CaseFn>& cases, int workers);

// Stand-alone experiments.

/// Flat connection i theta dt on the trivial line bundle over the circle of length 1.
Report s1_flat_classification(const std::vector<double>& thetas);

Report stable_triviality_threshold(int resolution, int seeds, std::uint64_t first_seed = 1, int workers = 1);

struct KAreaBound {
    std::string manifold;
    std::string homology_class;
    std::string direction;  ///< "lower" (witness bundle) or "upper" (Chern-Weil)
    double value = 0;
    nlohmann::json witness;
    nlohmann::json to_json() const;
};

/// Push-forwards of the c1 = 1 line bundle on d^2-sheeted covers of the unit torus.
std::vector<KAreaBound> torus_karea_growth(int max_degree, int resolution = 2);

/// Replays a lower-bound witness: 1 / comass of the stored bundle, with its c1.
struct WitnessReplay {
    double bound = 0;
    double c1 = 0;
};
WitnessReplay replay_witness(const KAreaBound& b, int resolution = 2);

struct MinimizationResult {
    int k = 0;
    int level = 0;
    double start_comass = 0;
    double final_comass = 0;
    double c1 = 0;
    int iterations = 0;
    bool converged = false;
    /// |d1 a - (flux - flux_0)| of the reconstructed connection perturbation.
    double reconstruction_defect = 0;
    nlohmann::json to_json() const;
};

/// Minimizes the discrete curvature comass of monopole(k) on an icosphere over
/// connection perturbations (c1 fixed). `warp` = 0 starts at the constant-curvature
/// connection; otherwise the start is pulled back through a random warp.
MinimizationResult monopole_curvature_minimization(int k, int level, double warp = 0.0, std::uint64_t seed = 1,
                                                   double target = -1.0);

}  // namespace gaugelab
