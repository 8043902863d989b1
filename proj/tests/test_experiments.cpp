#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "support.hpp"

#include "gaugelab/experiments.hpp"

using namespace gaugelab;
using std::numbers::pi;

TEST_CASE("config round trip and validation") {
    const auto j = nlohmann::json::parse(R"({"scenario":"exp_identities","seed":7,"cases":12,
        "params":{"rank":2},"tolerances":{"identity":1e-12}})");
    const ScenarioConfig c = ScenarioConfig::from_json(j);
    CHECK(c.seed == 7);
    CHECK(c.cases == 12);
    CHECK(c.tol("identity", 1.0) == 1e-12);
    CHECK(c.tol("missing", 0.25) == 0.25);
    const ScenarioConfig again = ScenarioConfig::from_json(c.to_json());
    CHECK(again.to_json() == c.to_json());

    ScenarioConfig bad;
    bad.scenario = "no_such_scenario";
    CHECK_ERROR(UnknownScenario, bad.validate());
    CHECK_ERROR(UnknownScenario, run(bad));
    CHECK_ERROR(SchemaError, ScenarioConfig::from_json(nlohmann::json::parse(R"({"schema":"other/9"})")));
    CHECK_ERROR(SchemaError, ScenarioConfig::from_json(nlohmann::json::parse(R"({"seed":"x"})")));
}

TEST_CASE("every listed scenario is unique") {
    const auto& list = list_scenarios();
    CHECK(list.size() >= 11);
    for (size_t i = 0; i < list.size(); ++i)
        for (size_t j = i + 1; j < list.size(); ++j) CHECK(list[i].name != list[j].name);
}

TEST_CASE("flat circle classification") {
    const Report r = s1_flat_classification({0.0, 2 * pi, pi, 1.0});
    CHECK(r.cases.size() == 4);
    CHECK(r.all_pass());
}

TEST_CASE("torus K-area witnesses grow quadratically") {
    const auto bounds = torus_karea_growth(2);
    REQUIRE(bounds.size() == 2);
    CHECK(bounds[0].value == doctest::Approx(1 / (2 * pi)).epsilon(1e-6));
    CHECK(bounds[1].value / bounds[0].value == doctest::Approx(4.0).epsilon(1e-6));
    const WitnessReplay w = replay_witness(bounds[1]);
    CHECK(w.bound == doctest::Approx(bounds[1].value).epsilon(1e-9));
    CHECK(std::abs(w.c1 - 1) < 1e-6);
}

TEST_CASE("reports are deterministic apart from the timestamp") {
    ScenarioConfig c;
    c.scenario = "exp_identities";
    c.cases = 20;
    c.seed = 3;
    Report a = run(c), b = run(c);
    CHECK(a.cases.size() == 20);
    a.timestamp = b.timestamp = "";
    CHECK(a.to_json() == b.to_json());
    c.workers = 2;
    Report p = run(c);
    p.timestamp = "";
    CHECK(p.to_json()["cases"] == a.to_json()["cases"]);
}

TEST_CASE("report JSON schema") {
    ScenarioConfig c;
    c.scenario = "exp_identities";
    c.cases = 3;
    const auto j = run(c).to_json();
    CHECK(j.at("schema") == "gaugelab.report/1");
    CHECK(j.at("scenario") == "exp_identities");
    CHECK(j.at("summary").at("cases") == 3);
    CHECK(j.at("cases").size() == 3);
    CHECK(j.contains("timestamp"));
}

TEST_CASE("CSV quoting") {
    Report r;
    r.scenario = "x";
    CaseResult c;
    c.inputs = {{"note", "a,\"b\""}};
    c.error = "line1\nline2";
    r.cases.push_back(c);
    const std::string csv = r.to_csv();
    CHECK(csv.rfind("case,pass,error,inputs,measured,bound\r\n", 0) == 0);
    CHECK(csv.find("\"line1\nline2\"") != std::string::npos);
    CHECK(csv.find("\"\"b\\\"\"\"") != std::string::npos);
}

TEST_CASE("write_report creates both files") {
    ScenarioConfig c;
    c.scenario = "s1_flat_classification";
    const auto dir = std::filesystem::temp_directory_path() / "gaugelab_test_reports";
    std::filesystem::remove_all(dir);
    write_report(run(c), dir);
    CHECK(std::filesystem::exists(dir / "s1_flat_classification.json"));
    CHECK(std::filesystem::exists(dir / "s1_flat_classification.csv"));
    std::ifstream in(dir / "s1_flat_classification.json");
    CHECK(nlohmann::json::parse(in).at("summary").at("pass") == true);
}

TEST_CASE("worker exceptions become failed cases") {
    std::vector<CaseFn> cases{[] { return CaseResult{{}, {}, {}, true, ""}; },
                              []() -> CaseResult { throw Error(ErrorKind::PreconditionViolated, "boom"); }};
    const auto out = run_cases(cases, 2);
    REQUIRE(out.size() == 2);
    CHECK(out[0].pass);
    CHECK_FALSE(out[1].pass);
    CHECK(out[1].error.find("boom") != std::string::npos);
}

TEST_CASE("minimization starting at the constant-curvature connection") {
    const MinimizationResult r = monopole_curvature_minimization(1, 2, 0.0);
    CHECK(r.converged);
    CHECK(r.iterations == 0);
    CHECK(std::abs(r.c1 - 1) < 1e-9);
    CHECK(r.final_comass == doctest::Approx(r.start_comass));
}

TEST_CASE("stable triviality threshold separates the classes") {
    const Report r = stable_triviality_threshold(2, 3);
    CHECK(r.all_pass());
}
