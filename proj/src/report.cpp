#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "gaugelab/error.hpp"
#include "gaugelab/experiments.hpp"

namespace gaugelab {

namespace {

constexpr const char* kConfigSchema = "gaugelab.config/1";
constexpr const char* kReportSchema = "gaugelab.report/1";

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorKind::SchemaError, "config must be a JSON object");
    if (j.contains("schema") && j.at("schema") != kConfigSchema)
        throw Error(ErrorKind::SchemaError, "unsupported config schema");
    ScenarioConfig c;
    try {
        c.scenario = j.value("scenario", std::string());
        c.seed = j.value("seed", std::uint64_t{1});
        c.cases = j.value("cases", 0);
        c.resolution = j.value("resolution", 0);
        c.workers = j.value("workers", 1);
        if (j.contains("params")) c.params = j.at("params");
        if (j.contains("tolerances")) c.tolerances = j.at("tolerances");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::SchemaError, std::string("bad config field: ") + e.what());
    }
    return c;
}

nlohmann::json ScenarioConfig::to_json() const {
    return {{"schema", kConfigSchema}, {"scenario", scenario},     {"seed", seed},
            {"cases", cases},          {"resolution", resolution}, {"workers", workers},
            {"params", params},        {"tolerances", tolerances}};
}

void ScenarioConfig::validate() const {
    bool known = false;
    for (const auto& s : list_scenarios()) known = known || s.name == scenario;
    if (!known) throw Error(ErrorKind::UnknownScenario, "unknown scenario '" + scenario + "'");
    if (cases < 0 || resolution < 0 || workers < 1)
        throw Error(ErrorKind::PreconditionViolated, "cases and resolution must be >= 0, workers >= 1");
    if (!params.is_object() || !tolerances.is_object())
        throw Error(ErrorKind::SchemaError, "params and tolerances must be objects");
}

double ScenarioConfig::tol(const std::string& key, double fallback) const {
    return tolerances.contains(key) ? tolerances.at(key).get<double>() : fallback;
}

nlohmann::json CaseResult::to_json() const {
    nlohmann::json j{{"inputs", inputs}, {"measured", measured}, {"bound", bound}, {"pass", pass}};
    if (!error.empty()) j["error"] = error;
    return j;
}

int Report::passed() const {
    int n = 0;
    for (const auto& c : cases) n += c.pass;
    return n;
}

nlohmann::json Report::to_json() const {
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : cases) cs.push_back(c.to_json());
    const int n = static_cast<int>(cases.size());
    nlohmann::json j{{"schema", kReportSchema},
                     {"scenario", scenario},
                     {"config", config},
                     {"cases", cs},
                     {"summary", {{"cases", n}, {"passed", passed()}, {"failed", n - passed()}, {"pass", all_pass()}}},
                     {"timestamp", timestamp}};
    if (!extra.empty()) j["extra"] = extra;
    return j;
}

std::string Report::to_csv() const {
    std::ostringstream os;
    os << "case,pass,error,inputs,measured,bound\r\n";
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& c = cases[i];
        os << i << ',' << (c.pass ? "true" : "false") << ',' << csv_field(c.error) << ',' << csv_field(c.inputs.dump())
           << ',' << csv_field(c.measured.dump()) << ',' << csv_field(c.bound.dump()) << "\r\n";
    }
    return os.str();
}

void write_report(const Report& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream js(dir / (r.scenario + ".json"));
    std::ofstream cs(dir / (r.scenario + ".csv"), std::ios::binary);
    if (!js || !cs) throw Error(ErrorKind::PreconditionViolated, "cannot write report into " + dir.string());
    js << r.to_json().dump(2) << '\n';
    cs << r.to_csv();
}

std::vector<CaseResult> run_cases(const std::vector<CaseFn>& cases, int workers) {
    std::vector<CaseResult> out(cases.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) {
            try {
                out[i] = cases[i]();
            } catch (const Error& e) {
                out[i].pass = false;
                out[i].error = e.what();
            } catch (const std::exception& e) {
                out[i].pass = false;
                out[i].error = std::string("unexpected: ") + e.what();
            }
        }
    };
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(cases.size())));
    if (n == 1) {
        work();
        return out;
    }
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace gaugelab
