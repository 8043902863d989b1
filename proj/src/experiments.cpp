#include "gaugelab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "gaugelab/coulomb.hpp"
#include "gaugelab/error.hpp"
#include "gaugelab/gauge.hpp"
#include "gaugelab/transport.hpp"

namespace gaugelab {

namespace {

constexpr double kPi = std::numbers::pi;

using json = nlohmann::json;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t salt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(salt)};
    return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

json to_json_vec(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec random_unit(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> nd;
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = nd(rng);
    return v / v.norm();
}

Point sphere_point(double x, double y, double z) {
    Point p(3);
    p << x, y, z;
    return p;
}

std::string now_utc() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

struct Plan {
    std::vector<CaseFn> cases;
    /// Optional cases computed from the finished ones.
    std::function<std::vector<CaseResult>(const std::vector<CaseResult>&)> finalize;
};

// ---------------------------------------------------------------------------

Plan plan_area_fuzz(const ScenarioConfig& cfg) {
    Plan plan;
    const int n = cfg.cases_or(200);
    const int grid = cfg.params.value("grid", 16);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t seed = cfg.seed + i;
        plan.cases.push_back([seed, i, grid] {
            auto rng = make_rng(seed, 101);
            const bool sphere = i % 2 == 0;
            const int family = static_cast<int>(rng() % 2);
            const double amp = uniform(rng, 0.0, 0.3);
            CaseResult r;
            std::optional<BundleAtlas> b;
            std::optional<DiscHomotopy> disc;
            if (sphere) {
                const int k = static_cast<int>(rng() % 5) - 2;
                b = family == 0 ? perturb(make_monopole(k), seed, amp, amp)
                                : perturb(make_trivial(Manifold::sphere(), 2), seed, amp, amp);
                const Point base = random_unit(rng, 3);
                const Manifold m = Manifold::sphere();
                const Mat f = m.tangent_frame(base);
                const double a = uniform(rng, 0, 2 * kPi), rad = uniform(rng, 0.1, 1.3);
                const Point center = m.exp(base, rad * (std::cos(a) * f.col(0) + std::sin(a) * f.col(1)));
                disc = DiscHomotopy::lasso(m, base, center, grid);
                r.inputs = {{"surface", "sphere"}, {"family", family == 0 ? "monopole" : "trivial2"}, {"k", k},
                            {"amplitude", amp}, {"radius", rad}};
            } else {
                const Manifold m = Manifold::torus(1.0, 1.0);
                const int c = static_cast<int>(rng() % 4) - 1;
                b = family == 0 ? perturb(make_torus_line(1.0, 1.0, c), seed, amp, amp)
                                : perturb(make_trivial(m, 2), seed, amp, amp);
                Point base(2);
                base << uniform(rng, 0, 1), uniform(rng, 0, 1);
                const double a = uniform(rng, 0, 2 * kPi), rad = uniform(rng, 0.03, 0.22);
                Point center = base;
                center(0) += rad * std::cos(a);
                center(1) += rad * std::sin(a);
                disc = DiscHomotopy::lasso(m, base, center, grid);
                r.inputs = {{"surface", "torus"}, {"family", family == 0 ? "torus_line" : "trivial2"}, {"c", c},
                            {"amplitude", amp}, {"radius", rad}};
            }
            r.inputs["seed"] = seed;
            const AreaCheckReport rep = holonomy_area_check(*b, *disc);
            r.measured = {{"holonomy_defect", rep.holonomy_defect},
                          {"area", rep.area},
                          {"curvature_comass", rep.curvature_comass},
                          {"error_estimate", rep.error_estimate}};
            r.bound = {{"area_times_comass", rep.bound}, {"slack", rep.slack}};
            r.pass = rep.pass;
            return r;
        });
    }
    return plan;
}

PathCurve equator() {
    const Manifold m = Manifold::sphere();
    const Point a = sphere_point(1, 0, 0), b = sphere_point(0, 1, 0), c = sphere_point(-1, 0, 0),
                d = sphere_point(0, -1, 0);
    return geodesic(m, a, b).then(geodesic(m, b, c)).then(geodesic(m, c, d)).then(geodesic(m, d, a));
}

Plan plan_monopole_exactness(const ScenarioConfig& cfg) {
    Plan plan;
    const double htol = cfg.tol("holonomy", 1e-8);
    const double ctol = cfg.tol("c1", 1e-6);
    const int res = cfg.resolution_or(2);
    plan.cases.push_back([htol] {
        TransportConfig tc;
        tc.order = Integrator::Magnus4;
        const HolonomyResult h = holonomy(make_monopole(1), equator(), tc);
        CaseResult r;
        r.inputs = {{"check", "equator_holonomy"}, {"k", 1}};
        const double dev = std::abs(h.matrix(0, 0) - cplx(-1, 0));
        r.measured = {{"re", h.matrix(0, 0).real()}, {"im", h.matrix(0, 0).imag()}, {"deviation", dev},
                      {"error_estimate", h.error_estimate}};
        r.bound = {{"expected", -1}, {"tolerance", htol}};
        r.pass = dev <= htol;
        return r;
    });
    for (int k = -3; k <= 3; ++k)
        plan.cases.push_back([k, ctol, res] {
            CaseResult r;
            const double c1 = chern_number_c1(make_monopole(k), res);
            r.inputs = {{"check", "chern_number"}, {"k", k}, {"resolution", res}};
            r.measured = {{"c1", c1}};
            r.bound = {{"expected", k}, {"tolerance", ctol}};
            r.pass = std::abs(c1 - k) <= ctol;
            return r;
        });
    return plan;
}

CaseResult saturation_case(const BundleAtlas& b, const Point& center, double r, double expected, double tol) {
    const GaugeTrivialization g = exponential_gauge(b, center, r);
    const double curv = g.diagnostics.at("curvature_comass").get<double>();
    const double ratio = g.achieved.value / curv;
    CaseResult c;
    c.inputs = {{"radius", r}, {"center", to_json_vec(center)}};
    c.measured = {{"form_comass", g.achieved.value}, {"curvature_comass", curv}, {"ratio", ratio},
                  {"certificate", g.certificate->to_json()}};
    c.bound = {{"expected_ratio", expected}, {"relative_tolerance", tol}};
    c.pass = std::abs(ratio / expected - 1) <= tol && g.certificate->holds();
    return c;
}

Plan plan_constants_euclidean(const ScenarioConfig& cfg) {
    Plan plan;
    const std::vector<double> radii = cfg.params.value("radii", std::vector<double>{0.5, 1.0, 2.0});
    const double field = cfg.params.value("field", 0.4);
    const double tol = cfg.tol("ratio", 0.01);
    double rmax = 0;
    for (double r : radii) rmax = std::max(rmax, r);
    auto b = std::make_shared<const BundleAtlas>(make_constant_field_ball(rmax * 1.25, field));
    for (double r : radii)
        plan.cases.push_back([b, r, tol] { return saturation_case(*b, Point::Zero(2), r, r / 2, tol); });
    return plan;
}

Plan plan_constants_sphere(const ScenarioConfig& cfg) {
    Plan plan;
    const std::vector<double> radii = cfg.params.value("radii", std::vector<double>{0.5, 1.0, 2.0, 2 * kPi / 3});
    const double tol = cfg.tol("ratio", 0.01);
    auto b = std::make_shared<const BundleAtlas>(make_monopole(1));
    for (double r : radii)
        plan.cases.push_back([b, r, tol] { return saturation_case(*b, sphere_point(0, 0, 1), r, std::tan(r / 2), tol); });
    plan.cases.push_back([b, tol] {
        const double r = 2 * kPi / 3;
        CaseResult c = saturation_case(*b, sphere_point(0, 0, 1), r, std::sqrt(3.0), tol);
        const double cst = exponential_gauge_constant(Manifold::sphere(), r);
        c.inputs["check"] = "constant_at_two_thirds_pi";
        c.measured["constant"] = cst;
        c.bound["sqrt3"] = std::sqrt(3.0);
        c.pass = c.pass && std::abs(cst - std::sqrt(3.0)) <= 1e-12;
        return c;
    });
    return plan;
}

Plan plan_sphere_trivialization(const ScenarioConfig& cfg) {
    Plan plan;
    const int n = cfg.cases_or(50);
    const double lo = cfg.params.value("min_amplitude", 0.02), hi = cfg.params.value("max_amplitude", 0.068);
    const double rlo = cfg.params.value("min_curvature", 0.01), rhi = cfg.params.value("max_curvature", 0.07);
    const int res = cfg.resolution_or(3);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t seed = cfg.seed + i;
        plan.cases.push_back([=] {
            auto rng = make_rng(seed, 202);
            const int rank = 1 + i % 2;
            const double amp = uniform(rng, lo, hi);
            const BundleAtlas b = perturb(make_trivial(Manifold::sphere(), rank), seed, amp);
            SphereGluingConfig sc;
            sc.curvature_resolution = res;
            sc.measure_resolution = res;
            const SphereGluingResult g = sphere_two_chart_trivialize(b, sc);
            const double R = g.curvature_comass;
            bool g12_ok = false;
            for (const auto& c : g.checks)
                if (c.at("name") == "g12_minus_id") g12_ok = c.at("pass").get<bool>();
            CaseResult r;
            r.inputs = {{"seed", seed}, {"rank", rank}, {"amplitude", amp}};
            r.measured = {{"curvature_comass", R},
                          {"form_comass", g.gauge.achieved.value},
                          {"g12_defect", g.g12_defect},
                          {"checks", g.checks}};
            r.bound = {{"form_comass", 21 * std::sqrt(3.0) * R}, {"g12_defect", 2 * kPi * R},
                       {"curvature_range", {rlo, rhi}}};
            r.pass = R >= rlo && R <= rhi && g.gauge.certificate->holds() && g12_ok && g.checks_pass;
            return r;
        });
    }
    return plan;
}

CMat random_skew(std::mt19937_64& rng, int m, double norm) {
    std::normal_distribution<double> nd;
    CMat g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) g(i, j) = {nd(rng), nd(rng)};
    CMat s = 0.5 * (g - g.adjoint());
    return s * (norm / op_norm(s));
}

Plan plan_exp_identities(const ScenarioConfig& cfg) {
    Plan plan;
    const int n = cfg.cases_or(1000);
    const double itol = cfg.tol("identity", 1e-9), rtol = cfg.tol("round_trip", 1e-10);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t seed = cfg.seed + i;
        plan.cases.push_back([=] {
            auto rng = make_rng(seed, 303);
            const int m = 1 + static_cast<int>(rng() % 4);
            const double norm = uniform(rng, 0.0, kPi);
            const CMat a = random_skew(rng, m, norm);
            const CMat u = expm_skew(a);
            const double lhs = op_norm(u - CMat::Identity(m, m));
            const double rhs = 2 * std::sin(op_norm(a) / 2);
            // Round trip away from the cut at |A| = pi.
            const CMat b = a * (std::min(norm, 3.0) / std::max(norm, 1e-300));
            const double trip = op_norm(logm_unitary(expm_skew(b)) - b);
            const CMat s = a * (0.45 / std::max(norm, 1e-300));
            const double gated = op_norm(u_log(u_exp(AntiHermitian(s))).matrix() - s);
            CaseResult r;
            r.inputs = {{"seed", seed}, {"rank", m}, {"norm", norm}};
            r.measured = {{"identity_error", std::abs(lhs - rhs)}, {"round_trip", trip}, {"gated_round_trip", gated}};
            r.bound = {{"identity", itol}, {"round_trip", rtol}};
            r.pass = std::abs(lhs - rhs) <= itol && trip <= rtol && gated <= rtol;
            return r;
        });
    }
    return plan;
}

Plan plan_product(const ScenarioConfig& cfg) {
    Plan plan;
    const int n = cfg.cases_or(20);
    const int res = cfg.resolution_or(2);
    const double length = cfg.params.value("circle_length", 1.0);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t seed = cfg.seed + i;
        plan.cases.push_back([=] {
            auto rng = make_rng(seed, 404);
            const int rank = 1 + (i / 2) % 2;
            const bool pure_pullback = i % 2 == 0;
            const double amp = uniform(rng, 0.02, 0.05);
            const Manifold prod = Manifold::product(Manifold::sphere(), length);
            const BundleAtlas base = perturb(make_trivial(Manifold::sphere(), rank), seed, amp);
            BundleAtlas b = pullback(base, map_project_base(prod));
            double amp2 = 0;
            if (!pure_pullback) {
                amp2 = uniform(rng, 0.01, 0.03);
                b = perturb(b, seed + 7919, amp2);
            }
            SphereGluingConfig sc;
            sc.curvature_resolution = res;
            sc.measure_resolution = res;
            const ProductTrivialization p = product_trivialize(b, sc);
            const double hol = op_norm(p.original_fiber_holonomy - p.reference_holonomy);
            CaseResult r;
            r.inputs = {{"seed", seed}, {"rank", rank}, {"pullback", pure_pullback}, {"amplitude", amp},
                        {"circle_amplitude", amp2}};
            r.measured = {{"tangent_curvature", p.tangent_curvature},
                          {"tangent_difference", p.tangent_difference},
                          {"fiber_holonomy_change", hol},
                          {"checks_pass", p.glued.checks_pass}};
            r.bound = {{"tangent_difference", p.certificate.bound}, {"fiber_holonomy_change", 1e-12}};
            r.pass = p.certificate.holds() && hol <= 1e-12 && p.glued.checks_pass;
            return r;
        });
    }
    return plan;
}

Plan plan_flatten(const ScenarioConfig& cfg) {
    Plan plan;
    const int n = cfg.cases_or(20);
    const int res = cfg.resolution_or(2);
    const double itol = cfg.tol("inner", 1e-8);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t seed = cfg.seed + i;
        plan.cases.push_back([=] {
            auto rng = make_rng(seed, 505);
            const int k = static_cast<int>(rng() % 3) - 1;
            const double amp = uniform(rng, 0.02, 0.15);
            const BundleAtlas b = k == 0 ? perturb(make_trivial(Manifold::sphere(), 2), seed, amp)
                                         : perturb(make_monopole(k), seed, amp);
            const Manifold& m = b.base();
            const Point center = random_unit(rng, 3);
            const double delta = uniform(rng, 0.1, 0.2);
            const FlattenPlan fp = make_flatten_plan(m, center, delta);
            const BundleAtlas bp = pullback(b, fp.retraction);
            const GaugeTrivialization inner = exponential_gauge(bp, center, 3.5 * delta);
            const BundleAtlas out = relative_flatten(b, fp, inner);
            double tube = gauged_form_comass_at(out, center);
            const Mat f = m.tangent_frame(center);
            for (double rho : {delta / 3, 2 * delta / 3, 0.99 * delta})
                for (int j = 0; j < 12; ++j) {
                    const double a = 2 * kPi * j / 12;
                    const Point p = m.exp(center, rho * (std::cos(a) * f.col(0) + std::sin(a) * f.col(1)));
                    tube = std::max(tube, gauged_form_comass_at(out, p));
                }
            const double cin = comass_norm(b, ComassMode::Full, res).value;
            const double cout = comass_norm(out, ComassMode::Full, res).value;
            CaseResult r;
            r.inputs = {{"seed", seed}, {"k", k}, {"amplitude", amp}, {"delta", delta}, {"center", to_json_vec(center)}};
            r.measured = {{"tube_form_comass", tube}, {"input_comass", cin}, {"output_comass", cout},
                          {"constant", fp.constant}, {"inner_certificate", inner.certificate->to_json()}};
            r.bound = {{"tube_form_comass", itol}, {"output_comass", fp.constant * cin}};
            r.pass = tube < itol && cout <= fp.constant * cin;
            return r;
        });
    }
    return plan;
}

struct CoulombSetup {
    DecOperators coarse, fine;
    LambdaEstimate lc, lf;
    double eig = 0;
};

// Scale a unit-comass coclosed sample into the range where the coclosed bound applies.
MatrixCochain scaled_sample(const DecOperators& ops, const LambdaEstimate& l, std::uint64_t seed, double f) {
    const MatrixCochain a = random_coclosed(ops, 2, seed, 1.0);
    const double nd = cochain_comass(ops, exterior_d(ops, a));
    const double nw = cochain_comass(ops, wedge(ops, a, a));
    const double k = 1 / (8 * l.value * l.value);
    const double cr = nw > 0 ? (-nd + std::sqrt(nd * nd + 4 * nw * k)) / (2 * nw) : k / nd;
    return a * (f * std::min(1 / (4 * l.value), cr));
}

Plan plan_coulomb(const ScenarioConfig& cfg) {
    Plan plan;
    const int level = cfg.params.value("level", 3);
    const int n = cfg.cases_or(100);
    const double slack = cfg.tol("slack", 0.1);
    auto s = std::make_shared<CoulombSetup>();
    s->coarse = dec_operators(triangulate(Manifold::sphere(), level));
    s->fine = dec_operators(triangulate(Manifold::sphere(), level + 1));
    s->lc = lambda_estimate(s->coarse);
    s->lf = lambda_estimate(s->fine, &s->lc);
    s->eig = laplacian_first_eigenvalue(s->coarse);
    std::shared_ptr<const CoulombSetup> cs = s;

    plan.cases.push_back([cs, level] {
        CaseResult r;
        r.inputs = {{"check", "laplacian_eigenvalue"}, {"level", level}};
        r.measured = {{"eigenvalue", cs->eig}};
        r.bound = {{"expected", 2.0}, {"relative_tolerance", 0.05}};
        r.pass = std::abs(cs->eig / 2 - 1) <= 0.05;
        return r;
    });
    plan.cases.push_back([cs, level] {
        CaseResult r;
        r.inputs = {{"check", "lambda_stability"}, {"levels", {level, level + 1}}};
        r.measured = {{"coarse", cs->lc.to_json()}, {"fine", cs->lf.to_json()}};
        r.bound = {{"relative_delta", 0.05}};
        r.pass = cs->lf.delta <= 0.05;
        return r;
    });
    plan.cases.push_back([cs, seed = cfg.seed] {
        auto rng = make_rng(seed, 606);
        const DecOperators& ops = cs->coarse;
        const MatrixCochain a = random_coclosed(ops, 2, seed, 1e-2);
        // smooth gauge with |du| <= 0.3 so the gauged input stays inside the gate
        const CMat x1 = random_skew(rng, 2, 1.0), x2 = random_skew(rng, 2, 1.0);
        const Vec w1 = random_unit(rng, 3), w2 = random_unit(rng, 3);
        const double ph = uniform(rng, 0.0, 2 * kPi);
        std::vector<CMat> g;
        for (const Vec& p : ops.mesh->vertices)
            g.push_back(expm_skew(0.15 * std::sin(w1.dot(p) + ph) * x1 + 0.15 * std::cos(w2.dot(p)) * x2));
        const MatrixCochain b = gauge_action(ops, a, g);
        CoulombConfig cc;
        cc.gate = 1 / (2 * cs->lc.value);
        const CoulombResult p = coulomb_project(ops, b, cc);
        const CoulombResult q = coulomb_project(ops, p.a, cc);
        const double idem = (q.a - p.a).max_norm();
        const double inv = std::abs(cochain_comass(ops, plaquette_curvature(ops, p.a)) -
                                    cochain_comass(ops, plaquette_curvature(ops, b)));
        CaseResult r;
        r.inputs = {{"check", "newton_projection"}, {"input_comass", cochain_comass(ops, b)}};
        r.measured = {{"residual", p.residual}, {"iterations", p.iterations}, {"idempotence", idem},
                      {"curvature_invariance", inv}};
        r.bound = {{"residual", 1e-8}, {"iterations", 8}, {"idempotence", 1e-9}, {"curvature_invariance", 1e-8}};
        r.pass = p.residual < 1e-8 && p.iterations <= 8 && idem <= 1e-9 && inv <= 1e-8;
        return r;
    });
    plan.cases.push_back([cs, seed = cfg.seed] {
        const DecOperators& ops = cs->coarse;
        MatrixCochain a = random_coclosed(ops, 1, seed + 1, 0.3);
        MatrixCochain u = MatrixCochain::zeros(0, 1, static_cast<int>(ops.star0.size()));
        for (int v = 0; v < u.size(); ++v) u.values[v](0, 0) = {0, std::sin(2 * ops.mesh->vertices[v](0) + 1)};
        const MatrixCochain b = a + exterior_d(ops, u);
        const CoulombResult ab = coulomb_project_abelian(ops, b);
        const CoulombResult nb = coulomb_project(ops, b);
        CaseResult r;
        r.inputs = {{"check", "abelian_reduction"}};
        r.measured = {{"difference", (ab.a - nb.a).max_norm()}, {"residual", ab.residual},
                      {"recovered", (ab.a - a).max_norm()}};
        r.bound = {{"difference", 1e-9}, {"residual", 1e-10}};
        r.pass = (ab.a - nb.a).max_norm() <= 1e-9 && ab.residual < 1e-10;
        return r;
    });
    for (int i = 0; i < n; ++i) {
        const std::uint64_t seed = cfg.seed + 1000 + i;
        plan.cases.push_back([cs, seed, slack] {
            auto rng = make_rng(seed, 707);
            const double f = uniform(rng, 0.1, 0.9);
            const MatrixCochain ac = scaled_sample(cs->coarse, cs->lc, seed, f);
            const MatrixCochain af = scaled_sample(cs->fine, cs->lf, seed, f);
            const CoclosedBoundReport rc = coclosed_bound_check(cs->coarse, ac, cs->lc, slack);
            const CoclosedBoundReport rf = coclosed_bound_check(cs->fine, af, cs->lf, slack);
            double contract = 0;
            const double l = cs->lc.value;
            for (double t : {0.25, 0.5, 0.75, 1.0}) {
                const double curv = cochain_comass(cs->coarse, discrete_curvature(cs->coarse, ac * t));
                contract = std::max(contract, curv / ((2 * t - t * t) / (8 * l * l)));
            }
            CaseResult r;
            r.inputs = {{"check", "lemma_sample"}, {"seed", seed}, {"fraction", f}};
            r.measured = {{"coarse", rc.to_json()}, {"fine", rf.to_json()}, {"contractibility_ratio", contract}};
            r.bound = {{"ratio", 1 + slack}, {"contractibility_ratio", 1 + slack}};
            r.pass = rc.hypothesis_met && rf.hypothesis_met && rc.pass && rf.pass && contract <= 1 + slack;
            return r;
        });
    }
    plan.finalize = [](const std::vector<CaseResult>& done) {
        double sc = 0, sf = 0;
        for (const auto& c : done)
            if (c.inputs.value("check", "") == "lemma_sample" && c.error.empty()) {
                sc = std::max(sc, c.measured.at("coarse").at("slack_used").get<double>());
                sf = std::max(sf, c.measured.at("fine").at("slack_used").get<double>());
            }
        CaseResult r;
        r.inputs = {{"check", "slack_trend"}};
        r.measured = {{"coarse_slack", sc}, {"fine_slack", sf}};
        r.bound = {{"fine_slack", sc}};
        r.pass = sf <= sc + 1e-12;
        return std::vector<CaseResult>{r};
    };
    return plan;
}

Plan plan_threshold(const ScenarioConfig& cfg) {
    Plan plan;
    const int n = cfg.cases_or(100);
    const int res = cfg.resolution_or(2);
    const double amp = cfg.params.value("amplitude", 0.45);
    // quadrature error of c1 at resolution 2 is about 1e-5
    const double ctol = cfg.tol("c1", 1e-4);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t seed = cfg.seed + i;
        plan.cases.push_back([=] {
            const BundleAtlas flat = perturb(make_trivial(Manifold::sphere(), 1), seed, amp);
            const double cm = comass_norm(flat, ComassMode::Full, res).value;
            const double c1 = chern_number_c1(flat, res);
            const BundleAtlas mono = perturb(make_monopole(1), seed, amp);
            const double cm1 = comass_norm(mono, ComassMode::Full, res).value;
            const double c11 = chern_number_c1(mono, res);
            CaseResult r;
            r.inputs = {{"seed", seed}, {"amplitude", amp}};
            r.measured = {{"trivial_comass", cm}, {"trivial_c1", c1}, {"monopole_comass", cm1}, {"monopole_c1", c11}};
            r.bound = {{"chern_weil", 2 * cm}, {"threshold", 0.5}, {"c1_tolerance", ctol}};
            // comass < 1/2 gives |c1| <= 2 comass < 1, hence c1 = 0; c1 = 1 forces comass >= 1/2.
            r.pass = cm < 0.5 && std::abs(c1) <= 2 * cm && std::abs(c1) < ctol && std::abs(c11 - 1) < ctol &&
                     cm1 >= 0.5 - 1e-6;
            return r;
        });
    }
    for (int k : {1, 0})
        plan.cases.push_back([k, res, ctol] {
            const BundleAtlas b = make_monopole(k);
            const double cm = comass_norm(b, ComassMode::Full, res).value;
            const double c1 = chern_number_c1(b, res);
            CaseResult r;
            r.inputs = {{"witness", "monopole"}, {"k", k}};
            r.measured = {{"comass", cm}, {"c1", c1}};
            r.bound = {{"comass", 0.5 * k}, {"c1", k}};
            r.pass = std::abs(cm - 0.5 * k) < 1e-6 && std::abs(c1 - k) < ctol;
            return r;
        });
    return plan;
}

Plan plan_karea(const ScenarioConfig& cfg) {
    Plan plan;
    const int dmax = cfg.params.value("max_degree", 4);
    const int res = cfg.resolution_or(2);
    const double tol = cfg.tol("relative", 1e-6);
    auto bounds = std::make_shared<const std::vector<KAreaBound>>(torus_karea_growth(dmax, res));
    for (int d = 1; d <= dmax; ++d)
        plan.cases.push_back([bounds, d, res, tol] {
            const KAreaBound& b = (*bounds)[d - 1];
            const double base = (*bounds)[0].value;
            const WitnessReplay rep = replay_witness(b, res);
            CaseResult r;
            r.inputs = {{"degree", d}};
            r.measured = {{"bound", b.value},
                          {"ratio", b.value / base},
                          {"replayed_bound", rep.bound},
                          {"c1", rep.c1},
                          {"rank", b.witness.at("rank")},
                          {"comass", b.witness.at("comass")}};
            r.bound = {{"ratio", d * d}, {"relative_tolerance", tol}};
            const bool grows = d == 1 || b.value > (*bounds)[d - 2].value;
            r.pass = std::abs(b.value / base / (d * d) - 1) <= tol && std::abs(rep.bound / b.value - 1) <= tol &&
                     std::abs(rep.c1 - 1) <= 1e-6 && b.witness.at("rank").get<int>() == d * d && grows;
            return r;
        });
    return plan;
}

Plan plan_minimization(const ScenarioConfig& cfg) {
    Plan plan;
    const int n = cfg.cases_or(5);
    const int k = cfg.params.value("k", 1);
    const int level = cfg.params.value("level", 3);
    const double warp = cfg.params.value("warp", 0.3);
    const double target = cfg.tol("target", 1.02 * std::abs(k) / 2.0);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t seed = cfg.seed + i;
        plan.cases.push_back([=] {
            const MinimizationResult m = monopole_curvature_minimization(k, level, warp, seed, target);
            CaseResult r;
            r.inputs = {{"k", k}, {"level", level}, {"warp", warp}, {"seed", seed}};
            r.measured = m.to_json();
            r.bound = {{"comass", target}, {"floor", std::abs(k) / 2.0}};
            r.pass = m.converged && m.final_comass <= target && std::abs(m.c1 - k) < 1e-9;
            if (!m.converged) r.error = "OptimizerStalled: best comass " + std::to_string(m.final_comass);
            return r;
        });
    }
    return plan;
}

Plan plan_s1(const ScenarioConfig& cfg) {
    Plan plan;
    const std::vector<double> thetas =
        cfg.params.value("thetas", std::vector<double>{0.0, 2 * kPi, kPi, kPi / 2, -2 * kPi, 4 * kPi, 1.0});
    for (double th : thetas)
        plan.cases.push_back([th] {
            const BundleAtlas b = make_flat_circle(1.0, th);
            Point a(1), z(1);
            a << 0.0;
            z << 1.0;
            TransportConfig tc;
            tc.order = Integrator::Magnus4;
            const HolonomyResult h = holonomy(b, PathCurve::line(a, z), tc);
            const cplx hol = h.matrix(0, 0);
            // Transport solves P' = -A P, so the loop holonomy is exp(-i theta).
            const cplx expected = std::exp(cplx(0, -th));
            const double curv = comass_norm(b, ComassMode::Full, 2).value;
            const bool trivial = std::abs(hol - cplx(1, 0)) <= 1e-9;
            const double q = th / (2 * kPi);
            const bool integral = std::abs(q - std::round(q)) <= 1e-9;
            CaseResult r;
            r.inputs = {{"theta", th}};
            r.measured = {{"holonomy_re", hol.real()}, {"holonomy_im", hol.imag()}, {"curvature_comass", curv},
                          {"gauge_trivial", trivial}};
            r.bound = {{"expected_re", expected.real()}, {"expected_im", expected.imag()},
                       {"gauge_trivial", integral}};
            r.pass = std::abs(hol - expected) <= 1e-9 && curv == 0.0 && trivial == integral;
            return r;
        });
    return plan;
}

struct Entry {
    ScenarioInfo info;
    std::function<Plan(const ScenarioConfig&)> plan;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> r{
        {{"lemma_area_fuzz", "holonomy-area inequality on random discs over S^2 and T^2"}, plan_area_fuzz},
        {{"monopole_exactness", "monopole equator holonomy and Chern numbers"}, plan_monopole_exactness},
        {{"constants_euclidean", "exponential gauge saturation C(r) = r/2 on constant fields"},
         plan_constants_euclidean},
        {{"constants_sphere", "exponential gauge saturation C(r) = tan(r/2) on the monopole"}, plan_constants_sphere},
        {{"sphere_trivialization", "two-chart glued trivialization with |A| <= 21 sqrt(3) |R|"},
         plan_sphere_trivialization},
        {{"exp_identities", "|e^A - Id| = 2 sin(|A|/2) and exp/log round trips"}, plan_exp_identities},
        {{"product_trivialization", "fiberwise gluing over S^2 x S^1, tangential bound"}, plan_product},
        {{"relative_flatten", "flattening near a point with the (C|dh| + 1)|df|^2 constant"}, plan_flatten},
        {{"coulomb_lemma", "lambda estimate, Coulomb projection and the coclosed form inequalities"}, plan_coulomb},
        {{"stable_triviality_threshold", "comass < 1/2 forces c1 = 0 for line bundles on S^2"}, plan_threshold},
        {{"torus_karea_growth", "push-forward witnesses with K-area lower bounds growing like d^2"}, plan_karea},
        {{"monopole_minimization", "curvature comass minimization at fixed Chern number"}, plan_minimization},
        {{"s1_flat_classification", "flat connections on S^1 and their gauge classes"}, plan_s1},
    };
    return r;
}

}  // namespace

const std::vector<ScenarioInfo>& list_scenarios() {
    static const std::vector<ScenarioInfo> out = [] {
        std::vector<ScenarioInfo> v;
        for (const auto& e : registry()) v.push_back(e.info);
        return v;
    }();
    return out;
}

Report run(const ScenarioConfig& cfg) {
    cfg.validate();
    const Entry* entry = nullptr;
    for (const auto& e : registry())
        if (e.info.name == cfg.scenario) entry = &e;
    Report rep;
    rep.scenario = cfg.scenario;
    rep.config = cfg.to_json();
    rep.timestamp = now_utc();
    const Plan plan = entry->plan(cfg);
    rep.cases = run_cases(plan.cases, cfg.workers);
    if (plan.finalize)
        for (auto& c : plan.finalize(rep.cases)) rep.cases.push_back(std::move(c));
    return rep;
}

Report s1_flat_classification(const std::vector<double>& thetas) {
    ScenarioConfig cfg;
    cfg.scenario = "s1_flat_classification";
    cfg.params = {{"thetas", thetas}};
    return run(cfg);
}

Report stable_triviality_threshold(int resolution, int seeds, std::uint64_t first_seed, int workers) {
    ScenarioConfig cfg;
    cfg.scenario = "stable_triviality_threshold";
    cfg.resolution = resolution;
    cfg.cases = seeds;
    cfg.seed = first_seed;
    cfg.workers = workers;
    return run(cfg);
}

json KAreaBound::to_json() const {
    return {{"manifold", manifold},
            {"class", homology_class},
            {"direction", direction},
            {"value", value},
            {"witness", witness}};
}

std::vector<KAreaBound> torus_karea_growth(int max_degree, int resolution) {
    if (max_degree < 1) throw Error(ErrorKind::PreconditionViolated, "max_degree must be >= 1");
    std::vector<KAreaBound> out;
    for (int d = 1; d <= max_degree; ++d) {
        const BundleAtlas up = make_torus_line(d, d, 1);
        const BundleAtlas down = pushforward_cover(up, map_torus_cover(1.0, 1.0, d));
        const double cm = comass_norm(down, ComassMode::Full, resolution).value;
        const double c1 = chern_number_c1(down, resolution);
        KAreaBound b;
        b.manifold = Manifold::torus(1.0, 1.0).describe();
        b.homology_class = "[T^2]";
        b.direction = "lower";
        b.value = 1.0 / cm;
        b.witness = {{"degree", d}, {"rank", down.rank()}, {"comass", cm}, {"c1", c1},
                     {"bundle", bundle_to_json(down)}};
        out.push_back(std::move(b));
    }
    return out;
}

WitnessReplay replay_witness(const KAreaBound& b, int resolution) {
    const BundleAtlas w = bundle_from_json(b.witness.at("bundle"));
    WitnessReplay r;
    r.bound = 1.0 / comass_norm(w, ComassMode::Full, resolution).value;
    r.c1 = chern_number_c1(w, resolution);
    return r;
}

json MinimizationResult::to_json() const {
    return {{"k", k},
            {"level", level},
            {"start_comass", start_comass},
            {"final_comass", final_comass},
            {"c1", c1},
            {"iterations", iterations},
            {"converged", converged},
            {"reconstruction_defect", reconstruction_defect}};
}

MinimizationResult monopole_curvature_minimization(int k, int level, double warp, std::uint64_t seed,
                                                   double target) {
    if (k == 0) throw Error(ErrorKind::PreconditionViolated, "minimization needs k != 0");
    const Manifold sph = Manifold::sphere();
    const SimplicialComplex mesh = triangulate(sph, level);
    const DecOperators ops = dec_operators(mesh);
    const int nf = static_cast<int>(mesh.faces.size());
    const Vec& area = ops.face_area;
    if (target <= 0) target = 1.02 * std::abs(k) / 2.0;

    // Face fluxes (curvature = -i flux) of monopole(k) pulled back through a warp.
    auto rng = make_rng(seed, 808);
    std::vector<Vec> dirs;
    std::vector<double> phases;
    for (int j = 0; j < 3; ++j) {
        dirs.push_back(2.0 * random_unit(rng, 3));
        phases.push_back(uniform(rng, 0, 2 * kPi));
    }
    std::vector<Vec> amps;
    for (int j = 0; j < 3; ++j) amps.push_back(random_unit(rng, 3));
    auto w = [&](const Vec& x) -> Vec {
        Vec y = x;
        for (int j = 0; j < 3; ++j) y += warp * std::sin(dirs[j].dot(x) + phases[j]) * amps[j];
        return y / y.norm();
    };
    Vec flux(nf);
    for (int f = 0; f < nf; ++f) {
        const auto& t = mesh.faces[f];
        const double a = triangle_area(sph, w(mesh.vertices[t[0]]), w(mesh.vertices[t[1]]), w(mesh.vertices[t[2]])).area;
        flux(f) = 0.5 * k * a;
    }
    const Vec start = flux;
    const double total = flux.sum();

    auto comass = [&](const Vec& x) { return x.cwiseQuotient(area).cwiseAbs().maxCoeff(); };
    MinimizationResult res;
    res.k = k;
    res.level = level;
    res.start_comass = comass(flux);

    // Projected nonlinear conjugate gradient on sum_f A_f (F_f / A_f)^p, p doubling,
    // with the total flux (hence c1) held fixed.
    for (int p : {2, 8, 32}) {
        auto objective = [&](const Vec& x) {
            const double s = comass(x);
            return s * std::pow((area.array() * (x.cwiseQuotient(area).array().abs() / s).pow(p)).sum(), 1.0 / p);
        };
        auto gradient = [&](const Vec& x) {
            const double s = comass(x);
            const Vec r = x.cwiseQuotient(area) / s;
            const double sum = (area.array() * r.array().abs().pow(p)).sum();
            Vec g = (std::pow(sum, 1.0 / p - 1) * r.array().abs().pow(p - 1) * r.array().sign()).matrix();
            return Vec(g.array() - g.mean());
        };
        Vec g = gradient(flux), dir = -g;
        for (int it = 0; it < 200; ++it) {
            if (g.norm() <= 1e-13 * std::max(1.0, std::sqrt(static_cast<double>(nf)))) break;
            if (g.dot(dir) >= 0) dir = -g;
            const double f0 = objective(flux);
            double step = 1.0 / std::max(1e-300, dir.cwiseQuotient(area).cwiseAbs().maxCoeff()) * comass(flux);
            Vec trial = flux + step * dir;
            int tries = 0;
            while (objective(trial) > f0 + 1e-4 * step * g.dot(dir) && tries < 60) {
                step *= 0.5;
                trial = flux + step * dir;
                ++tries;
            }
            if (tries == 60) break;
            flux = trial;
            flux.array() += (total - flux.sum()) / nf;
            const Vec gn = gradient(flux);
            const double beta = std::max(0.0, gn.dot(gn - g) / g.dot(g));
            dir = -gn + beta * dir;
            g = gn;
            ++res.iterations;
        }
    }
    res.final_comass = comass(flux);
    res.c1 = flux.sum() / (2 * kPi);
    res.converged = res.final_comass <= target;

    // The change of flux is d1 of a coexact edge cochain a = *1^-1 d1^T psi.
    const SpMat s = ops.d1 * ops.star1.cwiseInverse().asDiagonal() * SpMat(ops.d1.transpose());
    const SpMat red = s.bottomRightCorner(nf - 1, nf - 1);
    Eigen::SimplicialLDLT<SpMat> llt(red);
    const Vec delta = flux - start;
    Vec psi = Vec::Zero(nf);
    psi.tail(nf - 1) = llt.solve(delta.tail(nf - 1));
    const Vec a = ops.star1.cwiseInverse().asDiagonal() * (ops.d1.transpose() * psi);
    res.reconstruction_defect = (ops.d1 * a - delta).cwiseAbs().maxCoeff();
    return res;
}

}  // namespace gaugelab
