#include "gaugelab/gauge.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "gaugelab/error.hpp"

namespace gaugelab {

namespace {

constexpr double kPi = std::numbers::pi;

CMat skew_part(const CMat& m) { return 0.5 * (m - m.adjoint()); }

double fd_step(const Manifold& m) {
    double len = 1.0;
    switch (m.kind()) {
        case ManifoldKind::RoundSphere2: len = m.scale(); break;
        case ManifoldKind::EuclideanBall: len = m.radius(); break;
        case ManifoldKind::FlatTorus2: len = std::min(m.period(0), m.period(1)); break;
        case ManifoldKind::Circle: len = m.circle_length(); break;
        case ManifoldKind::ProductWithCircle: len = 1.0; break;
    }
    return 1e-5 * std::min(1.0, len);
}

}  // namespace

nlohmann::json Certificate::to_json() const {
    return {{"theorem", theorem}, {"bound", bound}, {"measured", measured}, {"slack", slack}, {"holds", holds()}};
}

GaugeTrivialization GaugeTrivialization::identity(const BundleAtlas& b) {
    return constant(b, CMat::Identity(b.rank(), b.rank()));
}

GaugeTrivialization GaugeTrivialization::constant(const BundleAtlas& b, const CMat& u) {
    GaugeTrivialization g;
    g.rank = b.rank();
    for (int i = 0; i < b.chart_count(); ++i) g.gauges.push_back([u](const Point&) { return u; });
    return g;
}

BundleAtlas apply_gauge(const BundleAtlas& b, const GaugeTrivialization& g) {
    if (static_cast<int>(g.gauges.size()) != b.chart_count())
        throw Error(ErrorKind::CoverageMismatch, "gauge does not cover every chart");
    if (g.rank != b.rank()) throw Error(ErrorKind::CoverageMismatch, "gauge rank differs from bundle rank");
    for (const auto& s : g.gauges)
        if (!s) throw Error(ErrorKind::CoverageMismatch, "missing gauge function");
    auto pb = std::make_shared<const BundleAtlas>(b);
    auto gs = std::make_shared<const std::vector<GaugeFn>>(g.gauges);
    const Manifold m = b.base();
    const double h = fd_step(m);
    BundleAtlas out(m, b.rank());
    for (int c = 0; c < b.chart_count(); ++c) {
        const Chart& old = b.chart(c);
        Chart nc;
        nc.name = old.name;
        auto od = old.domain;
        auto gd = g.domain;
        if (od || gd)
            nc.domain = [od, gd](const Point& p) { return (!od || od(p)) && (!gd || gd(p)); };
        nc.quality = old.quality;
        nc.form = [pb, gs, c, m, h](const Point& p, const Vec& v) {
            const GaugeFn& s = (*gs)[c];
            const CMat S = s(p);
            const CMat Si = S.adjoint();
            CMat out = Si * pb->form(c, p, v) * S;
            const Vec vt = m.project_tangent(p, v);
            const double nv = vt.norm();
            if (nv > 0) {
                const Vec u = vt / nv;
                const CMat ds = (s(m.exp(p, h * u)) - s(m.exp(p, -h * u))) / (2 * h);
                out += nv * (Si * ds);
            }
            return skew_part(out);
        };
        if (old.curvature)
            nc.curvature = [pb, gs, c](const Point& p, const Vec& v, const Vec& w) {
                const CMat S = (*gs)[c](p);
                return CMat(S.adjoint() * pb->chart(c).curvature(p, v, w) * S);
            };
        out.add_chart(std::move(nc));
    }
    for (int i = 0; i < b.chart_count(); ++i)
        for (int j = i + 1; j < b.chart_count(); ++j)
            out.set_transition(i, j, [pb, gs, i, j](const Point& p) {
                return CMat((*gs)[i](p).adjoint() * pb->transition(i, j, p) * (*gs)[j](p));
            });
    if (b.has_decks()) {
        std::vector<GaugeFn> decks;
        const Mat lat = m.lattice();
        for (int k = 0; k < lat.cols(); ++k) {
            const Vec tau = lat.col(k);
            decks.push_back([pb, gs, k, tau](const Point& p) {
                const int c = pb->chart_at(p);
                return CMat((*gs)[c](p + tau).adjoint() * pb->deck(k, p) * (*gs)[c](p));
            });
        }
        out.set_decks(std::move(decks));
    }
    out.recipe = {{"family", "gauged"}, {"bundle", b.recipe}};
    return out;
}

CutoffRamp::CutoffRamp(double a_, double b_, double eps_) : a(a_), b(b_), eps(eps_) {
    const double len = b - a;
    if (!(len > 0) || !(eps > 0)) throw Error(ErrorKind::PlanProfileInvalid, "cutoff ramp needs a < b and eps > 0");
    eta = std::min(0.9 * eps * len * len / (1 + eps * len), 0.45 * len);
    slope = 1.0 / (len - eta);
}

double CutoffRamp::operator()(double x) const {
    if (x <= a) return 0.0;
    if (x >= b) return 1.0;
    auto tail = [](double u) { return u * u * u - 0.5 * u * u * u * u; };
    if (x < a + eta) return slope * eta * tail((x - a) / eta);
    if (x > b - eta) return 1.0 - slope * eta * tail((b - x) / eta);
    return slope * (0.5 * eta + (x - a - eta));
}

double CutoffRamp::derivative(double x) const {
    if (x <= a || x >= b) return 0.0;
    auto rise = [](double u) { return 3 * u * u - 2 * u * u * u; };
    if (x < a + eta) return slope * rise((x - a) / eta);
    if (x > b - eta) return slope * rise((b - x) / eta);
    return slope;
}

double exponential_gauge_constant(const Manifold& m, double r) {
    if (m.kind() == ManifoldKind::RoundSphere2) return m.scale() * std::tan(r / (2 * m.scale()));
    return r / 2;
}

namespace {

void check_radius(const Manifold& m, const Point& center, double r) {
    if (!(r > 0)) throw Error(ErrorKind::PreconditionViolated, "gauge radius must be positive");
    switch (m.kind()) {
        case ManifoldKind::RoundSphere2:
            if (r >= kPi * m.scale()) throw Error(ErrorKind::RadiusTooLarge, "radius reaches the cut locus");
            break;
        case ManifoldKind::EuclideanBall:
            if (r > m.radius() - center.norm() + 1e-12)
                throw Error(ErrorKind::RadiusTooLarge, "ball of that radius leaves the domain");
            break;
        case ManifoldKind::FlatTorus2:
            if (r >= injectivity_radius(m)) throw Error(ErrorKind::RadiusTooLarge, "radius exceeds injectivity radius");
            break;
        default: throw Error(ErrorKind::UnsupportedGeometry, "exponential gauge on surfaces and balls only");
    }
}

// Frames on rings of radius r k / 4 around the center plus the grid samples inside.
std::vector<FramePoint> ball_samples(const Manifold& m, const Point& center, double r, int resolution, int ring) {
    std::vector<FramePoint> out;
    for (const auto& fp : sample_frames(m, resolution))
        if (m.distance(center, fp.x) <= r) out.push_back(fp);
    const int d = m.ambient_dim();
    for (int k = 1; k <= 4; ++k) {
        const double rho = r * k / 4.0;
        for (int i = 0; i < ring; ++i) {
            const double a = 2 * kPi * i / ring;
            Point p(d);
            if (m.kind() == ManifoldKind::RoundSphere2) {
                const Mat f = m.tangent_frame(center);
                const Vec dir = std::cos(a) * f.col(0) + std::sin(a) * f.col(1);
                p = m.exp(center, rho * dir);
            } else {
                p = center;
                p(0) += rho * std::cos(a);
                p(1) += rho * std::sin(a);
            }
            out.push_back({p, m.tangent_frame(p)});
        }
    }
    return out;
}

}  // namespace

double gauged_form_comass_at(const BundleAtlas& gauged, const Point& p, ComassMode mode) {
    const Mat f = mode_frame(gauged.base(), gauged.base().tangent_frame(p), mode);
    return form_comass_at(gauged, gauged.chart_at(p), p, f);
}

GaugeTrivialization exponential_gauge(const BundleAtlas& b, const Point& center, double r, const ExpGaugeConfig& cfg) {
    const Manifold& m = b.base();
    check_radius(m, center, r);
    auto pb = std::make_shared<const BundleAtlas>(b);
    const int c0 = b.chart_at(center);
    TransportConfig tc;
    tc.order = Integrator::Magnus4;
    tc.fixed_steps = cfg.steps;
    tc.estimate_error = false;
    GaugeTrivialization g;
    g.rank = b.rank();
    for (int c = 0; c < b.chart_count(); ++c)
        g.gauges.push_back([pb, center, c0, c, tc](const Point& y) {
            return transport_between(*pb, geodesic(pb->base(), center, y), c0, c, tc);
        });
    const double margin = 1e-6 * std::max(1.0, r);
    g.domain = [m, center, r, margin](const Point& y) { return m.distance(center, y) <= r + margin; };

    const BundleAtlas gauged = apply_gauge(b, g);
    double curv = 0, form = 0;
    Point arg;
    const auto samples = ball_samples(m, center, r, cfg.resolution, cfg.boundary_ring);
    for (const auto& fp : samples) {
        curv = std::max(curv, curvature_comass_at(b, fp.x, fp.frame));
        const double v = form_comass_at(gauged, gauged.chart_at(fp.x), fp.x, fp.frame);
        if (v >= form) {
            form = v;
            arg = fp.x;
        }
    }
    g.achieved.value = form;
    g.achieved.samples = static_cast<int>(samples.size());
    g.achieved.argmax = arg;
    g.achieved.resolution = cfg.resolution;
    Certificate cert;
    cert.theorem = m.kind() == ManifoldKind::RoundSphere2 ? "exponential gauge, C(r) = tan(r/2)"
                                                          : "exponential gauge, C(r) = r/2";
    cert.bound = exponential_gauge_constant(m, r) * curv;
    cert.measured = form;
    cert.slack = 0.05 * cert.bound + 1e-9;
    g.certificate = cert;
    g.diagnostics = {{"center", std::vector<double>(center.data(), center.data() + center.size())},
                     {"radius", r},
                     {"curvature_comass", curv},
                     {"constant", exponential_gauge_constant(m, r)}};
    return g;
}

}  // namespace gaugelab
