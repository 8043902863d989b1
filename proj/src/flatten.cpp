#include <cmath>
#include <memory>
#include <numbers>

#include "gaugelab/error.hpp"
#include "gaugelab/gauge.hpp"

namespace gaugelab {

namespace {

// Radial profile on [0, 1]: 0 with two vanishing derivatives at 0, value 4 and
// slope 1 with vanishing second derivative at 1.
double prof(double u) { return u * u * u * (36 - 53 * u + 21 * u * u); }
double prof_d(double u) { return u * u * (108 - 212 * u + 105 * u * u); }

struct Radial {
    double delta;
    double phi(double r) const {
        if (r <= 3 * delta) return 0.0;
        if (r >= 4 * delta) return r;
        return delta * prof((r - 3 * delta) / delta);
    }
    double dphi(double r) const {
        if (r <= 3 * delta) return 0.0;
        if (r >= 4 * delta) return 1.0;
        return prof_d((r - 3 * delta) / delta);
    }
};

SmoothMap make_retraction(const Manifold& m, const Point& center, double delta) {
    SmoothMap f;
    f.tag = "retraction";
    f.source = f.target = m;
    f.lattice_map = Eigen::MatrixXi(0, 0);
    f.params = {{"center", std::vector<double>(center.data(), center.data() + center.size())}, {"delta", delta}};
    const Radial rad{delta};
    if (m.kind() == ManifoldKind::RoundSphere2) {
        const double s = m.scale();
        const Vec c = center / center.norm();
        // p = s (cos th c + sin th e)
        f.f = [rad, s, c](const Point& p) -> Point {
            const Vec x = p / p.norm();
            const double th = std::acos(std::clamp(x.dot(c), -1.0, 1.0));
            const double r = s * th;
            if (r >= 4 * rad.delta) return s * x;
            if (r <= 3 * rad.delta) return s * c;
            const Vec e = (x - std::cos(th) * c) / std::sin(th);
            const double a = rad.phi(r) / s;
            return s * (std::cos(a) * c + std::sin(a) * e);
        };
        f.df = [rad, s, c, m](const Point& p, const Vec& v) -> Vec {
            const Vec vt = m.project_tangent(p, v);
            const Vec x = p / p.norm();
            const double th = std::acos(std::clamp(x.dot(c), -1.0, 1.0));
            const double r = s * th;
            if (r >= 4 * rad.delta) return vt;
            if (r <= 3 * rad.delta) return Vec::Zero(3);
            const Vec e = (x - std::cos(th) * c) / std::sin(th);
            const Vec et = -std::sin(th) * c + std::cos(th) * e;
            const double a = rad.phi(r) / s;
            const Vec et2 = -std::sin(a) * c + std::cos(a) * e;
            const double vr = vt.dot(et);
            return rad.dphi(r) * vr * et2 + (std::sin(a) / std::sin(th)) * (vt - vr * et);
        };
    } else if (m.kind() == ManifoldKind::EuclideanBall) {
        f.f = [rad, center](const Point& p) -> Point {
            const Vec d = p - center;
            const double r = d.norm();
            if (r >= 4 * rad.delta) return p;
            if (r <= 3 * rad.delta) return center;
            return center + rad.phi(r) * d / r;
        };
        f.df = [rad, center](const Point& p, const Vec& v) -> Vec {
            const Vec d = p - center;
            const double r = d.norm();
            if (r >= 4 * rad.delta) return v;
            if (r <= 3 * rad.delta) return Vec::Zero(v.size());
            const Vec e = d / r;
            const double vr = v.dot(e);
            return rad.dphi(r) * vr * e + (rad.phi(r) / r) * (v - vr * e);
        };
    } else {
        throw Error(ErrorKind::UnsupportedGeometry, "relative flattening on spheres and balls only");
    }
    return f;
}

}  // namespace

FlattenPlan make_flatten_plan(const Manifold& m, const Point& center, double delta, double eps) {
    if (!(delta > 0)) throw Error(ErrorKind::PlanProfileInvalid, "delta must be positive");
    if (m.kind() == ManifoldKind::RoundSphere2) {
        if (4 * delta >= std::numbers::pi * m.scale())
            throw Error(ErrorKind::PlanProfileInvalid, "tube of radius 4 delta wraps the sphere");
    } else if (m.kind() == ManifoldKind::EuclideanBall) {
        if (center.norm() + 4 * delta > m.radius())
            throw Error(ErrorKind::PlanProfileInvalid, "tube of radius 4 delta leaves the ball");
    }
    FlattenPlan plan;
    plan.center = center;
    plan.delta = delta;
    plan.retraction = make_retraction(m, center, delta);
    const CutoffRamp ramp(delta, 2 * delta, eps);
    plan.h = [ramp](double d) { return ramp(d); };

    double dh = 0, df = 1;
    const Radial rad{delta};
    const double s = m.kind() == ManifoldKind::RoundSphere2 ? m.scale() : 0.0;
    for (int i = 0; i <= 4000; ++i) {
        dh = std::max(dh, ramp.derivative(delta + delta * i / 4000.0));
        const double r = 3 * delta + delta * (i + 0.5) / 4001.0;
        const double tang = s > 0 ? std::sin(rad.phi(r) / s) / std::sin(r / s) : rad.phi(r) / r;
        df = std::max({df, rad.dphi(r), tang});
    }
    plan.dh_norm = dh;
    plan.df_norm = df;
    plan.retraction.lipschitz = df;
    plan.c = exponential_gauge_constant(m, 3 * delta);
    plan.constant = (plan.c * dh + 1) * df * df;
    return plan;
}

void validate_plan(const FlattenPlan& plan) {
    if (!plan.h || !plan.retraction.f) throw Error(ErrorKind::PlanProfileInvalid, "incomplete plan");
    const double d = plan.delta;
    for (int i = 0; i <= 200; ++i) {
        const double r0 = d * i / 200.0;
        if (std::abs(plan.h(r0)) > 1e-12) throw Error(ErrorKind::PlanProfileInvalid, "cutoff is not 0 on B_delta");
        const double r1 = 2 * d + d * i / 201.0;
        if (std::abs(plan.h(r1) - 1) > 1e-12)
            throw Error(ErrorKind::PlanProfileInvalid, "cutoff is not 1 on [2 delta, 3 delta)");
    }
    if (!(plan.constant >= 1)) throw Error(ErrorKind::PlanProfileInvalid, "flattening constant below 1");
}

BundleAtlas relative_flatten(const BundleAtlas& b, const FlattenPlan& plan, const GaugeTrivialization& inner) {
    validate_plan(plan);
    const Manifold m = b.base();
    if (plan.retraction.source != m) throw Error(ErrorKind::BaseMismatch, "plan belongs to another base");
    auto bp = std::make_shared<const BundleAtlas>(pullback(b, plan.retraction));
    if (!inner.certificate || !inner.certificate->holds())
        throw Error(ErrorKind::GaugeNotCertified, "inner gauge has no passing certificate");
    if (static_cast<int>(inner.gauges.size()) != bp->chart_count() || inner.rank != b.rank())
        throw Error(ErrorKind::CoverageMismatch, "inner gauge does not match the pulled back atlas");
    const double a_norm = inner.achieved.value;
    if (a_norm > 0) {
        const double r_norm = comass_norm(*bp, ComassMode::Full, 2).value;
        if (2 * a_norm * a_norm > r_norm * (1 + 1e-6) + 1e-12)
            throw Error(ErrorKind::GaugeNotCertified, "inner gauge form too large against the curvature");
    }
    auto gauged = std::make_shared<const BundleAtlas>(apply_gauge(*bp, inner));
    const Point center = plan.center;
    const double delta = plan.delta;
    auto h = plan.h;
    auto dist = [m, center](const Point& p) { return m.distance(center, p); };

    BundleAtlas out(m, b.rank());
    Chart tube;
    tube.name = "tube";
    tube.domain = [dist, delta](const Point& p) { return dist(p) < 3.5 * delta; };
    tube.quality = [dist, delta](const Point& p) { return 3 * delta - dist(p) + 1; };
    tube.form = [gauged, h, dist](const Point& p, const Vec& v) {
        const double hv = h(dist(p));
        if (hv == 0.0) return CMat(CMat::Zero(gauged->rank(), gauged->rank()));
        return CMat(hv * gauged->form(gauged->chart_at(p), p, v));
    };
    out.add_chart(std::move(tube));
    for (int j = 0; j < bp->chart_count(); ++j) {
        Chart c = bp->chart(j);
        auto od = c.domain;
        c.domain = [od, dist, delta](const Point& p) { return dist(p) > 2 * delta && (!od || od(p)); };
        out.add_chart(std::move(c));
    }
    for (int i = 0; i < bp->chart_count(); ++i)
        for (int j = i + 1; j < bp->chart_count(); ++j)
            out.set_transition(i + 1, j + 1, [bp, i, j](const Point& p) { return bp->transition(i, j, p); });
    for (int j = 0; j < bp->chart_count(); ++j) out.set_transition(j + 1, 0, inner.gauges[j]);
    out.recipe = {{"family", "relative_flatten"},
                  {"bundle", b.recipe},
                  {"delta", delta},
                  {"center", std::vector<double>(center.data(), center.data() + center.size())}};
    return out;
}

}  // namespace gaugelab
