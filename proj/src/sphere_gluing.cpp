#include <cmath>
#include <memory>
#include <numbers>

#include "gaugelab/error.hpp"
#include "gaugelab/gauge.hpp"

namespace gaugelab {

namespace {

constexpr double kPi = std::numbers::pi;

CMat skew_part(const CMat& m) { return 0.5 * (m - m.adjoint()); }

// Radial frames from the poles of the (possibly product) base, glued by a
// cutoff in the polar angle.
class Glue {
public:
    Glue(std::shared_ptr<const BundleAtlas> b, const SphereGluingConfig& cfg)
        : b_(std::move(b)),
          product_(b_->base().kind() == ManifoldKind::ProductWithCircle),
          sphere_(product_ ? b_->base().base() : b_->base()),
          chi_(kPi / 3, 2 * kPi / 3 - cfg.epsilon, cfg.epsilon) {
        tc_.order = Integrator::Magnus4;
        tc_.fixed_steps = cfg.steps;
        tc_.estimate_error = false;
        north_ << 0, 0, 1;
        south_ << 0, 0, -1;
        if (!product_) pk_fixed_ = pk(0.0);
    }

    const CutoffRamp& chi() const { return chi_; }
    const Manifold& sphere() const { return sphere_; }
    bool product() const { return product_; }

    Vec base_of(const Point& p) const { return p.head<3>(); }
    double t_of(const Point& p) const { return product_ ? p(3) : 0.0; }
    Point lift(const Vec& y, double t) const {
        if (!product_) return y;
        Point p(4);
        p << y, t;
        return p;
    }
    PathCurve lift_path(const PathCurve& c, double t) const {
        if (!product_) return c;
        std::vector<Segment> segs;
        for (const auto& s : c.segments()) {
            auto pos = s.pos;
            auto vel = s.vel;
            segs.push_back({[this, pos, t](double u) { return lift(pos(u), t); },
                            [this, vel](double u) { return lift(vel(u), 0.0); }, s.length});
        }
        return PathCurve(std::move(segs));
    }

    // Polar angle measured from x1.
    double theta(const Point& p) const {
        const Vec y = base_of(p);
        return std::acos(std::clamp(y(2) / y.norm(), -1.0, 1.0));
    }

    CMat s1(const Point& p, int c) const {
        const double t = t_of(p);
        const Point x1 = lift(north_, t);
        return transport_between(*b_, lift_path(geodesic(sphere_, north_, base_of(p)), t), b_->chart_at(x1), c, tc_);
    }
    CMat pk(double t) const {
        Vec dir(3);
        dir << 1, 0, 0;
        const PathCurve k = lift_path(sphere_arc(sphere_, north_, south_, dir), t);
        return transport_between(*b_, k, b_->chart_at(lift(north_, t)), b_->chart_at(lift(south_, t)), tc_);
    }
    CMat s2(const Point& p, int c) const {
        const double t = t_of(p);
        const Point x2 = lift(south_, t);
        const CMat k = product_ ? pk(t) : pk_fixed_;
        return transport_between(*b_, lift_path(geodesic(sphere_, south_, base_of(p)), t), b_->chart_at(x2), c, tc_) *
               k;
    }
    CMat g12(const Point& p, int c) const { return s1(p, c).adjoint() * s2(p, c); }

    CMat frame(const Point& p, int c) const {
        const double x = chi_(kPi - theta(p));
        if (x >= 1.0) return s1(p, c);
        if (x <= 0.0) return s2(p, c);
        const CMat a = s1(p, c), bb = s2(p, c);
        const CMat g = a.adjoint() * bb;
        return bb * expm_skew(CMat(-x * logm_unitary(g)));
    }

private:
    std::shared_ptr<const BundleAtlas> b_;
    bool product_;
    Manifold sphere_;
    CutoffRamp chi_;
    TransportConfig tc_;
    Vec north_ = Vec(3), south_ = Vec(3);
    CMat pk_fixed_;
};

struct CheckList {
    nlohmann::json items = nlohmann::json::array();
    bool pass = true;
    void add(const std::string& name, double measured, double bound) {
        const bool ok = measured <= bound;
        pass = pass && ok;
        items.push_back({{"name", name}, {"measured", measured}, {"bound", bound}, {"pass", ok}});
    }
};

double fd_h() { return 1e-5; }

// Comass of the u(m)-valued one-form p -> skew(F(p)^-1 dF) in the given frame.
double log_derivative_comass(const std::function<CMat(const Point&)>& f, const Manifold& m, const Point& p,
                             const Mat& frame) {
    const CMat fi = f(p).adjoint();
    std::vector<CMat> mats;
    const double h = fd_h();
    for (int k = 0; k < frame.cols(); ++k) {
        const Vec v = frame.col(k);
        mats.push_back(skew_part(fi * (f(m.exp(p, h * v)) - f(m.exp(p, -h * v))) / (2 * h)));
    }
    return max_unit_combination(mats);
}

// Op-norm comass of a Lie-algebra valued function's differential.
double derivative_comass(const std::function<CMat(const Point&)>& f, const Manifold& m, const Point& p,
                         const Mat& frame) {
    std::vector<CMat> mats;
    const double h = fd_h();
    for (int k = 0; k < frame.cols(); ++k) {
        const Vec v = frame.col(k);
        mats.push_back(skew_part((f(m.exp(p, h * v)) - f(m.exp(p, -h * v))) / (2 * h)));
    }
    return max_unit_combination(mats);
}

std::vector<FramePoint> overlap_samples(const Glue& gl, const Manifold& m, int res) {
    std::vector<FramePoint> out;
    const ComassMode mode = gl.product() ? ComassMode::TangentOnly : ComassMode::Full;
    std::vector<double> ts{0.0};
    if (gl.product()) ts = {0.0, 0.5 * m.circle_length()};
    auto push = [&](const Vec& y, double t) {
        const Point p = gl.lift(y, t);
        out.push_back({p, mode_frame(m, m.tangent_frame(p), mode)});
    };
    for (double t : ts) {
        for (const auto& fp : sample_frames(gl.sphere(), res)) {
            const double th = std::acos(std::clamp(fp.x(2), -1.0, 1.0));
            if (th >= kPi / 3 && th <= 2 * kPi / 3) push(fp.x, t);
        }
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j <= 6; ++j) {
                const double th = kPi / 3 + (kPi / 3) * j / 6.0, ph = 2 * kPi * (i + 0.5) / 8;
                Vec y(3);
                y << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
                push(y, t);
            }
    }
    return out;
}

}  // namespace

SphereGluingResult sphere_two_chart_trivialize(const BundleAtlas& b, const SphereGluingConfig& cfg) {
    const Manifold& m = b.base();
    const bool product = m.kind() == ManifoldKind::ProductWithCircle;
    const Manifold& sph = product ? m.base() : m;
    if (sph.kind() != ManifoldKind::RoundSphere2 || std::abs(sph.scale() - 1.0) > 1e-12)
        throw Error(ErrorKind::UnsupportedGeometry, "two-chart gluing needs the unit 2-sphere");
    if (!(cfg.epsilon > 0 && cfg.epsilon < 0.25))
        throw Error(ErrorKind::PreconditionViolated, "gluing epsilon must lie in (0, 1/4)");
    const ComassMode mode = product ? ComassMode::TangentOnly : ComassMode::Full;

    SphereGluingResult res{.gauge = {}, .trivialized = BundleAtlas(m, b.rank())};
    res.curvature_comass = comass_norm(b, mode, cfg.curvature_resolution).value;
    const double R = res.curvature_comass;
    if (R >= 1.0 / 13.0) throw Error(ErrorKind::CurvatureTooLarge, "curvature comass must stay below 1/13");

    auto pb = std::make_shared<const BundleAtlas>(b);
    auto gl = std::make_shared<const Glue>(pb, cfg);

    GaugeTrivialization g;
    g.rank = b.rank();
    for (int c = 0; c < b.chart_count(); ++c) g.gauges.push_back([gl, c](const Point& p) { return gl->frame(p, c); });
    res.trivialized = apply_gauge(b, g);

    CheckList checks;
    const double rt3 = std::sqrt(3.0);
    if (cfg.run_checks) {
        const double log_r = log_domain_radius();
        const auto samples = overlap_samples(*gl, m, cfg.measure_resolution);
        double dlog_excess = -1e300, dexp_norm = 1, dexp_inv = 1;
        for (const auto& fp : samples) {
            const int c = b.chart_at(fp.x);
            const CMat g12 = gl->g12(fp.x, c);
            const double defect = op_norm(g12 - CMat::Identity(b.rank(), b.rank()));
            res.g12_defect = std::max(res.g12_defect, defect);
            if (defect >= log_r) throw Error(ErrorKind::LogDomainError, "transition left the log chart");
            const CMat L = logm_unitary(g12);
            res.log_g12 = std::max(res.log_g12, op_norm(L));
            auto gfun = [gl, c](const Point& q) { return gl->g12(q, c); };
            const double dg = log_derivative_comass(gfun, m, fp.x, fp.frame);
            res.dg12 = std::max(res.dg12, dg);
            auto lfun = [gl, c](const Point& q) { return CMat(logm_unitary(gl->g12(q, c))); };
            const double dl = derivative_comass(lfun, m, fp.x, fp.frame);
            dlog_excess = std::max(dlog_excess, dl - 3 * dg);
            const double chi = gl->chi()(kPi - gl->theta(fp.x));
            auto afun = [gl, c](const Point& q) {
                const double x = gl->chi()(kPi - gl->theta(q));
                return CMat(expm_skew(CMat(x * logm_unitary(gl->g12(q, c)))));
            };
            res.dalpha = std::max(res.dalpha, log_derivative_comass(afun, m, fp.x, fp.frame));
            if (chi > 0) {
                const double h = fd_h();
                const Vec v = fp.frame.col(0);
                const CMat dir = (lfun(m.exp(fp.x, h * v)) * gl->chi()(kPi - gl->theta(m.exp(fp.x, h * v))) -
                                  lfun(m.exp(fp.x, -h * v)) * gl->chi()(kPi - gl->theta(m.exp(fp.x, -h * v)))) /
                                 (2 * h);
                if (op_norm(dir) > 1e-12) {
                    const DexpReport rep = dexp_bounds_check(AntiHermitian(CMat(chi * L)), AntiHermitian(dir));
                    dexp_norm = std::max(dexp_norm, 1 + rep.deviation);
                    dexp_inv = std::max(dexp_inv, rep.inverse_ratio);
                }
            }
            if (chi >= 1.0 && gl->theta(fp.x) > kPi / 3) {
                const CMat diff = gl->s1(fp.x, c) - gl->s2(fp.x, c) * expm_skew(CMat(-L));
                res.gluing_mismatch = std::max(res.gluing_mismatch, op_norm(diff));
            }
        }
        for (int i = 0; i <= 2000; ++i) {
            const double x = kPi / 3 + (kPi / 3) * i / 2000.0;
            res.cutoff_slope = std::max(res.cutoff_slope, gl->chi().derivative(x));
        }

        // Radial gauges on each hemisphere cap.
        GaugeTrivialization g1, g2;
        g1.rank = g2.rank = b.rank();
        for (int c = 0; c < b.chart_count(); ++c) {
            g1.gauges.push_back([gl, c](const Point& p) { return gl->s1(p, c); });
            g2.gauges.push_back([gl, c](const Point& p) { return gl->s2(p, c); });
        }
        const BundleAtlas b1 = apply_gauge(b, g1), b2 = apply_gauge(b, g2);
        for (const auto& fp : sample_frames(m, cfg.measure_resolution)) {
            const double th = gl->theta(fp.x);
            const Mat f = mode_frame(m, fp.frame, mode);
            if (th <= 2 * kPi / 3 - 1e-9)
                res.chart_form = std::max(res.chart_form, form_comass_at(b1, b1.chart_at(fp.x), fp.x, f));
            if (th >= kPi / 3 + 1e-9)
                res.chart_form = std::max(res.chart_form, form_comass_at(b2, b2.chart_at(fp.x), fp.x, f));
        }

        const double x = kPi * R;
        const double eps = cfg.epsilon;
        checks.add("g12_minus_id", res.g12_defect, 2 * kPi * R + 1e-7);
        checks.add("log_g12", res.log_g12, 2 * std::asin(std::min(1.0, x)) + 1e-7);
        checks.add("arcsin_vs_linear", std::asin(std::min(1.0, x)), rt3 * x);
        checks.add("dg12", res.dg12, 2 * rt3 * R + 1e-6);
        checks.add("chart_form", res.chart_form, rt3 * R + 1e-6);
        checks.add("dalpha", res.dalpha,
                   (10 / (kPi - 3 * eps) + 10 * eps / 3) * std::asin(std::min(1.0, x)) + 5 * res.dg12 + 1e-6);
        checks.add("dlog_minus_3dg12", dlog_excess, 1e-7);
        checks.add("dexp_norm", dexp_norm, 5.0 / 3.0);
        checks.add("dexp_inverse", dexp_inv, 3.0);
        checks.add("gluing_mismatch", res.gluing_mismatch, 1e-6);
        checks.add("cutoff_slope", res.cutoff_slope, 1 / (kPi / 3 - eps) + eps);
    }

    g.achieved = form_comass(res.trivialized, mode, cfg.measure_resolution);
    Certificate cert;
    cert.theorem = "two-chart gluing, |A| <= 21 sqrt(3) |R|";
    cert.bound = 21 * rt3 * R;
    cert.measured = g.achieved.value;
    cert.slack = 1e-9;
    g.certificate = cert;
    checks.add("final_form", cert.measured, cert.bound);
    g.diagnostics = {{"curvature_comass", R}, {"epsilon", cfg.epsilon}};
    res.gauge = std::move(g);
    res.checks = checks.items;
    res.checks_pass = checks.pass;
    return res;
}

ProductTrivialization product_trivialize(const BundleAtlas& b, const SphereGluingConfig& cfg) {
    const Manifold& m = b.base();
    if (m.kind() != ManifoldKind::ProductWithCircle || m.base().kind() != ManifoldKind::RoundSphere2)
        throw Error(ErrorKind::UnsupportedGeometry, "product trivialization needs S^2 x S^1");
    ProductTrivialization out{sphere_two_chart_trivialize(b, cfg), {}, {}, {}, 0, 0, {}};
    auto triv = std::make_shared<const BundleAtlas>(out.glued.trivialized);
    const double L = m.circle_length();
    Vec e_t = Vec::Zero(4);
    e_t(3) = 1.0;
    out.reference_form = [triv, e_t](double t) {
        Point p(4);
        p << 0, 0, 1, t;
        return triv->form(triv->chart_at(p), p, e_t);
    };
    Point a(4), z(4);
    a << 0, 0, 1, 0;
    z << 0, 0, 1, L;
    const PathCurve loop = PathCurve::line(a, z);
    TransportConfig tc;
    tc.order = Integrator::Magnus4;
    out.original_fiber_holonomy = holonomy(b, loop, tc).matrix;
    out.reference_holonomy = holonomy(*triv, loop, tc).matrix;
    out.tangent_curvature = out.glued.curvature_comass;
    out.tangent_difference = out.glued.gauge.achieved.value;
    out.certificate = *out.glued.gauge.certificate;
    out.certificate.theorem = "product trivialization, tangential difference <= 21 sqrt(3) |R_TM|";
    return out;
}

}  // namespace gaugelab
