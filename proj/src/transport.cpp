#include "gaugelab/transport.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "gaugelab/error.hpp"

namespace gaugelab {

namespace {

bool needs_switch(const Chart& c, const Point& x) {
    if (c.domain && !c.domain(x)) return true;
    return c.quality && c.quality(x) < -0.5;
}

struct Stepper {
    const BundleAtlas& b;
    Integrator order;

    // Propagator over [ta, tb] of a segment in chart c.
    CMat step(const Segment& s, int c, double ta, double tb) const {
        const double h = tb - ta;
        if (order == Integrator::Midpoint) {
            const double tm = 0.5 * (ta + tb);
            return expm_skew(-h * b.form(c, s.pos(tm), s.vel(tm)));
        }
        static const double off = std::sqrt(3.0) / 6.0;
        const double t1 = ta + h * (0.5 - off), t2 = ta + h * (0.5 + off);
        const CMat m1 = b.form(c, s.pos(t1), s.vel(t1));
        const CMat m2 = b.form(c, s.pos(t2), s.vel(t2));
        const CMat omega = -0.5 * h * (m1 + m2) + (std::sqrt(3.0) * h * h / 12.0) * (m2 * m1 - m1 * m2);
        return expm_skew(omega);
    }
};

CMat run(const BundleAtlas& b, const PathCurve& path, const TransportConfig& cfg, int refine, int start_chart,
         int& end_chart) {
    const Stepper st{b, cfg.order};
    CMat p = CMat::Identity(b.rank(), b.rank());
    int c = start_chart;
    for (const auto& seg : path.segments()) {
        const int base_steps = cfg.fixed_steps > 0 ? cfg.fixed_steps
                                                 : std::max(cfg.min_steps, static_cast<int>(std::ceil(seg.length / cfg.step)));
        const int n = refine * base_steps;
        for (int i = 0; i < n; ++i) {
            double ta = static_cast<double>(i) / n;
            const double tb = static_cast<double>(i + 1) / n;
            // Switch charts, possibly several times, inside this step.
            while (needs_switch(b.chart(c), seg.pos(tb))) {
                double lo = ta, hi = tb;
                if (needs_switch(b.chart(c), seg.pos(lo))) {
                    hi = lo;
                } else {
                    while (hi - lo > 1e-10) {
                        const double mid = 0.5 * (lo + hi);
                        (needs_switch(b.chart(c), seg.pos(mid)) ? hi : lo) = mid;
                    }
                }
                const Point x = seg.pos(hi);
                const int next = b.chart_at(x);
                if (next == c) throw Error(ErrorKind::ChartDomainError, "no chart to switch to along the path");
                if (hi > ta) p = st.step(seg, c, ta, hi) * p;
                p = b.transition(next, c, x) * p;
                c = next;
                ta = hi;
            }
            if (tb > ta) p = st.step(seg, c, ta, tb) * p;
        }
    }
    end_chart = c;
    return p;
}

}  // namespace

HolonomyResult parallel_transport(const BundleAtlas& b, const PathCurve& path, const TransportConfig& cfg,
                                  int start_chart) {
    if (!(cfg.step > 0) && cfg.fixed_steps <= 0) throw Error(ErrorKind::PreconditionViolated, "transport step must be positive");
    HolonomyResult out;
    out.length = path.length();
    if (path.empty()) {
        out.matrix = CMat::Identity(b.rank(), b.rank());
        out.start_chart = out.end_chart = start_chart < 0 ? 0 : start_chart;
        return out;
    }
    const Point x0 = path.start();
    if (start_chart < 0) start_chart = b.chart_at(x0);
    if (b.chart(start_chart).domain && !b.chart(start_chart).domain(x0))
        throw Error(ErrorKind::ChartDomainError, "path starts outside the requested chart");
    out.start_chart = start_chart;
    int end_fine = 0;
    if (!cfg.estimate_error) {
        out.matrix = run(b, path, cfg, 1, start_chart, end_fine);
        out.end_chart = end_fine;
        return out;
    }
    int end_coarse = 0;
    const CMat coarse = run(b, path, cfg, 1, start_chart, end_coarse);
    const CMat fine = run(b, path, cfg, 4, start_chart, end_fine);
    const CMat coarse_in_fine =
        end_coarse == end_fine ? coarse : CMat(b.transition(end_fine, end_coarse, path.end()) * coarse);
    out.matrix = fine;
    out.end_chart = end_fine;
    out.error_estimate = op_norm(coarse_in_fine - fine);
    if (out.error_estimate > cfg.max_error)
        throw Error(ErrorKind::StepTooCoarse, "transport refinements disagree by " + std::to_string(out.error_estimate));
    return out;
}

CMat transport_between(const BundleAtlas& b, const PathCurve& path, int from_chart, int to_chart,
                       const TransportConfig& cfg, double* error) {
    const auto r = parallel_transport(b, path, cfg, from_chart);
    if (error) *error = r.error_estimate;
    if (r.end_chart == to_chart) return r.matrix;
    return b.transition(to_chart, r.end_chart, path.end()) * r.matrix;
}

HolonomyResult holonomy(const BundleAtlas& b, const PathCurve& loop, const TransportConfig& cfg) {
    HolonomyResult r = parallel_transport(b, loop, cfg);
    const Point x0 = loop.start(), x1 = loop.end();
    CMat m = r.end_chart == r.start_chart ? r.matrix : CMat(b.transition(r.start_chart, r.end_chart, x1) * r.matrix);
    const Mat lat = b.base().lattice();
    const Vec gap = x1 - x0;
    if (lat.cols() > 0) {
        const Vec real_n = lat.colPivHouseholderQr().solve(gap);
        Eigen::VectorXi n(real_n.size());
        for (int i = 0; i < n.size(); ++i) n(i) = static_cast<int>(std::lround(real_n(i)));
        if ((lat * n.cast<double>() - gap).norm() > 1e-7 * std::max(1.0, gap.norm()))
            throw Error(ErrorKind::PreconditionViolated, "loop does not close on the base");
        if (n.cwiseAbs().sum() > 0) m = b.deck_word(x0, n).adjoint() * m;
    } else if (gap.norm() > 1e-7 * std::max(1.0, x0.norm())) {
        throw Error(ErrorKind::PreconditionViolated, "loop does not close");
    }
    r.matrix = m;
    r.end_chart = r.start_chart;
    return r;
}

namespace {

double disc_curvature_comass(const BundleAtlas& b, const DiscHomotopy& disc) {
    const int n = disc.grid();
    double worst = 0;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            const Point x = disc.at(static_cast<double>(i) / n, static_cast<double>(j) / n);
            worst = std::max(worst, curvature_comass_at(b, x, b.base().tangent_frame(x)));
        }
    return worst;
}

const std::array<double, 4> kGx = {0.069431844202973712, 0.33000947820757187, 0.66999052179242813,
                                   0.93056815579702629};
const std::array<double, 4> kGw = {0.17392742256872693, 0.32607257743127307, 0.32607257743127307,
                                   0.17392742256872693};

// Gauss area of the sub-disc [0, s] x [0, 1].
double sub_area(const DiscHomotopy& disc, double s) {
    const int n = disc.grid();
    const double hs = s / n, ht = 1.0 / n;
    double total = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    const double si = (i + kGx[a]) * hs, t = (j + kGx[b]) * ht;
                    total += kGw[a] * kGw[b] * wedge_norm(disc.d_t(si, t), disc.d_s(si, t));
                }
    return total * hs * ht;
}

}  // namespace

AreaCheckReport holonomy_area_check(const BundleAtlas& b, const DiscHomotopy& disc, const TransportConfig& cfg) {
    if (disc.boundary_defect() > 1e-8) throw Error(ErrorKind::PreconditionViolated, "disc homotopy is not based");
    AreaCheckReport rep;
    const auto hol = holonomy(b, disc.loop(1.0), cfg);
    rep.holonomy_defect = op_norm(hol.matrix - CMat::Identity(b.rank(), b.rank()));
    rep.error_estimate = hol.error_estimate;
    rep.area = disc.area();
    rep.curvature_comass = disc_curvature_comass(b, disc);
    rep.bound = rep.area * rep.curvature_comass;
    rep.slack = rep.error_estimate + 1e-6;
    rep.pass = rep.holonomy_defect <= rep.bound + rep.slack;
    return rep;
}

SineCheckReport abelian_sine_check(const BundleAtlas& b, const DiscHomotopy& disc, const TransportConfig& cfg,
                                   int s_samples) {
    if (b.rank() != 1) throw Error(ErrorKind::RankNotOne, "sine refinement is checked for line bundles");
    SineCheckReport rep;
    rep.curvature_comass = disc_curvature_comass(b, disc);
    rep.pass = true;
    for (int k = 1; k <= s_samples; ++k) {
        const double s = static_cast<double>(k) / s_samples;
        const double a = sub_area(disc, s);
        const double phase = rep.curvature_comass * a;
        if (phase >= std::numbers::pi) throw Error(ErrorKind::FluxTooLarge, "curvature times area reaches pi");
        const auto hol = holonomy(b, disc.loop(s), cfg);
        const double defect = std::abs(hol.matrix(0, 0) - 1.0);
        const double bound = 2 * std::sin(0.5 * phase);
        rep.areas.push_back(a);
        rep.defects.push_back(defect);
        rep.bounds.push_back(bound);
        rep.error_estimate = std::max(rep.error_estimate, hol.error_estimate);
        rep.max_violation = std::max(rep.max_violation, defect - bound);
        if (bound > 1e-12) rep.max_ratio = std::max(rep.max_ratio, defect / bound);
        if (defect > bound + hol.error_estimate + 1e-6) rep.pass = false;
    }
    return rep;
}

CMat abelian_flux_holonomy(const BundleAtlas& b, const DiscHomotopy& disc, int cells) {
    if (b.rank() != 1) throw Error(ErrorKind::RankNotOne, "flux oracle is for line bundles");
    if (cells <= 0) cells = disc.grid();
    cplx flux = 0;
    const double h = 1.0 / cells;
    for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j)
            for (int a = 0; a < 4; ++a)
                for (int c = 0; c < 4; ++c) {
                    const double s = (i + kGx[a]) * h, t = (j + kGx[c]) * h;
                    const Point x = disc.at(s, t);
                    flux += kGw[a] * kGw[c] * h * h * curvature(b, x, disc.d_s(s, t), disc.d_t(s, t))(0, 0);
                }
    return CMat::Constant(1, 1, std::exp(-flux));
}

}  // namespace gaugelab
