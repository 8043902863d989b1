#include "gaugelab/bundle.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <numbers>

#include "gaugelab/error.hpp"
#include "gaugelab/mesh.hpp"

namespace gaugelab {

namespace {

constexpr double kPi = std::numbers::pi;

CMat block_diag(const CMat& a, const CMat& b) {
    CMat out = CMat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

Point retract(const Manifold& m, const Point& x) {
    switch (m.kind()) {
        case ManifoldKind::RoundSphere2: return x * (m.scale() / x.norm());
        case ManifoldKind::ProductWithCircle: {
            Point out = x;
            const int n = static_cast<int>(x.size());
            out.head(n - 1) = retract(m.base(), x.head(n - 1));
            return out;
        }
        default: return x;
    }
}

Vec dretract(const Manifold& m, const Point& x, const Vec& v) {
    switch (m.kind()) {
        case ManifoldKind::RoundSphere2: {
            const double r = x.norm();
            const Vec u = x / r;
            return (m.scale() / r) * (v - u * u.dot(v));
        }
        case ManifoldKind::ProductWithCircle: {
            Vec out = v;
            const int n = static_cast<int>(x.size());
            out.head(n - 1) = dretract(m.base(), x.head(n - 1), v.head(n - 1));
            return out;
        }
        default: return v;
    }
}

double char_length(const Manifold& m) {
    switch (m.kind()) {
        case ManifoldKind::RoundSphere2: return m.scale();
        case ManifoldKind::EuclideanBall: return m.radius();
        case ManifoldKind::FlatTorus2: return std::min(m.period(0), m.period(1)) / (2 * kPi);
        case ManifoldKind::Circle: return m.circle_length() / (2 * kPi);
        case ManifoldKind::ProductWithCircle:
            return std::min(char_length(m.base()), m.circle_length() / (2 * kPi));
    }
    return 1.0;
}

}  // namespace

BundleAtlas::BundleAtlas(Manifold base, int rank) : base_(std::move(base)), rank_(rank) {
    if (rank < 1) throw Error(ErrorKind::PreconditionViolated, "bundle rank must be >= 1");
}

int BundleAtlas::add_chart(Chart c) {
    charts_.push_back(std::move(c));
    return static_cast<int>(charts_.size()) - 1;
}

void BundleAtlas::set_transition(int i, int j, GaugeFn g) {
    if (i == j) throw Error(ErrorKind::PreconditionViolated, "self transition is the identity");
    transitions_.erase({j, i});
    transitions_[{i, j}] = std::move(g);
}

CMat BundleAtlas::transition(int i, int j, const Point& p) const {
    if (i == j) return CMat::Identity(rank_, rank_);
    auto it = transitions_.find({i, j});
    if (it != transitions_.end()) return it->second(p);
    it = transitions_.find({j, i});
    if (it != transitions_.end()) return it->second(p).adjoint();
    throw Error(ErrorKind::ChartDomainError, "no transition between charts " + std::to_string(i) + " and " +
                                                 std::to_string(j));
}

CMat BundleAtlas::deck(int k, const Point& p) const {
    if (k < static_cast<int>(decks_.size()) && decks_[k]) return decks_[k](p);
    return CMat::Identity(rank_, rank_);
}

CMat BundleAtlas::deck_word(const Point& y, const Eigen::VectorXi& n) const {
    CMat g = CMat::Identity(rank_, rank_);
    if (n.size() == 0) return g;
    const Mat lat = base_.lattice();
    Point cur = y;
    for (int k = 0; k < n.size(); ++k) {
        const Vec tau = lat.col(k);
        for (int s = 0; s < n(k); ++s) {
            g = deck(k, cur) * g;
            cur += tau;
        }
        for (int s = 0; s < -n(k); ++s) {
            cur -= tau;
            g = deck(k, cur).adjoint() * g;
        }
    }
    return g;
}

int BundleAtlas::chart_at(const Point& p) const {
    int best = -1;
    double q = -1e300;
    for (int i = 0; i < chart_count(); ++i) {
        const auto& c = charts_[i];
        if (c.domain && !c.domain(p)) continue;
        const double qi = c.quality ? c.quality(p) : 0.0;
        if (qi > q) {
            q = qi;
            best = i;
        }
    }
    if (best < 0) throw Error(ErrorKind::ChartDomainError, "point outside every chart");
    return best;
}

bool BundleAtlas::analytic_curvature() const {
    for (const auto& c : charts_)
        if (!c.curvature) return false;
    return !charts_.empty();
}

CMat extended_form(const BundleAtlas& b, int chart, const Point& x, const Vec& v) {
    const Manifold& m = b.base();
    return b.chart(chart).form(retract(m, x), dretract(m, x, v));
}

CurvatureSample curvature_in_chart(const BundleAtlas& b, int chart, const Point& p, const Vec& v, const Vec& w,
                                   bool force_fd) {
    CurvatureSample out;
    const auto& c = b.chart(chart);
    if (c.curvature && !force_fd) {
        out.value = c.curvature(p, v, w);
        out.analytic = true;
        return out;
    }
    const double nv = v.norm(), nw = w.norm();
    if (nv == 0.0 || nw == 0.0) {
        out.value = CMat::Zero(b.rank(), b.rank());
        return out;
    }
    const Vec vu = v / nv, wu = w / nw;
    auto A = [&](const Point& x, const Vec& d) { return extended_form(b, chart, x, d); };
    auto d_part = [&](double h) {
        return CMat((A(p + h * vu, wu) - A(p - h * vu, wu) - A(p + h * wu, vu) + A(p - h * wu, vu)) / (2 * h));
    };
    const double h = 1e-3 * std::min(1.0, char_length(b.base()));
    const CMat d1 = d_part(h), d2 = d_part(h / 2);
    const CMat av = A(p, vu), aw = A(p, wu);
    const CMat rich = (4.0 * d2 - d1) / 3.0;
    out.value = (rich + av * aw - aw * av) * (nv * nw);
    out.mismatch = op_norm(d1 - d2) * nv * nw;
    return out;
}

CMat curvature(const BundleAtlas& b, const Point& p, const Vec& v, const Vec& w) {
    return curvature_in_chart(b, b.chart_at(p), p, v, w).value;
}

double max_unit_combination(const std::vector<CMat>& mats) {
    if (mats.empty()) return 0.0;
    if (mats.size() == 1) return op_norm(mats[0]);
    const int n = static_cast<int>(mats.size());
    if (mats[0].rows() == 1) {
        double s = 0;
        for (const auto& m : mats) s += std::norm(m(0, 0));
        return std::sqrt(s);
    }
    std::vector<CMat> herm;
    herm.reserve(n);
    for (const auto& m : mats) herm.push_back(cplx(0, -1) * m);
    std::vector<Vec> starts;
    for (int k = 0; k < n; ++k) starts.push_back(Vec::Unit(n, k));
    starts.push_back(Vec::Ones(n).normalized());
    double best = 0;
    for (Vec c : starts) {
        double prev = -1;
        for (int it = 0; it < 200; ++it) {
            CMat s = CMat::Zero(herm[0].rows(), herm[0].cols());
            for (int k = 0; k < n; ++k) s += c(k) * herm[k];
            Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (s + s.adjoint()));
            const auto& ev = es.eigenvalues();
            const int idx = std::abs(ev(0)) >= std::abs(ev(ev.size() - 1)) ? 0 : static_cast<int>(ev.size()) - 1;
            const Eigen::VectorXcd x = es.eigenvectors().col(idx);
            Vec q(n);
            for (int k = 0; k < n; ++k) q(k) = (x.adjoint() * herm[k] * x)(0, 0).real();
            const double val = q.norm();
            best = std::max(best, std::max(val, std::abs(ev(idx))));
            if (val == 0.0 || val - prev < 1e-15 * std::max(1.0, val)) break;
            prev = val;
            c = q / val;
        }
    }
    return best;
}

Mat mode_frame(const Manifold& m, const Mat& frame, ComassMode mode) {
    if (mode == ComassMode::TangentOnly && m.kind() == ManifoldKind::ProductWithCircle)
        return frame.leftCols(frame.cols() - 1);
    return frame;
}

double curvature_comass_at(const BundleAtlas& b, const Point& p, const Mat& frame) {
    const int d = static_cast<int>(frame.cols());
    if (d < 2) return 0.0;
    const int c = b.chart_at(p);
    auto R = [&](int i, int j) { return curvature_in_chart(b, c, p, frame.col(i), frame.col(j)).value; };
    if (d == 2) return op_norm(R(0, 1));
    if (d == 3) return max_unit_combination({R(1, 2), R(2, 0), R(0, 1)});
    throw Error(ErrorKind::UnsupportedGeometry, "curvature comass for dimension <= 3 only");
}

double form_comass_at(const BundleAtlas& b, int chart, const Point& p, const Mat& frame) {
    std::vector<CMat> mats;
    for (int k = 0; k < frame.cols(); ++k) mats.push_back(b.form(chart, p, frame.col(k)));
    return max_unit_combination(mats);
}

namespace {

template <class F>
ComassReport sampled_sup(const Manifold& m, int resolution, F&& value_at,
                         const std::function<bool(const Point&)>& where) {
    if (resolution < 1) throw Error(ErrorKind::PreconditionViolated, "resolution >= 1");
    ComassReport rep;
    rep.resolution = resolution;
    double running = 0;
    for (int r = 1; r <= resolution; ++r) {
        double level_max = -1;
        Point arg;
        for (const auto& fp : sample_frames(m, r)) {
            if (where && !where(fp.x)) continue;
            ++rep.samples;
            const double v = value_at(fp.x, fp.frame);
            if (v > level_max) {
                level_max = v;
                arg = fp.x;
            }
        }
        const double prev = running;
        if (level_max > running || rep.argmax.size() == 0) rep.argmax = arg;
        running = std::max(running, level_max);
        rep.by_resolution.push_back(running);
        rep.refinement_delta = running - prev;
    }
    if (resolution == 1) rep.refinement_delta = 0;
    rep.value = running;
    return rep;
}

}  // namespace

ComassReport comass_norm(const BundleAtlas& b, ComassMode mode, int resolution) {
    double worst_mismatch = 0;
    auto rep = sampled_sup(
        b.base(), resolution,
        [&](const Point& p, const Mat& frame) {
            const Mat f = mode_frame(b.base(), frame, mode);
            const int d = static_cast<int>(f.cols());
            if (d < 2) return 0.0;
            const int c = b.chart_at(p);
            std::vector<CMat> r;
            auto R = [&](int i, int j) {
                auto s = curvature_in_chart(b, c, p, f.col(i), f.col(j));
                worst_mismatch = std::max(worst_mismatch, s.mismatch);
                return s.value;
            };
            if (d == 2) return op_norm(R(0, 1));
            if (d == 3) return max_unit_combination({R(1, 2), R(2, 0), R(0, 1)});
            throw Error(ErrorKind::UnsupportedGeometry, "curvature comass for dimension <= 3 only");
        },
        {});
    rep.fd_mismatch = worst_mismatch;
    rep.smooth_enough = worst_mismatch <= 1e-5;
    return rep;
}

ComassReport form_comass(const BundleAtlas& b, ComassMode mode, int resolution,
                         const std::function<bool(const Point&)>& where) {
    return sampled_sup(
        b.base(), resolution,
        [&](const Point& p, const Mat& frame) {
            return form_comass_at(b, b.chart_at(p), p, mode_frame(b.base(), frame, mode));
        },
        where);
}

namespace {

// Gauss-Legendre on [0, 1].
const std::array<double, 6> kGx = {0.033765242898423986, 0.16939530676686776, 0.38069040695840156,
                                   0.61930959304159844, 0.83060469323313224, 0.96623475710157601};
const std::array<double, 6> kGw = {0.085662246189585173, 0.18038078652406930, 0.23395696728634552,
                                   0.23395696728634552, 0.18038078652406930, 0.085662246189585173};

}  // namespace

double chern_number_c1(const BundleAtlas& b, int resolution) {
    const Manifold& m = b.base();
    if (resolution < 0) throw Error(ErrorKind::PreconditionViolated, "resolution >= 0");
    cplx total = 0;
    if (m.kind() == ManifoldKind::RoundSphere2) {
        std::vector<Vec> verts;
        std::vector<std::array<int, 3>> faces;
        icosphere_raw(resolution, verts, faces);
        const double s = m.scale();
        for (const auto& f : faces) {
            const Vec a = verts[f[0]], e1 = verts[f[1]] - a, e2 = verts[f[2]] - a;
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) {
                    const double xi = kGx[i], eta = kGx[j];
                    const double u = xi * (1 - eta), v = xi * eta;
                    const Vec y = a + u * e1 + v * e2;
                    const double ny = y.norm();
                    const Vec yh = y / ny;
                    const Point x = s * yh;
                    const Vec xu = s * (e1 - yh * yh.dot(e1)) / ny;
                    const Vec xv = s * (e2 - yh * yh.dot(e2)) / ny;
                    total += kGw[i] * kGw[j] * xi * curvature(b, x, xu, xv).trace();
                }
        }
    } else if (m.kind() == ManifoldKind::FlatTorus2) {
        const int n = 4 * std::max(1, resolution);
        const double h1 = m.period(0) / n, h2 = m.period(1) / n;
        const Vec e1 = Vec::Unit(2, 0), e2 = Vec::Unit(2, 1);
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c)
                for (int i = 0; i < 6; ++i)
                    for (int j = 0; j < 6; ++j) {
                        Point x(2);
                        x << (a + kGx[i]) * h1, (c + kGx[j]) * h2;
                        total += kGw[i] * kGw[j] * h1 * h2 * curvature(b, x, e1, e2).trace();
                    }
    } else {
        throw Error(ErrorKind::NonClosedSurface, "Chern number needs a closed surface base");
    }
    return (cplx(0, 1) * total).real() / (2 * kPi);
}

double compatibility_defect(const BundleAtlas& b, int resolution) {
    const Manifold& m = b.base();
    const double h = 1e-5 * std::min(1.0, char_length(m));
    double worst = 0;
    auto dg = [&](const std::function<CMat(const Point&)>& g, const Point& p, const Vec& v) {
        return CMat((g(m.exp(p, h * v)) - g(m.exp(p, -h * v))) / (2 * h));
    };
    const Mat lat = m.lattice();
    for (const auto& fp : sample_frames(m, resolution)) {
        const Point& p = fp.x;
        for (int i = 0; i < b.chart_count(); ++i) {
            if (b.chart(i).domain && !b.chart(i).domain(p)) continue;
            for (int j = 0; j < b.chart_count(); ++j) {
                if (i == j || (b.chart(j).domain && !b.chart(j).domain(p))) continue;
                auto g = [&](const Point& x) { return b.transition(i, j, x); };
                const CMat g0 = g(p), gi = g0.adjoint();
                for (int k = 0; k < fp.frame.cols(); ++k) {
                    const Vec v = fp.frame.col(k);
                    const CMat rhs = gi * dg(g, p, v) + gi * b.form(i, p, v) * g0;
                    worst = std::max(worst, op_norm(b.form(j, p, v) - rhs));
                }
            }
        }
        if (!b.has_decks()) continue;
        const int c = b.chart_at(p);
        for (int k = 0; k < lat.cols(); ++k) {
            const Vec tau = lat.col(k);
            auto g = [&](const Point& x) { return b.deck(k, x); };
            const CMat g0 = g(p), gi = g0.adjoint();
            for (int a = 0; a < fp.frame.cols(); ++a) {
                const Vec v = fp.frame.col(a);
                const CMat rhs = gi * dg(g, p, v) + gi * b.form(c, p + tau, v) * g0;
                worst = std::max(worst, op_norm(b.form(c, p, v) - rhs));
            }
        }
    }
    return worst;
}

double cocycle_defect(const BundleAtlas& b, int resolution) {
    double worst = 0;
    for (const auto& fp : sample_frames(b.base(), resolution)) {
        const Point& p = fp.x;
        std::vector<int> in;
        for (int i = 0; i < b.chart_count(); ++i)
            if (!b.chart(i).domain || b.chart(i).domain(p)) in.push_back(i);
        for (int i : in)
            for (int j : in)
                for (int k : in)
                    worst = std::max(worst, op_norm(b.transition(i, k, p) -
                                                    b.transition(i, j, p) * b.transition(j, k, p)));
    }
    return worst;
}

BundleAtlas direct_sum(const BundleAtlas& a, const BundleAtlas& b) {
    if (a.base() != b.base()) throw Error(ErrorKind::BaseMismatch, "direct sum over different bases");
    if (a.chart_count() != b.chart_count()) throw Error(ErrorKind::BaseMismatch, "direct sum needs matching charts");
    for (int i = 0; i < a.chart_count(); ++i)
        if (a.chart(i).name != b.chart(i).name) throw Error(ErrorKind::BaseMismatch, "chart names differ");
    auto pa = std::make_shared<const BundleAtlas>(a);
    auto pb = std::make_shared<const BundleAtlas>(b);
    BundleAtlas out(a.base(), a.rank() + b.rank());
    for (int i = 0; i < a.chart_count(); ++i) {
        Chart c;
        c.name = a.chart(i).name;
        c.domain = a.chart(i).domain;
        c.quality = a.chart(i).quality;
        c.form = [pa, pb, i](const Point& p, const Vec& v) { return block_diag(pa->form(i, p, v), pb->form(i, p, v)); };
        if (a.chart(i).curvature && b.chart(i).curvature)
            c.curvature = [pa, pb, i](const Point& p, const Vec& v, const Vec& w) {
                return block_diag(pa->chart(i).curvature(p, v, w), pb->chart(i).curvature(p, v, w));
            };
        out.add_chart(std::move(c));
    }
    for (int i = 0; i < a.chart_count(); ++i)
        for (int j = i + 1; j < a.chart_count(); ++j)
            out.set_transition(i, j, [pa, pb, i, j](const Point& p) {
                return block_diag(pa->transition(i, j, p), pb->transition(i, j, p));
            });
    if (a.has_decks() || b.has_decks()) {
        std::vector<GaugeFn> decks;
        for (int k = 0; k < a.base().lattice().cols(); ++k)
            decks.push_back([pa, pb, k](const Point& p) { return block_diag(pa->deck(k, p), pb->deck(k, p)); });
        out.set_decks(std::move(decks));
    }
    out.recipe = {{"family", "direct_sum"}, {"a", a.recipe}, {"b", b.recipe}};
    return out;
}

SmoothMap map_identity(const Manifold& m) {
    SmoothMap f;
    f.tag = "identity";
    f.source = f.target = m;
    f.f = [](const Point& p) { return p; };
    f.df = [](const Point&, const Vec& v) { return v; };
    const int l = static_cast<int>(m.lattice().cols());
    f.lattice_map = Eigen::MatrixXi::Identity(l, l);
    f.params = {{"manifold", m.to_json()}};
    return f;
}

SmoothMap map_project_base(const Manifold& product) {
    if (product.kind() != ManifoldKind::ProductWithCircle)
        throw Error(ErrorKind::UnsupportedMap, "projection needs a product");
    SmoothMap f;
    f.tag = "project_base";
    f.source = product;
    f.target = product.base();
    const int n = product.ambient_dim();
    f.f = [n](const Point& p) { return Point(p.head(n - 1)); };
    f.df = [n](const Point&, const Vec& v) { return Vec(v.head(n - 1)); };
    const int lb = static_cast<int>(product.base().lattice().cols());
    f.lattice_map = Eigen::MatrixXi::Zero(lb + 1, lb);
    f.lattice_map.topRows(lb) = Eigen::MatrixXi::Identity(lb, lb);
    f.params = {{"product", product.to_json()}};
    return f;
}

SmoothMap map_project_circle(const Manifold& product) {
    if (product.kind() != ManifoldKind::ProductWithCircle)
        throw Error(ErrorKind::UnsupportedMap, "projection needs a product");
    SmoothMap f;
    f.tag = "project_circle";
    f.source = product;
    f.target = Manifold::circle(product.circle_length());
    const int n = product.ambient_dim();
    f.f = [n](const Point& p) { return Point(p.tail(1)); };
    f.df = [n](const Point&, const Vec& v) { return Vec(v.tail(1)); };
    const int lb = static_cast<int>(product.base().lattice().cols());
    f.lattice_map = Eigen::MatrixXi::Zero(lb + 1, 1);
    f.lattice_map(lb, 0) = 1;
    f.params = {{"product", product.to_json()}};
    return f;
}

SmoothMap map_include_slice(const Manifold& product, double t) {
    if (product.kind() != ManifoldKind::ProductWithCircle)
        throw Error(ErrorKind::UnsupportedMap, "slice inclusion needs a product");
    SmoothMap f;
    f.tag = "include_slice";
    f.source = product.base();
    f.target = product;
    const int n = product.ambient_dim();
    f.f = [n, t](const Point& p) {
        Point q(n);
        q.head(n - 1) = p;
        q(n - 1) = t;
        return q;
    };
    f.df = [n](const Point&, const Vec& v) {
        Vec q = Vec::Zero(n);
        q.head(n - 1) = v;
        return q;
    };
    const int lb = static_cast<int>(product.base().lattice().cols());
    f.lattice_map = Eigen::MatrixXi::Zero(lb, lb + 1);
    f.lattice_map.leftCols(lb) = Eigen::MatrixXi::Identity(lb, lb);
    f.params = {{"product", product.to_json()}, {"t", t}};
    return f;
}

SmoothMap map_include_fiber(const Manifold& product, const Point& x) {
    if (product.kind() != ManifoldKind::ProductWithCircle)
        throw Error(ErrorKind::UnsupportedMap, "fiber inclusion needs a product");
    SmoothMap f;
    f.tag = "include_fiber";
    f.source = Manifold::circle(product.circle_length());
    f.target = product;
    const int n = product.ambient_dim();
    f.f = [n, x](const Point& p) {
        Point q(n);
        q.head(n - 1) = x;
        q(n - 1) = p(0);
        return q;
    };
    f.df = [n](const Point&, const Vec& v) {
        Vec q = Vec::Zero(n);
        q(n - 1) = v(0);
        return q;
    };
    const int lb = static_cast<int>(product.base().lattice().cols());
    f.lattice_map = Eigen::MatrixXi::Zero(1, lb + 1);
    f.lattice_map(0, lb) = 1;
    f.params = {{"product", product.to_json()}, {"x", std::vector<double>(x.data(), x.data() + x.size())}};
    return f;
}

SmoothMap map_torus_cover(double l1, double l2, int d) {
    if (d < 1) throw Error(ErrorKind::UnsupportedCover, "cover degree >= 1");
    SmoothMap f;
    f.tag = "torus_cover";
    f.source = Manifold::torus(d * l1, d * l2);
    f.target = Manifold::torus(l1, l2);
    f.f = [](const Point& p) { return p; };
    f.df = [](const Point&, const Vec& v) { return v; };
    f.lattice_map = d * Eigen::MatrixXi::Identity(2, 2);
    f.degree = d * d;
    f.params = {{"periods", {l1, l2}}, {"d", d}};
    return f;
}

SmoothMap map_circle_cover(double length, int d) {
    if (d < 1) throw Error(ErrorKind::UnsupportedCover, "cover degree >= 1");
    SmoothMap f;
    f.tag = "circle_cover";
    f.source = Manifold::circle(d * length);
    f.target = Manifold::circle(length);
    f.f = [](const Point& p) { return p; };
    f.df = [](const Point&, const Vec& v) { return v; };
    f.lattice_map = d * Eigen::MatrixXi::Identity(1, 1);
    f.degree = d;
    f.params = {{"length", length}, {"d", d}};
    return f;
}

BundleAtlas pullback(const BundleAtlas& b, const SmoothMap& f) {
    if (!f.f || !f.df) throw Error(ErrorKind::UnsupportedMap, "map without formula");
    if (f.target != b.base()) throw Error(ErrorKind::BaseMismatch, "map target differs from the bundle base");
    auto pb = std::make_shared<const BundleAtlas>(b);
    auto fm = f.f;
    auto dfm = f.df;
    BundleAtlas out(f.source, b.rank());
    for (int i = 0; i < b.chart_count(); ++i) {
        const Chart& bc = b.chart(i);
        Chart c;
        c.name = bc.name;
        if (bc.domain) c.domain = [pb, fm, i](const Point& p) { return pb->chart(i).domain(fm(p)); };
        if (bc.quality) c.quality = [pb, fm, i](const Point& p) { return pb->chart(i).quality(fm(p)); };
        c.form = [pb, fm, dfm, i](const Point& p, const Vec& v) { return pb->form(i, fm(p), dfm(p, v)); };
        if (bc.curvature)
            c.curvature = [pb, fm, dfm, i](const Point& p, const Vec& v, const Vec& w) {
                return pb->chart(i).curvature(fm(p), dfm(p, v), dfm(p, w));
            };
        out.add_chart(std::move(c));
    }
    for (int i = 0; i < b.chart_count(); ++i)
        for (int j = i + 1; j < b.chart_count(); ++j)
            out.set_transition(i, j, [pb, fm, i, j](const Point& p) { return pb->transition(i, j, fm(p)); });
    const int ls = static_cast<int>(f.source.lattice().cols());
    if (ls > 0 && b.has_decks()) {
        std::vector<GaugeFn> decks;
        for (int k = 0; k < ls; ++k) {
            const Eigen::VectorXi word = f.lattice_map.row(k).transpose();
            decks.push_back([pb, fm, word](const Point& p) { return pb->deck_word(fm(p), word); });
        }
        out.set_decks(std::move(decks));
    }
    out.recipe = {{"family", "pullback"}, {"bundle", b.recipe}, {"map", {{"tag", f.tag}, {"params", f.params}}}};
    return out;
}

BundleAtlas pushforward_cover(const BundleAtlas& up, const SmoothMap& cover) {
    if (cover.tag != "torus_cover" && cover.tag != "circle_cover")
        throw Error(ErrorKind::UnsupportedCover, "only built-in torus and circle covers push forward");
    if (up.base() != cover.source) throw Error(ErrorKind::BaseMismatch, "bundle is not on the cover");
    if (up.chart_count() != 1) throw Error(ErrorKind::UnsupportedCover, "cover bundle must use a single lifted chart");
    const Manifold base = cover.target;
    const int axes = base.kind() == ManifoldKind::FlatTorus2 ? 2 : 1;
    const int d = cover.lattice_map(0, 0);
    const int sheets = axes == 2 ? d * d : d;
    const int m = up.rank();
    const Mat lat = base.lattice();
    // sheet index = a * d + b for the torus, a for the circle
    auto index_of = [d, axes](const std::array<int, 2>& ab) { return axes == 2 ? ab[0] * d + ab[1] : ab[0]; };
    std::vector<std::array<int, 2>> coords(sheets);
    std::vector<Vec> offsets(sheets);
    for (int s = 0; s < sheets; ++s) {
        coords[s] = axes == 2 ? std::array<int, 2>{s / d, s % d} : std::array<int, 2>{s, 0};
        Vec o = Vec::Zero(base.ambient_dim());
        for (int k = 0; k < axes; ++k) o += coords[s][k] * lat.col(k);
        offsets[s] = o;
    }
    auto pu = std::make_shared<const BundleAtlas>(up);
    BundleAtlas out(base, m * sheets);
    Chart c;
    c.name = "lift";
    c.form = [pu, offsets, m, sheets](const Point& p, const Vec& v) {
        CMat a = CMat::Zero(m * sheets, m * sheets);
        for (int s = 0; s < sheets; ++s) a.block(s * m, s * m, m, m) = pu->form(0, p + offsets[s], v);
        return a;
    };
    if (up.chart(0).curvature)
        c.curvature = [pu, offsets, m, sheets](const Point& p, const Vec& v, const Vec& w) {
            CMat a = CMat::Zero(m * sheets, m * sheets);
            for (int s = 0; s < sheets; ++s)
                a.block(s * m, s * m, m, m) = pu->chart(0).curvature(p + offsets[s], v, w);
            return a;
        };
    out.add_chart(std::move(c));
    std::vector<GaugeFn> decks;
    for (int k = 0; k < axes; ++k) {
        decks.push_back([pu, offsets, coords, index_of, m, sheets, d, k](const Point& x) {
            CMat g = CMat::Zero(m * sheets, m * sheets);
            for (int s = 0; s < sheets; ++s) {
                std::array<int, 2> prev = coords[s];
                if (coords[s][k] >= 1) {
                    prev[k] -= 1;
                    g.block(index_of(prev) * m, s * m, m, m) = CMat::Identity(m, m);
                } else {
                    prev[k] = d - 1;
                    g.block(index_of(prev) * m, s * m, m, m) = pu->deck(k, x + offsets[s]);
                }
            }
            return g;
        });
    }
    out.set_decks(std::move(decks));
    out.recipe = {{"family", "pushforward"},
                  {"bundle", up.recipe},
                  {"map", {{"tag", cover.tag}, {"params", cover.params}}}};
    return out;
}

}  // namespace gaugelab
