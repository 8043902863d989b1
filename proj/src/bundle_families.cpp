#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "gaugelab/bundle.hpp"
#include "gaugelab/error.hpp"

namespace gaugelab {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I(0, 1);

bool sphere_based(const Manifold& m) {
    return m.kind() == ManifoldKind::RoundSphere2 ||
           (m.kind() == ManifoldKind::ProductWithCircle && m.base().kind() == ManifoldKind::RoundSphere2);
}

// Normalised height of the sphere factor.
double zhat(const Manifold&, const Point& p) { return p(2) / p.head(3).norm(); }

// North chart (index 0) and south chart (index 1) on a sphere or sphere x circle.
void add_sphere_charts(BundleAtlas& b, FormFn north, FormFn south, CurvFn curv_n, CurvFn curv_s) {
    const Manifold m = b.base();
    Chart n;
    n.name = "north";
    n.domain = [m](const Point& p) { return zhat(m, p) > -0.95; };
    n.quality = [m](const Point& p) { return zhat(m, p); };
    n.form = std::move(north);
    n.curvature = std::move(curv_n);
    Chart s;
    s.name = "south";
    s.domain = [m](const Point& p) { return zhat(m, p) < 0.95; };
    s.quality = [m](const Point& p) { return -zhat(m, p); };
    s.form = std::move(south);
    s.curvature = std::move(curv_s);
    b.add_chart(std::move(n));
    b.add_chart(std::move(s));
}

CMat scalar(cplx z) { return CMat::Constant(1, 1, z); }

}  // namespace

BundleAtlas make_trivial(const Manifold& base, int rank) {
    BundleAtlas b(base, rank);
    auto zero_form = [rank](const Point&, const Vec&) { return CMat(CMat::Zero(rank, rank)); };
    auto zero_curv = [rank](const Point&, const Vec&, const Vec&) { return CMat(CMat::Zero(rank, rank)); };
    if (sphere_based(base)) {
        add_sphere_charts(b, zero_form, zero_form, zero_curv, zero_curv);
        b.set_transition(0, 1, [rank](const Point&) { return CMat(CMat::Identity(rank, rank)); });
    } else {
        Chart c;
        c.name = "global";
        c.form = zero_form;
        c.curvature = zero_curv;
        b.add_chart(std::move(c));
    }
    b.recipe = {{"family", "trivial"}, {"base", base.to_json()}, {"rank", rank}};
    return b;
}

BundleAtlas make_monopole(int k, double scale) {
    const Manifold m = Manifold::sphere(scale);
    BundleAtlas b(m, 1);
    const double s = scale;
    const double half = 0.5 * k;
    auto north = [s, half](const Point& p, const Vec& v) {
        const Vec x = p / s;
        return scalar(-I * half * (x(0) * v(1) - x(1) * v(0)) / (s * (1 + x(2))));
    };
    auto south = [s, half](const Point& p, const Vec& v) {
        const Vec x = p / s;
        return scalar(I * half * (x(0) * v(1) - x(1) * v(0)) / (s * (1 - x(2))));
    };
    auto curv = [s, half](const Point& p, const Vec& v, const Vec& w) {
        const Eigen::Vector3d x = Eigen::Vector3d(p(0), p(1), p(2)).normalized();
        const Eigen::Vector3d a(v(0), v(1), v(2)), c(w(0), w(1), w(2));
        return scalar(-I * half * x.dot(a.cross(c)) / (s * s));
    };
    add_sphere_charts(b, north, south, curv, curv);
    b.set_transition(0, 1, [k](const Point& p) { return scalar(std::exp(I * double(k) * std::atan2(p(1), p(0)))); });
    b.recipe = {{"family", "monopole"}, {"k", k}, {"scale", scale}};
    return b;
}

BundleAtlas make_torus_line(double l1, double l2, int c) {
    const Manifold m = Manifold::torus(l1, l2);
    BundleAtlas b(m, 1);
    const double field = -2 * kPi * c / (l1 * l2);
    Chart ch;
    ch.name = "lift";
    ch.form = [field](const Point& p, const Vec& v) { return scalar(I * field * p(0) * v(1)); };
    ch.curvature = [field](const Point&, const Vec& v, const Vec& w) {
        return scalar(I * field * (v(0) * w(1) - v(1) * w(0)));
    };
    b.add_chart(std::move(ch));
    b.set_decks({[field, l1](const Point& p) { return scalar(std::exp(-I * field * l1 * p(1))); },
                 [](const Point&) { return scalar(1.0); }});
    b.recipe = {{"family", "torus_line"}, {"periods", {l1, l2}}, {"c1", c}};
    return b;
}

BundleAtlas make_constant_field_ball(double radius, double field) {
    BundleAtlas b(Manifold::ball(2, radius), 1);
    Chart ch;
    ch.name = "global";
    ch.form = [field](const Point& p, const Vec& v) { return scalar(0.5 * I * field * (p(0) * v(1) - p(1) * v(0))); };
    ch.curvature = [field](const Point&, const Vec& v, const Vec& w) {
        return scalar(I * field * (v(0) * w(1) - v(1) * w(0)));
    };
    b.add_chart(std::move(ch));
    b.recipe = {{"family", "constant_field_ball"}, {"radius", radius}, {"field", field}};
    return b;
}

BundleAtlas make_flat_circle(double length, double theta) {
    BundleAtlas b(Manifold::circle(length), 1);
    Chart ch;
    ch.name = "lift";
    ch.form = [theta, length](const Point&, const Vec& v) { return scalar(I * theta * v(0) / length); };
    ch.curvature = [](const Point&, const Vec&, const Vec&) { return scalar(0.0); };
    b.add_chart(std::move(ch));
    b.recipe = {{"family", "flat_circle"}, {"length", length}, {"theta", theta}};
    return b;
}

namespace {

struct Term {
    CMat mat;
    Vec omega;
    Vec covector;
    double phase = 0;
};

struct RandomForm {
    std::vector<Term> terms;
    int rank = 1;
    bool bump = false;
    Manifold base = Manifold::sphere();

    double bump_at(const Point& p) const {
        if (!bump) return 1.0;
        const double u = (zhat(base, p) + 0.6) / 0.4;
        if (u <= 0) return 0.0;
        if (u >= 1) return 1.0;
        return u * u * u * (10 - 15 * u + 6 * u * u);
    }

    CMat operator()(const Point& p, const Vec& v) const {
        CMat out = CMat::Zero(rank, rank);
        const double beta = bump_at(p);
        if (beta == 0.0) return out;
        for (const auto& t : terms) out += (std::sin(t.omega.dot(p) + t.phase) * t.covector.dot(v)) * t.mat;
        return beta * out;
    }
};

Vec frequency(const Manifold& m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_int_distribution<int> step(-1, 1);
    switch (m.kind()) {
        case ManifoldKind::RoundSphere2:
        case ManifoldKind::EuclideanBall: {
            const double len = m.kind() == ManifoldKind::RoundSphere2 ? m.scale() : m.radius();
            Vec w(m.ambient_dim());
            do {
                for (int i = 0; i < w.size(); ++i) w(i) = 2.0 * unif(rng);
            } while (w.norm() > 2.0);
            return w / len;
        }
        case ManifoldKind::FlatTorus2: {
            Vec w(2);
            for (int i = 0; i < 2; ++i) w(i) = 2 * kPi * step(rng) / m.period(i);
            return w;
        }
        case ManifoldKind::Circle: {
            Vec w(1);
            w(0) = 2 * kPi * step(rng) / m.circle_length();
            return w;
        }
        case ManifoldKind::ProductWithCircle: {
            const Vec b = frequency(m.base(), rng);
            Vec w(b.size() + 1);
            w.head(b.size()) = b;
            w(b.size()) = 2 * kPi * step(rng) / m.circle_length();
            return w;
        }
    }
    return {};
}

RandomForm random_form(const BundleAtlas& b, std::uint64_t seed) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 2 * kPi);
    RandomForm f;
    f.rank = b.rank();
    f.base = b.base();
    f.bump = b.chart_count() > 1 && sphere_based(b.base());
    const int n = b.base().ambient_dim();
    for (int k = 0; k < 6; ++k) {
        Term t;
        CMat g(f.rank, f.rank);
        for (int i = 0; i < f.rank; ++i)
            for (int j = 0; j < f.rank; ++j) g(i, j) = cplx(gauss(rng), gauss(rng));
        t.mat = 0.5 * (g - g.adjoint());
        t.mat /= op_norm(t.mat);
        t.omega = frequency(b.base(), rng);
        t.covector = Vec(n);
        for (int i = 0; i < n; ++i) t.covector(i) = gauss(rng);
        t.covector.normalize();
        t.phase = unif(rng);
        f.terms.push_back(std::move(t));
    }
    return f;
}

BundleAtlas add_form(const BundleAtlas& b, const RandomForm& a, double lambda) {
    auto pb = std::make_shared<const BundleAtlas>(b);
    BundleAtlas out(b.base(), b.rank());
    for (int i = 0; i < b.chart_count(); ++i) {
        Chart c = b.chart(i);
        c.curvature = nullptr;
        if (i == 0) {
            c.form = [pb, a, lambda](const Point& p, const Vec& v) { return CMat(pb->form(0, p, v) + lambda * a(p, v)); };
        } else {
            c.form = [pb, a, lambda, i](const Point& p, const Vec& v) {
                CMat extra = a(p, v);
                if (extra.isZero(0.0)) return pb->form(i, p, v);
                const CMat g = pb->transition(0, i, p);
                return CMat(pb->form(i, p, v) + lambda * (g.adjoint() * extra * g));
            };
        }
        out.add_chart(std::move(c));
    }
    for (int i = 0; i < b.chart_count(); ++i)
        for (int j = i + 1; j < b.chart_count(); ++j)
            out.set_transition(i, j, [pb, i, j](const Point& p) { return pb->transition(i, j, p); });
    if (b.has_decks()) {
        std::vector<GaugeFn> decks;
        for (int k = 0; k < b.base().lattice().cols(); ++k)
            decks.push_back([pb, k](const Point& p) { return pb->deck(k, p); });
        out.set_decks(std::move(decks));
    }
    return out;
}

double added_curvature_comass(const BundleAtlas& before, const BundleAtlas& after, int resolution) {
    double worst = 0;
    for (const auto& fp : sample_frames(before.base(), resolution)) {
        const Mat& f = fp.frame;
        const int d = static_cast<int>(f.cols());
        if (d < 2) return 0.0;
        const int c = before.chart_at(fp.x);
        auto R = [&](int i, int j) {
            return CMat(curvature_in_chart(after, c, fp.x, f.col(i), f.col(j)).value -
                        curvature_in_chart(before, c, fp.x, f.col(i), f.col(j)).value);
        };
        double v = 0;
        if (d == 2) v = op_norm(R(0, 1));
        else if (d == 3) v = max_unit_combination({R(1, 2), R(2, 0), R(0, 1)});
        else throw Error(ErrorKind::UnsupportedGeometry, "perturb supports dimension <= 3");
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace

BundleAtlas perturb(const BundleAtlas& b, std::uint64_t seed, double amplitude, double scale_override) {
    if (!(amplitude >= 0)) throw Error(ErrorKind::PreconditionViolated, "amplitude must be >= 0");
    if (amplitude == 0.0) return b;
    if (b.has_decks()) {
        Point p = Point::Zero(b.base().ambient_dim());
        for (int k = 0; k < b.base().lattice().cols(); ++k) {
            const CMat g = b.deck(k, p);
            if ((g - g(0, 0) * CMat::Identity(g.rows(), g.cols())).norm() > 1e-12)
                throw Error(ErrorKind::PreconditionViolated, "perturb needs scalar deck transitions");
        }
    }
    const RandomForm a = random_form(b, seed);
    double lambda = scale_override;
    if (lambda < 0) {
        constexpr int kRes = 3;
        const double target = 0.95 * amplitude;
        auto f = [&](double l) { return added_curvature_comass(b, add_form(b, a, l), kRes) - target; };
        const double c1 = f(1.0) + target;
        if (c1 <= 0) {
            lambda = amplitude;
        } else {
            double l0 = 0, f0 = -target;
            double l1 = target / c1, f1 = f(l1);
            for (int it = 0; it < 12 && std::abs(f1) > 1e-4 * target; ++it) {
                const double l2 = l1 - f1 * (l1 - l0) / (f1 - f0);
                l0 = l1;
                f0 = f1;
                l1 = l2 > 0 ? l2 : 0.5 * l1;
                f1 = f(l1);
            }
            lambda = l1;
        }
    }
    BundleAtlas out = add_form(b, a, lambda);
    out.recipe = {{"family", "perturb"}, {"bundle", b.recipe}, {"seed", seed}, {"amplitude", amplitude}, {"scale", lambda}};
    return out;
}

}  // namespace gaugelab
