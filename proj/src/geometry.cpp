#include "gaugelab/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gaugelab/error.hpp"
#include "gaugelab/mesh.hpp"

namespace gaugelab {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Vector3d as3(const Vec& v) { return Eigen::Vector3d(v(0), v(1), v(2)); }

double wrap(double d, double period) { return d - period * std::round(d / period); }

}  // namespace

Manifold Manifold::circle(double length) {
    if (!(length > 0)) throw Error(ErrorKind::PreconditionViolated, "circle length must be positive");
    Manifold m;
    m.kind_ = ManifoldKind::Circle;
    m.length_ = length;
    return m;
}

Manifold Manifold::ball(int dimension, double radius) {
    if (dimension < 1 || !(radius > 0)) throw Error(ErrorKind::PreconditionViolated, "ball needs dimension >= 1, radius > 0");
    Manifold m;
    m.kind_ = ManifoldKind::EuclideanBall;
    m.ball_dim_ = dimension;
    m.radius_ = radius;
    return m;
}

Manifold Manifold::sphere(double scale) {
    if (!(scale > 0)) throw Error(ErrorKind::PreconditionViolated, "sphere scale must be positive");
    Manifold m;
    m.kind_ = ManifoldKind::RoundSphere2;
    m.scale_ = scale;
    return m;
}

Manifold Manifold::torus(double l1, double l2) {
    if (!(l1 > 0) || !(l2 > 0)) throw Error(ErrorKind::PreconditionViolated, "torus periods must be positive");
    Manifold m;
    m.kind_ = ManifoldKind::FlatTorus2;
    m.l1_ = l1;
    m.l2_ = l2;
    return m;
}

Manifold Manifold::product(const Manifold& base, double circle_length) {
    if (!(circle_length > 0)) throw Error(ErrorKind::PreconditionViolated, "circle length must be positive");
    if (base.kind() == ManifoldKind::ProductWithCircle)
        throw Error(ErrorKind::UnsupportedGeometry, "nested products are not modelled");
    Manifold m;
    m.kind_ = ManifoldKind::ProductWithCircle;
    m.length_ = circle_length;
    m.base_ = std::make_shared<const Manifold>(base);
    return m;
}

int Manifold::dim() const {
    switch (kind_) {
        case ManifoldKind::Circle: return 1;
        case ManifoldKind::EuclideanBall: return ball_dim_;
        case ManifoldKind::RoundSphere2:
        case ManifoldKind::FlatTorus2: return 2;
        case ManifoldKind::ProductWithCircle: return base_->dim() + 1;
    }
    return 0;
}

int Manifold::ambient_dim() const {
    switch (kind_) {
        case ManifoldKind::Circle: return 1;
        case ManifoldKind::EuclideanBall: return ball_dim_;
        case ManifoldKind::RoundSphere2: return 3;
        case ManifoldKind::FlatTorus2: return 2;
        case ManifoldKind::ProductWithCircle: return base_->ambient_dim() + 1;
    }
    return 0;
}

Mat Manifold::lattice() const {
    switch (kind_) {
        case ManifoldKind::Circle: return Mat::Constant(1, 1, length_);
        case ManifoldKind::FlatTorus2: {
            Mat l = Mat::Zero(2, 2);
            l(0, 0) = l1_;
            l(1, 1) = l2_;
            return l;
        }
        case ManifoldKind::ProductWithCircle: {
            const Mat bl = base_->lattice();
            const int n = ambient_dim();
            Mat l = Mat::Zero(n, bl.cols() + 1);
            l.topLeftCorner(bl.rows(), bl.cols()) = bl;
            l(n - 1, bl.cols()) = length_;
            return l;
        }
        default: return Mat(ambient_dim(), 0);
    }
}

double Manifold::area() const {
    switch (kind_) {
        case ManifoldKind::Circle: return length_;
        case ManifoldKind::EuclideanBall:
            if (ball_dim_ == 2) return kPi * radius_ * radius_;
            if (ball_dim_ == 3) return 4.0 / 3.0 * kPi * radius_ * radius_ * radius_;
            if (ball_dim_ == 1) return 2 * radius_;
            throw Error(ErrorKind::UnsupportedGeometry, "ball volume only for dimension <= 3");
        case ManifoldKind::RoundSphere2: return 4 * kPi * scale_ * scale_;
        case ManifoldKind::FlatTorus2: return l1_ * l2_;
        case ManifoldKind::ProductWithCircle: return base_->area() * length_;
    }
    return 0;
}

bool Manifold::contains(const Point& p, double tol) const {
    if (p.size() != ambient_dim()) return false;
    switch (kind_) {
        case ManifoldKind::RoundSphere2: return std::abs(p.norm() - scale_) <= tol * scale_;
        case ManifoldKind::EuclideanBall: return p.norm() <= radius_ * (1 + tol);
        case ManifoldKind::ProductWithCircle: return base_->contains(p.head(p.size() - 1), tol);
        default: return true;
    }
}

Mat Manifold::tangent_frame(const Point& p) const {
    switch (kind_) {
        case ManifoldKind::RoundSphere2: {
            const Eigen::Vector3d x = as3(p).normalized();
            const Eigen::Vector3d a = std::abs(x.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
            const Eigen::Vector3d e1 = a.cross(x).normalized();
            const Eigen::Vector3d e2 = x.cross(e1);
            Mat f(3, 2);
            f.col(0) = e1;
            f.col(1) = e2;
            return f;
        }
        case ManifoldKind::ProductWithCircle: {
            const int n = ambient_dim();
            const Mat bf = base_->tangent_frame(p.head(n - 1));
            Mat f = Mat::Zero(n, bf.cols() + 1);
            f.topLeftCorner(bf.rows(), bf.cols()) = bf;
            f(n - 1, bf.cols()) = 1.0;
            return f;
        }
        default: return Mat::Identity(ambient_dim(), ambient_dim());
    }
}

Vec Manifold::project_tangent(const Point& p, const Vec& v) const {
    switch (kind_) {
        case ManifoldKind::RoundSphere2: {
            const Vec x = p.normalized();
            return v - v.dot(x) * x;
        }
        case ManifoldKind::ProductWithCircle: {
            const int n = ambient_dim();
            Vec out = v;
            out.head(n - 1) = base_->project_tangent(p.head(n - 1), v.head(n - 1));
            return out;
        }
        default: return v;
    }
}

Point Manifold::exp(const Point& p, const Vec& v) const {
    switch (kind_) {
        case ManifoldKind::RoundSphere2: {
            const double nv = v.norm();
            if (nv == 0.0) return p;
            const double ang = nv / scale_;
            Vec q = std::cos(ang) * p + (scale_ * std::sin(ang) / nv) * v;
            return q * (scale_ / q.norm());
        }
        case ManifoldKind::ProductWithCircle: {
            const int n = ambient_dim();
            Point q(n);
            q.head(n - 1) = base_->exp(p.head(n - 1), v.head(n - 1));
            q(n - 1) = p(n - 1) + v(n - 1);
            return q;
        }
        default: return p + v;
    }
}

double Manifold::distance(const Point& p, const Point& q) const {
    switch (kind_) {
        case ManifoldKind::RoundSphere2: {
            const Eigen::Vector3d a = as3(p), b = as3(q);
            return scale_ * std::atan2(a.cross(b).norm(), a.dot(b));
        }
        case ManifoldKind::EuclideanBall: return (p - q).norm();
        case ManifoldKind::Circle: return std::abs(wrap(q(0) - p(0), length_));
        case ManifoldKind::FlatTorus2:
            return std::hypot(wrap(q(0) - p(0), l1_), wrap(q(1) - p(1), l2_));
        case ManifoldKind::ProductWithCircle: {
            const int n = ambient_dim();
            const double db = base_->distance(p.head(n - 1), q.head(n - 1));
            const double dt = wrap(q(n - 1) - p(n - 1), length_);
            return std::hypot(db, dt);
        }
    }
    return 0;
}

bool Manifold::operator==(const Manifold& o) const {
    if (kind_ != o.kind_) return false;
    switch (kind_) {
        case ManifoldKind::Circle: return length_ == o.length_;
        case ManifoldKind::EuclideanBall: return ball_dim_ == o.ball_dim_ && radius_ == o.radius_;
        case ManifoldKind::RoundSphere2: return scale_ == o.scale_;
        case ManifoldKind::FlatTorus2: return l1_ == o.l1_ && l2_ == o.l2_;
        case ManifoldKind::ProductWithCircle: return length_ == o.length_ && *base_ == *o.base_;
    }
    return false;
}

nlohmann::json Manifold::to_json() const {
    switch (kind_) {
        case ManifoldKind::Circle: return {{"kind", "circle"}, {"length", length_}};
        case ManifoldKind::EuclideanBall: return {{"kind", "ball"}, {"dimension", ball_dim_}, {"radius", radius_}};
        case ManifoldKind::RoundSphere2: return {{"kind", "sphere"}, {"scale", scale_}};
        case ManifoldKind::FlatTorus2: return {{"kind", "torus"}, {"periods", {l1_, l2_}}};
        case ManifoldKind::ProductWithCircle:
            return {{"kind", "product"}, {"base", base_->to_json()}, {"circle_length", length_}};
    }
    return {};
}

Manifold Manifold::from_json(const nlohmann::json& j) {
    const std::string k = j.at("kind").get<std::string>();
    if (k == "circle") return circle(j.at("length").get<double>());
    if (k == "ball") return ball(j.at("dimension").get<int>(), j.at("radius").get<double>());
    if (k == "sphere") return sphere(j.value("scale", 1.0));
    if (k == "torus") return torus(j.at("periods").at(0).get<double>(), j.at("periods").at(1).get<double>());
    if (k == "product") return product(from_json(j.at("base")), j.at("circle_length").get<double>());
    throw Error(ErrorKind::SchemaError, "unknown manifold kind " + k);
}

std::string Manifold::describe() const { return to_json().dump(); }

double PathCurve::length() const {
    double l = 0;
    for (const auto& s : segs_) l += s.length;
    return l;
}

PathCurve PathCurve::reversed() const {
    std::vector<Segment> out;
    out.reserve(segs_.size());
    for (auto it = segs_.rbegin(); it != segs_.rend(); ++it) {
        Segment s;
        auto pos = it->pos;
        auto vel = it->vel;
        s.pos = [pos](double t) { return pos(1.0 - t); };
        s.vel = [vel](double t) { return Vec(-vel(1.0 - t)); };
        s.length = it->length;
        out.push_back(std::move(s));
    }
    return PathCurve(std::move(out));
}

PathCurve PathCurve::then(const PathCurve& next) const {
    std::vector<Segment> out = segs_;
    out.insert(out.end(), next.segs_.begin(), next.segs_.end());
    return PathCurve(std::move(out));
}

bool PathCurve::continuous(double tol) const {
    for (std::size_t i = 1; i < segs_.size(); ++i)
        if ((segs_[i - 1].pos(1.0) - segs_[i].pos(0.0)).norm() > tol) return false;
    return true;
}

PathCurve PathCurve::line(const Point& a, const Point& b) {
    Segment s;
    const Vec d = b - a;
    s.pos = [a, d](double t) { return Point(a + t * d); };
    s.vel = [d](double) { return d; };
    s.length = d.norm();
    return PathCurve({s});
}

PathCurve PathCurve::from_function(std::function<Point(double)> f, double length) {
    Segment s;
    s.pos = f;
    s.vel = [f](double t) {
        const double h = 1e-6;
        return Vec((f(t + h) - f(t - h)) / (2 * h));
    };
    if (length < 0) {
        // 64-point composite midpoint on |c'|
        const int n = 256;
        double l = 0;
        for (int i = 0; i < n; ++i) l += s.vel((i + 0.5) / n).norm() / n;
        length = l;
    }
    s.length = length;
    return PathCurve({s});
}

PathCurve sphere_arc(const Manifold& m, const Point& p, const Point& q, const Vec& dir) {
    if (m.kind() != ManifoldKind::RoundSphere2) throw Error(ErrorKind::UnsupportedGeometry, "sphere_arc needs a sphere");
    const double r = m.scale();
    const Vec x = p.normalized();
    Vec u = dir - dir.dot(x) * x;
    if (u.norm() < 1e-14) throw Error(ErrorKind::PreconditionViolated, "sphere_arc: direction normal to sphere");
    u.normalize();
    const double theta = m.distance(p, q) / r;
    Segment s;
    s.pos = [x, u, theta, r](double t) { return Point(r * (std::cos(t * theta) * x + std::sin(t * theta) * u)); };
    s.vel = [x, u, theta, r](double t) {
        return Vec(r * theta * (-std::sin(t * theta) * x + std::cos(t * theta) * u));
    };
    s.length = r * theta;
    return PathCurve({s});
}

PathCurve geodesic(const Manifold& m, const Point& p, const Point& q) {
    switch (m.kind()) {
        case ManifoldKind::RoundSphere2: {
            const double r = m.scale();
            const Vec x = p.normalized(), y = q.normalized();
            if ((x + y).norm() < 1e-9) throw Error(ErrorKind::NonUniqueGeodesic, "antipodal points");
            const double theta = std::atan2(Eigen::Vector3d(as3(x)).cross(as3(y)).norm(), x.dot(y));
            Segment s;
            s.length = r * theta;
            if (theta < 1e-12) {
                s.pos = [x, r](double) { return Point(r * x); };
                s.vel = [x](double) { return Vec(Vec::Zero(x.size())); };
                return PathCurve({s});
            }
            const double st = std::sin(theta);
            s.pos = [x, y, theta, st, r](double t) {
                return Point(r * (std::sin((1 - t) * theta) * x + std::sin(t * theta) * y) / st);
            };
            s.vel = [x, y, theta, st, r](double t) {
                return Vec(r * theta * (-std::cos((1 - t) * theta) * x + std::cos(t * theta) * y) / st);
            };
            return PathCurve({s});
        }
        case ManifoldKind::EuclideanBall: return PathCurve::line(p, q);
        case ManifoldKind::Circle:
        case ManifoldKind::FlatTorus2: {
            Vec d = q - p;
            for (int i = 0; i < d.size(); ++i) {
                const double per = m.kind() == ManifoldKind::Circle ? m.circle_length() : m.period(i);
                d(i) = wrap(d(i), per);
                if (std::abs(std::abs(d(i)) - per / 2) < 1e-12 * per)
                    throw Error(ErrorKind::NonUniqueGeodesic, "points on the cut locus");
            }
            return PathCurve::line(p, p + d);
        }
        case ManifoldKind::ProductWithCircle: {
            const int n = m.ambient_dim();
            const PathCurve bg = geodesic(m.base(), p.head(n - 1), q.head(n - 1));
            const double dt = wrap(q(n - 1) - p(n - 1), m.circle_length());
            if (std::abs(std::abs(dt) - m.circle_length() / 2) < 1e-12 * m.circle_length())
                throw Error(ErrorKind::NonUniqueGeodesic, "points on the circle cut locus");
            const Segment b = bg.segments().front();
            const double t0 = p(n - 1);
            Segment s;
            s.pos = [b, t0, dt, n](double t) {
                Point out(n);
                out.head(n - 1) = b.pos(t);
                out(n - 1) = t0 + t * dt;
                return out;
            };
            s.vel = [b, dt, n](double t) {
                Vec out(n);
                out.head(n - 1) = b.vel(t);
                out(n - 1) = dt;
                return out;
            };
            s.length = std::hypot(b.length, dt);
            return PathCurve({s});
        }
    }
    throw Error(ErrorKind::UnsupportedGeometry, "geodesic");
}

double injectivity_radius(const Manifold& m) {
    switch (m.kind()) {
        case ManifoldKind::Circle: return m.circle_length() / 2;
        case ManifoldKind::EuclideanBall: return m.radius();
        case ManifoldKind::RoundSphere2: return kPi * m.scale();
        case ManifoldKind::FlatTorus2: return std::min(m.period(0), m.period(1)) / 2;
        case ManifoldKind::ProductWithCircle:
            return std::min(injectivity_radius(m.base()), m.circle_length() / 2);
    }
    return 0;
}

TriangleArea triangle_area(const Manifold& m, const Point& x, const Point& y, const Point& z) {
    TriangleArea out;
    switch (m.kind()) {
        case ManifoldKind::RoundSphere2: {
            const double r = m.scale();
            const Eigen::Vector3d a = as3(x).normalized(), b = as3(y).normalized(), c = as3(z).normalized();
            const double triple = a.dot(b.cross(c));
            if (std::abs(triple) < 1e-14) {
                out.degenerate = true;
                return out;
            }
            // Interior angles at each vertex between the tangent directions of the sides.
            auto angle_at = [](const Eigen::Vector3d& v, const Eigen::Vector3d& p, const Eigen::Vector3d& q) {
                const Eigen::Vector3d tp = (p - p.dot(v) * v).normalized();
                const Eigen::Vector3d tq = (q - q.dot(v) * v).normalized();
                return std::atan2(tp.cross(tq).norm(), tp.dot(tq));
            };
            const double excess = angle_at(a, b, c) + angle_at(b, c, a) + angle_at(c, a, b) - kPi;
            out.area = r * r * excess;
            return out;
        }
        case ManifoldKind::EuclideanBall:
        case ManifoldKind::FlatTorus2: {
            Vec u = y - x, v = z - x;
            if (m.kind() == ManifoldKind::FlatTorus2)
                for (int i = 0; i < 2; ++i) {
                    u(i) = wrap(u(i), m.period(i));
                    v(i) = wrap(v(i), m.period(i));
                }
            const double a = 0.5 * wedge_norm(u, v);
            if (a < 1e-14 * std::max(1.0, u.squaredNorm() + v.squaredNorm())) {
                out.degenerate = true;
                return out;
            }
            out.area = a;
            return out;
        }
        default: throw Error(ErrorKind::UnsupportedGeometry, "triangle_area needs a surface model");
    }
}

double wedge_norm(const Vec& a, const Vec& b) {
    const double aa = a.squaredNorm(), bb = b.squaredNorm(), ab = a.dot(b);
    return std::sqrt(std::max(0.0, aa * bb - ab * ab));
}

std::vector<FramePoint> sample_frames(const Manifold& m, int resolution) {
    if (resolution < 1) throw Error(ErrorKind::PreconditionViolated, "resolution >= 1");
    std::vector<FramePoint> out;
    switch (m.kind()) {
        case ManifoldKind::RoundSphere2: {
            std::vector<Vec> verts;
            std::vector<std::array<int, 3>> faces;
            icosphere_raw(resolution - 1, verts, faces);
            for (const auto& v : verts) {
                const Point p = m.scale() * v;
                out.push_back({p, m.tangent_frame(p)});
            }
            break;
        }
        case ManifoldKind::Circle:
            for (int i = 0; i < resolution; ++i) {
                Point p(1);
                p(0) = m.circle_length() * i / resolution;
                out.push_back({p, Mat::Identity(1, 1)});
            }
            break;
        case ManifoldKind::FlatTorus2: {
            const int n = 8 * resolution;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Point p(2);
                    p << m.period(0) * i / n, m.period(1) * j / n;
                    out.push_back({p, Mat::Identity(2, 2)});
                }
            break;
        }
        case ManifoldKind::EuclideanBall: {
            const int d = m.dim();
            const double r = m.radius();
            if (d == 2) {
                const int rings = 4 * resolution;
                out.push_back({Point::Zero(2), Mat::Identity(2, 2)});
                for (int k = 1; k <= rings; ++k) {
                    const double rad = r * k / rings;
                    const int na = 8 * k;
                    for (int a = 0; a < na; ++a) {
                        const double ang = 2 * kPi * a / na;
                        Point p(2);
                        p << rad * std::cos(ang), rad * std::sin(ang);
                        out.push_back({p, Mat::Identity(2, 2)});
                    }
                }
            } else {
                const int n = 4 * resolution;
                Eigen::VectorXi idx = Eigen::VectorXi::Zero(d);
                const int total = static_cast<int>(std::pow(2 * n + 1, d));
                for (int c = 0; c < total; ++c) {
                    int rem = c;
                    Point p(d);
                    for (int i = 0; i < d; ++i) {
                        p(i) = r * ((rem % (2 * n + 1)) - n) / static_cast<double>(n);
                        rem /= 2 * n + 1;
                    }
                    if (p.norm() <= r) out.push_back({p, Mat::Identity(d, d)});
                }
            }
            break;
        }
        case ManifoldKind::ProductWithCircle: {
            const auto base = sample_frames(m.base(), resolution);
            const int nt = std::max(4, 2 * resolution);
            const int n = m.ambient_dim();
            for (int k = 0; k < nt; ++k) {
                const double t = m.circle_length() * k / nt;
                for (const auto& b : base) {
                    Point p(n);
                    p.head(n - 1) = b.x;
                    p(n - 1) = t;
                    out.push_back({p, m.tangent_frame(p)});
                }
            }
            break;
        }
    }
    return out;
}

DiscHomotopy::DiscHomotopy(Manifold m, Point base, std::function<Point(double, double)> map, int grid)
    : m_(std::move(m)), base_(std::move(base)), map_(std::move(map)), grid_(grid) {
    if (grid_ < 2) throw Error(ErrorKind::PreconditionViolated, "disc grid >= 2");
}

namespace {
template <class F>
Vec diff1(const F& f, double x) {
    const double h = 1e-6;
    if (x < h) return (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2 * h)) / (2 * h);
    if (x > 1 - h) return (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2 * h)) / (2 * h);
    return (f(x + h) - f(x - h)) / (2 * h);
}
}  // namespace

Vec DiscHomotopy::d_s(double s, double t) const {
    return diff1([&](double x) { return Vec(map_(x, t)); }, s);
}

Vec DiscHomotopy::d_t(double s, double t) const {
    return diff1([&](double x) { return Vec(map_(s, x)); }, t);
}

double DiscHomotopy::area() const {
    const int n = grid_;
    double total = 0;
    for (int i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / n;
        const double ws = (i == 0 || i == n) ? 0.5 : 1.0;
        for (int j = 0; j <= n; ++j) {
            const double t = static_cast<double>(j) / n;
            const double wt = (j == 0 || j == n) ? 0.5 : 1.0;
            total += ws * wt * wedge_norm(d_t(s, t), d_s(s, t));
        }
    }
    return total / (static_cast<double>(n) * n);
}

PathCurve DiscHomotopy::loop(double s) const {
    auto map = map_;
    return PathCurve::from_function([map, s](double t) { return map(s, t); });
}

double DiscHomotopy::boundary_defect() const {
    double worst = 0;
    for (int i = 0; i <= grid_; ++i) {
        const double u = static_cast<double>(i) / grid_;
        worst = std::max(worst, (map_(u, 0.0) - base_).norm());
        worst = std::max(worst, (map_(u, 1.0) - base_).norm());
        worst = std::max(worst, (map_(0.0, u) - base_).norm());
    }
    return worst;
}

DiscHomotopy DiscHomotopy::lasso(const Manifold& m, const Point& base, const Point& center, int grid) {
    constexpr double tau = 2 * kPi;
    if (m.kind() == ManifoldKind::RoundSphere2) {
        const double r = m.scale();
        const Vec p = base.normalized();
        const double rho = m.distance(base, center) / r;
        if (!(rho > 0) || rho >= kPi) throw Error(ErrorKind::PreconditionViolated, "lasso radius out of range");
        Vec u0 = center.normalized() - center.normalized().dot(p) * p;
        u0.normalize();
        const Eigen::Vector3d p3 = as3(p), u3 = as3(u0);
        auto map = [p3, u3, rho, r](double s, double t) {
            const double a = s * rho;
            const Eigen::Vector3d cs = std::cos(a) * p3 + std::sin(a) * u3;
            const Eigen::Vector3d e1 = std::sin(a) * p3 - std::cos(a) * u3;
            const Eigen::Vector3d e2 = cs.cross(e1);
            const Eigen::Vector3d q =
                std::cos(a) * cs + std::sin(a) * (std::cos(tau * t) * e1 + std::sin(tau * t) * e2);
            return Point(r * q);
        };
        return DiscHomotopy(m, base, map, grid);
    }
    if (m.ambient_dim() == 2 &&
        (m.kind() == ManifoldKind::FlatTorus2 || m.kind() == ManifoldKind::EuclideanBall)) {
        const Vec d = center - base;
        const double rho = d.norm();
        if (!(rho > 0)) throw Error(ErrorKind::PreconditionViolated, "lasso radius must be positive");
        const Vec u = -d / rho;
        Vec w(2);
        w << -u(1), u(0);
        auto map = [base, u, w, rho](double s, double t) {
            return Point(base + s * rho * (-u + std::cos(tau * t) * u + std::sin(tau * t) * w));
        };
        return DiscHomotopy(m, base, map, grid);
    }
    throw Error(ErrorKind::UnsupportedGeometry, "lasso discs on spheres and flat surfaces only");
}

}  // namespace gaugelab
