#pragma once

// Closed-form Riemannian geometry of the model manifolds.
//
// Points and tangent vectors are stored in ambient coordinates: R^3 for the
// round sphere, R^n for Euclidean balls, the universal cover R^2 (resp. R) for
// flat tori (resp. circles), and base coordinates followed by a lifted circle
// coordinate for products. Paths on periodic manifolds are continuous in the
// lift.

#include <functional>
#include <memory>
#include "json.hpp"
#include <vector>

#include "gaugelab/ucalc.hpp"

namespace gaugelab {

using Point = Vec;

enum class ManifoldKind { Circle, EuclideanBall, RoundSphere2, FlatTorus2, ProductWithCircle };

class Manifold {
public:
    static Manifold circle(double length);
    static Manifold ball(int dimension, double radius);
    static Manifold sphere(double scale = 1.0);
    static Manifold torus(double l1, double l2);
    static Manifold product(const Manifold& base, double circle_length);

    ManifoldKind kind() const { return kind_; }
    /// Intrinsic dimension.
    int dim() const;
    int ambient_dim() const;

    double circle_length() const { return length_; }
    double radius() const { return radius_; }
    double scale() const { return scale_; }
    double period(int i) const { return i == 0 ? l1_ : l2_; }
    const Manifold& base() const { return *base_; }

    /// Lattice of deck translations in ambient coordinates (one column per
    /// periodic direction); empty for simply connected models.
    Mat lattice() const;

    double area() const;
    bool contains(const Point& p, double tol = 1e-9) const;

    /// Orthonormal tangent frame at p, ambient_dim x dim. For products the
    /// base directions come first and the circle direction last.
    Mat tangent_frame(const Point& p) const;
    Vec project_tangent(const Point& p, const Vec& v) const;
    Point exp(const Point& p, const Vec& v) const;
    double distance(const Point& p, const Point& q) const;

    bool operator==(const Manifold& o) const;
    bool operator!=(const Manifold& o) const { return !(*this == o); }

    nlohmann::json to_json() const;
    static Manifold from_json(const nlohmann::json& j);
    std::string describe() const;

private:
    ManifoldKind kind_ = ManifoldKind::RoundSphere2;
    double length_ = 0, radius_ = 0, scale_ = 1, l1_ = 0, l2_ = 0;
    int ball_dim_ = 0;
    std::shared_ptr<const Manifold> base_;
};

/// A path made of smooth pieces, each parametrized over [0, 1].
struct Segment {
    std::function<Point(double)> pos;
    std::function<Vec(double)> vel;
    double length = 0;
};

class PathCurve {
public:
    PathCurve() = default;
    explicit PathCurve(std::vector<Segment> segs) : segs_(std::move(segs)) {}

    const std::vector<Segment>& segments() const { return segs_; }
    double length() const;
    Point start() const { return segs_.front().pos(0.0); }
    Point end() const { return segs_.back().pos(1.0); }
    PathCurve reversed() const;
    PathCurve then(const PathCurve& next) const;
    bool empty() const { return segs_.empty(); }

    /// Checks end-to-start continuity of the pieces (absolute tolerance).
    bool continuous(double tol = 1e-9) const;

    /// Straight segment in ambient coordinates (flat models only).
    static PathCurve line(const Point& a, const Point& b);
    /// Segment of an arbitrary smooth map; velocity by central differences.
    static PathCurve from_function(std::function<Point(double)> f, double length = -1.0);

private:
    std::vector<Segment> segs_;
};

/// Minimal geodesic. Throws NonUniqueGeodesic on the cut locus.
PathCurve geodesic(const Manifold& m, const Point& p, const Point& q);

/// Great-circle arc on the sphere from p to q leaving p in direction `dir`
/// (needed between antipodal points, where the minimal geodesic is not unique).
PathCurve sphere_arc(const Manifold& m, const Point& p, const Point& q, const Vec& dir);

double injectivity_radius(const Manifold& m);

struct TriangleArea {
    double area = 0;
    bool degenerate = false;
};

/// Area of the geodesic triangle (spherical excess on the sphere).
TriangleArea triangle_area(const Manifold& m, const Point& x, const Point& y, const Point& z);

struct FramePoint {
    Point x;
    Mat frame;
};

/// Quasi-uniform deterministic sample of points with orthonormal frames.
std::vector<FramePoint> sample_frames(const Manifold& m, int resolution);

/// Homotopy c(s, t) contracting a disc to its base point:
/// c(s,0) = c(s,1) = c(0,t) = base, and t -> c(1,t) runs along the boundary.
class DiscHomotopy {
public:
    DiscHomotopy(Manifold m, Point base, std::function<Point(double, double)> map, int grid = 32);

    const Manifold& manifold() const { return m_; }
    const Point& base() const { return base_; }
    int grid() const { return grid_; }
    Point at(double s, double t) const { return map_(s, t); }
    Vec d_s(double s, double t) const;
    Vec d_t(double s, double t) const;

    /// Trapezoidal quadrature of |d_t c ^ d_s c| on the grid (counts multiplicity).
    double area() const;
    /// Loop t -> c(s, t).
    PathCurve loop(double s = 1.0) const;
    /// Max violation of the boundary conditions on the grid.
    double boundary_defect() const;

    /// Disc bounded by the geodesic circle of radius |center - base| about
    /// `center`, swept by circles through `base` internally tangent there.
    static DiscHomotopy lasso(const Manifold& m, const Point& base, const Point& center, int grid = 32);

private:
    Manifold m_;
    Point base_;
    std::function<Point(double, double)> map_;
    int grid_;
};

/// |a ^ b| for ambient vectors.
double wedge_norm(const Vec& a, const Vec& b);

}  // namespace gaugelab
