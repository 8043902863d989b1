#pragma once

// Hermitian bundles with connection over the model manifolds.
//
// Frames are row frames: on an overlap s_j = s_i * g_ij, so the connection
// forms satisfy A_j = g_ij^-1 dg_ij + g_ij^-1 A_i g_ij. Periodic bases are
// handled in the lift with deck transitions s(x) = s(x + tau_k) * g_k(x).

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaugelab/geometry.hpp"
#include "gaugelab/ucalc.hpp"

namespace gaugelab {

using FormFn = std::function<CMat(const Point&, const Vec&)>;
using CurvFn = std::function<CMat(const Point&, const Vec&, const Vec&)>;
using GaugeFn = std::function<CMat(const Point&)>;

struct Chart {
    std::string name;
    std::function<bool(const Point&)> domain;
    /// Larger is deeper inside the chart; used for chart choice.
    std::function<double(const Point&)> quality;
    FormFn form;
    /// Optional closed-form curvature.
    CurvFn curvature;
};

class BundleAtlas {
public:
    BundleAtlas(Manifold base, int rank);

    const Manifold& base() const { return base_; }
    int rank() const { return rank_; }

    int chart_count() const { return static_cast<int>(charts_.size()); }
    const Chart& chart(int i) const { return charts_.at(i); }
    Chart& chart(int i) { return charts_.at(i); }
    int add_chart(Chart c);

    /// Registers g_ij; g_ji is taken as its inverse.
    void set_transition(int i, int j, GaugeFn g);
    CMat transition(int i, int j, const Point& p) const;

    /// One deck map per lattice column of the base; missing ones are Id.
    void set_decks(std::vector<GaugeFn> decks) { decks_ = std::move(decks); }
    bool has_decks() const { return !decks_.empty(); }
    CMat deck(int k, const Point& p) const;
    /// G with s(y) = s(y + lattice * n) * G.
    CMat deck_word(const Point& y, const Eigen::VectorXi& n) const;

    /// Chart of highest quality whose domain contains p.
    int chart_at(const Point& p) const;
    CMat form(int chart, const Point& p, const Vec& v) const { return charts_.at(chart).form(p, v); }
    CMat form(const Point& p, const Vec& v) const { return form(chart_at(p), p, v); }
    bool analytic_curvature() const;

    /// Reconstruction recipe (family tag + parameters).
    nlohmann::json recipe;

private:
    Manifold base_;
    int rank_;
    std::vector<Chart> charts_;
    std::map<std::pair<int, int>, GaugeFn> transitions_;
    std::vector<GaugeFn> decks_;
};

/// Smooth extension of the chart form to a neighbourhood in ambient space
/// (sphere factors are retracted radially).
CMat extended_form(const BundleAtlas& b, int chart, const Point& x, const Vec& v);

struct CurvatureSample {
    CMat value;
    bool analytic = false;
    /// |R_h - R_{h/2}| for finite differences, 0 otherwise.
    double mismatch = 0;
};

CurvatureSample curvature_in_chart(const BundleAtlas& b, int chart, const Point& p, const Vec& v, const Vec& w,
                                   bool force_fd = false);
CMat curvature(const BundleAtlas& b, const Point& p, const Vec& v, const Vec& w);

enum class ComassMode { Full, TangentOnly };

struct ComassReport {
    double value = 0;
    int samples = 0;
    Point argmax;
    double refinement_delta = 0;
    int resolution = 0;
    std::vector<double> by_resolution;
    double fd_mismatch = 0;
    bool smooth_enough = true;
};

/// max over unit c of |sum_k c_k M_k|_op for anti-Hermitian M_k.
double max_unit_combination(const std::vector<CMat>& mats);

/// Comass of the curvature at one point in the given frame columns.
double curvature_comass_at(const BundleAtlas& b, const Point& p, const Mat& frame);
/// Comass of the connection form of the chosen chart at one point.
double form_comass_at(const BundleAtlas& b, int chart, const Point& p, const Mat& frame);

Mat mode_frame(const Manifold& m, const Mat& frame, ComassMode mode);

ComassReport comass_norm(const BundleAtlas& b, ComassMode mode = ComassMode::Full, int resolution = 2);

/// Sampled comass of the connection form (in the chart picked at each point),
/// optionally restricted to points satisfying `where`.
ComassReport form_comass(const BundleAtlas& b, ComassMode mode, int resolution,
                         const std::function<bool(const Point&)>& where = {});

double chern_number_c1(const BundleAtlas& b, int resolution = 2);

// Families.
BundleAtlas make_trivial(const Manifold& base, int rank);
BundleAtlas make_monopole(int k, double scale = 1.0);
/// Line bundle of Chern number c on the flat torus with constant curvature.
BundleAtlas make_torus_line(double l1, double l2, int c = 1);
/// Abelian bundle on a 2-ball with constant curvature i*field.
BundleAtlas make_constant_field_ball(double radius, double field);
/// Trivial line bundle on a circle with connection i*theta/length dt.
BundleAtlas make_flat_circle(double length, double theta);

/// Adds a smooth random form whose extra curvature comass is about
/// 0.95 * amplitude. `scale_override` skips the scale search.
BundleAtlas perturb(const BundleAtlas& b, std::uint64_t seed, double amplitude, double scale_override = -1.0);

BundleAtlas direct_sum(const BundleAtlas& a, const BundleAtlas& b);

struct SmoothMap {
    std::string tag;
    Manifold source = Manifold::sphere();
    Manifold target = Manifold::sphere();
    std::function<Point(const Point&)> f;
    std::function<Vec(const Point&, const Vec&)> df;
    /// Row k: target lattice combination hit by source lattice column k.
    Eigen::MatrixXi lattice_map;
    /// Operator-norm bound of df.
    double lipschitz = 1.0;
    int degree = 1;
    nlohmann::json params;
};

SmoothMap map_identity(const Manifold& m);
SmoothMap map_project_base(const Manifold& product);
SmoothMap map_project_circle(const Manifold& product);
SmoothMap map_include_slice(const Manifold& product, double t);
SmoothMap map_include_fiber(const Manifold& product, const Point& x);
/// d^2-sheeted cover T(d l1, d l2) -> T(l1, l2).
SmoothMap map_torus_cover(double l1, double l2, int d);
/// d-sheeted cover S^1(d L) -> S^1(L).
SmoothMap map_circle_cover(double length, int d);

BundleAtlas pullback(const BundleAtlas& b, const SmoothMap& f);
BundleAtlas pushforward_cover(const BundleAtlas& up, const SmoothMap& cover);

/// Max compatibility defect |A_j - (g^-1 dg + g^-1 A_i g)| on sampled overlaps
/// and across deck transitions.
double compatibility_defect(const BundleAtlas& b, int resolution = 2);
/// Max cocycle defect on sampled triple overlaps.
double cocycle_defect(const BundleAtlas& b, int resolution = 2);

nlohmann::json bundle_to_json(const BundleAtlas& b);
BundleAtlas bundle_from_json(const nlohmann::json& j);

}  // namespace gaugelab
