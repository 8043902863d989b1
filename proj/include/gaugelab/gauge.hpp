#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaugelab/bundle.hpp"
#include "gaugelab/transport.hpp"

namespace gaugelab {

struct Certificate {
    std::string theorem;
    double bound = 0;
    double measured = 0;
    double slack = 0;
    bool holds() const { return measured <= bound + slack; }
    nlohmann::json to_json() const;
};

/// Per-chart frame changes s_c: the new frame is (old frame of chart c) * s_c.
struct GaugeTrivialization {
    int rank = 1;
    std::vector<GaugeFn> gauges;
    /// Where the gauge is defined; empty means everywhere.
    std::function<bool(const Point&)> domain;
    /// Comass of the gauged connection form on the domain.
    ComassReport achieved;
    std::optional<Certificate> certificate;
    nlohmann::json diagnostics = nlohmann::json::object();

    static GaugeTrivialization identity(const BundleAtlas& b);
    static GaugeTrivialization constant(const BundleAtlas& b, const CMat& u);
};

/// Forms s^-1 ds + s^-1 A s, transitions s_i^-1 g_ij s_j. Chart domains are
/// restricted to the gauge domain.
BundleAtlas apply_gauge(const BundleAtlas& b, const GaugeTrivialization& g);

/// Cutoff that is 0 for x <= a and 1 for x >= b: a linear ramp with C^2
/// corners whose slope never exceeds 1/(b - a) + eps.
struct CutoffRamp {
    double a = 0, b = 1, eps = 0.05;
    double eta = 0, slope = 1;
    CutoffRamp() = default;
    CutoffRamp(double a, double b, double eps);
    double operator()(double x) const;
    double derivative(double x) const;
};

/// C(r): r/2 in flat space, s tan(r / 2s) on the sphere of radius s.
double exponential_gauge_constant(const Manifold& m, double r);

struct ExpGaugeConfig {
    int resolution = 2;
    /// Steps per radial transport (Magnus order 4).
    int steps = 48;
    int boundary_ring = 64;
};

/// Radial parallel transport from `center` over B_r(center).
GaugeTrivialization exponential_gauge(const BundleAtlas& b, const Point& center, double r,
                                      const ExpGaugeConfig& cfg = {});

/// Comass of the gauged form at one point (max over unit tangent vectors).
double gauged_form_comass_at(const BundleAtlas& gauged, const Point& p, ComassMode mode = ComassMode::Full);

struct SphereGluingConfig {
    double epsilon = 0.05;
    int curvature_resolution = 3;
    int measure_resolution = 3;
    int steps = 48;
    bool run_checks = true;
};

struct SphereGluingResult {
    GaugeTrivialization gauge;
    BundleAtlas trivialized;
    double curvature_comass = 0;
    double g12_defect = 0;       ///< max |g12 - Id| on the overlap samples
    double log_g12 = 0;          ///< max |log g12|
    double dg12 = 0;             ///< max |dg12|
    double chart_form = 0;       ///< max |A_i| of the radial gauges
    double dalpha = 0;           ///< max |d alpha_2|
    double gluing_mismatch = 0;  ///< max |Phi_1 - Phi_2| where the cutoff is 1
    double cutoff_slope = 0;
    nlohmann::json checks = nlohmann::json::array();
    bool checks_pass = true;
};

/// Two-chart trivialization of a bundle over the unit 2-sphere, or fiberwise
/// over S^2 x S^1 (paths constant in the circle factor).
SphereGluingResult sphere_two_chart_trivialize(const BundleAtlas& b, const SphereGluingConfig& cfg = {});

struct ProductTrivialization {
    SphereGluingResult glued;
    /// Reference connection form on the slice {x1} x S^1 (rank x rank per t).
    std::function<CMat(double)> reference_form;
    CMat original_fiber_holonomy;
    CMat reference_holonomy;
    double tangent_curvature = 0;
    double tangent_difference = 0;
    Certificate certificate;
};

ProductTrivialization product_trivialize(const BundleAtlas& b, const SphereGluingConfig& cfg = {});

struct FlattenPlan {
    Point center;
    double delta = 0.2;
    std::function<double(double)> h;  ///< cutoff as a function of the distance to the center
    SmoothMap retraction;
    double dh_norm = 0;
    double df_norm = 0;
    double c = 0;  ///< C from the exponential gauge at radius 3 delta
    double constant = 0;
};

/// Plan for N = {center}. `eps` is the corner allowance of the h ramp.
FlattenPlan make_flatten_plan(const Manifold& m, const Point& center, double delta, double eps = 0.05);
/// Throws PlanProfileInvalid unless h = 0 on B_delta and h = 1 on [2 delta, 3 delta).
void validate_plan(const FlattenPlan& plan);

/// Connection equal to Phi^* d + h A_Phi on the tube and f^* nabla outside.
/// Chart 0 is the tube; charts 1.. are the original ones outside B_{2 delta}.
BundleAtlas relative_flatten(const BundleAtlas& b, const FlattenPlan& plan, const GaugeTrivialization& inner);

}  // namespace gaugelab
