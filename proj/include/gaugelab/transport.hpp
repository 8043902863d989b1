#pragma once

#include "gaugelab/bundle.hpp"
#include "gaugelab/geometry.hpp"

namespace gaugelab {

enum class Integrator { Midpoint, Magnus4 };

struct TransportConfig {
    /// Target step length along the path.
    double step = 0.02;
    Integrator order = Integrator::Midpoint;
    /// Compare against a run with 4x the steps and return the finer one.
    bool estimate_error = true;
    int min_steps = 4;
    /// When positive, exactly this many steps per segment.
    int fixed_steps = 0;
    double max_error = 1e-4;
};

struct HolonomyResult {
    CMat matrix;
    double length = 0;
    double error_estimate = 0;
    int start_chart = 0;
    int end_chart = 0;
};

/// Solves P' = -A(c') P. The matrix maps fiber coordinates at the start
/// (in `start_chart`, chosen by quality when negative) to coordinates at
/// the end (in the returned end chart).
HolonomyResult parallel_transport(const BundleAtlas& b, const PathCurve& path, const TransportConfig& cfg = {},
                                  int start_chart = -1);

/// Transport re-expressed in the requested charts at both ends.
CMat transport_between(const BundleAtlas& b, const PathCurve& path, int from_chart, int to_chart,
                       const TransportConfig& cfg = {}, double* error = nullptr);

/// Holonomy of a loop that closes on the base (possibly after deck
/// translations in the lift), in the chart of highest quality at the start.
HolonomyResult holonomy(const BundleAtlas& b, const PathCurve& loop, const TransportConfig& cfg = {});

struct AreaCheckReport {
    double holonomy_defect = 0;  ///< |P - Id|
    double area = 0;
    double curvature_comass = 0;  ///< sup of |R| over the disc samples
    double bound = 0;             ///< area * comass
    double slack = 0;
    double error_estimate = 0;
    bool pass = false;
};

AreaCheckReport holonomy_area_check(const BundleAtlas& b, const DiscHomotopy& disc, const TransportConfig& cfg = {});

struct SineCheckReport {
    double max_violation = 0;  ///< max over s of |P_s - Id| - 2 sin(|R| area_s / 2)
    double max_ratio = 0;      ///< max over s of |P_s - Id| / (2 sin(...)) where defined
    double curvature_comass = 0;
    std::vector<double> areas;
    std::vector<double> defects;
    std::vector<double> bounds;
    double error_estimate = 0;
    bool pass = false;
};

SineCheckReport abelian_sine_check(const BundleAtlas& b, const DiscHomotopy& disc, const TransportConfig& cfg = {},
                                   int s_samples = 8);

/// exp(-\iint R(d_s c, d_t c)) by Gauss quadrature on `cells` x `cells`.
CMat abelian_flux_holonomy(const BundleAtlas& b, const DiscHomotopy& disc, int cells = 0);

}  // namespace gaugelab
