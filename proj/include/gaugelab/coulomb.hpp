#pragma once

// Discrete exterior calculus on closed triangulated surfaces, the constant
// lambda (sup of |a| / |da| over coclosed one-forms) and Coulomb gauge fixing.
//
// A 1-cochain holds the integral of a u(m)-valued form along each edge
// (oriented from the lower to the higher vertex index); a 2-cochain holds
// face integrals in the face orientation.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Sparse>

#include "json.hpp"

#include "gaugelab/mesh.hpp"
#include "gaugelab/ucalc.hpp"

namespace gaugelab {

using SpMat = Eigen::SparseMatrix<double>;

struct MatrixCochain {
    int degree = 1;
    int m = 1;
    std::vector<CMat> values;

    static MatrixCochain zeros(int degree, int m, int count);
    int size() const { return static_cast<int>(values.size()); }
    /// Throws PreconditionViolated unless every value is an anti-Hermitian m x m matrix.
    void validate() const;
    MatrixCochain operator+(const MatrixCochain& o) const;
    MatrixCochain operator-(const MatrixCochain& o) const;
    MatrixCochain operator*(double s) const;
    /// Max op norm over all values.
    double max_norm() const;
};

class LaplaceSolver;

struct DecOperators {
    std::shared_ptr<const SimplicialComplex> mesh;
    SpMat d0;      ///< edges x vertices
    SpMat d1;      ///< faces x edges
    Vec star0;     ///< dual vertex areas
    Vec star1;     ///< dual / primal edge length ratios
    Vec star2;     ///< 1 / face area
    Vec edge_length;
    Vec face_area;
    std::shared_ptr<const LaplaceSolver> laplace;
};

DecOperators dec_operators(const SimplicialComplex& k);

MatrixCochain exterior_d(const DecOperators& ops, const MatrixCochain& a);
/// Adjoint of d under the diagonal Hodge inner products (degree 1 -> 0, 2 -> 1).
MatrixCochain codifferential(const DecOperators& ops, const MatrixCochain& a);
/// Max of |value|_op / edge length (degree 1), / face area (degree 2), raw (degree 0).
double cochain_comass(const DecOperators& ops, const MatrixCochain& a);

/// Antisymmetrized primal cup product of two 1-cochains.
MatrixCochain wedge(const DecOperators& ops, const MatrixCochain& a, const MatrixCochain& b);
/// dA + A ^ A.
MatrixCochain discrete_curvature(const DecOperators& ops, const MatrixCochain& a);
/// -log of the face holonomy of the link variables exp(A_e); gauge covariant.
MatrixCochain plaquette_curvature(const DecOperators& ops, const MatrixCochain& a);
/// Link action A_e -> log(g_i^-1 exp(A_e) g_j) for the edge i -> j.
MatrixCochain gauge_action(const DecOperators& ops, const MatrixCochain& a, const std::vector<CMat>& g);

/// Lowest nonzero eigenvalue of the scalar Laplacian (dense generalized problem).
double laplacian_first_eigenvalue(const DecOperators& ops);

/// First Betti number from the Euler characteristic of a connected closed
/// orientable complex (dimension of the discrete harmonic 1-forms).
int harmonic_dimension(const SimplicialComplex& k);

struct LambdaEstimate {
    double value = 0;
    int level = 0;
    /// Relative change to the previous level; NaN when no previous level.
    double delta = 0;
    int argmax_edge = -1;
    nlohmann::json to_json() const;
};

/// Exact sup of the discrete comass ratio |a| / |da| over coclosed 1-cochains.
LambdaEstimate lambda_estimate(const DecOperators& ops, const LambdaEstimate* previous = nullptr);

struct CoulombResult {
    MatrixCochain u;  ///< degree 0, the gauge is exp(u)
    MatrixCochain a;  ///< gauged 1-cochain
    double residual = 0;
    int iterations = 0;
};

/// |d^* A| max op norm.
double coclosed_residual(const DecOperators& ops, const MatrixCochain& a);

CoulombResult coulomb_project_abelian(const DecOperators& ops, const MatrixCochain& a);

struct CoulombConfig {
    /// Reject inputs whose comass exceeds this; negative disables the gate.
    double gate = -1.0;
    int max_iterations = 30;
    double tolerance = 1e-11;
    /// Initial gauge (degree 0 cochain of log g); empty means identity.
    std::optional<MatrixCochain> start;
};

CoulombResult coulomb_project(const DecOperators& ops, const MatrixCochain& a, const CoulombConfig& cfg = {});

struct CoclosedBoundReport {
    double a_norm = 0;
    double da_norm = 0;
    double curvature = 0;
    double lambda = 0;
    double residual = 0;
    bool hypothesis_met = false;
    double ratio_a = 0;   ///< |A| / (2 lambda |R|)
    double ratio_da = 0;  ///< |dA| / (2 |R|)
    double slack_used = 0;
    bool pass = false;
    nlohmann::json to_json() const;
};

CoclosedBoundReport coclosed_bound_check(const DecOperators& ops, const MatrixCochain& a, const LambdaEstimate& lambda,
                                        double slack = 0.1);

/// Smooth random coclosed 1-cochain: the codifferential of a random smooth
/// u(m)-valued face potential (harmonics of degree <= 3), scaled to `comass`.
MatrixCochain random_coclosed(const DecOperators& ops, int m, std::uint64_t seed, double comass);

}  // namespace gaugelab
