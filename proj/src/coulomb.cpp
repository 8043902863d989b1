#include "gaugelab/coulomb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "gaugelab/error.hpp"

namespace gaugelab {

// Scalar Laplacian d0^T *1 d0 with vertex 0 grounded.
class LaplaceSolver {
public:
    LaplaceSolver(const SpMat& lap, const Vec& mass) : mass_(mass), n_(static_cast<int>(lap.rows())) {
        SpMat red = lap.bottomRightCorner(n_ - 1, n_ - 1);
        llt_.compute(red);
        if (llt_.info() != Eigen::Success) throw Error(ErrorKind::SolverFailure, "Laplacian factorization failed");
    }
    // Mean-zero (mass weighted) solution of L x = rhs, columns at once.
    Mat solve(const Mat& rhs) const {
        Mat x = Mat::Zero(n_, rhs.cols());
        x.bottomRows(n_ - 1) = llt_.solve(rhs.bottomRows(n_ - 1));
        if (llt_.info() != Eigen::Success) throw Error(ErrorKind::SolverFailure, "Laplacian solve failed");
        const double total = mass_.sum();
        for (int c = 0; c < x.cols(); ++c) x.col(c).array() -= mass_.dot(x.col(c)) / total;
        return x;
    }

private:
    Eigen::SimplicialLDLT<SpMat> llt_;
    Vec mass_;
    int n_;
};

namespace {

CMat skew(const CMat& m) { return 0.5 * (m - m.adjoint()); }

double cot_at(const Eigen::Vector3d& apex, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    const Eigen::Vector3d u = a - apex, v = b - apex;
    const double cr = u.cross(v).norm();
    return u.dot(v) / cr;
}

Eigen::Vector3d lift3(const Vec& v) {
    Eigen::Vector3d out = Eigen::Vector3d::Zero();
    out.head(v.size()) = v;
    return out;
}

}  // namespace

MatrixCochain MatrixCochain::zeros(int degree, int m, int count) {
    MatrixCochain c;
    c.degree = degree;
    c.m = m;
    c.values.assign(count, CMat::Zero(m, m));
    return c;
}

void MatrixCochain::validate() const {
    if (degree < 0 || degree > 2) throw Error(ErrorKind::PreconditionViolated, "cochain degree must be 0, 1 or 2");
    for (const auto& v : values) {
        if (v.rows() != m || v.cols() != m) throw Error(ErrorKind::PreconditionViolated, "cochain value has wrong size");
        if ((v + v.adjoint()).norm() > 1e-8 * std::max(1.0, v.norm()))
            throw Error(ErrorKind::PreconditionViolated, "cochain value is not anti-Hermitian");
    }
}

MatrixCochain MatrixCochain::operator+(const MatrixCochain& o) const {
    MatrixCochain r = *this;
    for (int i = 0; i < size(); ++i) r.values[i] += o.values[i];
    return r;
}
MatrixCochain MatrixCochain::operator-(const MatrixCochain& o) const {
    MatrixCochain r = *this;
    for (int i = 0; i < size(); ++i) r.values[i] -= o.values[i];
    return r;
}
MatrixCochain MatrixCochain::operator*(double s) const {
    MatrixCochain r = *this;
    for (auto& v : r.values) v *= s;
    return r;
}
double MatrixCochain::max_norm() const {
    double n = 0;
    for (const auto& v : values) n = std::max(n, op_norm(v));
    return n;
}

int harmonic_dimension(const SimplicialComplex& k) { return 2 - k.euler_characteristic(); }

DecOperators dec_operators(const SimplicialComplex& k) {
    validate_complex(k);
    DecOperators ops;
    ops.mesh = std::make_shared<const SimplicialComplex>(k);
    const int nv = static_cast<int>(k.vertices.size());
    const int ne = static_cast<int>(k.edges.size());
    const int nf = static_cast<int>(k.faces.size());
    const bool sphere = k.surface.kind() == ManifoldKind::RoundSphere2;

    std::vector<Eigen::Triplet<double>> t0, t1;
    for (int e = 0; e < ne; ++e) {
        t0.emplace_back(e, k.edges[e][0], -1.0);
        t0.emplace_back(e, k.edges[e][1], 1.0);
    }
    for (int f = 0; f < nf; ++f)
        for (int i = 0; i < 3; ++i) t1.emplace_back(f, k.face_edges[f][i], k.face_edge_signs[f][i]);
    ops.d0.resize(ne, nv);
    ops.d0.setFromTriplets(t0.begin(), t0.end());
    ops.d1.resize(nf, ne);
    ops.d1.setFromTriplets(t1.begin(), t1.end());

    ops.edge_length.resize(ne);
    for (int e = 0; e < ne; ++e) {
        if (sphere) {
            const Vec& a = k.vertices[k.edges[e][0]];
            const Vec& b = k.vertices[k.edges[e][1]];
            ops.edge_length(e) = k.surface.distance(a, b);
        } else {
            ops.edge_length(e) = k.edge_vector(e).norm();
        }
    }
    ops.face_area.resize(nf);
    ops.star0 = Vec::Zero(nv);
    ops.star1 = Vec::Zero(ne);
    for (int f = 0; f < nf; ++f) {
        const auto& c = k.face_corners[f];
        const Eigen::Vector3d p0 = lift3(c[0]), p1 = lift3(c[1]), p2 = lift3(c[2]);
        ops.face_area(f) = sphere ? triangle_area(k.surface, c[0], c[1], c[2]).area : 0.5 * (p1 - p0).cross(p2 - p0).norm();
        for (int i = 0; i < 3; ++i) ops.star0(k.faces[f][i]) += ops.face_area(f) / 3.0;
        // edge (v_i, v_{i+1}) sees the angle at v_{i+2}
        const std::array<Eigen::Vector3d, 3> p{p0, p1, p2};
        for (int i = 0; i < 3; ++i)
            ops.star1(k.face_edges[f][i]) += 0.5 * cot_at(p[(i + 2) % 3], p[i], p[(i + 1) % 3]);
    }
    ops.star2 = ops.face_area.cwiseInverse();

    SpMat lap = ops.d0.transpose() * ops.star1.asDiagonal() * ops.d0;
    ops.laplace = std::make_shared<const LaplaceSolver>(lap, ops.star0);
    return ops;
}

namespace {

void check_degree(const DecOperators& ops, const MatrixCochain& a, int degree) {
    if (a.degree != degree) throw Error(ErrorKind::PreconditionViolated, "cochain has the wrong degree");
    const auto& k = *ops.mesh;
    const std::size_t want = degree == 0 ? k.vertices.size() : degree == 1 ? k.edges.size() : k.faces.size();
    if (a.values.size() != want) throw Error(ErrorKind::PreconditionViolated, "cochain size does not match the mesh");
}

MatrixCochain apply_sparse(const SpMat& op, const MatrixCochain& a, int degree) {
    MatrixCochain out = MatrixCochain::zeros(degree, a.m, static_cast<int>(op.rows()));
    for (int c = 0; c < op.outerSize(); ++c)
        for (SpMat::InnerIterator it(op, c); it; ++it) out.values[it.row()] += it.value() * a.values[it.col()];
    return out;
}

}  // namespace

MatrixCochain exterior_d(const DecOperators& ops, const MatrixCochain& a) {
    if (a.degree == 0) {
        check_degree(ops, a, 0);
        return apply_sparse(ops.d0, a, 1);
    }
    if (a.degree == 1) {
        check_degree(ops, a, 1);
        return apply_sparse(ops.d1, a, 2);
    }
    return MatrixCochain::zeros(3, a.m, 0);
}

MatrixCochain codifferential(const DecOperators& ops, const MatrixCochain& a) {
    if (a.degree == 1) {
        check_degree(ops, a, 1);
        MatrixCochain w = a;
        for (int e = 0; e < w.size(); ++e) w.values[e] *= ops.star1(e);
        MatrixCochain out = apply_sparse(SpMat(ops.d0.transpose()), w, 0);
        for (int v = 0; v < out.size(); ++v) out.values[v] /= ops.star0(v);
        return out;
    }
    if (a.degree == 2) {
        check_degree(ops, a, 2);
        MatrixCochain w = a;
        for (int f = 0; f < w.size(); ++f) w.values[f] *= ops.star2(f);
        MatrixCochain out = apply_sparse(SpMat(ops.d1.transpose()), w, 1);
        for (int e = 0; e < out.size(); ++e) out.values[e] /= ops.star1(e);
        return out;
    }
    throw Error(ErrorKind::PreconditionViolated, "codifferential of a 0-cochain");
}

double cochain_comass(const DecOperators& ops, const MatrixCochain& a) {
    double best = 0;
    for (int i = 0; i < a.size(); ++i) {
        double w = 1.0;
        if (a.degree == 1) w = ops.edge_length(i);
        if (a.degree == 2) w = ops.face_area(i);
        best = std::max(best, op_norm(a.values[i]) / w);
    }
    return best;
}

namespace {

// Value of a 1-cochain on the oriented edge from corner i to corner j of face f.
CMat oriented(const SimplicialComplex& k, const MatrixCochain& a, int f, int i) {
    const int e = k.face_edges[f][i];
    return static_cast<double>(k.face_edge_signs[f][i]) * a.values[e];
}

}  // namespace

MatrixCochain wedge(const DecOperators& ops, const MatrixCochain& a, const MatrixCochain& b) {
    check_degree(ops, a, 1);
    check_degree(ops, b, 1);
    const auto& k = *ops.mesh;
    MatrixCochain out = MatrixCochain::zeros(2, a.m, static_cast<int>(k.faces.size()));
    for (int f = 0; f < out.size(); ++f) {
        // x_i: value on the edge v_i -> v_{i+1}.
        std::array<CMat, 3> x, y;
        for (int i = 0; i < 3; ++i) {
            x[i] = oriented(k, a, f, i);
            y[i] = oriented(k, b, f, i);
        }
        // Cup [v0 v1 v2]: a(v0 v1) b(v1 v2), averaged over the six vertex orders with sign.
        // Even orders are the rotations; odd orders run the boundary backwards.
        CMat s = CMat::Zero(a.m, a.m);
        for (int r = 0; r < 3; ++r) {
            s += x[r] * y[(r + 1) % 3];
            s -= (-x[(r + 1) % 3]) * (-y[r]);
        }
        out.values[f] = s / 6.0;
    }
    return out;
}

MatrixCochain discrete_curvature(const DecOperators& ops, const MatrixCochain& a) {
    return exterior_d(ops, a) + wedge(ops, a, a);
}

MatrixCochain plaquette_curvature(const DecOperators& ops, const MatrixCochain& a) {
    check_degree(ops, a, 1);
    const auto& k = *ops.mesh;
    MatrixCochain out = MatrixCochain::zeros(2, a.m, static_cast<int>(k.faces.size()));
    for (int f = 0; f < out.size(); ++f) {
        CMat u = CMat::Identity(a.m, a.m);
        for (int i = 0; i < 3; ++i) u = u * expm_skew(oriented(k, a, f, i));
        out.values[f] = skew(logm_unitary(u));
    }
    return out;
}

MatrixCochain gauge_action(const DecOperators& ops, const MatrixCochain& a, const std::vector<CMat>& g) {
    check_degree(ops, a, 1);
    const auto& k = *ops.mesh;
    if (g.size() != k.vertices.size()) throw Error(ErrorKind::PreconditionViolated, "gauge needs one unitary per vertex");
    MatrixCochain out = a;
    for (int e = 0; e < a.size(); ++e) {
        const auto& ed = k.edges[e];
        const CMat u = g[ed[0]].adjoint() * expm_skew(a.values[e]) * g[ed[1]];
        out.values[e] = skew(logm_unitary(u));
    }
    return out;
}

double laplacian_first_eigenvalue(const DecOperators& ops) {
    const Mat lap = Mat(ops.d0.transpose() * ops.star1.asDiagonal() * ops.d0);
    const Vec s = ops.star0.cwiseSqrt().cwiseInverse();
    const Mat sym = s.asDiagonal() * lap * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::SolverFailure, "eigen solver failed");
    return es.eigenvalues()(1);
}

nlohmann::json LambdaEstimate::to_json() const {
    return {{"value", value},
            {"level", level},
            {"delta", std::isnan(delta) ? nlohmann::json(nullptr) : nlohmann::json(delta)},
            {"argmax_edge", argmax_edge}};
}

LambdaEstimate lambda_estimate(const DecOperators& ops, const LambdaEstimate* previous) {
    const auto& k = *ops.mesh;
    if (harmonic_dimension(k) != 0)
        throw Error(ErrorKind::NonzeroFirstCohomology, "harmonic 1-forms exist, lambda is infinite");
    const int nf = static_cast<int>(k.faces.size());
    const int ne = static_cast<int>(k.edges.size());
    // Coclosed a = *1^-1 d1^T psi, da = S psi with S = d1 *1^-1 d1^T (kernel: constants).
    const SpMat d1w = ops.d1 * ops.star1.cwiseInverse().asDiagonal();
    const SpMat s = d1w * SpMat(ops.d1.transpose());
    const SpMat red = s.bottomRightCorner(nf - 1, nf - 1);
    Eigen::SimplicialLDLT<SpMat> llt(red);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::SolverFailure, "face Laplacian factorization failed");

    // For edge e: a_e / l_e = c . w with w = da, sum w = 0, |w_f| <= A_f.
    // LP duality: max = min_mu sum_f A_f |c_f - mu| (weighted median).
    LambdaEstimate est;
    est.level = k.level;
    const int batch = 256;
    std::vector<int> order(nf);
    for (int e0 = 0; e0 < ne; e0 += batch) {
        const int nb = std::min(batch, ne - e0);
        Mat rhs = Mat::Zero(nf, nb);
        for (int j = 0; j < nb; ++j)
            for (SpMat::InnerIterator it(ops.d1, e0 + j); it; ++it) rhs(it.row(), j) = it.value();
        Mat x = Mat::Zero(nf, nb);
        x.bottomRows(nf - 1) = llt.solve(rhs.bottomRows(nf - 1));
        for (int j = 0; j < nb; ++j) {
            const int e = e0 + j;
            const Vec c = x.col(j) / (ops.edge_length(e) * ops.star1(e));
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int p, int q) { return c(p) < c(q); });
            const double half = 0.5 * ops.face_area.sum();
            double acc = 0, mu = c(order.back());
            for (int f : order) {
                acc += ops.face_area(f);
                if (acc >= half) {
                    mu = c(f);
                    break;
                }
            }
            double val = 0;
            for (int f = 0; f < nf; ++f) val += ops.face_area(f) * std::abs(c(f) - mu);
            if (val > est.value) {
                est.value = val;
                est.argmax_edge = e;
            }
        }
    }
    est.delta = previous ? std::abs(est.value - previous->value) / previous->value
                         : std::numeric_limits<double>::quiet_NaN();
    return est;
}

double coclosed_residual(const DecOperators& ops, const MatrixCochain& a) {
    return codifferential(ops, a).max_norm();
}

namespace {

// Mean-zero v with d^*(a + dv) = 0 for the scalar Laplacian, entrywise.
MatrixCochain poisson_step(const DecOperators& ops, const MatrixCochain& a) {
    const int m = a.m;
    const int nv = static_cast<int>(ops.star0.size());
    MatrixCochain w = a;
    for (int e = 0; e < w.size(); ++e) w.values[e] *= -ops.star1(e);
    const MatrixCochain div = apply_sparse(SpMat(ops.d0.transpose()), w, 0);
    Mat rhs(nv, 2 * m * m);
    for (int v = 0; v < nv; ++v)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                rhs(v, 2 * (i * m + j)) = div.values[v](i, j).real();
                rhs(v, 2 * (i * m + j) + 1) = div.values[v](i, j).imag();
            }
    const Mat sol = ops.laplace->solve(rhs);
    MatrixCochain out = MatrixCochain::zeros(0, m, nv);
    for (int v = 0; v < nv; ++v) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                out.values[v](i, j) = {sol(v, 2 * (i * m + j)), sol(v, 2 * (i * m + j) + 1)};
        out.values[v] = skew(out.values[v]);
    }
    return out;
}

}  // namespace

CoulombResult coulomb_project_abelian(const DecOperators& ops, const MatrixCochain& a) {
    check_degree(ops, a, 1);
    if (a.m != 1) throw Error(ErrorKind::PreconditionViolated, "abelian projection needs rank 1");
    CoulombResult r;
    r.u = poisson_step(ops, a);
    r.a = a + exterior_d(ops, r.u);
    r.residual = coclosed_residual(ops, r.a);
    r.iterations = 1;
    if (!(r.residual < 1e-8)) throw Error(ErrorKind::SolverFailure, "Poisson solve left a large residual");
    return r;
}

CoulombResult coulomb_project(const DecOperators& ops, const MatrixCochain& a, const CoulombConfig& cfg) {
    check_degree(ops, a, 1);
    a.validate();
    if (cfg.gate > 0 && cochain_comass(ops, a) > cfg.gate)
        throw Error(ErrorKind::NewtonDiverged, "input comass outside the solvable neighbourhood");
    const int nv = static_cast<int>(ops.star0.size());
    std::vector<CMat> g(nv, CMat::Identity(a.m, a.m));
    if (cfg.start) {
        check_degree(ops, *cfg.start, 0);
        for (int v = 0; v < nv; ++v) g[v] = expm_skew(cfg.start->values[v]);
    }
    CoulombResult r;
    r.a = gauge_action(ops, a, g);
    r.residual = coclosed_residual(ops, r.a);
    double prev = r.residual;
    int growth = 0;
    // Quasi-Newton: the Jacobian at u = 0 is the scalar Laplacian on each entry.
    while (r.residual > cfg.tolerance) {
        if (r.iterations >= cfg.max_iterations)
            throw Error(ErrorKind::NewtonDiverged, "no convergence within the iteration budget");
        const MatrixCochain v = poisson_step(ops, r.a);
        for (int i = 0; i < nv; ++i) g[i] = g[i] * expm_skew(v.values[i]);
        r.a = gauge_action(ops, a, g);
        r.residual = coclosed_residual(ops, r.a);
        ++r.iterations;
        if (!std::isfinite(r.residual)) throw Error(ErrorKind::NewtonDiverged, "iteration produced non-finite values");
        growth = r.residual > prev ? growth + 1 : 0;
        if (growth >= 3) throw Error(ErrorKind::NewtonDiverged, "residual grew three times in a row");
        prev = r.residual;
    }
    r.u = MatrixCochain::zeros(0, a.m, nv);
    for (int i = 0; i < nv; ++i) r.u.values[i] = skew(logm_unitary(g[i]));
    return r;
}

nlohmann::json CoclosedBoundReport::to_json() const {
    return {{"a_norm", a_norm},       {"da_norm", da_norm},   {"curvature", curvature},
            {"lambda", lambda},       {"residual", residual}, {"hypothesis_met", hypothesis_met},
            {"ratio_a", ratio_a},     {"ratio_da", ratio_da}, {"slack_used", slack_used},
            {"pass", pass}};
}

CoclosedBoundReport coclosed_bound_check(const DecOperators& ops, const MatrixCochain& a, const LambdaEstimate& lambda,
                                        double slack) {
    check_degree(ops, a, 1);
    CoclosedBoundReport r;
    r.lambda = lambda.value;
    r.residual = coclosed_residual(ops, a);
    r.a_norm = cochain_comass(ops, a);
    r.da_norm = cochain_comass(ops, exterior_d(ops, a));
    r.curvature = cochain_comass(ops, discrete_curvature(ops, a));
    const double l = lambda.value;
    r.hypothesis_met = r.residual < 1e-8 && r.a_norm <= 1 / (4 * l) && r.curvature < 1 / (8 * l * l);
    if (r.a_norm == 0) {
        r.pass = true;
        return r;
    }
    r.ratio_a = r.curvature > 0 ? r.a_norm / (2 * l * r.curvature) : std::numeric_limits<double>::infinity();
    r.ratio_da = r.curvature > 0 ? r.da_norm / (2 * r.curvature) : std::numeric_limits<double>::infinity();
    r.slack_used = std::max(0.0, std::max(r.ratio_a, r.ratio_da) - 1.0);
    r.pass = r.ratio_a <= 1 + slack && r.ratio_da <= 1 + slack;
    return r;
}

MatrixCochain random_coclosed(const DecOperators& ops, int m, std::uint64_t seed, double comass) {
    const auto& k = *ops.mesh;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.0, 2 * std::acos(-1.0));
    const int terms = 4;
    std::vector<Vec> omega;
    std::vector<double> phase;
    std::vector<CMat> mats;
    const int amb = k.surface.ambient_dim();
    for (int t = 0; t < terms; ++t) {
        Vec w(amb);
        for (int i = 0; i < amb; ++i) w(i) = nd(rng);
        omega.push_back(3.0 * w / std::max(1.0, w.norm()) / (k.surface.kind() == ManifoldKind::RoundSphere2 ? k.surface.scale() : 1.0));
        phase.push_back(ud(rng));
        CMat g(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) g(i, j) = {nd(rng), nd(rng)};
        const CMat s = skew(g);
        mats.push_back(s / op_norm(s));
    }
    MatrixCochain psi = MatrixCochain::zeros(2, m, static_cast<int>(k.faces.size()));
    for (int f = 0; f < psi.size(); ++f) {
        const auto& c = k.face_corners[f];
        const Vec x = (c[0] + c[1] + c[2]) / 3.0;
        for (int t = 0; t < terms; ++t) psi.values[f] += std::sin(omega[t].dot(x) + phase[t]) * mats[t];
        psi.values[f] *= ops.face_area(f);
    }
    MatrixCochain a = codifferential(ops, psi);
    const double n = cochain_comass(ops, a);
    return n > 0 ? a * (comass / n) : a;
}

}  // namespace gaugelab
