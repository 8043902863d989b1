#include "gaugelab/ucalc.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "gaugelab/error.hpp"

namespace gaugelab {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonUniqueGeodesic: return "NonUniqueGeodesic";
        case ErrorKind::UnsupportedGeometry: return "UnsupportedGeometry";
        case ErrorKind::OutsideLogDomain: return "OutsideLogDomain";
        case ErrorKind::PreconditionViolated: return "PreconditionViolated";
        case ErrorKind::DriftTooLarge: return "DriftTooLarge";
        case ErrorKind::ChartDomainError: return "ChartDomainError";
        case ErrorKind::StepTooCoarse: return "StepTooCoarse";
        case ErrorKind::RankNotOne: return "RankNotOne";
        case ErrorKind::FluxTooLarge: return "FluxTooLarge";
        case ErrorKind::UnsupportedCover: return "UnsupportedCover";
        case ErrorKind::BaseMismatch: return "BaseMismatch";
        case ErrorKind::UnsupportedMap: return "UnsupportedMap";
        case ErrorKind::NonClosedSurface: return "NonClosedSurface";
        case ErrorKind::RadiusTooLarge: return "RadiusTooLarge";
        case ErrorKind::CurvatureTooLarge: return "CurvatureTooLarge";
        case ErrorKind::LogDomainError: return "LogDomainError";
        case ErrorKind::PlanProfileInvalid: return "PlanProfileInvalid";
        case ErrorKind::GaugeNotCertified: return "GaugeNotCertified";
        case ErrorKind::CoverageMismatch: return "CoverageMismatch";
        case ErrorKind::InvalidComplex: return "InvalidComplex";
        case ErrorKind::NonzeroFirstCohomology: return "NonzeroFirstCohomology";
        case ErrorKind::SolverFailure: return "SolverFailure";
        case ErrorKind::NewtonDiverged: return "NewtonDiverged";
        case ErrorKind::HypothesisNotMet: return "HypothesisNotMet";
        case ErrorKind::UnknownScenario: return "UnknownScenario";
        case ErrorKind::OptimizerStalled: return "OptimizerStalled";
        case ErrorKind::SchemaError: return "SchemaError";
    }
    return "Unknown";
}

double op_norm(const CMat& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<CMat> svd(m);
    return svd.singularValues()(0);
}

AntiHermitian::AntiHermitian(const CMat& m) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::PreconditionViolated, "AntiHermitian: not square");
    CMat skew = 0.5 * (m - m.adjoint());
    const double herm = op_norm(0.5 * (m + m.adjoint()));
    if (herm > 1e-8 * std::max(1.0, op_norm(m)))
        throw Error(ErrorKind::DriftTooLarge, "AntiHermitian: Hermitian part " + std::to_string(herm));
    m_ = std::move(skew);
}

AntiHermitian AntiHermitian::zero(int rank) { return trusted(CMat::Zero(rank, rank)); }

AntiHermitian AntiHermitian::trusted(const CMat& m) {
    AntiHermitian a;
    a.m_ = 0.5 * (m - m.adjoint());
    return a;
}

double unitarity_defect(const CMat& m) {
    return op_norm(m.adjoint() * m - CMat::Identity(m.rows(), m.cols()));
}

CMat polar_unitary(const CMat& m) {
    Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

Unitary::Unitary(const CMat& m) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::PreconditionViolated, "Unitary: not square");
    const double defect = unitarity_defect(m);
    if (defect > 1e-10) throw Error(ErrorKind::DriftTooLarge, "Unitary: defect " + std::to_string(defect));
    m_ = defect > 1e-12 ? polar_unitary(m) : m;
}

Unitary Unitary::identity(int rank) { return Unitary(CMat::Identity(rank, rank)); }

Unitary Unitary::inverse() const {
    Unitary u;
    u.m_ = m_.adjoint();
    return u;
}

Unitary Unitary::operator*(const Unitary& o) const {
    Unitary u;
    u.m_ = m_ * o.m_;
    if (unitarity_defect(u.m_) > 1e-12) u.m_ = polar_unitary(u.m_);
    return u;
}

CMat expm_skew(const CMat& a) {
    const auto n = a.rows();
    if (n == 1) {
        CMat r(1, 1);
        r(0, 0) = std::exp(cplx(0.0, a(0, 0).imag()));
        return r;
    }
    if (n == 2) {
        // a = (tr/2) Id + b with b traceless skew-Hermitian, b^2 = -|b|^2 Id.
        const cplx half_trace = 0.5 * (a(0, 0) + a(1, 1));
        CMat b = a;
        b(0, 0) -= half_trace;
        b(1, 1) -= half_trace;
        const double theta2 = std::max(0.0, std::norm(b(0, 0)) + std::norm(b(0, 1)));
        const double theta = std::sqrt(theta2);
        const double sinc = theta < 1e-8 ? 1.0 - theta2 / 6.0 : std::sin(theta) / theta;
        CMat r = std::cos(theta) * CMat::Identity(2, 2) + sinc * b;
        return std::exp(cplx(0.0, half_trace.imag())) * r;
    }
    CMat r = a.exp();
    if (unitarity_defect(r) > 1e-12) r = polar_unitary(r);
    return r;
}

Unitary u_exp(const AntiHermitian& a) { return Unitary(expm_skew(a.matrix())); }

CMat logm_unitary(const CMat& u) {
    const auto n = u.rows();
    if (n == 1) {
        CMat r(1, 1);
        r(0, 0) = cplx(0.0, std::arg(u(0, 0)));
        return r;
    }
    Eigen::ComplexSchur<CMat> schur(u);
    const CMat& t = schur.matrixT();
    const CMat& q = schur.matrixU();
    CMat d = CMat::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) d(k, k) = cplx(0.0, std::arg(t(k, k)));
    CMat r = q * d * q.adjoint();
    return 0.5 * (r - r.adjoint());
}

double log_domain_radius() { return 2.0 * std::sin(0.25); }

AntiHermitian u_log(const Unitary& u) {
    const CMat& m = u.matrix();
    const double dist = op_norm(m - CMat::Identity(m.rows(), m.cols()));
    if (!(dist < log_domain_radius()))
        throw Error(ErrorKind::OutsideLogDomain, "|U - Id| = " + std::to_string(dist) + " >= 2 sin(1/4)");
    return AntiHermitian::trusted(logm_unitary(m));
}

DexpReport dexp_bounds_check(const AntiHermitian& a, const AntiHermitian& direction) {
    DexpReport rep;
    rep.norm_a = a.norm();
    if (!(rep.norm_a < 0.5))
        throw Error(ErrorKind::PreconditionViolated, "dexp bounds need |A| < 1/2");
    const double h = 1e-5;
    const CMat& x = direction.matrix();
    const double xn = op_norm(x);
    if (xn == 0.0) throw Error(ErrorKind::PreconditionViolated, "zero direction");
    const CMat d = (expm_skew(a.matrix() + h * x) - expm_skew(a.matrix() - h * x)) / (2.0 * h);
    rep.deviation = op_norm(d - x) / xn;
    rep.deviation_bound = std::exp(rep.norm_a) - 1.0;
    rep.inverse_ratio = xn / op_norm(d);
    rep.inverse_bound = 1.0 / (2.0 - std::exp(rep.norm_a));
    rep.pass = rep.deviation <= rep.deviation_bound + 1e-4 && rep.inverse_ratio <= rep.inverse_bound + 1e-4;
    return rep;
}

namespace {
// Orthonormal basis element k of u(m) under Re tr(X^dagger Y).
CMat skew_basis(int k, int m) {
    CMat b = CMat::Zero(m, m);
    if (k < m) {
        b(k, k) = cplx(0, 1);
        return b;
    }
    int idx = m;
    const double s = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            if (idx == k) {
                b(i, j) = s;
                b(j, i) = -s;
                return b;
            }
            if (idx + 1 == k) {
                b(i, j) = cplx(0, s);
                b(j, i) = cplx(0, s);
                return b;
            }
            idx += 2;
        }
    }
    return b;
}
}  // namespace

Vec skew_to_coords(const CMat& a) {
    const int m = static_cast<int>(a.rows());
    Vec c(m * m);
    for (int k = 0; k < m * m; ++k) c(k) = (skew_basis(k, m).adjoint() * a).trace().real();
    return c;
}

CMat coords_to_skew(const Vec& c, int rank) {
    CMat a = CMat::Zero(rank, rank);
    for (int k = 0; k < rank * rank; ++k) a += c(k) * skew_basis(k, rank);
    return a;
}

}  // namespace gaugelab
