#pragma once

// Calculus on U(m) and u(m): operator norms, exponential, principal
// logarithm and the quantitative bounds on d exp near the identity.

#include <Eigen/Dense>
#include <complex>

namespace gaugelab {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Largest singular value.
double op_norm(const CMat& m);

/// Skew-Hermitian matrix. Construction symmetrizes (M - M^dagger)/2; an input
/// whose Hermitian part exceeds 1e-8 (relative to max(1, |M|)) is rejected.
class AntiHermitian {
public:
    AntiHermitian() = default;
    explicit AntiHermitian(const CMat& m);
    static AntiHermitian zero(int rank);
    /// Skips the drift check; used for values produced by exact algebra.
    static AntiHermitian trusted(const CMat& m);

    const CMat& matrix() const { return m_; }
    int rank() const { return static_cast<int>(m_.rows()); }
    double norm() const { return op_norm(m_); }

private:
    CMat m_;
};

/// Unitary matrix. U^dagger U = Id within 1e-10 is required; drift above 1e-12
/// is removed by polar projection.
class Unitary {
public:
    Unitary() = default;
    explicit Unitary(const CMat& m);
    static Unitary identity(int rank);

    const CMat& matrix() const { return m_; }
    int rank() const { return static_cast<int>(m_.rows()); }
    Unitary inverse() const;
    Unitary operator*(const Unitary& o) const;

private:
    CMat m_;
};

/// Nearest unitary (polar factor).
CMat polar_unitary(const CMat& m);

/// Unitarity defect |U^dagger U - Id|_op.
double unitarity_defect(const CMat& m);

/// Matrix exponential of a skew-Hermitian matrix. Ranks 1 and 2 use closed
/// forms; larger ranks use scaling-and-squaring with a Pade approximant.
CMat expm_skew(const CMat& a);

Unitary u_exp(const AntiHermitian& a);

/// Principal logarithm, restricted to |U - Id| < 2 sin(1/4), so that
/// |log U| < 1/2. Throws OutsideLogDomain otherwise.
AntiHermitian u_log(const Unitary& u);

/// Principal logarithm of a unitary with no eigenvalue at -1; no domain gate.
CMat logm_unitary(const CMat& u);

/// 2 sin(1/4): radius of the log chart around the identity.
double log_domain_radius();

struct DexpReport {
    double norm_a = 0;
    double deviation = 0;        // |d exp_A(X) - X| / |X|
    double deviation_bound = 0;  // e^{|A|} - 1
    double inverse_ratio = 0;    // |X| / |d exp_A(X)|
    double inverse_bound = 0;    // 1 / (2 - e^{|A|})
    bool pass = false;
};

/// Central finite differences (step 1e-5) of exp at A in the given direction,
/// compared with the bounds for |A| < 1/2 (slack 1e-4).
DexpReport dexp_bounds_check(const AntiHermitian& a, const AntiHermitian& direction);

/// Real coordinates of u(m) in an orthonormal basis (Frobenius); m^2 entries.
Vec skew_to_coords(const CMat& a);
CMat coords_to_skew(const Vec& c, int rank);

}  // namespace gaugelab
