#ifndef SRMUSIC_FOURIER_HPP
#define SRMUSIC_FOURIER_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "srmusic/errors.hpp"
#include "srmusic/torus.hpp"
#include "srmusic/types.hpp"

namespace srmusic
{

///
/// Steering vector phi_L(omega) = (1, e^{-2 pi i omega}, ..., e^{-2 pi i L omega}).
///
template <typename Real = double>
CVector<Real> steering_vector(Real omega, Index L)
{
    if (L < 0) {
        throw InvalidInput("steering_vector: L must be nonnegative");
    }
    CVector<Real> v(L + 1);
    for (Index m = 0; m <= L; ++m) {
        // Reduce m*omega modulo one before scaling so large m keeps full phase accuracy.
        const Real t = std::fmod(static_cast<Real>(m) * omega, Real(1));
        v(m) = std::polar(Real(1), -two_pi<Real> * t);
    }
    return v;
}

///
/// Fourier (Vandermonde) matrix with entry (m, j) = exp(-2 pi i m omega_j),
/// 0 <= m <= M. Every column is steering_vector(omega_j, M).
///
template <typename Real = double>
CMatrix<Real> vandermonde(std::span<const Real> nodes, Index M)
{
    if (M < 1) {
        throw InvalidInput("vandermonde: M must be at least 1");
    }
    CMatrix<Real> phi(M + 1, static_cast<Index>(nodes.size()));
    for (Index j = 0; j < phi.cols(); ++j) {
        phi.col(j) = steering_vector<Real>(nodes[j], M);
    }
    return phi;
}

inline CMatrixXd vandermonde(const SupportSet& omega, Index M)
{
    return vandermonde<double>(omega.points(), M);
}

///
/// Hankel matrix of y with L+1 rows: entry (i, j) = y_{i+j}.
///
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
hankel(const Eigen::MatrixBase<Derived>& y, Index L)
{
    const Index len = y.size();
    if (len < 1 || L < 0 || L > len - 1) {
        throw InvalidInput("hankel: need 0 <= L <= M for a vector of length M+1 (L = " + std::to_string(L) +
                           ", length = " + std::to_string(len) + ")");
    }
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> H(L + 1, len - L);
    for (Index j = 0; j < H.cols(); ++j) {
        H.col(j) = y.segment(j, L + 1);
    }
    return H;
}

/// Singular values in nonincreasing order.
template <typename Derived>
RVector<typename Derived::RealScalar> singular_values(const Eigen::MatrixBase<Derived>& A)
{
    using Plain = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (A.size() == 0) {
        throw InvalidInput("singular_values: empty matrix");
    }
    const Plain dense = A.eval();
    Eigen::BDCSVD<Plain> svd(dense);
    if (svd.info() == Eigen::Success && svd.singularValues().allFinite()) {
        return svd.singularValues();
    }
    // Divide-and-conquer occasionally breaks down on exactly rank-deficient input.
    Eigen::JacobiSVD<Plain> slow(dense);
    if (slow.info() != Eigen::Success || !slow.singularValues().allFinite()) {
        throw NumericalError("SVD failed on " + std::to_string(A.rows()) + "x" + std::to_string(A.cols()) + " matrix");
    }
    return slow.singularValues();
}

template <typename Derived>
typename Derived::RealScalar sigma_min(const Eigen::MatrixBase<Derived>& A)
{
    const auto s = singular_values(A);
    return s(s.size() - 1);
}

template <typename Derived>
typename Derived::RealScalar sigma_max(const Eigen::MatrixBase<Derived>& A)
{
    return singular_values(A)(0);
}

template <typename Derived>
typename Derived::RealScalar spectral_norm(const Eigen::MatrixBase<Derived>& A)
{
    return sigma_max(A);
}

///
/// Split of the left singular vectors of a Hankel matrix into the signal
/// space (top S) and the noise space (the remaining L+1-S).
///
template <typename Real = double>
struct HankelSvd
{
    CMatrix<Real> signal_space;
    CMatrix<Real> noise_space;
    RVector<Real> singular_values;
};

template <typename Derived>
HankelSvd<typename Derived::RealScalar> svd_split(const Eigen::MatrixBase<Derived>& H, Index S)
{
    using Real = typename Derived::RealScalar;
    const Index rows = H.rows();
    const Index cols = H.cols();
    if (S < 0 || S > std::min(rows, cols) || S >= rows) {
        throw InvalidInput("svd_split: need 0 <= S <= min(L+1, M-L+1) and S <= L (S = " + std::to_string(S) +
                           ", H is " + std::to_string(rows) + "x" + std::to_string(cols) + ")");
    }
    const CMatrix<Real> dense = H.template cast<Complex<Real>>().eval();
    const auto trustworthy = [rows](const auto& svd) {
        if (svd.info() != Eigen::Success || !svd.singularValues().allFinite() || !svd.matrixU().allFinite()) {
            return false;
        }
        const CMatrix<Real> gram = svd.matrixU().adjoint() * svd.matrixU();
        const Real tol = std::max(Real(1e-10), Real(100) * Eigen::NumTraits<Real>::epsilon());
        return (gram - CMatrix<Real>::Identity(rows, rows)).cwiseAbs().maxCoeff() <= tol;
    };
    HankelSvd<Real> out;
    const auto fill = [&](const auto& svd) {
        out.signal_space = svd.matrixU().leftCols(S);
        out.noise_space = svd.matrixU().rightCols(rows - S);
        out.singular_values = svd.singularValues();
    };
    Eigen::BDCSVD<CMatrix<Real>> fast(dense, Eigen::ComputeFullU);
    if (trustworthy(fast)) {
        fill(fast);
        return out;
    }
    // BDCSVD can return NaN vectors while reporting success on noiseless,
    // exactly rank-deficient Hankel matrices. Jacobi is slower but robust.
    Eigen::JacobiSVD<CMatrix<Real>> slow(dense, Eigen::ComputeFullU);
    if (!trustworthy(slow)) {
        throw NumericalError("SVD failed on " + std::to_string(rows) + "x" + std::to_string(cols) + " Hankel matrix");
    }
    fill(slow);
    return out;
}

} // namespace srmusic

#endif // SRMUSIC_FOURIER_HPP
