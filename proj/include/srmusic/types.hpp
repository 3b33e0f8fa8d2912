#ifndef SRMUSIC_TYPES_HPP
#define SRMUSIC_TYPES_HPP

#include <complex>

#include <Eigen/Core>

namespace srmusic
{

using Index = Eigen::Index;

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using CMatrixXd = CMatrix<double>;
using CVectorXd = CVector<double>;
using RVectorXd = RVector<double>;

template <typename Real>
inline constexpr Real two_pi = Real(6.283185307179586476925286766559005768L);

} // namespace srmusic

#endif // SRMUSIC_TYPES_HPP
