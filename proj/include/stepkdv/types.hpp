#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stepkdv {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Row2 = Eigen::RowVector2cd;
using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;
using RVecX = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline const cplx I{0.0, 1.0};

// Raised for numerical failures that the caller may report and continue past.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised for invalid arguments or domain violations.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline Mat2 mat2(cplx a, cplx b, cplx c, cplx d) {
    Mat2 m;
    m << a, b, c, d;
    return m;
}

inline Mat2 identity2() { return Mat2::Identity(); }

inline Mat2 sigma1() { return mat2(0.0, 1.0, 1.0, 0.0); }

inline Row2 ones_row() {
    Row2 r;
    r << 1.0, 1.0;
    return r;
}

// Inverse of a 2x2 matrix via the adjugate (det supplied or computed).
inline Mat2 inv2(const Mat2& m) {
    const cplx d = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return mat2(m(1, 1) / d, -m(0, 1) / d, -m(1, 0) / d, m(0, 0) / d);
}

inline cplx det2(const Mat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

}  // namespace stepkdv
