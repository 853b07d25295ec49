#pragma once

// Values carried together with their derivative in x (forward mode).

#include "stepkdv/types.hpp"

namespace stepkdv {

struct Dual {
    cplx v = 0.0;  // value
    cplx d = 0.0;  // d/dx
    Dual() = default;
    Dual(cplx value, cplx deriv = 0.0) : v(value), d(deriv) {}
    Dual(double value) : v(value) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
inline Dual exp(Dual a) {
    const cplx e = std::exp(a.v);
    return {e, e * a.d};
}

struct DMat2 {
    Mat2 v = Mat2::Identity();
    Mat2 d = Mat2::Zero();
};

inline DMat2 operator*(const DMat2& a, const DMat2& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline DMat2 inverse(const DMat2& a) {
    const Mat2 iv = inv2(a.v);
    return {iv, -iv * a.d * iv};
}
inline DMat2 dmat(Dual a, Dual b, Dual c, Dual d) { return {mat2(a.v, b.v, c.v, d.v), mat2(a.d, b.d, c.d, d.d)}; }
inline DMat2 constant(const Mat2& m) { return {m, Mat2::Zero()}; }
// sigma1 A sigma1
inline DMat2 flip(const DMat2& a) {
    const Mat2 s = sigma1();
    return {s * a.v * s, s * a.d * s};
}

}  // namespace stepkdv
