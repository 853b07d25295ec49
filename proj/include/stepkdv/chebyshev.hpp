#pragma once

// Chebyshev–Lobatto interpolation, Gauss–Legendre and Clenshaw–Curtis rules.

#include <memory>
#include <vector>

#include "stepkdv/types.hpp"

namespace stepkdv::cheb {

// Ascending Chebyshev–Lobatto points t_j = -cos(pi j/(n-1)), j = 0..n-1.
std::vector<double> lobatto(int n);

// Barycentric weights for the Lobatto points (ascending order).
std::vector<double> lobatto_bary_weights(int n);

struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss–Legendre rule on [-1,1] with m points (cached, thread safe).
std::shared_ptr<const GaussRule> gauss_legendre(int m);

// Clenshaw–Curtis weights for the n Lobatto points (cached).
std::shared_ptr<const std::vector<double>> clenshaw_curtis(int n);

// Row of Lagrange basis values l_j(x) for the Lobatto interpolant of size n at complex x.
void bary_row(int n, cplx x, cplx* out);

// Interpolation matrix from Lobatto(n) values to the Gauss–Legendre(m) nodes (cached).
std::shared_ptr<const Eigen::MatrixXd> lobatto_to_gauss(int n, int m);

// First-derivative spectral differentiation matrix on Lobatto(n) (cached).
std::shared_ptr<const Eigen::MatrixXd> diff_matrix(int n);

// Evaluate the Lobatto interpolant with values f at complex x.
cplx interp(const std::vector<cplx>& f, cplx x);

}  // namespace stepkdv::cheb
