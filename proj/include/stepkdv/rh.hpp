#pragma once

// Collocation solver for 2x2 Riemann–Hilbert problems N+ = N- G, N -> [1 1] at infinity.
// The solution is N = [1 1] + C u with density u sampled at the Lobatto nodes of each piece.

#include <memory>
#include <vector>

#include "stepkdv/contour.hpp"

namespace stepkdv {

enum class NodeRole : unsigned char {
    Interior,  // ordinary collocation point
    Junction,  // endpoint shared with other pieces, collocated with the one-sided limit
    Anchor,    // junction endpoint whose equation is replaced by the zero-sum condition
    Zero       // free endpoint or point at infinity: u = 0
};

struct JunctionMember {
    int piece;
    int side;  // -1: initial endpoint (t = -1), +1: terminal endpoint (t = +1)
};

struct Junction {
    cplx point;
    std::vector<JunctionMember> members;
};

class Contour {
public:
    explicit Contour(std::vector<Piece> pieces, double tol = 1e-10);

    const std::vector<Piece>& pieces() const { return pieces_; }
    const std::vector<Junction>& junctions() const { return junctions_; }
    int size() const { return total_; }
    int offset(int k) const { return offset_[k]; }
    int global(int k, int j) const { return offset_[k] + j; }
    NodeRole role(int g) const { return role_[g]; }
    int piece_of(int g) const { return piece_of_[g]; }
    int local_of(int g) const { return g - offset_[piece_of_[g]]; }
    // junction index of a node (-1 if none)
    int junction_of(int g) const { return junction_of_[g]; }
    cplx point(int g) const { return pieces_[piece_of_[g]].s[local_of(g)]; }

    // Point symmetry z -> -z: node g pairs with mirror(g) at -s_g; the density of a problem with
    // N(-z) = N(z) sigma1 then satisfies u[mirror(g)] = mirror_sign(g) u[g] sigma1.
    bool symmetric() const { return symmetric_; }
    int mirror(int g) const { return mirror_[g]; }
    int mirror_sign(int g) const { return mirror_sign_[g]; }

private:
    void find_mirror(double tol);

    std::vector<Piece> pieces_;
    std::vector<int> offset_;
    int total_ = 0;
    std::vector<NodeRole> role_;
    std::vector<int> piece_of_;
    std::vector<int> junction_of_;
    std::vector<Junction> junctions_;
    bool symmetric_ = false;
    std::vector<int> mirror_;
    std::vector<int> mirror_sign_;
};

// Cauchy row helpers (rows act on Lobatto values of a single piece, length p.n).
namespace cauchy {

// (1/2 pi i) int_{-1}^{1} p(t)/(t - zeta) dt for zeta off [-1,1].
void interval_row(int n, cplx zeta, cplx* out);
// Cauchy transform over the piece at an off-contour point z (includes the Möbius pole correction).
void piece_row(const Piece& p, cplx z, cplx* out);
// Boundary value from the + (left) or - (right) side at interior node i of the piece.
void boundary_row(const Piece& p, int i, int side, cplx* out);
// Boundary value at an arbitrary chart parameter x in (-1,1).
void boundary_row_at(const Piece& p, double x, int side, cplx* out);

}  // namespace cauchy

// Precomputed C^- at all collocation nodes; depends on geometry only.
class CauchyOperator {
public:
    explicit CauchyOperator(std::shared_ptr<const Contour> contour);

    const Contour& contour() const { return *contour_; }
    std::shared_ptr<const Contour> contour_ptr() const { return contour_; }
    const MatX& minus() const { return cm_; }
    // Cauchy transform row at an off-contour point (length contour().size()).
    void row(cplx z, cplx* out) const;

private:
    std::shared_ptr<const Contour> contour_;
    MatX cm_;
};

struct RhpSolution {
    MatX U;                 // density, size() x 2
    MatX Ux;                // x-derivative of the density (empty if not requested)
    double residual = 0.0;  // residual of the collocation system relative to max(|rhs|, 1)
    double cond = 0.0;      // 1-norm condition estimate
};

// Solve for the density given the jump at every node (G at Zero nodes is ignored).
// If Gx is non-null, also solves for the derivative density with respect to a parameter.
// With `symmetric` (and a symmetric contour) the system is restricted to densities obeying the
// point symmetry, halving the unknowns; the residual is still measured on the full system.
RhpSolution solve_rhp(const CauchyOperator& op, const std::vector<Mat2>& G,
                      const std::vector<Mat2>* Gx = nullptr, bool symmetric = false);

// int_Gamma u ds for a density sampled on the contour.
Row2 contour_integral(const Contour& contour, const MatX& U);

// N(z) = [1 1] + C u (z) at an off-contour point.
Row2 evaluate(const CauchyOperator& op, const MatX& U, cplx z);

// Boundary value N+ (side = +1) or N- (side = -1) at chart parameter x of piece k.
Row2 boundary_value(const CauchyOperator& op, const MatX& U, int k, double x, int side);

// Boundary values N-(s_i) at all nodes (Zero nodes hold [1 1] + C^- u as well).
MatX boundary_minus(const CauchyOperator& op, const MatX& U);

}  // namespace stepkdv
