#pragma once

// Oriented contour pieces with Möbius charts from [-1,1].

#include <string>
#include <vector>

#include "stepkdv/types.hpp"

namespace stepkdv {

enum class PieceKind { Segment, Ray, Arc };

// A piece is the image of [-1,1] under M(t) = (a t + b)/(c t + d); orientation follows t.
struct Piece {
    PieceKind kind = PieceKind::Segment;
    int n = 0;          // number of Lobatto collocation points
    cplx a, b, c, d;    // Möbius coefficients
    int inf_end = 0;    // +1: t = 1 maps to infinity, -1: t = -1 maps to infinity, 0: bounded
    std::string label;  // free-form tag used by builders and debug dumps

    std::vector<double> t;  // Lobatto nodes (ascending)
    std::vector<cplx> s;    // images of the nodes (the infinite node holds a NaN)

    cplx map(cplx tt) const { return (a * tt + b) / (c * tt + d); }
    cplx dmap(cplx tt) const {
        const cplx den = c * tt + d;
        return (a * d - b * c) / (den * den);
    }
    cplx inverse(cplx z) const { return (d * z - b) / (a - c * z); }
    bool has_pole() const { return c != cplx(0.0); }
    cplx pole() const { return -d / c; }

    // Finite endpoint at t = side (side = -1 or +1).
    cplx endpoint(int side) const { return map(double(side)); }
    bool infinite_at(int side) const { return inf_end == side; }

    // Unit tangent (direction of increasing t) at the finite endpoint t = side.
    cplx tangent(int side) const {
        const cplx h = dmap(double(side));
        return h / std::abs(h);
    }

    void build_nodes();
};

// z0 -> z1.
Piece make_segment(cplx z0, cplx z1, int n, std::string label = {});
// From `start` to infinity in direction `dir` (unit), chart scale L.
Piece make_ray_out(cplx start, cplx dir, double L, int n, std::string label = {});
// From infinity (along direction `dir` from `end`) into `end`.
Piece make_ray_in(cplx end, cplx dir, double L, int n, std::string label = {});
// Circular arc from angle th0 to th1 (th1 - th0 signed, |th1 - th0| < 2 pi).
Piece make_arc(cplx center, double r, double th0, double th1, int n, std::string label = {});
// Orientation-reversed reflection z -> -z of a piece (node i maps to node n-1-i).
Piece reflect_piece(const Piece& p, std::string label = {});

}  // namespace stepkdv
