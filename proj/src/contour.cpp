#include "stepkdv/contour.hpp"

#include <cmath>
#include <limits>

#include "stepkdv/chebyshev.hpp"

namespace stepkdv {

void Piece::build_nodes() {
    if (n < 4) throw DomainError("contour piece needs at least 4 collocation points");
    t = cheb::lobatto(n);
    s.resize(n);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int j = 0; j < n; ++j) {
        if ((inf_end == 1 && j == n - 1) || (inf_end == -1 && j == 0)) {
            s[j] = cplx(nan, nan);
        } else {
            s[j] = map(t[j]);
        }
    }
}

Piece make_segment(cplx z0, cplx z1, int n, std::string label) {
    if (std::abs(z1 - z0) == 0.0) throw DomainError("segment of zero length");
    Piece p;
    p.kind = PieceKind::Segment;
    p.n = n;
    p.a = 0.5 * (z1 - z0);
    p.b = 0.5 * (z1 + z0);
    p.c = 0.0;
    p.d = 1.0;
    p.label = std::move(label);
    p.build_nodes();
    return p;
}

Piece make_ray_out(cplx start, cplx dir, double L, int n, std::string label) {
    Piece p;
    p.kind = PieceKind::Ray;
    p.n = n;
    const cplx e = dir / std::abs(dir) * L;
    // s = start + e (1+t)/(1-t)
    p.a = e - start;
    p.b = start + e;
    p.c = -1.0;
    p.d = 1.0;
    p.inf_end = 1;
    p.label = std::move(label);
    p.build_nodes();
    return p;
}

Piece make_ray_in(cplx end, cplx dir, double L, int n, std::string label) {
    Piece p;
    p.kind = PieceKind::Ray;
    p.n = n;
    const cplx e = dir / std::abs(dir) * L;
    // s = end + e (1-t)/(1+t)
    p.a = end - e;
    p.b = end + e;
    p.c = 1.0;
    p.d = 1.0;
    p.inf_end = -1;
    p.label = std::move(label);
    p.build_nodes();
    return p;
}

Piece make_arc(cplx center, double r, double th0, double th1, int n, std::string label) {
    const double span = th1 - th0;
    if (!(std::abs(span) > 0.0) || std::abs(span) >= 2.0 * pi)
        throw DomainError("arc span must be in (0, 2pi)");
    Piece p;
    p.kind = PieceKind::Arc;
    p.n = n;
    const double thm = 0.5 * (th0 + th1);
    const double tau = std::tan(span / 4.0);
    const cplx e = r * std::exp(I * thm);
    // s = center + e (1 + i tau t)/(1 - i tau t)
    p.a = -I * tau * center + I * tau * e;
    p.b = center + e;
    p.c = -I * tau;
    p.d = 1.0;
    p.label = std::move(label);
    p.build_nodes();
    return p;
}

Piece reflect_piece(const Piece& q, std::string label) {
    // M'(t) = -M(-t) = (-(a(-t) + b))/(c(-t) + d) = (a t - b)/(-c t + d)
    Piece p = q;
    p.a = q.a;
    p.b = -q.b;
    p.c = -q.c;
    p.d = q.d;
    p.inf_end = -q.inf_end;
    p.label = label.empty() ? q.label + "'" : std::move(label);
    p.build_nodes();
    return p;
}

}  // namespace stepkdv
