#include "stepkdv/rh.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "stepkdv/chebyshev.hpp"

namespace stepkdv {

namespace {

const cplx inv2pii = 1.0 / (2.0 * pi * I);

// Picks m or m+1 Gauss points, whichever keeps its nearest node farther from x.
int pick_m(int m, cplx x) {
    auto nearest = [&](int mm) {
        const auto g = cheb::gauss_legendre(mm);
        double d = 1e300;
        for (double t : g->x) d = std::min(d, std::abs(cplx(t) - x));
        return d;
    };
    return nearest(m) >= nearest(m + 1) ? m : m + 1;
}

// out += sum_q v_q P(q,:)
void accumulate(const Eigen::MatrixXd& P, const std::vector<cplx>& v, cplx scale, cplx* out) {
    const int m = int(P.rows()), n = int(P.cols());
    for (int j = 0; j < n; ++j) {
        cplx s = 0.0;
        for (int q = 0; q < m; ++q) s += v[q] * P(q, j);
        out[j] += scale * s;
    }
}

// Row for the Möbius pole correction C p(t_p), to be subtracted.
void pole_row(const Piece& p, cplx* out) {
    const int n = p.n;
    std::fill(out, out + n, cplx(0.0));
    if (!p.has_pole()) return;
    if (p.inf_end != 0) {
        // pole at the infinite endpoint where the density vanishes
        const double e = double(p.inf_end);
        const int end = p.inf_end == 1 ? n - 1 : 0;
        const int m = n / 2 + 2;
        const auto g = cheb::gauss_legendre(m);
        const auto P = cheb::lobatto_to_gauss(n, m);
        std::vector<cplx> v(m);
        for (int q = 0; q < m; ++q) v[q] = g->w[q] / (g->x[q] - e);
        accumulate(*P, v, inv2pii, out);
        cplx sv = 0.0;
        for (int q = 0; q < m; ++q) sv += v[q];
        out[end] -= inv2pii * sv;
        return;
    }
    cauchy::interval_row(n, p.pole(), out);
}

// Endpoint (junction) row of piece p at side: finite part of the Cauchy transform as z -> endpoint
// along direction d, with the log|z - a| term removed. `self` selects the - side of the piece itself.
void endpoint_row(const Piece& p, int side, cplx d, bool self, cplx* out) {
    const int n = p.n;
    std::vector<cplx> tmp(n, 0.0);
    const int m = n / 2 + 2;
    const auto g = cheb::gauss_legendre(m);
    const auto P = cheb::lobatto_to_gauss(n, m);
    const cplx h = p.dmap(double(side));
    const int end = side == 1 ? n - 1 : 0;
    std::vector<cplx> v(m);
    for (int q = 0; q < m; ++q) v[q] = g->w[q] / (g->x[q] - double(side));
    cplx sv = 0.0;
    for (int q = 0; q < m; ++q) sv += v[q];
    for (int j = 0; j < n; ++j) tmp[j] = 0.0;
    accumulate(*P, v, 1.0, tmp.data());
    tmp[end] -= sv;
    cplx coeff;
    if (side == 1) {
        const double arg = self ? -pi : std::arg(d / h);
        coeff = -std::log(std::abs(h)) + I * arg - std::log(2.0);
    } else {
        const double arg = self ? -pi : std::arg(-h / d);
        coeff = std::log(2.0) + std::log(std::abs(h)) + I * arg;
    }
    tmp[end] += coeff;
    std::vector<cplx> pr(n);
    pole_row(p, pr.data());
    for (int j = 0; j < n; ++j) out[j] = inv2pii * tmp[j] - pr[j];
}

void subtract_pole(const Piece& p, cplx* out) {
    if (!p.has_pole()) return;
    std::vector<cplx> pr(p.n);
    pole_row(p, pr.data());
    for (int j = 0; j < p.n; ++j) out[j] -= pr[j];
}

}  // namespace

namespace cauchy {

void interval_row(int n, cplx zeta, cplx* out) {
    std::fill(out, out + n, cplx(0.0));
    const double rho = std::abs(zeta + std::sqrt(zeta - 1.0) * std::sqrt(zeta + 1.0));
    const double lr = std::log10(std::max(rho, 1.0 + 1e-16));
    if (n * lr < 3.0) {
        const int m = pick_m(n / 2 + 4, zeta);
        const auto g = cheb::gauss_legendre(m);
        const auto P = cheb::lobatto_to_gauss(n, m);
        std::vector<cplx> v(m);
        cplx sv = 0.0;
        for (int q = 0; q < m; ++q) {
            v[q] = g->w[q] / (g->x[q] - zeta);
            sv += v[q];
        }
        std::vector<cplx> b(n);
        cheb::bary_row(n, zeta, b.data());
        const cplx L = std::log((zeta - 1.0) / (zeta + 1.0)) - sv;
        for (int j = 0; j < n; ++j) out[j] = inv2pii * L * b[j];
        accumulate(*P, v, inv2pii, out);
    } else {
        const int m = std::max(n / 2 + 2, int(std::ceil(17.0 / (2.0 * lr))) + 2);
        const auto g = cheb::gauss_legendre(m);
        const auto P = cheb::lobatto_to_gauss(n, m);
        std::vector<cplx> v(m);
        for (int q = 0; q < m; ++q) v[q] = g->w[q] / (g->x[q] - zeta);
        accumulate(*P, v, inv2pii, out);
    }
}

void piece_row(const Piece& p, cplx z, cplx* out) {
    interval_row(p.n, p.inverse(z), out);
    subtract_pole(p, out);
}

void boundary_row(const Piece& p, int i, int side, cplx* out) {
    const int n = p.n;
    const double x = p.t[i];
    const int m = pick_m(n / 2 + 2, x);
    const auto g = cheb::gauss_legendre(m);
    const auto P = cheb::lobatto_to_gauss(n, m);
    std::vector<cplx> v(m);
    cplx sv = 0.0;
    for (int q = 0; q < m; ++q) {
        v[q] = g->w[q] / (g->x[q] - x);
        sv += v[q];
    }
    std::fill(out, out + n, cplx(0.0));
    accumulate(*P, v, inv2pii, out);
    out[i] += inv2pii * (std::log((1.0 - x) / (1.0 + x)) + double(side) * I * pi - sv);
    subtract_pole(p, out);
}

void boundary_row_at(const Piece& p, double x, int side, cplx* out) {
    const int n = p.n;
    const int m = pick_m(n / 2 + 4, x);
    const auto g = cheb::gauss_legendre(m);
    const auto P = cheb::lobatto_to_gauss(n, m);
    std::vector<cplx> v(m);
    cplx sv = 0.0;
    for (int q = 0; q < m; ++q) {
        v[q] = g->w[q] / (g->x[q] - x);
        sv += v[q];
    }
    std::vector<cplx> b(n);
    cheb::bary_row(n, x, b.data());
    const cplx L = std::log((1.0 - x) / (1.0 + x)) + double(side) * I * pi - sv;
    for (int j = 0; j < n; ++j) out[j] = inv2pii * L * b[j];
    accumulate(*P, v, inv2pii, out);
    subtract_pole(p, out);
}

}  // namespace cauchy

Contour::Contour(std::vector<Piece> pieces, double tol) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw DomainError("empty contour");
    offset_.resize(pieces_.size());
    for (size_t k = 0; k < pieces_.size(); ++k) {
        offset_[k] = total_;
        total_ += pieces_[k].n;
    }
    role_.assign(total_, NodeRole::Interior);
    piece_of_.resize(total_);
    junction_of_.assign(total_, -1);
    for (size_t k = 0; k < pieces_.size(); ++k)
        for (int j = 0; j < pieces_[k].n; ++j) piece_of_[offset_[k] + j] = int(k);

    // cluster finite endpoints
    for (size_t k = 0; k < pieces_.size(); ++k) {
        for (int side : {-1, 1}) {
            const Piece& p = pieces_[k];
            const int j = side == 1 ? p.n - 1 : 0;
            const int g = offset_[k] + j;
            if (p.infinite_at(side)) {
                role_[g] = NodeRole::Zero;
                continue;
            }
            const cplx a = p.endpoint(side);
            int found = -1;
            for (size_t q = 0; q < junctions_.size(); ++q) {
                if (std::abs(junctions_[q].point - a) <= tol * std::max(1.0, std::abs(a))) {
                    found = int(q);
                    break;
                }
            }
            if (found < 0) {
                junctions_.push_back({a, {}});
                found = int(junctions_.size()) - 1;
            }
            junctions_[found].members.push_back({int(k), side});
            junction_of_[g] = found;
        }
    }
    for (const auto& jn : junctions_) {
        if (jn.members.size() == 1) {
            const auto& mb = jn.members[0];
            role_[global(mb.piece, mb.side == 1 ? pieces_[mb.piece].n - 1 : 0)] = NodeRole::Zero;
            continue;
        }
        // anchor: first outgoing member, else the first one
        size_t anchor = 0;
        for (size_t q = 0; q < jn.members.size(); ++q) {
            if (jn.members[q].side == -1) {
                anchor = q;
                break;
            }
        }
        for (size_t q = 0; q < jn.members.size(); ++q) {
            const auto& mb = jn.members[q];
            const int g = global(mb.piece, mb.side == 1 ? pieces_[mb.piece].n - 1 : 0);
            role_[g] = q == anchor ? NodeRole::Anchor : NodeRole::Junction;
        }
    }
    find_mirror(tol);
}

void Contour::find_mirror(double tol) {
    symmetric_ = false;
    mirror_.assign(total_, -1);
    mirror_sign_.assign(total_, 0);
    auto close = [&](cplx a, cplx b) { return std::abs(a - b) <= 1e3 * tol * std::max(1.0, std::abs(a)); };
    const int np = int(pieces_.size());
    for (int k = 0; k < np; ++k) {
        const Piece& p = pieces_[k];
        const cplx mid = p.map(0.0);
        int found = -1;
        for (int q = 0; q < np && found < 0; ++q) {
            const Piece& r = pieces_[q];
            if (r.n != p.n || (r.inf_end == 0) != (p.inf_end == 0)) continue;
            if (!close(r.map(0.0), -mid)) continue;
            bool ends = true;
            for (int sd : {-1, 1}) {
                if (p.infinite_at(sd)) continue;
                const cplx e = -p.endpoint(sd);
                if (!((!r.infinite_at(-1) && close(r.endpoint(-1), e)) || (!r.infinite_at(1) && close(r.endpoint(1), e))))
                    ends = false;
            }
            if (ends) found = q;
        }
        if (found < 0 || found == k) return;
        const Piece& r = pieces_[found];
        for (int i = 0; i < p.n; ++i) {
            const int g = offset_[k] + i;
            int j = -1;
            if (!std::isfinite(p.s[i].real())) {
                j = std::isfinite(r.s[0].real()) ? r.n - 1 : 0;
            } else if (std::isfinite(r.s[i].real()) && close(r.s[i], -p.s[i])) {
                j = i;
            } else if (std::isfinite(r.s[r.n - 1 - i].real()) && close(r.s[r.n - 1 - i], -p.s[i])) {
                j = r.n - 1 - i;
            }
            if (j < 0) return;
            mirror_[g] = offset_[found] + j;
            if (!std::isfinite(p.s[i].real())) {
                mirror_sign_[g] = 1;
                continue;
            }
            const cplx tp = p.dmap(p.t[i]), tr = r.dmap(r.t[j]);
            mirror_sign_[g] = std::abs(tr / std::abs(tr) + tp / std::abs(tp)) < 1e-6 ? 1 : -1;
        }
    }
    for (int g = 0; g < total_; ++g) {
        const int h = mirror_[g];
        if (h < 0 || mirror_[h] != g || h == g) return;
        if (junction_of_[g] >= 0 && junction_of_[g] == junction_of_[h]) return;
    }
    symmetric_ = true;
}

CauchyOperator::CauchyOperator(std::shared_ptr<const Contour> contour)
    : contour_(std::move(contour)) {
    const Contour& C = *contour_;
    const int N = C.size();
    cm_ = MatX::Zero(N, N);
    const auto& P = C.pieces();
    std::vector<cplx> buf;
    for (int g = 0; g < N; ++g) {
        const NodeRole r = C.role(g);
        if (r == NodeRole::Zero) continue;
        const int kj = C.piece_of(g);
        const int ij = C.local_of(g);
        if (r == NodeRole::Interior) {
            const cplx z = P[kj].s[ij];
            for (size_t k = 0; k < P.size(); ++k) {
                buf.assign(P[k].n, 0.0);
                if (int(k) == kj) {
                    cauchy::boundary_row(P[k], ij, -1, buf.data());
                } else {
                    cauchy::piece_row(P[k], z, buf.data());
                }
                for (int j = 0; j < P[k].n; ++j) cm_(g, C.offset(int(k)) + j) = buf[j];
            }
            continue;
        }
        // junction node
        const Junction& jn = C.junctions()[C.junction_of(g)];
        const int sj = ij == 0 ? -1 : 1;
        const cplx dir = sj == 1 ? -P[kj].tangent(1) : P[kj].tangent(-1);
        for (size_t k = 0; k < P.size(); ++k) {
            buf.assign(P[k].n, 0.0);
            int mside = 0;
            for (const auto& mb : jn.members)
                if (mb.piece == int(k)) mside = mb.side;
            // a piece may touch the junction at both ends (closed loop); sum both endpoint rows
            int both = 0;
            for (const auto& mb : jn.members)
                if (mb.piece == int(k)) ++both;
            if (both == 2) throw DomainError("closed single-piece loop is not supported");
            if (mside != 0) {
                endpoint_row(P[k], mside, dir, int(k) == kj, buf.data());
            } else {
                cauchy::piece_row(P[k], jn.point, buf.data());
            }
            for (int j = 0; j < P[k].n; ++j) cm_(g, C.offset(int(k)) + j) = buf[j];
        }
    }
}

void CauchyOperator::row(cplx z, cplx* out) const {
    const auto& P = contour_->pieces();
    for (size_t k = 0; k < P.size(); ++k) cauchy::piece_row(P[k], z, out + contour_->offset(int(k)));
}

RhpSolution solve_rhp(const CauchyOperator& op, const std::vector<Mat2>& G,
                      const std::vector<Mat2>* Gx, bool symmetric) {
    const Contour& C = op.contour();
    const int N = C.size();
    if (int(G.size()) != N) throw DomainError("jump count does not match contour nodes");
    const MatX& Cm = op.minus();
    const int M = 2 * N;
    MatX A = MatX::Zero(M, M);
    VecX rhs = VecX::Zero(M);
    for (int i = 0; i < N; ++i) {
        const NodeRole r = C.role(i);
        if (r == NodeRole::Zero) {
            A(2 * i, 2 * i) = 1.0;
            A(2 * i + 1, 2 * i + 1) = 1.0;
            continue;
        }
        if (r == NodeRole::Anchor) {
            const Junction& jn = C.junctions()[C.junction_of(i)];
            for (const auto& mb : jn.members) {
                const int g = C.global(mb.piece, mb.side == 1 ? C.pieces()[mb.piece].n - 1 : 0);
                const double sg = double(mb.side);
                A(2 * i, 2 * g) += sg;
                A(2 * i + 1, 2 * g + 1) += sg;
            }
            continue;
        }
        const Mat2 E = G[i] - identity2();
        for (int l = 0; l < N; ++l) {
            const cplx c = Cm(i, l);
            if (c == cplx(0.0)) continue;
            A(2 * i, 2 * l) -= c * E(0, 0);
            A(2 * i, 2 * l + 1) -= c * E(1, 0);
            A(2 * i + 1, 2 * l) -= c * E(0, 1);
            A(2 * i + 1, 2 * l + 1) -= c * E(1, 1);
        }
        A(2 * i, 2 * i) += 1.0;
        A(2 * i + 1, 2 * i + 1) += 1.0;
        rhs(2 * i) = E(0, 0) + E(1, 0);
        rhs(2 * i + 1) = E(0, 1) + E(1, 1);
    }
    // Symmetric subspace: u[m(h)] = e_h u[h] sigma1 for representatives h.
    std::vector<int> rep;
    std::vector<int> slot(N, -1);
    const bool reduce = symmetric && C.symmetric();
    if (reduce) {
        for (int g = 0; g < N; ++g) {
            const int h = C.mirror(g);
            const int jg = C.junction_of(g), jh = C.junction_of(h);
            const bool keep = jg >= 0 ? jg < jh : g < h;
            if (keep) {
                slot[g] = int(rep.size());
                rep.push_back(g);
            }
        }
        for (int g = 0; g < N; ++g)
            if (slot[g] < 0 && slot[C.mirror(g)] < 0) throw NumericalError("inconsistent symmetric pairing");
    }
    const int R = int(rep.size());
    MatX Ar;
    if (reduce) {
        Ar = MatX::Zero(2 * R, 2 * R);
        for (int l = 0; l < N; ++l) {
            if (slot[l] >= 0) {
                const int k = slot[l];
                for (int q = 0; q < R; ++q)
                    for (int a = 0; a < 2; ++a) {
                        Ar(2 * q + a, 2 * k) += A(2 * rep[q] + a, 2 * l);
                        Ar(2 * q + a, 2 * k + 1) += A(2 * rep[q] + a, 2 * l + 1);
                    }
            } else {
                const int h = C.mirror(l);
                const int k = slot[h];
                const double e = C.mirror_sign(h);
                for (int q = 0; q < R; ++q)
                    for (int a = 0; a < 2; ++a) {
                        Ar(2 * q + a, 2 * k + 1) += e * A(2 * rep[q] + a, 2 * l);
                        Ar(2 * q + a, 2 * k) += e * A(2 * rep[q] + a, 2 * l + 1);
                    }
            }
        }
    }
    Eigen::PartialPivLU<MatX> lu(reduce ? Ar : A);
    auto expand = [&](const VecX& y) {
        VecX x(M);
        for (int g = 0; g < N; ++g) {
            if (slot[g] >= 0) {
                x(2 * g) = y(2 * slot[g]);
                x(2 * g + 1) = y(2 * slot[g] + 1);
            } else {
                const int h = C.mirror(g);
                const double e = C.mirror_sign(h);
                x(2 * g) = e * y(2 * slot[h] + 1);
                x(2 * g + 1) = e * y(2 * slot[h]);
            }
        }
        return x;
    };
    auto restrict_rows = [&](const VecX& b) {
        VecX br(2 * R);
        for (int q = 0; q < R; ++q) {
            br(2 * q) = b(2 * rep[q]);
            br(2 * q + 1) = b(2 * rep[q] + 1);
        }
        return br;
    };
    auto refined = [&](const VecX& b) {
        if (!reduce) {
            VecX x = lu.solve(b);
            const VecX r = b - A * x;
            x += lu.solve(r);
            return x;
        }
        const VecX br = restrict_rows(b);
        VecX y = lu.solve(br);
        const VecX r = br - Ar * y;
        y += lu.solve(r);
        return expand(y);
    };
    RhpSolution sol;
    const VecX x = refined(rhs);
    if (!x.allFinite()) throw NumericalError("collocation solve produced non-finite values");
    // residual in units of the normalization [1 1]: near-identity jumps give a right-hand side far below
    // the roundoff carried by G itself
    const double bn = std::max(rhs.lpNorm<Eigen::Infinity>(), 1.0);
    sol.residual = (rhs - A * x).lpNorm<Eigen::Infinity>() / bn;
    const double rc = lu.rcond();
    sol.cond = rc > 0.0 ? 1.0 / rc : INFINITY;
    sol.U.resize(N, 2);
    for (int l = 0; l < N; ++l) {
        sol.U(l, 0) = x(2 * l);
        sol.U(l, 1) = x(2 * l + 1);
    }
    if (Gx) {
        if (int(Gx->size()) != N) throw DomainError("derivative jump count does not match");
        const MatX Nm = boundary_minus(op, sol.U);
        VecX b2 = VecX::Zero(M);
        for (int i = 0; i < N; ++i) {
            const NodeRole r = C.role(i);
            if (r == NodeRole::Zero || r == NodeRole::Anchor) continue;
            const Row2 v = Nm.row(i) * (*Gx)[i];
            b2(2 * i) = v(0);
            b2(2 * i + 1) = v(1);
        }
        const VecX y = refined(b2);
        sol.Ux.resize(N, 2);
        for (int l = 0; l < N; ++l) {
            sol.Ux(l, 0) = y(2 * l);
            sol.Ux(l, 1) = y(2 * l + 1);
        }
    }
    return sol;
}

MatX boundary_minus(const CauchyOperator& op, const MatX& U) {
    MatX Nm = op.minus() * U;
    Nm.array() += 1.0;
    return Nm;
}

Row2 contour_integral(const Contour& contour, const MatX& U) {
    Row2 total = Row2::Zero();
    for (size_t k = 0; k < contour.pieces().size(); ++k) {
        const Piece& p = contour.pieces()[k];
        const int n = p.n;
        const auto w = cheb::clenshaw_curtis(n);
        const int off = contour.offset(int(k));
        for (int col = 0; col < 2; ++col) {
            VecX f(n);
            for (int j = 0; j < n; ++j) f(j) = U(off + j, col);
            cplx s = 0.0;
            for (int j = 0; j < n; ++j) {
                if ((p.inf_end == 1 && j == n - 1) || (p.inf_end == -1 && j == 0)) continue;
                s += (*w)[j] * f(j) * p.dmap(p.t[j]);
            }
            if (p.inf_end != 0) {
                // limit of u(M(t)) M'(t) at the infinite end: (ad - bc) u''/(2 c^2)
                const auto D = cheb::diff_matrix(n);
                const MatX Dc = D->cast<cplx>();
                const VecX d2 = Dc * (Dc * f);
                const int end = p.inf_end == 1 ? n - 1 : 0;
                const cplx lim = (p.a * p.d - p.b * p.c) * d2(end) / (2.0 * p.c * p.c);
                s += (*w)[end] * lim;
            }
            total(col) += s;
        }
    }
    return total;
}

Row2 evaluate(const CauchyOperator& op, const MatX& U, cplx z) {
    const int N = op.contour().size();
    std::vector<cplx> r(N, 0.0);
    op.row(z, r.data());
    Row2 out = ones_row();
    for (int l = 0; l < N; ++l) {
        out(0) += r[l] * U(l, 0);
        out(1) += r[l] * U(l, 1);
    }
    return out;
}

Row2 boundary_value(const CauchyOperator& op, const MatX& U, int k, double x, int side) {
    const Contour& C = op.contour();
    Row2 out = ones_row();
    std::vector<cplx> r;
    const cplx z = C.pieces()[k].map(x);
    for (size_t q = 0; q < C.pieces().size(); ++q) {
        const Piece& p = C.pieces()[q];
        r.assign(p.n, 0.0);
        if (int(q) == k) {
            cauchy::boundary_row_at(p, x, side, r.data());
        } else {
            cauchy::piece_row(p, z, r.data());
        }
        const int off = C.offset(int(q));
        for (int j = 0; j < p.n; ++j) {
            out(0) += r[j] * U(off + j, 0);
            out(1) += r[j] * U(off + j, 1);
        }
    }
    return out;
}

}  // namespace stepkdv
