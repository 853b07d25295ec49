#pragma once

// Region selection, lens factorizations, parametrices and the deformed Riemann–Hilbert
// problems whose solutions give u(x,t).

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "stepkdv/dual.hpp"
#include "stepkdv/rh.hpp"
#include "stepkdv/scattering.hpp"

namespace stepkdv {

enum class Region { Right, LeftDispersive, Bridged };
std::string region_name(Region r);

// Which problem a deformed contour represents.
enum class Construction {
    Right,       // right normalization, lens + global parametrix
    LeftLens,    // left normalization, lens only (t = 0, or stationary points beyond the data)
    LeftDelta,   // left normalization, g-free Delta construction about +-z0
    LeftPlain    // left normalization, undeformed (validation only)
};
std::string construction_name(Construction c);

struct PlanOptions {
    double delta = 0.1;        // margin of the left construction away from the branch points
    int nodes_segment = 40;
    int nodes_ray = 60;
    int nodes_arc = 40;
    double growth_max = 3.0;   // cap on the real part of exponents inside lenses
    double strip_fraction = 0.8;
    double plain_length_max = 4.0;  // undeformed problem: maximal piece length
    double alpha_max = 0.0;    // cap on the lens heights (0: limited by the analytic strip only)
    double epsilon_c = 0.0;    // half-width of the pieces crossing +-c (0: automatic)
};

struct DeformationPlan {
    Region region = Region::Right;
    Construction construction = Construction::Right;
    double x = 0.0, t = 0.0;
    double alpha = 0.0;        // lens height (outer)
    double alpha_mid = 0.0;    // lens height between the stationary disks
    double epsilon_c = 0.0;    // half-width of the pieces crossing +-c
    double z_star = 0.0;       // stationary point sqrt(-x/12t) (inf at t = 0)
    double z0 = 0.0;           // disk centre used by the Delta construction
    double r_star = 0.0;       // disk radius
    double delta = 0.0;
    double pole_radius = 0.0;
    double angle = 0.0;        // ray angle for non-smooth data
    double cutoff = INFINITY;  // reflection cutoff (inf: rays to infinity)
    bool asymptotic = false;   // reserved: closed-form long-time regime
};

// Classifies (x,t) and fixes all geometric parameters for that point.
DeformationPlan select_region(double x, double t, const Scattering& S, const PlanOptions& opt = {});

// theta = 2isx + 8is^3 t
inline cplx theta_left(cplx s, double x, double t) { return 2.0 * I * s * x + 8.0 * I * s * s * s * t; }
// theta2 = 2i lambda x + 8i phi(lambda) t
cplx theta_right(cplx z, double c, double x, double t);

// Jump of the left problem on the real line, J = [[1-R(s)R(-s), -R(-s)e^theta],[R(s)e^-theta, 1]].
Mat2 jump_left(const Scattering& S, double s, double x, double t);

// Factors with M1 P1^{-1} = J: M1 = [[1, -R(-s)e^theta],[0,1]], P1 = [[1,0],[-R(s)e^-theta, 1]].
struct LensFactors {
    Mat2 M1, P1;
};
LensFactors lens_factor_left(const Scattering& S, double s, double x, double t);

// J = L D U^{-1} with D = diag(T, 1/T), T = 1/(A(s)a(-s)), valid for s^2 > c^2.
struct LduFactors {
    Mat2 L, D, U;
    cplx T;
};
LduFactors ldu_factor(const Scattering& S, double s, double x, double t);

// Global parametrix with W+ = W- sigma1 on (-c,c), W -> I, [1 1] W = [1 1] + O(1/z^2).
Mat2 parametrix_w(cplx z, double c);
Mat2 parametrix_w_inv(cplx z, double c);

// Delta(z) = exp( (1/2 pi i) int_{|s|>z0} log T(s) / (s - z) ds ), boundary values by side.
class ScalarDelta {
public:
    ScalarDelta(const Scattering& S, double z0, int n = 120);
    cplx log_delta(cplx z, int side = 0) const;
    cplx operator()(cplx z, int side = 0) const { return std::exp(log_delta(z, side)); }
    double z0() const { return z0_; }

private:
    double z0_;
    std::vector<Piece> rays_;
    std::vector<std::vector<cplx>> logT_;
};

// Residue data of one discrete eigenvalue in the current frame (x-derivative included).
struct SolitonData {
    cplx z;            // eigenvalue
    Dual rho;          // Res N = lim N [[0,0],[rho,0]]
    bool transformed;  // residue moved into the upper-triangular form
    double radius;
};

// Interior factor of a small circle about z', mapping a lower-triangular residue condition
// with coefficient alpha to a jump: N_in = N_out [[1,0],[-alpha/(z-z'),1]].
// Returns the jump for the + side being the exterior (clockwise circle).
Mat2 residue_to_jump(cplx z, cplx zp, cplx alpha);

// Assembled problem: contour + operator (cached by geometry) + jumps and their x-derivatives.
struct RhProblem {
    DeformationPlan plan;
    std::shared_ptr<const CauchyOperator> op;
    std::vector<Mat2> G, Gx;
    std::string key;
};

// Thread-safe cache of Cauchy operators keyed by the contour geometry.
class OperatorCache {
public:
    explicit OperatorCache(size_t capacity = 8) : capacity_(capacity) {}
    std::shared_ptr<const CauchyOperator> get(const std::string& key, const std::vector<Piece>& pieces);
    size_t hits() const { return hits_; }
    size_t misses() const { return misses_; }

private:
    size_t capacity_;
    std::mutex mutex_;
    std::vector<std::pair<std::string, std::shared_ptr<const CauchyOperator>>> entries_;
    size_t hits_ = 0, misses_ = 0;
};

struct SolveOptions {
    PlanOptions plan;
    double sign_residue = 1.0;  // orientation of the residue conditions
    bool jump_check = false;    // also measure the jump residual at off-node points
    double boost = 0.0;         // Galilean frame a: points are given in x = x_n + 6at and u includes +a
};

// Builds the deformed problem for the plan. `construction` may override the plan's choice.
RhProblem build_problem(const Scattering& S, const DeformationPlan& plan, const SolveOptions& opt,
                        OperatorCache* cache = nullptr);

struct PointSolution {
    double u = NAN;
    double moment = NAN;        // (1/pi) int U_1 (left) or -(1/pi) int U_1 (right): first moment
    double residual = NAN;      // collocation residual
    double cond = NAN;
    double jump_residual = NAN; // sup |N+ - N- G| at off-node points (if requested)
    int unknowns = 0;
    DeformationPlan plan;
};

PointSolution solve_problem(const Scattering& S, const RhProblem& P, const SolveOptions& opt);

// Convenience: classify, build and solve. With a boost, x is a frame coordinate and the plan
// holds the normalized abscissa.
PointSolution solve_point(const Scattering& S, double x, double t, const SolveOptions& opt = {},
                          OperatorCache* cache = nullptr);

// Same point with a forced construction (cross-region and deformation checks).
PointSolution solve_point_with(const Scattering& S, double x, double t, Construction c,
                               const SolveOptions& opt = {}, OperatorCache* cache = nullptr);

// Human-readable JSON dump of the contour and jumps.
std::string dump_problem(const RhProblem& P);

}  // namespace stepkdv
