#pragma once

// Jost solutions, scattering coefficients, reflection coefficients, discrete spectrum
// and norming constants for step-like Schrödinger potentials.

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "stepkdv/initial_data.hpp"

namespace stepkdv {

// lambda(z) = sqrt(z - c) sqrt(z + c), analytic off [-c, c], lambda ~ z at infinity.
// side = +1/-1 selects the boundary value from above/below on the cut; side = 0 rejects cut points.
cplx lambda_map(cplx z, double c, int side = 0);
// Closed-upper-half-plane convention: boundary values on the cut are taken from above.
cplx lambda_up(cplx z, double c);

// phi(lambda) = lambda^3 + (3/2) c^2 lambda
inline cplx phi_cubic(cplx lam, double c) { return lam * lam * lam + 1.5 * c * c * lam; }

// Multiplicative phases of the time-dependent jumps.
cplx phase_left(cplx z, double x, double t);                // e^{-2izx - 8iz^3 t}
cplx phase_right(cplx z, double c, double x, double t);     // e^{2i lambda x + 8i phi(lambda) t}

enum class JostSide { Left, Right, Both };

// Jost solutions and x-derivatives at x = 0.
// Left: phi^m ~ e^{-izx}, phi^p ~ e^{izx} as x -> -inf (potential u0 on x <= 0).
// Right: psi^p ~ e^{i lambda x}, psi^m ~ e^{-i lambda x} as x -> +inf (potential u0 on x >= 0).
struct JostValues {
    cplx z, lambda;
    cplx phi_p = 0.0, phi_m = 0.0, dphi_p = 0.0, dphi_m = 0.0;
    cplx psi_p = 0.0, psi_m = 0.0, dpsi_p = 0.0, dpsi_m = 0.0;
};

struct JostOptions {
    double rtol = 1e-13;
    double atol = 1e-15;
};

// lambda is taken as lambda_up(z, c).
JostValues solve_jost(const InitialData& data, cplx z, JostSide side = JostSide::Both,
                      const JostOptions& opt = {});

inline cplx wronskian(cplx f, cplx df, cplx g, cplx dg) { return f * dg - df * g; }

struct Coefficients {
    cplx a, b, A, B;
};

struct MatchingData {
    cplx kappa1 = 0.0, kappa2 = 0.0, gamma = 0.0, alpha = 0.0, beta = 0.0;
    double fit_residual = 0.0;
    bool valid = false;
};

struct Pole {
    cplx z;
    cplx norming_left;   // c(z_j)
    cplx norming_right;  // C(z_j)
};

struct GenericityReport {
    bool generic = true;
    double wronskian_c = 0.0;  // relative |W(phi^m(c), psi^p(c))|
    double wronskian_0 = 0.0;  // relative |W(psi^m(0), phi^p(0))|
    double min_abs_a = 0.0;    // min |a(s)| on the real sample grid
    double min_pole_gap = 0.0;
    std::string message;
};

struct ScatteringOptions {
    JostOptions jost;
    int spectrum_n = 240;             // Chebyshev points for the eigenvalue problem (also 2n for the check)
    double spectrum_domain = 0.0;     // half-width of the eigenvalue domain (0: automatic)
    double spectrum_tol = 1e-8;       // acceptance under n -> 2n
    double genericity_tol = 1e-8;
    int fit_points = 16;              // sample ladder for the expansion fits near -c
    double fit_radius = 1e-3;
    double fit_ratio = 0.5;
    double decay_tol = 1e-12;         // reflection coefficients treated as zero beyond the cutoff
    double strip_height_max = 1.0;    // cap of the analytic strip used for contour deformation
};

class Scattering {
public:
    explicit Scattering(InitialData data, ScatteringOptions opt = {});

    const InitialData& data() const { return data_; }
    const ScatteringOptions& options() const { return opt_; }
    double c() const { return data_.c; }

    // Memoized Jost values (lambda analytic off the cut; cut points are taken from above).
    JostValues jost(cplx z) const;

    // W(phi^m, psi^p), W(phi^p, psi^p), W(psi^m, phi^m) at x = 0
    cplx w_mp(cplx z) const;

    // a, b, A, B by Wronskians; b, B require z real (or the analytic strip); z != 0.
    Coefficients coefficients(cplx z) const;
    cplx a(cplx z) const;
    cplx A(cplx z) const;

    // R_l: b/a off the cut (analytic continuation for Im z > 0); a+(-s)/a+(s) on the cut.
    cplx reflection_left(cplx z) const;
    // R_r: B/A off the cut; the matched l-extension on the cut (real s only).
    cplx reflection_right(double s) const;
    // Analytic continuation of R_r = B/A = -b(-z)/a(z) into the closed upper half-plane;
    // on the cut it is the boundary value from above.
    cplx reflection_right_continued(cplx z) const;
    // 1/(a+(-s) A+(s)) on the cut
    cplx cut_jump(double s) const;

    // Large-|Re z| cutoff beyond which both reflection coefficients vanish to decay_tol (inf if none).
    double decay_cutoff() const { return cutoff_; }
    void set_decay_cutoff(double s) { cutoff_ = s; }

    // Expensive analysis steps (single threaded).
    std::vector<cplx> discrete_spectrum() const;
    Pole norming_constants(cplx zj) const;
    MatchingData cut_matching_data() const;
    GenericityReport genericity_check() const;
    double estimate_decay_cutoff() const;

    // Runs all analysis steps and stores the results.
    void analyze();

    const std::vector<Pole>& poles() const { return poles_; }
    void set_poles(std::vector<Pole> p) { poles_ = std::move(p); }
    const MatchingData& matching() const { return matching_; }
    void set_matching(const MatchingData& m) { matching_ = m; }
    const GenericityReport& genericity() const { return generic_; }
    void set_genericity(const GenericityReport& g) { generic_ = g; }

    // Width of the strip Im z < h where the reflection coefficients are used analytically.
    double strip_bound() const;

private:
    InitialData data_;
    ScatteringOptions opt_;
    double cutoff_ = INFINITY;
    std::vector<Pole> poles_;
    MatchingData matching_;
    GenericityReport generic_;

    struct KeyHash {
        size_t operator()(const std::pair<double, double>& k) const {
            return std::hash<double>()(k.first) ^ (std::hash<double>()(k.second) * 0x9e3779b97f4a7c15ULL);
        }
    };
    mutable std::mutex cache_mutex_;
    mutable std::unordered_map<std::pair<double, double>, JostValues, KeyHash> cache_;
};

// Eigenvalues of -D^2 - diag(u) on a Chebyshev grid (Dirichlet), negative part only.
std::vector<double> chebyshev_eigenvalues(const InitialData& data, int n, double half_width);

}  // namespace stepkdv
