#pragma once

#include <complex>
#include <functional>

#include "dds/value.hpp"

namespace dds::special {

inline constexpr double euler_gamma = 0.57721566490153286060651209008;
inline constexpr double pi = 3.14159265358979323846264338328;

// exp(e * log(b)) for real b > 0; the workhorse power for Dirichlet series.
inline cplx cpow(double b, cplx e) { return std::exp(e * std::log(b)); }

// Lanczos (g = 7, 9 terms), reflection for Re z < 1/2.  Relative accuracy
// ~1e-13 on the scales used here.  Non-positive integer z is a pole error.
cplx gamma_complex(cplx z);
cplx log_gamma(cplx z); // principal branch via Lanczos, same pole guard

cplx digamma(cplx z);

cplx cot_complex(cplx z);

// Hurwitz zeta, Euler-Maclaurin with tail bound folded into abs_error.
// a in (0, 1]; s = 1 is a pole error.
ValueWithError hurwitz_zeta(cplx s, double a);

// zeta(s, a) - 1/(s - 1): entire in s, safe arbitrarily close to (and at)
// s = 1.  Lets L(s, chi) for nontrivial chi be assembled near s = 1, where
// the per-term poles cancel because the character sums to zero.
ValueWithError hurwitz_zeta_deflated(cplx s, double a);

inline ValueWithError riemann_zeta(cplx s) { return hurwitz_zeta(s, 1.0); }

// Smooth cutoffs built from the exp(-1/t) glue.  bump: supported on
// [1/4, 5/4], identically 1 on [1/2, 1].  window: supported on [1, 2] with
// the same transition sharpness (1/4).
struct SmoothWeight {
    enum class Kind { bump, window };
    Kind kind = Kind::bump;
    double sharpness = 0.25;

    double support_lo() const { return kind == Kind::bump ? 0.25 : 1.0; }
    double support_hi() const { return kind == Kind::bump ? 1.25 : 2.0; }
    double operator()(double x) const;
};

inline SmoothWeight bump_h() { return {SmoothWeight::Kind::bump, 0.25}; }
inline SmoothWeight window_w() { return {SmoothWeight::Kind::window, 0.25}; }

// Mellin transform  f~(z) = int f(x) x^{z-1} dx  over the compact support
// (entire in z).  Composite Gauss-Legendre split at the transition knots,
// panel-doubled until stable.  log_moment = true inserts a log x factor
// (needed for d/dz at z = 1).
ValueWithError mellin_weight(const SmoothWeight& f, cplx z, bool log_moment = false);

// G_kappa(xi) = (1/2 pi i) int_(sigma) [Gamma((1/2+s+kappa)/2) /
// Gamma((1/2+kappa)/2)] xi^{-s} ds / s, the smoothed cutoff in the central-
// value formula.  Vertical-line trapezoid, step 0.02, |Im s| <= 60; the line
// is Re s = 2 for xi >= 1 and Re s = -1/4 (plus the s = 0 residue, which is
// 1) for xi < 1, where the right line would amplify roundoff by xi^{-2}.
ValueWithError g_weight(int kappa, double xi);

// Gamma((1-w+khat)/2) / Gamma((w+khat)/2), the functional-equation ratio.
// Evaluated directly and, for cross-checking, through the cotangent identity
//   Gamma((2-w)/2)/Gamma((w+1)/2) = Gamma((1-w)/2)/Gamma(w/2) * cot(pi w/2);
// the reported abs_error includes the disagreement between the two routes.
ValueWithError gamma_ratio_kappa(cplx w, int khat);

// Adaptive composite Gauss-Legendre on [a, b] (panel doubling, compared
// levels give the error estimate).  Exposed for reuse in tests.
ValueWithError integrate_gl(const std::function<cplx(double)>& f, double a, double b,
                            double target_abs = 1e-13, int max_panels = 1024);

} // namespace dds::special
