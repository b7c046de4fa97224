#pragma once

#include <cstdint>

#include "dds/arith.hpp"
#include "dds/correction.hpp"
#include "dds/lfunc.hpp"
#include "dds/policy.hpp"
#include "dds/value.hpp"

namespace dds::zseries {

using arith::Mod8;
using arith::QuadChar;
using std::int64_t;

// Q-formula variant used throughout the double series: the alpha-minus-one
// reading is the one that survives both the reflection suite and the
// sum-switch test (see correction.hpp and the arbitration tests).
inline constexpr correction::Variant kSelectedQ = correction::Variant::Q_alpha_minus_one;

// Evaluation point of Z(s, w; chi, chi').  M, N are odd primes or 1; the
// twists are quadratic characters whose conductors divide 8 lcm(M, N).
struct ZPoint {
    cplx s;
    cplx w;
    QuadChar chi;
    QuadChar chi_prime;
    int64_t M = 1;
    int64_t N = 1;

    void validate() const; // throws std::domain_error
};

// Tail exponent of the d-indexed (direct) series at (s, w): the positive
// gap by which the point clears its absolute-convergence branch of
//   R1(1) = {Re s <= 0, Re s + Re w > 3/2}
//        cup {0 < Re s <= 1, Re s/2 + Re w > 3/2}
//        cup {Re s > 1, Re w > 1}.
// Throws region_error naming the violated branch inequality when the gap
// falls below margin.  The truncated tail decays like cutoff^{-gap}.
double direct_region_gap(cplx s, cplx w, double margin);

// Same for the m-indexed (swapped) series and R1(2), the mirror region with
// the roles of s and w exchanged.
double swapped_region_gap(cplx s, cplx w, double margin);

// Reject points within 1e-3 of the polar lines {s=1}, {w=1}, {s+w=3/2}.
void require_off_polar_lines(cplx s, cplx w);

// Truncation of Z(s,w;chi,chi') straight from the definition:
//   sum_{(d,2MN)=1, d<=cutoff} L^(2MN)(s, chi_{d0} chi) chi'(d0) P_{d0,d1}(s) / d^w.
// L-values go through the Hurwitz-backed oracle with Euler factors at
// p | 2MN removed; the per-term accuracy target is graded in d so the
// accumulated L error stays below the policy tolerance, and the truncation
// tail estimated from the region gap is folded into abs_error.
ValueWithError z_direct(const ZPoint& p, const TruncationPolicy& policy = {},
                        int threads = 1);

// The m-indexed series of the interchange-of-summation identity:
//   sum_{(m,2MN)=1, m<=cutoff} L^(2MN)(w, chi~_{m0} chi') chi(m) Q_{m0,m1}(w) / m^s,
// with the Q factor in the selected variant.  Equals z_direct where both
// regions overlap.
ValueWithError z_swapped(const ZPoint& p, const TruncationPolicy& policy = {},
                         int threads = 1);

// K_P(w; chi*) = prod_{p | P} (1 - chi*(p) p^{-(1-w)})^{-1} (1 - chi*(p) p^{-w}).
// Empty product (P = 1) is 1.  Throws pole_error when a denominator factor
// vanishes to within 1e-8.
cplx coeff_K(int64_t P, cplx w, const QuadChar& chi_star);

struct FG {
    cplx F;
    cplx G;
};

// The prime-indexed rational coefficients
//   F_P(w) = (chi*(P^2) P - P^2) / (chi*(P^2) P^{2w} - P^2),
//   G_P(w) = chi*(P)(P^{2-w} - P^{1+w}) / (chi*(P^2) P^{2w} - P^2),
// with F = 1, G = 0 at P = 1.  P must be prime or 1.
FG coeff_F_G(int64_t P, cplx w, const QuadChar& chi_star);

// The four coefficients of the first functional equation, n | MN:
//   A_1 = F_M F_N,  A_M = F_N G_M,  A_N = F_M G_N,  A_MN = G_M G_N,
// all with twist chi.
cplx coeff_A(int64_t n, const QuadChar& chi, cplx w, int64_t M, int64_t N);

// One m-term of the transformed series,
//   S(s,w;m,chi*) = L^(2MN)(1-w, chi~_{m0} chi' psi') chi*(m) Q_{m0,m1}(1-w)
//                   / m^{s+w-1/2},
// with chi' psi' assembled from p.chi_prime and the psi_prime tag.  p.chi
// plays no role here; chi* is free.
ValueWithError s_term(const ZPoint& p, Mod8 psi_prime, int64_t m,
                      const QuadChar& chi_star);

// Full right-hand side of the first functional equation in its pre-sieve
// form: prefactor (1/2) pi^{w-1/2} Gamma((1-w)/2)/Gamma(w/2) (j C_psi')^{1/2-w}
// times the m-sum of
//   K_2MN(w; chi~_{m0} chi' psi') S(s,w;m,chi psi)
//     [ (1+psi_-1(m0)) cot(pi w/2)^{kappa'} + (1-psi_-1(m0)) cot(pi w/2)^{1-kappa'} ],
// kappa' = kappa(chi' psi'), j the odd conductor of chi', C_psi' the mod-8
// conductor.  Requires Re s >= 3 and Re w in (1, 2.5] so the m-sum converges
// absolutely despite the conductor growth of L(1-w, .).  At even w the
// divergent cot branch is paired with a trivial zero of L(1-w, .); the term
// is evaluated as the limit -(2/pi) d/du L^(2MN)(u, .)|_{u=1-w} by a
// Richardson-extrapolated central difference.
ValueWithError funceq1_rhs(const ZPoint& p, Mod8 psi, Mod8 psi_prime,
                           const TruncationPolicy& policy = {});

// |Z_truncated(s, w)| / [(MN)^eps k^{1/4+eps} (1+|s|)^{1/4+eps}] on the
// initial-bound line Re s = 1/2, Re w = 1 + eps, k the odd conductor of chi.
// The line sits outside the absolute-convergence region, so no tail bound is
// claimed; the ratio is a recorded diagnostic.  Im s = 0 terms use the AFE
// route (optionally cached); other points fall back to the Hurwitz oracle.
double convexity_probe(const ZPoint& p, const TruncationPolicy& policy = {},
                       double eps = 0.05, lfunc::LCache* cache = nullptr,
                       int threads = 1);

} // namespace dds::zseries
