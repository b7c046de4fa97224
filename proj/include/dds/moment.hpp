#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dds/arith.hpp"
#include "dds/lfunc.hpp"
#include "dds/policy.hpp"
#include "dds/special.hpp"
#include "dds/value.hpp"

namespace dds::moment {

using arith::Mod8;
using arith::QuadChar;
using std::int64_t;

// S(X; chi) = sum_{(d,2N)=1} L^{(2N)}(1/2, chi_{d0} chi) P_{d0,d1}(1/2) h(d/X)
// with h the standard bump (support [1/4, 5/4], so d <= (5/4)X).  chi must
// have odd conductor N (trivial chi means N = 1).  For X < 4 the sum is
// defined as 0.  L-values go through the AFE, optionally cached.
ValueWithError moment_sum_S(double X, const QuadChar& chi, const TruncationPolicy& policy = {},
                            lfunc::LCache* cache = nullptr, int threads = 1);

// The same sum through the expanded AFE form, split by whether n g is a
// perfect square (g the squarefree Euler-correction divisor).  square +
// nonsquare reproduces moment_sum_S up to the carried error bounds.
struct SquareParts {
    ValueWithError square;
    ValueWithError nonsquare;
};

SquareParts moment_sum_parts(double X, const QuadChar& chi, const TruncationPolicy& policy = {});

// T(s; Y, psi restricted to (d0, m) = 1) = sum over squarefree d0 of
// psi(d0) d0^{s/2} h(d0/Y), truncated exactly at (5/4)Y by the support of h.
// Requires Re s > 0.
ValueWithError t_sum(cplx s, double Y, const QuadChar& psi, int64_t m,
                     const special::SmoothWeight& h = special::bump_h());

// E0(s): the displayed product
//   (4/9)(1 - 2^{-2s-1}) prod_p (1+1/p)(1 + (1/p)(1 - p^{-2s-1})^{-1})^{-1}
//   * prod_{p|N} (1+1/p)^{-2} (1 + 1/p - p^{-2s-1})
// truncated over primes <= prime_cutoff, the p^{-2 Re s - 2} log-tail in
// abs_error.  Requires Re s > -1/4; throws accuracy_error when the tail
// estimate exceeds 1e-3.
ValueWithError euler_E0(cplx s, int64_t N, int64_t prime_cutoff = 1000000);

// E1(s; g) = prod over odd p | g of
//   (1+1/p)^{-2} (1 - p^{-2s-1})^{-1} (1 + 1/p - p^{-2s-1});
// empty product (g = 1 or g = 2) is 1.  g must be squarefree and nonzero.
cplx euler_E1(cplx s, int64_t g);

// H(s) = sum_{(d1,2N)=1} d1^{-2-s} sum_{f1|d1} prod_{p|2f1} (1 - p^{-s-1} E1(s;p)),
// d1 truncated at d1_cutoff, divisor-sum tail folded into abs_error.
// Requires Re s >= 0.
ValueWithError h_function(cplx s, int64_t N, int64_t d1_cutoff = 4000);

// Main-term coefficients of S(X; chi) = a_N X log X + b_N X + (error): the
// residue at s = 0 of the collapsed contour integrand, summed over the
// d0 mod 4 classes.  The Laurent data is re-derived from the implemented AFE
// normalization G_kappa(n sqrt(pi / (c0 d0 N))), so the conductor factor
// enters as (c0(l) N / pi)^{s/2}; see residue notes in moment.cpp.
struct ResidueCoefficients {
    double a_N = 0.0;
    double b_N = 0.0;
};

ResidueCoefficients residue_coefficients(int64_t N,
                                         const special::SmoothWeight& h = special::bump_h());

struct MomentReport {
    int64_t N = 0;
    std::vector<double> X_grid;
    std::vector<ValueWithError> S_values;
    double fitted_aN = 0.0;
    double fitted_bN = 0.0;
    double residue_aN = 0.0;
    double residue_bN = 0.0;
    std::vector<double> residuals; // S - fit per grid point
};

// Least-squares fit of S(X) against {X log X, X} over the grid (>= 4 points
// spanning a factor >= 16), reported next to the residue-derived pair.
MomentReport fit_moment(int64_t N, const std::vector<double>& X_grid,
                        const TruncationPolicy& policy = {}, lfunc::LCache* cache = nullptr,
                        int threads = 1);

std::string moment_report_json(const MomentReport& r);

struct NonvanishRecord {
    int64_t N = 0;
    int64_t D_of_N = 0;
    ValueWithError l_value;
    bool certified = false;
    std::vector<double> margins; // |L| / (10 abs_error) for the failed d < D
};

// Smallest d >= 1 with L(1/2, chi_{dN}) certified nonzero.  chi_{dN} is the
// symbol (dN/.), reduced to the primitive character of the squarefree kernel;
// the finitely many Euler factors (1 - chi(p) p^{-1/2}) relating the two
// never vanish, so certification transfers.  Exhausting d_max without a
// certification throws inconclusive_error (vanishing is never claimed).
NonvanishRecord nonvanish_scan(int64_t N, int64_t d_max, const TruncationPolicy& policy = {},
                               lfunc::LCache* cache = nullptr);

// rows "N,D,re,im,abs_error,certified"
std::string nonvanish_csv(const std::vector<NonvanishRecord>& rows);

} // namespace dds::moment
