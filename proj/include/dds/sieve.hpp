#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dds/arith.hpp"
#include "dds/value.hpp"

namespace dds::sieve {

using arith::QuadChar;
using std::int64_t;

// Coefficient sequence for the large-sieve sums, indexed by odd n <= bound
// (slot (n-1)/2).  norm_sq caches the starred norm sum*_{n} |a_n|^2 over odd
// squarefree n; consumers refuse the sequence when the cache drifts more than
// 1e-12 * scale from the recomputed value.
struct CoeffSeq {
    int64_t bound = 0;
    std::vector<cplx> entries;
    double norm_sq = 0.0;

    cplx at(int64_t n) const;    // 0 beyond bound; throws for even or nonpositive n
    void set(int64_t n, cplx v); // throws for even or out-of-range n
};

CoeffSeq make_coeffs(int64_t bound);
double starred_norm_sq(const CoeffSeq& a);
void refresh_norm(CoeffSeq& a);
bool norm_consistent(const CoeffSeq& a);

// Kronecker symbol rows through one completely multiplicative fill each, the
// batched kernel behind every sieve sum:
//   top_row(d):    n -> (d / n) for n = 1..bound
//   bottom_row(m): n -> (n / m) for n = 1..bound, odd m
std::vector<int8_t> top_row(int64_t d, int64_t bound, const std::vector<int32_t>& spf);
std::vector<int8_t> bottom_row(int64_t m, int64_t bound, const std::vector<int32_t>& spf);

// squarefree kernel n0 of n = n0 n1^2 for n = 0..bound (slot 0 unused)
std::vector<int64_t> kernel_table(int64_t bound, const std::vector<int32_t>& spf);

// S(P,Q; chi, chi') = sum_{d<=P} sum_{n<=Q} (d/n) chi(n) chi'(d) / sqrt(d n).
// Every term is real, so the imaginary part is exactly zero.
cplx double_char_sum(int64_t P, int64_t Q, const QuadChar& chi, const QuadChar& chi_prime,
                     int threads = 1);

// Precomputed (n/m) rows for the odd squarefree m <= P, so that repeated
// draws against one (P,Q) shape pay only for the inner products.
struct SieveKernel {
    int64_t P = 0;
    int64_t Q = 0;
    std::vector<int64_t> ms;       // odd squarefree m <= P, ascending
    std::vector<int8_t> n_starred; // odd squarefree indicator for n <= Q
    std::vector<int8_t> rows;      // ms.size() rows of length Q+1, row-major
};

SieveKernel build_kernel(int64_t P, int64_t Q, int threads = 1);

// [sum*_{m<=P} |sum*_{n<=Q} a_n (n/m)|^2] / [(P+Q) sum*_{n} |a_n|^2] with
// starred sums over odd squarefree integers: the large-sieve ratio with the
// (PQ)^eps factor dropped.  Throws domain_error on zero or stale norm_sq.
double large_sieve_ratio(const SieveKernel& kern, const CoeffSeq& a, int threads = 1);
double large_sieve_ratio(int64_t P, int64_t Q, const CoeffSeq& a, int threads = 1);

// |sum_{m<=P odd} sum_{n<=Q odd} a_m b_n (n0/m)| / (P+Q)^{0.55}, the
// normalized corollary shape with n = n0 n1^2 (0.55 = 1/2 + eps at eps 0.05)
double corollary_ratio(int64_t P, int64_t Q, const CoeffSeq& a, const CoeffSeq& b,
                       int threads = 1);

// sum_{d0<=X odd squarefree} |L(s, chi_{d0} chi)|^4 / (X q |s|)^{1.05} with
// q the conductor of chi.  Requires Re s >= 1/2.  L-values go through the
// Hurwitz oracle; a pole error propagates if the trivial member of the
// family is evaluated at s = 1.
double fourth_moment_ratio(double X, const QuadChar& chi, cplx s, int threads = 1);

// CSV rows "P,Q,value_re,value_im,ratio"
struct GrowthRow {
    int64_t P = 0;
    int64_t Q = 0;
    cplx value;
    double ratio = 0.0;
};

std::string growth_csv(const std::vector<GrowthRow>& rows);

// |S(P,P)| against the large-sieve scale sqrt(P+Q) on P = Q = 2^k,
// k = kmin..kmax, for exponent fitting
std::vector<GrowthRow> double_char_growth(int kmin, int kmax, const QuadChar& chi,
                                          const QuadChar& chi_prime, int threads = 1);

} // namespace dds::sieve
