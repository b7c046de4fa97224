#pragma once

#include <cstdint>
#include <vector>

namespace dds::arith {

using std::int64_t;

// Kronecker symbol (a/n), full Kronecker extension of the Jacobi symbol:
// multiplicative in both arguments, (a/2) = 0, +1, -1 for a even, a = +-1 (8),
// a = +-3 (8), and (a/-1) = sign handling for negative n.  Binary reduction,
// no factorization.  n = 0 is a domain error.
int kronecker(int64_t a, int64_t n);

// chi_d(n) = (d/n) computed through the reciprocity flip
//   (d/n) = (n/d)                for d = 1 (mod 4)
//   (d/n) = (n/d) * psi_{-1}(n)  for d = 3 (mod 4)
// for odd positive d, n.  Exists as an independently testable route; callers
// that just want the symbol should use kronecker directly.
int reciprocity_flip(int64_t d, int64_t n);

// The four quadratic characters of conductor dividing 8.
enum class Mod8 { psi1, psi_m1, psi2, psi_m2 };

int mod8_eval(Mod8 psi, int64_t n);
Mod8 mod8_mul(Mod8 a, Mod8 b);
int64_t mod8_conductor(Mod8 psi);
const char* mod8_name(Mod8 psi);
Mod8 mod8_parse(const char* name); // throws on unknown tag

// Quadratic character chi(n) = (n / odd_part) * psi(n), odd_part odd and
// squarefree.  This canonical bottom-symbol form is a genuine Dirichlet
// character mod odd_part * conductor(psi) for every argument (including even
// n, where the psi factor carries the vanishing).  chi_d-style characters
// (symbol (d/.)) are converted on construction via reciprocity:
// (d/.) = (./d) for d = 1 (4) and (./d) psi_{-1} for d = 3 (4); built_as_top
// records which constructor produced the object.
struct QuadChar {
    int64_t odd_part = 1;
    Mod8 eight = Mod8::psi1;
    bool built_as_top = false;

    int operator()(int64_t n) const;
    int64_t conductor() const { return odd_part * mod8_conductor(eight); }
    bool is_trivial() const { return odd_part == 1 && eight == Mod8::psi1; }
    int at_minus_one() const;
};

// (./k) * psi, k odd squarefree positive.
QuadChar chi_tilde(int64_t k, Mod8 psi = Mod8::psi1);
// (d/.) * psi, d odd squarefree positive, canonicalized per above.
QuadChar chi_top(int64_t d, Mod8 psi = Mod8::psi1);

// Pointwise product, canonicalized: odd parts combine to the squarefree
// kernel of their product, eight-parts multiply in the Klein group.
QuadChar product(const QuadChar& a, const QuadChar& b);

// kappa(chi) = (1 - chi(-1)) / 2: 0 for even characters, 1 for odd.
int kappa(const QuadChar& chi);

// d = d0 * d1^2 with d0 squarefree.  Trial division up to cbrt(d) plus a
// perfect-square test on the cofactor; valid for d <= ~9e18 but intended for
// d <= 1e9 per the module contract.
struct SquarefreeSplit {
    int64_t d = 1;
    int64_t d0 = 1;
    int64_t d1 = 1;
    std::vector<std::pair<int64_t, int>> d1_factorization; // (p, alpha), p^alpha || d1
};

SquarefreeSplit squarefree_split(int64_t d);

std::vector<int64_t> primes_up_to(int64_t bound);

// Smallest-prime-factor table, spf[0] = spf[1] = 0.  Backbone of the batched
// multiplicative fills used by the sieve and L-series code.
std::vector<int32_t> spf_table(int64_t bound);

bool is_prime(int64_t n);

// Distinct prime divisors (trial division; fine for the small moduli used as
// Euler-factor sets).
std::vector<int64_t> prime_divisors(int64_t n);

int64_t gcd64(int64_t a, int64_t b);

// Values of a completely multiplicative function on 1..bound, given its
// values on primes.  out[n] for n >= 1; out[0] unused.
template <class PrimeVal>
std::vector<int8_t> multiplicative_fill(int64_t bound, const std::vector<int32_t>& spf,
                                        PrimeVal prime_val) {
    std::vector<int8_t> out(static_cast<std::size_t>(bound) + 1, 0);
    if (bound >= 1) out[1] = 1;
    for (int64_t n = 2; n <= bound; ++n) {
        int64_t p = spf[static_cast<std::size_t>(n)];
        if (p == n)
            out[static_cast<std::size_t>(n)] = static_cast<int8_t>(prime_val(p));
        else
            out[static_cast<std::size_t>(n)] =
                static_cast<int8_t>(out[static_cast<std::size_t>(p)] *
                                    out[static_cast<std::size_t>(n / p)]);
    }
    return out;
}

} // namespace dds::arith
