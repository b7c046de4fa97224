#include "dds/arith.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dds/errors.hpp"

namespace dds::arith {

int64_t gcd64(int64_t a, int64_t b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

int kronecker(int64_t a, int64_t n) {
    if (n == 0) throw std::domain_error("kronecker: zero lower argument");
    int sign = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) sign = -sign;
    }
    if ((n & 1) == 0) {
        if ((a & 1) == 0) return 0;
        // strip 2s from n; each contributes (a/2) = +-1 by a mod 8
        int twos = 0;
        while ((n & 1) == 0) {
            n >>= 1;
            ++twos;
        }
        if (twos & 1) {
            int64_t am8 = ((a % 8) + 8) % 8;
            if (am8 == 3 || am8 == 5) sign = -sign;
        }
    }
    // Jacobi symbol (a/n), n odd positive, by binary reduction.  The t-bit
    // trick accumulates the quadratic reciprocity and (2/n) sign flips; the
    // final sign is read off (t ^ (t>>1)) & 2.
    a %= n;
    if (a < 0) a += n;
    std::uint64_t t = 0;
    std::uint64_t ua = static_cast<std::uint64_t>(a), un = static_cast<std::uint64_t>(n);
    while (ua != 0) {
        while ((ua & 3) == 0) ua >>= 2;
        if ((ua & 1) == 0) {
            t ^= un; // (2/n) flips iff n = +-3 mod 8; tracked via n's bits
            ua >>= 1;
        }
        t ^= ua & un & 2; // both = 3 mod 4 flips
        std::uint64_t r = un % ua;
        un = ua;
        ua = r;
    }
    if (un != 1) return 0;
    int j = ((t ^ (t >> 1)) & 2) ? -1 : 1;
    return sign * j;
}

int reciprocity_flip(int64_t d, int64_t n) {
    if (d <= 0 || n <= 0 || (d & 1) == 0 || (n & 1) == 0)
        throw std::domain_error("reciprocity_flip: arguments must be odd positive");
    int v = kronecker(n, d);
    if (d % 4 == 3 && n % 4 == 3) v = -v;
    return v;
}

int mod8_eval(Mod8 psi, int64_t n) {
    int64_t r = ((n % 8) + 8) % 8;
    switch (psi) {
        case Mod8::psi1:
            return 1;
        case Mod8::psi_m1:
            if ((r & 1) == 0) return 0;
            return (r % 4 == 1) ? 1 : -1;
        case Mod8::psi2:
            if ((r & 1) == 0) return 0;
            return (r == 1 || r == 7) ? 1 : -1;
        case Mod8::psi_m2:
            if ((r & 1) == 0) return 0;
            return (r == 1 || r == 3) ? 1 : -1;
    }
    return 0;
}

Mod8 mod8_mul(Mod8 a, Mod8 b) {
    if (a == Mod8::psi1) return b;
    if (b == Mod8::psi1) return a;
    if (a == b) return Mod8::psi1;
    // distinct nontrivial elements of the Klein group multiply to the third
    int used = static_cast<int>(a) + static_cast<int>(b); // psi_m1=1, psi2=2, psi_m2=3
    switch (used) {
        case 3: return Mod8::psi_m2; // psi_m1 * psi2
        case 4: return Mod8::psi2;   // psi_m1 * psi_m2
        case 5: return Mod8::psi_m1; // psi2 * psi_m2
    }
    return Mod8::psi1;
}

int64_t mod8_conductor(Mod8 psi) {
    switch (psi) {
        case Mod8::psi1: return 1;
        case Mod8::psi_m1: return 4;
        default: return 8;
    }
}

const char* mod8_name(Mod8 psi) {
    switch (psi) {
        case Mod8::psi1: return "psi1";
        case Mod8::psi_m1: return "psi-1";
        case Mod8::psi2: return "psi2";
        case Mod8::psi_m2: return "psi-2";
    }
    return "?";
}

Mod8 mod8_parse(const char* name) {
    std::string s(name);
    if (s == "psi1") return Mod8::psi1;
    if (s == "psi-1") return Mod8::psi_m1;
    if (s == "psi2") return Mod8::psi2;
    if (s == "psi-2") return Mod8::psi_m2;
    throw std::domain_error("unknown mod-8 character tag: " + s);
}

int QuadChar::operator()(int64_t n) const {
    int v = kronecker(n, odd_part);
    if (v == 0) return 0;
    return v * mod8_eval(eight, n);
}

int QuadChar::at_minus_one() const { return (*this)(-1); }

namespace {
void require_odd_squarefree(int64_t k, const char* who) {
    if (k <= 0 || (k & 1) == 0)
        throw std::domain_error(std::string(who) + ": conductor must be odd positive");
    SquarefreeSplit s = squarefree_split(k);
    if (s.d1 != 1)
        throw std::domain_error(std::string(who) + ": conductor must be squarefree");
}
} // namespace

QuadChar chi_tilde(int64_t k, Mod8 psi) {
    require_odd_squarefree(k, "chi_tilde");
    return QuadChar{k, psi, false};
}

QuadChar chi_top(int64_t d, Mod8 psi) {
    require_odd_squarefree(d, "chi_top");
    Mod8 eight = (d % 4 == 3) ? mod8_mul(Mod8::psi_m1, psi) : psi;
    return QuadChar{d, eight, true};
}

QuadChar product(const QuadChar& a, const QuadChar& b) {
    int64_t g = gcd64(a.odd_part, b.odd_part);
    int64_t odd = (a.odd_part / g) * (b.odd_part / g); // squarefree kernel
    return QuadChar{odd, mod8_mul(a.eight, b.eight), false};
}

int kappa(const QuadChar& chi) { return (1 - chi.at_minus_one()) / 2; }

SquarefreeSplit squarefree_split(int64_t d) {
    if (d <= 0) throw std::domain_error("squarefree_split: d must be positive");
    SquarefreeSplit out;
    out.d = d;
    int64_t rem = d;
    for (int64_t p = 2; p * p * p <= rem; p += (p == 2) ? 1 : 2) {
        if (rem % p != 0) continue;
        int e = 0;
        while (rem % p == 0) {
            rem /= p;
            ++e;
        }
        if (e & 1) out.d0 *= p;
        if (e / 2 > 0) {
            out.d1_factorization.emplace_back(p, e / 2);
            for (int i = 0; i < e / 2; ++i) out.d1 *= p;
        }
    }
    // cofactor is 1, p, p^2, or p*q with p,q distinct primes > cbrt(d)
    if (rem > 1) {
        auto r = static_cast<int64_t>(std::llround(std::sqrt(static_cast<double>(rem))));
        while (r * r > rem) --r;
        while ((r + 1) * (r + 1) <= rem) ++r;
        if (r * r == rem) {
            out.d1 *= r;
            out.d1_factorization.emplace_back(r, 1);
        } else {
            out.d0 *= rem;
        }
    }
    return out;
}

std::vector<int64_t> primes_up_to(int64_t bound) {
    std::vector<int64_t> out;
    if (bound < 2) return out;
    std::vector<bool> comp(static_cast<std::size_t>(bound) + 1, false);
    for (int64_t i = 2; i <= bound; ++i) {
        if (comp[static_cast<std::size_t>(i)]) continue;
        out.push_back(i);
        for (int64_t j = i * i; j <= bound; j += i) comp[static_cast<std::size_t>(j)] = true;
    }
    return out;
}

std::vector<int32_t> spf_table(int64_t bound) {
    std::vector<int32_t> spf(static_cast<std::size_t>(bound) + 1, 0);
    for (int64_t i = 2; i <= bound; ++i) {
        if (spf[static_cast<std::size_t>(i)] != 0) continue;
        for (int64_t j = i; j <= bound; j += i)
            if (spf[static_cast<std::size_t>(j)] == 0)
                spf[static_cast<std::size_t>(j)] = static_cast<int32_t>(i);
    }
    return spf;
}

bool is_prime(int64_t n) {
    if (n < 2) return false;
    for (int64_t p = 2; p * p <= n; p += (p == 2) ? 1 : 2)
        if (n % p == 0) return false;
    return true;
}

std::vector<int64_t> prime_divisors(int64_t n) {
    std::vector<int64_t> out;
    if (n < 0) n = -n;
    for (int64_t p = 2; p * p <= n; p += (p == 2) ? 1 : 2) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

} // namespace dds::arith
