#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>

#include "dds/arith.hpp"
#include "dds/policy.hpp"
#include "dds/value.hpp"

namespace dds::lfunc {

using arith::Mod8;
using arith::QuadChar;
using std::int64_t;

// Conductor scale of chi_{d0} chi psi: the mod-8 leftover after folding the
// d0 = 3 (mod 4) reciprocity twist into psi.  Values 1, 4, 8 keyed by
// (d0 mod 4, psi); the full conductor is c0 * d0 * q.
int64_t c0_table(int64_t d0, Mod8 psi);

// chi_{d0} chi psi as one canonical character.  chi must have odd conductor
// (eight part trivial) coprime to d0; d0 odd squarefree positive.
QuadChar twisted_char(int64_t d0, const QuadChar& chi, Mod8 psi);

struct LRecord {
    int64_t d0 = 1;
    QuadChar chi;
    Mod8 psi = Mod8::psi1;
    ValueWithError value;
    std::string method; // "afe" or "hurwitz"
};

// L(1/2, chi_{d0} chi psi) by the approximate functional equation
//   L(1/2) = 2 sum_n chi_full(n) n^{-1/2} G_kappa(n sqrt(pi / (c0 d0 q))),
// terms dropped once the G tail bound clears the working precision, dropped
// mass folded into abs_error.  For the completely trivial character the two
// pole crossings of the completed zeta contribute -4 pi^{1/4} / Gamma(1/4).
ValueWithError l_central_afe(int64_t d0, const QuadChar& chi, Mod8 psi,
                             const TruncationPolicy& policy = {});

// L(s, chi) = q^{-s} sum_{a=1}^{q} chi(a) zeta(s, a/q).  The independent
// route: exact in principle at every s (s = 1 pole for trivial chi).  Near
// s = 1 with nontrivial chi the per-term poles are deflated before summing.
// For Re s >= 2.5 the plain Dirichlet series is used instead (cheaper for
// large conductors); it stops once the integral-test tail, which goes into
// abs_error, clears target_abs.
ValueWithError l_value_hurwitz(cplx s, const QuadChar& chi_total, double target_abs = 1e-12);

// L^(P)(s, chi) = L(s, chi) prod_{p | P} (1 - chi(p) p^{-s})
ValueWithError remove_euler_factors(const ValueWithError& l_val, cplx s,
                                    const QuadChar& chi_total, int64_t P);

// Three-regime convexity ceiling with fixed constant 10 and epsilon = 0.05;
// a sanity bound for tests, not a certified estimate.
double convexity_bound_envelope(cplx s, int64_t q);

// value is numerically certified nonzero iff |value| > 10 * abs_error
bool certified_nonzero(const ValueWithError& v);

// Append-only central-value cache keyed by (d0, q, psi, method).  Optional
// file backing: rows are loaded on construction and every put is appended
// and flushed, so interrupted scans restart warm.  Readers take a shared
// lock; appends are serialized (single writer).
class LCache {
public:
    LCache() = default;
    explicit LCache(const std::string& path);

    std::optional<ValueWithError> get(int64_t d0, int64_t q, Mod8 psi,
                                      const std::string& method) const;
    void put(int64_t d0, int64_t q, Mod8 psi, const std::string& method,
             const ValueWithError& v);
    std::size_t size() const;

private:
    using Key = std::tuple<int64_t, int64_t, int, std::string>;
    mutable std::shared_mutex mu_;
    std::map<Key, ValueWithError> map_;
    std::string path_;
};

} // namespace dds::lfunc
