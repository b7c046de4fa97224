#include "dds/correction.hpp"

#include <cmath>
#include <stdexcept>

#include "dds/special.hpp"

namespace dds::correction {

using special::cpow;

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::P: return "P";
        case Variant::Q_as_printed: return "Q_as_printed";
        case Variant::Q_alpha_minus_one: return "Q_alpha_minus_one";
    }
    return "?";
}

namespace {

void validate_key(const CorrectionPolyKey& key) {
    if ((key.split.d & 1) == 0)
        throw std::domain_error("correction: d must be odd (gcd(d, 2MN) = 1)");
    if (arith::gcd64(key.split.d, key.twist.odd_part) != 1)
        throw std::domain_error("correction: d must be coprime to the twist conductor");
}

// One Euler factor.  cv = chi(p), bv = (base * chi)(p) with base the d0
// character; second_limit is alpha - 1 for P and the fixed Q, alpha for the
// printed Q.  chi(p^{2n}) collapses to 1 (n = 0) or cv^2; the odd-power
// coefficient is bv for every n since bv is 0 or +-1.
cplx euler_factor(int64_t p, int alpha, int cv, int bv, cplx z, int second_limit) {
    cplx x = cpow(static_cast<double>(p), 1.0 - 2.0 * z);
    cplx even = 1.0, odd = 0.0, xn = 1.0;
    for (int n = 1; n <= alpha; ++n) {
        xn *= x;
        if (cv != 0) even += xn;
    }
    xn = 1.0;
    for (int n = 0; n <= second_limit; ++n) {
        odd += xn;
        xn *= x;
    }
    return even - static_cast<double>(bv) * cpow(static_cast<double>(p), -z) * odd;
}

cplx eval_product(const CorrectionPolyKey& key, cplx z) {
    validate_key(key);
    const bool is_p = key.variant == Variant::P;
    const QuadChar base =
        is_p ? arith::chi_top(key.split.d0) : arith::chi_tilde(key.split.d0);
    cplx out = 1.0;
    for (auto [p, alpha] : key.split.d1_factorization) {
        int cv = key.twist(p);
        int bv = base(p) * cv;
        int second_limit = (key.variant == Variant::Q_as_printed) ? alpha : alpha - 1;
        out *= euler_factor(p, alpha, cv, bv, z, second_limit);
    }
    return out;
}

} // namespace

cplx eval_P(const CorrectionPolyKey& key, cplx s) {
    if (key.variant != Variant::P) throw std::domain_error("eval_P: key.variant must be P");
    return eval_product(key, s);
}

cplx eval_Q(const CorrectionPolyKey& key, cplx w) {
    if (key.variant == Variant::P) throw std::domain_error("eval_Q: key.variant must be a Q variant");
    return eval_product(key, w);
}

cplx eval_correction(const CorrectionPolyKey& key, cplx z) { return eval_product(key, z); }

double check_reflection(const CorrectionPolyKey& key, cplx z) {
    cplx lhs = eval_product(key, z);
    int chi_d1_sq = key.twist(key.split.d1);
    chi_d1_sq *= chi_d1_sq;
    cplx rhs = cpow(static_cast<double>(key.split.d1), 1.0 - 2.0 * z) *
               static_cast<double>(chi_d1_sq) * eval_product(key, 1.0 - z);
    return std::abs(lhs - rhs);
}

} // namespace dds::correction
