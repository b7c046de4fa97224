#include "dds/zseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "dds/errors.hpp"
#include "dds/parallel.hpp"
#include "dds/special.hpp"

namespace dds::zseries {

using arith::chi_tilde;
using arith::chi_top;
using arith::product;
using special::cpow;
using special::pi;

void ZPoint::validate() const {
    auto odd_prime_or_one = [](int64_t v) {
        return v == 1 || (v % 2 == 1 && arith::is_prime(v));
    };
    if (!odd_prime_or_one(M) || !odd_prime_or_one(N))
        throw std::domain_error("ZPoint: M and N must be odd primes or 1");
    const int64_t l = std::lcm(M, N);
    if (l % chi.odd_part != 0 || l % chi_prime.odd_part != 0)
        throw std::domain_error("ZPoint: twist conductors must divide 8 lcm(M, N)");
}

namespace {

// Tail exponent by convergence branch: the series index carries sig_sum, the
// L-argument sig_l controls the conductor growth of the numerator.
double branch_gap(double sig_l, double sig_sum) {
    if (sig_l > 1.0) return sig_sum - 1.0;
    if (sig_l > 0.0) return sig_l / 2.0 + sig_sum - 1.5;
    return sig_l + sig_sum - 1.5;
}

[[noreturn]] void throw_region(const char* op, const char* region, const char* lv,
                               const char* sv, double sig_l, double sig_sum,
                               double margin) {
    std::ostringstream os;
    os << op << ": outside " << region << " by margin " << margin << ": ";
    if (sig_l > 1.0)
        os << "branch {" << lv << " > 1} requires " << sv << " > 1, got " << sv
           << " = " << sig_sum;
    else if (sig_l > 0.0)
        os << "branch {0 < " << lv << " <= 1} requires " << lv << "/2 + " << sv
           << " > 3/2, got " << (sig_l / 2.0 + sig_sum);
    else
        os << "branch {" << lv << " <= 0} requires " << lv << " + " << sv
           << " > 3/2, got " << (sig_l + sig_sum);
    throw region_error(os.str());
}

void check_policy(const TruncationPolicy& policy, int64_t cutoff) {
    if (cutoff < 1 || !(policy.tolerance > 0.0) || !(policy.tail_exponent_margin > 0.0))
        throw std::domain_error("zseries: policy needs positive cutoff, tolerance, margin");
}

struct ZBlock {
    KahanSum acc;
    double err = 0.0;
    double bmax = 0.0;
};

// Shared evaluator of the two series: index runs over integers coprime to
// 2MN, the L-argument and the denominator power swap roles between the two.
ValueWithError z_core(cplx l_arg, cplx pw, const QuadChar& ltwist, const QuadChar& outer,
                      bool outer_at_kernel, bool top_kernel, int64_t M, int64_t N,
                      int64_t cutoff, double tol, double gap, int threads) {
    const int64_t mod = 2 * M * N;
    const double sig_pw = pw.real();

    auto per_block = [&](int64_t lo, int64_t hi, ZBlock& out) {
        for (int64_t idx = lo; idx <= hi; ++idx) {
            if (arith::gcd64(idx, mod) != 1) continue;
            auto sp = arith::squarefree_split(idx);
            QuadChar kernel = top_kernel ? chi_top(sp.d0) : chi_tilde(sp.d0);
            QuadChar total = product(kernel, ltwist);
            int oc = outer(outer_at_kernel ? sp.d0 : idx);
            if (oc == 0) continue;
            const double di = static_cast<double>(idx);
            // graded accuracy: per-term L error of c tol idx^{sig_pw - 3/2}
            // contributes c tol idx^{-3/2} after division by idx^{pw}, so the
            // accumulated budget stays a fixed fraction of tol
            double target = std::max(0.1 * tol * std::pow(di, sig_pw - 1.5), 1e-13);
            ValueWithError lv = lfunc::l_value_hurwitz(l_arg, total, target);
            lv = lfunc::remove_euler_factors(lv, l_arg, total, mod);
            correction::CorrectionPolyKey key{sp, ltwist,
                                              top_kernel ? correction::Variant::P : kSelectedQ};
            cplx poly = correction::eval_correction(key, l_arg);
            cplx dpow = cpow(di, -pw);
            cplx term = lv.value * static_cast<double>(oc) * poly * dpow;
            out.acc.add(term);
            out.err += lv.abs_error * std::abs(poly) * std::abs(dpow);
            out.bmax = std::max(out.bmax, std::abs(term) * std::pow(di, 1.0 + gap));
        }
    };

    ZBlock tot;
    block_map_reduce<ZBlock>(
        1, cutoff, threads, per_block,
        [&](const ZBlock& b) {
            tot.acc.add(b.acc);
            tot.err += b.err;
            tot.bmax = std::max(tot.bmax, b.bmax);
        },
        ZBlock{});

    cplx v = tot.acc.total();
    // sum_{idx > cutoff} B idx^{-1-gap} <= B cutoff^{-gap} / gap
    double tail = tot.bmax * std::pow(static_cast<double>(cutoff), -gap) / gap;
    return {v, tot.err + tail + detail::ulp_pad(v) * 8.0};
}

// L^(P)(u, chi) through the Hurwitz-backed oracle.
ValueWithError l_removed(cplx u, const QuadChar& chi, int64_t P, double target) {
    ValueWithError v = lfunc::l_value_hurwitz(u, chi, target);
    return lfunc::remove_euler_factors(v, u, chi, P);
}

// lim_{w -> E} cot(pi w/2) L^(P)(1-w, chi) at even E, where the trivial zero
// of the odd character's L-function cancels the cotangent pole:
//   cot(pi w/2) ~ (2/pi)/(w-E)  and  L(1-w) ~ -(w-E) L'(1-E),
// so the limit is -(2/pi) d/du L^(P)(u, chi) at u = 1-E.  Richardson-
// extrapolated central difference; the h-refinement disagreement rides along
// as the derivative's error estimate.
ValueWithError cot_l_limit(double E, const QuadChar& chi, int64_t P) {
    const double u0 = 1.0 - E;
    const double h = 1e-3;
    ValueWithError fp1 = l_removed(cplx(u0 + h, 0.0), chi, P, 1e-13);
    ValueWithError fm1 = l_removed(cplx(u0 - h, 0.0), chi, P, 1e-13);
    ValueWithError fp2 = l_removed(cplx(u0 + h / 2, 0.0), chi, P, 1e-13);
    ValueWithError fm2 = l_removed(cplx(u0 - h / 2, 0.0), chi, P, 1e-13);
    cplx d1 = (fp1.value - fm1.value) / (2.0 * h);
    cplx d2 = (fp2.value - fm2.value) / h;
    cplx deriv = (4.0 * d2 - d1) / 3.0;
    double derr = (fp2.abs_error + fm2.abs_error) / h * (4.0 / 3.0) +
                  (fp1.abs_error + fm1.abs_error) / (2.0 * h) / 3.0 +
                  std::abs(d2 - d1) / 3.0;
    const double c = 2.0 / pi;
    return {-c * deriv, c * derr};
}

} // namespace

double direct_region_gap(cplx s, cplx w, double margin) {
    double gap = branch_gap(s.real(), w.real());
    if (!(gap >= margin))
        throw_region("z_direct", "R1(1)", "Re s", "Re w", s.real(), w.real(), margin);
    return gap;
}

double swapped_region_gap(cplx s, cplx w, double margin) {
    double gap = branch_gap(w.real(), s.real());
    if (!(gap >= margin))
        throw_region("z_swapped", "R1(2)", "Re w", "Re s", w.real(), s.real(), margin);
    return gap;
}

void require_off_polar_lines(cplx s, cplx w) {
    if (std::abs(s - 1.0) < 1e-3)
        throw region_error("polar line {s = 1}: |s - 1| < 1e-3");
    if (std::abs(w - 1.0) < 1e-3)
        throw region_error("polar line {w = 1}: |w - 1| < 1e-3");
    if (std::abs(s + w - 1.5) < 1e-3)
        throw region_error("polar line {s + w = 3/2}: |s + w - 3/2| < 1e-3");
}

ValueWithError z_direct(const ZPoint& p, const TruncationPolicy& policy, int threads) {
    p.validate();
    check_policy(policy, policy.d_cutoff);
    require_off_polar_lines(p.s, p.w);
    double gap = direct_region_gap(p.s, p.w, policy.tail_exponent_margin);
    return z_core(p.s, p.w, p.chi, p.chi_prime, /*outer_at_kernel=*/true,
                  /*top_kernel=*/true, p.M, p.N, policy.d_cutoff, policy.tolerance,
                  gap, threads);
}

ValueWithError z_swapped(const ZPoint& p, const TruncationPolicy& policy, int threads) {
    p.validate();
    check_policy(policy, policy.m_cutoff);
    require_off_polar_lines(p.s, p.w);
    double gap = swapped_region_gap(p.s, p.w, policy.tail_exponent_margin);
    return z_core(p.w, p.s, p.chi_prime, p.chi, /*outer_at_kernel=*/false,
                  /*top_kernel=*/false, p.M, p.N, policy.m_cutoff, policy.tolerance,
                  gap, threads);
}

cplx coeff_K(int64_t P, cplx w, const QuadChar& chi_star) {
    if (P < 1) throw std::domain_error("coeff_K: P must be positive");
    cplx out{1.0, 0.0};
    for (int64_t p : arith::prime_divisors(P)) {
        int c = chi_star(p);
        if (c == 0) continue;
        const double pd = static_cast<double>(p);
        cplx denom = 1.0 - static_cast<double>(c) * cpow(pd, w - 1.0);
        if (std::abs(denom) < 1e-8) {
            std::ostringstream os;
            os << "coeff_K: denominator factor vanishes at p = " << p;
            throw pole_error(os.str());
        }
        out *= (1.0 - static_cast<double>(c) * cpow(pd, -w)) / denom;
    }
    return out;
}

FG coeff_F_G(int64_t P, cplx w, const QuadChar& chi_star) {
    if (P == 1) return {cplx(1.0, 0.0), cplx(0.0, 0.0)};
    if (P < 1 || !arith::is_prime(P))
        throw std::domain_error("coeff_F_G: P must be prime or 1");
    const double pd = static_cast<double>(P);
    const int c = chi_star(P);
    const int c2 = c * c;
    cplx denom = static_cast<double>(c2) * cpow(pd, 2.0 * w) - pd * pd;
    if (std::abs(denom) < 1e-8 * pd * pd) {
        std::ostringstream os;
        os << "coeff_F_G: denominator vanishes at P = " << P;
        throw pole_error(os.str());
    }
    cplx F = (static_cast<double>(c2) * pd - pd * pd) / denom;
    cplx G = static_cast<double>(c) * (cpow(pd, 2.0 - w) - cpow(pd, 1.0 + w)) / denom;
    return {F, G};
}

cplx coeff_A(int64_t n, const QuadChar& chi, cplx w, int64_t M, int64_t N) {
    FG fm = coeff_F_G(M, w, chi);
    FG fn = coeff_F_G(N, w, chi);
    if (n == 1) return fm.F * fn.F;
    if (n == M) return fn.F * fm.G;
    if (n == N) return fm.F * fn.G;
    if (n == M * N) return fm.G * fn.G;
    throw std::domain_error("coeff_A: n must be one of 1, M, N, MN");
}

ValueWithError s_term(const ZPoint& p, Mod8 psi_prime, int64_t m,
                      const QuadChar& chi_star) {
    p.validate();
    const int64_t mod = 2 * p.M * p.N;
    if (m < 1 || arith::gcd64(m, mod) != 1)
        throw std::domain_error("s_term: m must be positive and coprime to 2MN");
    QuadChar chip = product(p.chi_prime, chi_tilde(1, psi_prime));
    auto sp = arith::squarefree_split(m);
    QuadChar lchar = product(chi_tilde(sp.d0), chip);
    ValueWithError lv = l_removed(1.0 - p.w, lchar, mod, 1e-12);
    correction::CorrectionPolyKey key{sp, chip, kSelectedQ};
    cplx Qv = correction::eval_correction(key, 1.0 - p.w);
    cplx mpow = cpow(static_cast<double>(m), -(p.s + p.w - 0.5));
    int cm = chi_star(m);
    return lv * (static_cast<double>(cm) * Qv * mpow);
}

ValueWithError funceq1_rhs(const ZPoint& p, Mod8 psi, Mod8 psi_prime,
                           const TruncationPolicy& policy) {
    p.validate();
    check_policy(policy, policy.m_cutoff);
    require_off_polar_lines(p.s, p.w);
    const cplx s = p.s, w = p.w;
    if (s.real() < 3.0 - 1e-12)
        throw region_error("funceq1_rhs: requires Re s >= 3 for absolute m-convergence");
    if (!(w.real() > 1.0 && w.real() <= 2.5 + 1e-12))
        throw region_error("funceq1_rhs: requires Re w in (1, 2.5]");

    const QuadChar chi_t = product(p.chi, chi_tilde(1, psi));            // chi psi
    const QuadChar chip_t = product(p.chi_prime, chi_tilde(1, psi_prime)); // chi' psi'
    const int kap_p = arith::kappa(chip_t);
    const int64_t j = chip_t.odd_part;
    const int64_t cpsi = arith::mod8_conductor(chip_t.eight);
    const int64_t mod = 2 * p.M * p.N;

    // (1/2) pi^{w-1/2} Gamma((1-w)/2)/Gamma(w/2) (j C_psi')^{1/2-w}
    ValueWithError pref = special::gamma_ratio_kappa(w, 0) *
                          (0.5 * cpow(pi, w - 0.5) *
                           cpow(static_cast<double>(j * cpsi), 0.5 - w));

    const double wr = w.real();
    const double enear = 2.0 * static_cast<double>(std::llround(wr / 2.0));
    const bool near_even = enear >= 2.0 && std::abs(w - cplx(enear, 0.0)) < 1e-6;
    const cplx cotv = near_even ? cplx(0.0, 0.0) : special::cot_complex(pi * w / 2.0);

    const double gap = s.real() - 1.0;
    KahanSum acc;
    double err = 0.0, bmax = 0.0;
    for (int64_t m = 1; m <= policy.m_cutoff; ++m) {
        if (arith::gcd64(m, mod) != 1) continue;
        auto sp = arith::squarefree_split(m);
        QuadChar cstar = product(chi_tilde(sp.d0), chip_t);
        cplx K = coeff_K(mod, w, cstar);
        int cm = chi_t(m);
        if (cm == 0) continue;
        correction::CorrectionPolyKey qkey{sp, chip_t, kSelectedQ};
        cplx Qv = correction::eval_correction(qkey, 1.0 - w);
        cplx rest = static_cast<double>(cm) * Qv * cpow(static_cast<double>(m), -(s + w - 0.5));
        const int pm1 = arith::mod8_eval(Mod8::psi_m1, sp.d0);
        // bracket = (1 + psi_-1(m0)) cot^{kappa'} + (1 - psi_-1(m0)) cot^{1-kappa'};
        // exactly one weight is nonzero, and the sieve identity collapses it
        // to 2 cot^{kappa-hat} with kappa-hat = kappa(chi~_{m0} chi' psi')
        const double wt_plain = (kap_p == 0) ? (1.0 + pm1) : (1.0 - pm1);
        const double wt_cot = (kap_p == 1) ? (1.0 + pm1) : (1.0 - pm1);

        ValueWithError contrib{cplx(0.0, 0.0), 0.0};
        if (wt_plain != 0.0) {
            ValueWithError lv = l_removed(1.0 - w, cstar, mod, 1e-12);
            contrib = contrib + lv * (wt_plain * K * rest);
        }
        if (wt_cot != 0.0) {
            ValueWithError cl = near_even ? cot_l_limit(enear, cstar, mod)
                                          : l_removed(1.0 - w, cstar, mod, 1e-12) * cotv;
            contrib = contrib + cl * (wt_cot * K * rest);
        }
        acc.add(contrib.value);
        err += contrib.abs_error;
        bmax = std::max(bmax, std::abs(contrib.value) *
                                  std::pow(static_cast<double>(m), 1.0 + gap));
    }
    double tail = bmax * std::pow(static_cast<double>(policy.m_cutoff), -gap) / gap;
    ValueWithError msum{acc.total(), err + tail};
    return pref * msum;
}

double convexity_probe(const ZPoint& p, const TruncationPolicy& policy, double eps,
                       lfunc::LCache* cache, int threads) {
    p.validate();
    check_policy(policy, policy.d_cutoff);
    if (std::abs(p.s.real() - 0.5) > 1e-12)
        throw region_error("convexity_probe: line Re s = 1/2 required");
    if (std::abs(p.w.real() - (1.0 + eps)) > 1e-12)
        throw region_error("convexity_probe: line Re w = 1 + eps required");
    require_off_polar_lines(p.s, p.w);

    const int64_t mod = 2 * p.M * p.N;
    const QuadChar chi_odd = chi_tilde(p.chi.odd_part);
    const Mod8 psi = p.chi.eight;
    const bool central = p.s.imag() == 0.0;

    struct Blk {
        KahanSum acc;
    };
    auto per_block = [&](int64_t lo, int64_t hi, Blk& out) {
        for (int64_t d = lo; d <= hi; ++d) {
            if (arith::gcd64(d, mod) != 1) continue;
            auto sp = arith::squarefree_split(d);
            QuadChar total = product(chi_top(sp.d0), p.chi);
            ValueWithError lv;
            if (central) {
                std::optional<ValueWithError> hit;
                if (cache) hit = cache->get(sp.d0, chi_odd.conductor(), psi, "afe");
                if (hit) {
                    lv = *hit;
                } else {
                    lv = lfunc::l_central_afe(sp.d0, chi_odd, psi, policy);
                    if (cache) cache->put(sp.d0, chi_odd.conductor(), psi, "afe", lv);
                }
            } else {
                lv = lfunc::l_value_hurwitz(p.s, total, 1e-10);
            }
            lv = lfunc::remove_euler_factors(lv, p.s, total, mod);
            correction::CorrectionPolyKey key{sp, p.chi, correction::Variant::P};
            cplx poly = correction::eval_correction(key, p.s);
            int oc = p.chi_prime(sp.d0);
            out.acc.add(lv.value * static_cast<double>(oc) * poly *
                        cpow(static_cast<double>(d), -p.w));
        }
    };
    Blk tot;
    block_map_reduce<Blk>(1, policy.d_cutoff, threads, per_block,
                          [&](const Blk& b) { tot.acc.add(b.acc); }, Blk{});

    double env = std::pow(static_cast<double>(p.M * p.N), eps) *
                 std::pow(static_cast<double>(p.chi.odd_part), 0.25 + eps) *
                 std::pow(1.0 + std::abs(p.s), 0.25 + eps);
    return std::abs(tot.acc.total()) / env;
}

} // namespace dds::zseries
