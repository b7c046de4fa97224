#include "dds/lfunc.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "dds/errors.hpp"
#include "dds/special.hpp"

namespace dds::lfunc {

using special::cpow;
using special::pi;

int64_t c0_table(int64_t d0, Mod8 psi) {
    if (d0 <= 0 || (d0 & 1) == 0) throw std::domain_error("c0_table: d0 must be odd positive");
    Mod8 folded = (d0 % 4 == 3) ? arith::mod8_mul(Mod8::psi_m1, psi) : psi;
    return arith::mod8_conductor(folded);
}

QuadChar twisted_char(int64_t d0, const QuadChar& chi, Mod8 psi) {
    if (chi.eight != Mod8::psi1)
        throw std::domain_error("twisted_char: chi must have odd conductor");
    if (arith::gcd64(d0, 2 * chi.odd_part) != 1)
        throw std::domain_error("twisted_char: d0 must be coprime to 2q");
    QuadChar psi_char{1, psi, false};
    return arith::product(arith::chi_top(d0), arith::product(chi, psi_char));
}

ValueWithError l_central_afe(int64_t d0, const QuadChar& chi, Mod8 psi,
                             const TruncationPolicy& policy) {
    policy.validate();
    QuadChar chi_full = twisted_char(d0, chi, psi);
    const int kap = arith::kappa(chi_full);
    const int64_t q = chi.odd_part;
    const int64_t cond = c0_table(d0, psi) * d0 * q;
    const double scale = std::sqrt(pi / static_cast<double>(cond));
    const double a = (0.5 + kap) / 2.0;
    const double ga = std::tgamma(a);
    const int64_t n_max = static_cast<int64_t>(std::ceil(12.0 * std::sqrt(static_cast<double>(cond))));

    KahanSum sum;
    double err = 0.0, absum = 0.0;
    for (int64_t n = 1; n <= n_max; ++n) {
        int c = chi_full(n);
        if (c == 0) continue;
        double xi = static_cast<double>(n) * scale;
        double amp = std::pow(static_cast<double>(n), -0.5);
        if (xi * xi > 64.0) {
            // G_kappa(xi) = Q(a, xi^2) <= (xi^2)^(a-1) e^(-xi^2) / Gamma(a)
            // for a <= 1; once that clears 1e-40 per term the rest is dust
            double bound = std::pow(xi * xi, a - 1.0) * std::exp(-xi * xi) / ga;
            err += amp * bound;
            if (bound < 1e-40) break;
            continue;
        }
        ValueWithError g = special::g_weight(kap, xi);
        sum.add(c * amp * g.re());
        err += amp * g.abs_error;
        absum += amp * std::fabs(g.re());
    }

    double value = 2.0 * sum.total().real();
    err = 2.0 * err + 1e-15 * absum;
    if (chi_full.is_trivial()) {
        // the completed zeta has poles at both ends of the contour shift
        value -= 4.0 * std::pow(pi, 0.25) / std::tgamma(0.25);
    }
    return {cplx(value, 0.0), err};
}

namespace {

ValueWithError l_direct_series(cplx s, const QuadChar& chi, double target) {
    // plain Dirichlet series, Re s >= 2.5; integral-test tail
    const double sigma = s.real();
    auto tail = [&](double n0) { return std::pow(n0, 1.0 - sigma) / (sigma - 1.0); };
    int64_t n_max = 64;
    while (tail(static_cast<double>(n_max)) > target && n_max < (1 << 21)) n_max *= 2;

    KahanSum sum;
    for (int64_t n = 1; n <= n_max; ++n) {
        int c = chi(n);
        if (c == 0) continue;
        sum.add(static_cast<double>(c) * cpow(static_cast<double>(n), -s));
    }
    cplx v = sum.total();
    return {v, tail(static_cast<double>(n_max)) + 1e-15 * std::abs(v) * 4.0};
}

} // namespace

ValueWithError l_value_hurwitz(cplx s, const QuadChar& chi_total, double target_abs) {
    const int64_t q = chi_total.conductor();
    if (chi_total.is_trivial()) {
        if (std::abs(s - cplx(1.0, 0.0)) < 1e-10)
            throw pole_error("l_value_hurwitz: zeta pole at s = 1");
        return special::riemann_zeta(s);
    }
    if (s.real() >= 2.5) return l_direct_series(s, chi_total, target_abs);

    const bool deflate = std::abs(s - cplx(1.0, 0.0)) < 1e-3;
    KahanSum sum;
    double err = 0.0;
    for (int64_t a = 1; a <= q; ++a) {
        int c = chi_total(a);
        if (c == 0) continue;
        ValueWithError z = deflate
                               ? special::hurwitz_zeta_deflated(s, static_cast<double>(a) / q)
                               : special::hurwitz_zeta(s, static_cast<double>(a) / q);
        sum.add(static_cast<double>(c) * z.value);
        err += z.abs_error;
    }
    // with deflation the subtracted poles sum to zero because sum chi(a) = 0
    cplx v = cpow(static_cast<double>(q), -s) * sum.total();
    double qs = std::abs(cpow(static_cast<double>(q), -s));
    return {v, qs * err + 1e-15 * std::abs(v) * 4.0};
}

ValueWithError remove_euler_factors(const ValueWithError& l_val, cplx s,
                                    const QuadChar& chi_total, int64_t P) {
    if (P < 1) throw std::domain_error("remove_euler_factors: P must be positive");
    ValueWithError out = l_val;
    for (int64_t p : arith::prime_divisors(P)) {
        int c = chi_total(p);
        if (c == 0) continue;
        out = out * (cplx(1.0, 0.0) - static_cast<double>(c) * cpow(static_cast<double>(p), -s));
    }
    return out;
}

double convexity_bound_envelope(cplx s, int64_t q) {
    const double eps = 0.05, C = 10.0;
    const double sigma = s.real();
    const double x = static_cast<double>(q) * (1.0 + std::fabs(s.imag()));
    if (sigma >= 1.0 + eps) return C;
    if (sigma <= -eps) return C * std::pow(x, 0.5 - sigma + eps);
    return C * std::pow(x, (1.0 - sigma) / 2.0 + eps);
}

bool certified_nonzero(const ValueWithError& v) { return v.abs() > 10.0 * v.abs_error; }

namespace {

constexpr const char* kCacheHeader = "d0,q,psi,method,re,im,abs_error";

} // namespace

LCache::LCache(const std::string& path) : path_(path) {
    std::ifstream in(path_);
    if (!in) {
        // fresh cache: create the file with its header now so concurrent
        // readers never see a headerless file
        std::ofstream out(path_);
        if (!out) throw std::runtime_error("LCache: cannot create " + path_);
        out << kCacheHeader << "\n";
        return;
    }
    std::string line;
    if (!std::getline(in, line) || line != kCacheHeader)
        throw std::runtime_error("LCache: bad header in " + path_);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string d0s, qs, psis, method, res, ims, errs;
        if (!std::getline(ss, d0s, ',') || !std::getline(ss, qs, ',') ||
            !std::getline(ss, psis, ',') || !std::getline(ss, method, ',') ||
            !std::getline(ss, res, ',') || !std::getline(ss, ims, ',') ||
            !std::getline(ss, errs))
            throw std::runtime_error("LCache: malformed row in " + path_ + ": " + line);
        Key k{std::stoll(d0s), std::stoll(qs),
              static_cast<int>(arith::mod8_parse(psis.c_str())), method};
        map_[k] = ValueWithError(cplx(std::stod(res), std::stod(ims)), std::stod(errs));
    }
}

std::optional<ValueWithError> LCache::get(int64_t d0, int64_t q, Mod8 psi,
                                          const std::string& method) const {
    std::shared_lock lock(mu_);
    auto it = map_.find(Key{d0, q, static_cast<int>(psi), method});
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

void LCache::put(int64_t d0, int64_t q, Mod8 psi, const std::string& method,
                 const ValueWithError& v) {
    std::unique_lock lock(mu_);
    auto [it, fresh] = map_.insert({Key{d0, q, static_cast<int>(psi), method}, v});
    if (!fresh || path_.empty()) return;
    std::ofstream out(path_, std::ios::app);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%lld,%lld,%s,%s,%.17g,%.17g,%.17g",
                  static_cast<long long>(d0), static_cast<long long>(q),
                  arith::mod8_name(psi), method.c_str(), v.re(), v.im(), v.abs_error);
    out << buf << "\n";
}

std::size_t LCache::size() const {
    std::shared_lock lock(mu_);
    return map_.size();
}

} // namespace dds::lfunc
