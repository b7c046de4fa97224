#include "dds/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dds/lfunc.hpp"
#include "dds/parallel.hpp"

namespace dds::sieve {

namespace {

struct Acc {
    KahanSum sum;
};

struct NoResult {};

} // namespace

cplx CoeffSeq::at(int64_t n) const {
    if (n < 1 || n % 2 == 0)
        throw std::domain_error("CoeffSeq::at: index must be odd and positive");
    if (n > bound) return {0.0, 0.0};
    return entries[static_cast<std::size_t>((n - 1) / 2)];
}

void CoeffSeq::set(int64_t n, cplx v) {
    if (n < 1 || n % 2 == 0 || n > bound)
        throw std::domain_error("CoeffSeq::set: index must be odd and within bound");
    entries[static_cast<std::size_t>((n - 1) / 2)] = v;
}

CoeffSeq make_coeffs(int64_t bound) {
    if (bound < 1) throw std::domain_error("make_coeffs: bound >= 1 required");
    CoeffSeq c;
    c.bound = bound;
    c.entries.assign(static_cast<std::size_t>((bound + 1) / 2), cplx(0.0, 0.0));
    return c;
}

std::vector<int64_t> kernel_table(int64_t bound, const std::vector<int32_t>& spf) {
    std::vector<int64_t> n0(static_cast<std::size_t>(std::max<int64_t>(bound, 0)) + 1, 1);
    for (int64_t n = 2; n <= bound; ++n) {
        int64_t m = n;
        int64_t k = 1;
        while (m > 1) {
            int64_t p = spf[static_cast<std::size_t>(m)];
            int e = 0;
            while (m % p == 0) {
                m /= p;
                ++e;
            }
            if (e % 2 == 1) k *= p;
        }
        n0[static_cast<std::size_t>(n)] = k;
    }
    return n0;
}

double starred_norm_sq(const CoeffSeq& a) {
    if (a.bound < 1) return 0.0;
    auto spf = arith::spf_table(std::max<int64_t>(a.bound, 2));
    auto n0 = kernel_table(a.bound, spf);
    KahanSum acc;
    for (int64_t n = 1; n <= a.bound; n += 2)
        if (n0[static_cast<std::size_t>(n)] == n)
            acc.add(std::norm(a.entries[static_cast<std::size_t>((n - 1) / 2)]));
    return acc.total().real();
}

void refresh_norm(CoeffSeq& a) { a.norm_sq = starred_norm_sq(a); }

bool norm_consistent(const CoeffSeq& a) {
    double fresh = starred_norm_sq(a);
    return std::abs(a.norm_sq - fresh) <= 1e-12 * (1.0 + fresh);
}

std::vector<int8_t> top_row(int64_t d, int64_t bound, const std::vector<int32_t>& spf) {
    return arith::multiplicative_fill(bound, spf,
                                      [d](int64_t p) { return arith::kronecker(d, p); });
}

std::vector<int8_t> bottom_row(int64_t m, int64_t bound, const std::vector<int32_t>& spf) {
    if (m < 1 || m % 2 == 0) throw std::domain_error("bottom_row: m must be odd and positive");
    return arith::multiplicative_fill(bound, spf,
                                      [m](int64_t p) { return arith::kronecker(p, m); });
}

cplx double_char_sum(int64_t P, int64_t Q, const QuadChar& chi, const QuadChar& chi_prime,
                     int threads) {
    if (P < 1 || Q < 1) throw std::domain_error("double_char_sum: P, Q >= 1 required");
    auto spf = arith::spf_table(std::max<int64_t>(Q, 2));
    // chi(n) / sqrt(n), shared across all rows
    std::vector<double> wn(static_cast<std::size_t>(Q) + 1, 0.0);
    for (int64_t n = 1; n <= Q; ++n)
        wn[static_cast<std::size_t>(n)] = chi(n) / std::sqrt(static_cast<double>(n));

    Acc out;
    block_map_reduce<Acc>(
        1, P, threads,
        [&](int64_t lo, int64_t hi, Acc& blk) {
            for (int64_t d = lo; d <= hi; ++d) {
                int cd = chi_prime(d);
                if (cd == 0) continue;
                auto row = top_row(d, Q, spf);
                double inner = 0.0;
                for (int64_t n = 1; n <= Q; ++n)
                    inner += row[static_cast<std::size_t>(n)] * wn[static_cast<std::size_t>(n)];
                blk.sum.add(cd * inner / std::sqrt(static_cast<double>(d)));
            }
        },
        [&](const Acc& blk) { out.sum.add(blk.sum); }, Acc{});
    return out.sum.total();
}

SieveKernel build_kernel(int64_t P, int64_t Q, int threads) {
    if (P < 1 || Q < 1) throw std::domain_error("build_kernel: P, Q >= 1 required");
    SieveKernel k;
    k.P = P;
    k.Q = Q;

    auto spf_p = arith::spf_table(std::max<int64_t>(P, 2));
    auto n0_p = kernel_table(P, spf_p);
    for (int64_t m = 1; m <= P; m += 2)
        if (n0_p[static_cast<std::size_t>(m)] == m) k.ms.push_back(m);

    auto spf_q = arith::spf_table(std::max<int64_t>(Q, 2));
    auto n0_q = kernel_table(Q, spf_q);
    k.n_starred.assign(static_cast<std::size_t>(Q) + 1, 0);
    for (int64_t n = 1; n <= Q; n += 2)
        if (n0_q[static_cast<std::size_t>(n)] == n) k.n_starred[static_cast<std::size_t>(n)] = 1;

    k.rows.assign(k.ms.size() * static_cast<std::size_t>(Q + 1), 0);
    // Rows land in disjoint slices, so parallel block order does not matter.
    block_map_reduce<NoResult>(
        0, static_cast<int64_t>(k.ms.size()) - 1, threads,
        [&](int64_t lo, int64_t hi, NoResult&) {
            for (int64_t r = lo; r <= hi; ++r) {
                auto row = bottom_row(k.ms[static_cast<std::size_t>(r)], Q, spf_q);
                std::copy(row.begin(), row.end(),
                          k.rows.begin() + static_cast<std::size_t>(r) * (Q + 1));
            }
        },
        [](const NoResult&) {}, NoResult{});
    return k;
}

double large_sieve_ratio(const SieveKernel& kern, const CoeffSeq& a, int threads) {
    if (!norm_consistent(a))
        throw std::domain_error("large_sieve_ratio: norm_sq cache is stale");
    if (!(a.norm_sq > 0.0))
        throw std::domain_error("large_sieve_ratio: coefficients have zero norm");

    const int64_t nmax = std::min(kern.Q, a.bound);
    Acc out;
    block_map_reduce<Acc>(
        0, static_cast<int64_t>(kern.ms.size()) - 1, threads,
        [&](int64_t lo, int64_t hi, Acc& blk) {
            for (int64_t r = lo; r <= hi; ++r) {
                const int8_t* row = kern.rows.data() + static_cast<std::size_t>(r) * (kern.Q + 1);
                cplx inner{0.0, 0.0};
                for (int64_t n = 1; n <= nmax; n += 2)
                    if (kern.n_starred[static_cast<std::size_t>(n)])
                        inner += a.entries[static_cast<std::size_t>((n - 1) / 2)] *
                                 static_cast<double>(row[n]);
                blk.sum.add(std::norm(inner));
            }
        },
        [&](const Acc& blk) { out.sum.add(blk.sum); }, Acc{});
    double num = out.sum.total().real();
    return num / (static_cast<double>(kern.P + kern.Q) * a.norm_sq);
}

double large_sieve_ratio(int64_t P, int64_t Q, const CoeffSeq& a, int threads) {
    return large_sieve_ratio(build_kernel(P, Q, threads), a, threads);
}

double corollary_ratio(int64_t P, int64_t Q, const CoeffSeq& a, const CoeffSeq& b, int threads) {
    if (P < 1 || Q < 1) throw std::domain_error("corollary_ratio: P, Q >= 1 required");
    auto spf = arith::spf_table(std::max<int64_t>(Q, 2));
    auto n0 = kernel_table(Q, spf);
    const int64_t mmax = std::min(P, a.bound);
    const int64_t nmax = std::min(Q, b.bound);

    Acc out;
    block_map_reduce<Acc>(
        1, mmax, threads,
        [&](int64_t lo, int64_t hi, Acc& blk) {
            for (int64_t m = lo; m <= hi; ++m) {
                if (m % 2 == 0) continue;
                cplx am = a.entries[static_cast<std::size_t>((m - 1) / 2)];
                if (am == cplx(0.0, 0.0)) continue;
                auto row = bottom_row(m, Q, spf);
                cplx inner{0.0, 0.0};
                for (int64_t n = 1; n <= nmax; n += 2)
                    inner += b.entries[static_cast<std::size_t>((n - 1) / 2)] *
                             static_cast<double>(row[static_cast<std::size_t>(
                                 n0[static_cast<std::size_t>(n)])]);
                blk.sum.add(am * inner);
            }
        },
        [&](const Acc& blk) { out.sum.add(blk.sum); }, Acc{});
    return std::abs(out.sum.total()) / std::pow(static_cast<double>(P + Q), 0.55);
}

double fourth_moment_ratio(double X, const QuadChar& chi, cplx s, int threads) {
    if (!(X >= 1.0)) throw std::domain_error("fourth_moment_ratio: X >= 1 required");
    if (s.real() < 0.5 - 1e-12)
        throw std::domain_error("fourth_moment_ratio: Re s >= 1/2 required");
    const int64_t xmax = static_cast<int64_t>(std::floor(X));
    auto spf = arith::spf_table(std::max<int64_t>(xmax, 2));
    auto n0 = kernel_table(xmax, spf);

    Acc out;
    block_map_reduce<Acc>(
        1, xmax, threads,
        [&](int64_t lo, int64_t hi, Acc& blk) {
            for (int64_t d0 = lo; d0 <= hi; ++d0) {
                if (d0 % 2 == 0 || n0[static_cast<std::size_t>(d0)] != d0) continue;
                QuadChar total = arith::product(arith::chi_top(d0), chi);
                ValueWithError lv = lfunc::l_value_hurwitz(s, total, 1e-10);
                double m = std::abs(lv.value);
                blk.sum.add(m * m * m * m);
            }
        },
        [&](const Acc& blk) { out.sum.add(blk.sum); }, Acc{});
    double env = std::pow(X * static_cast<double>(chi.conductor()) * std::abs(s), 1.05);
    return out.sum.total().real() / env;
}

std::string growth_csv(const std::vector<GrowthRow>& rows) {
    std::string out = "P,Q,value_re,value_im,ratio\n";
    char buf[200];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%lld,%lld,%.17g,%.17g,%.17g\n",
                      static_cast<long long>(r.P), static_cast<long long>(r.Q), r.value.real(),
                      r.value.imag(), r.ratio);
        out += buf;
    }
    return out;
}

std::vector<GrowthRow> double_char_growth(int kmin, int kmax, const QuadChar& chi,
                                          const QuadChar& chi_prime, int threads) {
    if (kmin < 0 || kmax < kmin || kmax > 24)
        throw std::domain_error("double_char_growth: need 0 <= kmin <= kmax <= 24");
    std::vector<GrowthRow> rows;
    for (int k = kmin; k <= kmax; ++k) {
        int64_t P = int64_t{1} << k;
        cplx v = double_char_sum(P, P, chi, chi_prime, threads);
        rows.push_back({P, P, v, std::abs(v) / std::sqrt(static_cast<double>(2 * P))});
    }
    return rows;
}

} // namespace dds::sieve
