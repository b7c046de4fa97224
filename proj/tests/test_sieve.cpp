#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "dds/lfunc.hpp"
#include "dds/rng.hpp"
#include "dds/sieve.hpp"

using namespace dds;
using namespace dds::sieve;
using arith::chi_tilde;
using arith::kronecker;
using arith::Mod8;
using arith::QuadChar;

namespace {

// random +-1 coefficients on the odd squarefree slots, norm refreshed
CoeffSeq sign_draw(Rng& rng, int64_t Q) {
    auto a = make_coeffs(Q);
    auto spf = arith::spf_table(std::max<int64_t>(Q, 2));
    auto n0 = kernel_table(Q, spf);
    for (int64_t n = 1; n <= Q; n += 2)
        if (n0[static_cast<std::size_t>(n)] == n)
            a.set(n, static_cast<double>(rng.sign()));
    refresh_norm(a);
    return a;
}

// least-squares slope of log|y| against log x
double log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    auto n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double lx = std::log(xs[i]);
        double ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

TEST_CASE("coefficient sequences index odd slots and cache the starred norm") {
    auto a = make_coeffs(21);
    CHECK(a.entries.size() == 11);
    a.set(1, cplx(0.0, 3.0));
    a.set(9, cplx(2.0, 1.0)); // 9 = 3^2, stored but outside the starred norm
    a.set(15, 1.0);
    CHECK_THROWS_AS(a.set(6, 1.0), std::domain_error);
    CHECK_THROWS_AS(a.set(23, 1.0), std::domain_error);
    CHECK_THROWS_AS(a.at(0), std::domain_error);
    CHECK(a.at(23) == cplx(0.0, 0.0)); // beyond bound reads as zero
    CHECK(a.at(9) == cplx(2.0, 1.0));

    CHECK(starred_norm_sq(a) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK_FALSE(norm_consistent(a)); // cache still zero
    refresh_norm(a);
    CHECK(norm_consistent(a));
    CHECK(a.norm_sq == doctest::Approx(10.0).epsilon(1e-14));

    a.norm_sq += 1e-3;
    CHECK_FALSE(norm_consistent(a));

    CHECK_THROWS_AS(make_coeffs(0), std::domain_error);
}

TEST_CASE("symbol rows agree with the kronecker symbol exhaustively") {
    const int64_t bound = 200;
    auto spf = arith::spf_table(bound);
    for (int64_t d = 1; d <= bound; ++d) {
        auto row = top_row(d, bound, spf);
        for (int64_t n = 1; n <= bound; ++n)
            REQUIRE(row[static_cast<std::size_t>(n)] == kronecker(d, n));
    }
    for (int64_t m = 1; m <= bound; m += 2) {
        auto row = bottom_row(m, bound, spf);
        for (int64_t n = 1; n <= bound; ++n)
            REQUIRE(row[static_cast<std::size_t>(n)] == kronecker(n, m));
    }
    CHECK_THROWS_AS(bottom_row(4, 10, spf), std::domain_error);
}

TEST_CASE("squarefree kernel table matches the arithmetic split") {
    auto spf = arith::spf_table(400);
    auto n0 = kernel_table(400, spf);
    for (int64_t n = 1; n <= 400; ++n)
        REQUIRE(n0[static_cast<std::size_t>(n)] == arith::squarefree_split(n).d0);
}

TEST_CASE("double character sum: pinned values and exact real output") {
    QuadChar triv;
    CHECK(double_char_sum(1, 1, triv, triv) == cplx(1.0, 0.0));

    // 3x3 trivial expansion collects to 1 + 2/sqrt2 + 2/sqrt3 - 2/sqrt6
    double hand = 1.0 + 2.0 / std::sqrt(2.0) + 2.0 / std::sqrt(3.0) - 2.0 / std::sqrt(6.0);
    cplx s33 = double_char_sum(3, 3, triv, triv);
    CHECK(s33.real() == doctest::Approx(hand).epsilon(1e-14));
    CHECK(s33.imag() == 0.0);

    // against a literal kronecker double loop, with twists on both sides
    QuadChar chi = chi_tilde(3, Mod8::psi2);
    QuadChar chip{1, Mod8::psi_m1};
    for (auto [P, Q] : {std::pair<int64_t, int64_t>{5, 12}, {8, 8}, {12, 5}}) {
        double direct = 0.0;
        for (int64_t d = 1; d <= P; ++d)
            for (int64_t n = 1; n <= Q; ++n)
                direct += kronecker(d, n) * chi(n) * chip(d) /
                          std::sqrt(static_cast<double>(d) * static_cast<double>(n));
        cplx got = double_char_sum(P, Q, chi, chip);
        CHECK(got.real() == doctest::Approx(direct).epsilon(1e-13));
        CHECK(got.imag() == 0.0);
    }

    CHECK_THROWS_AS(double_char_sum(0, 5, triv, triv), std::domain_error);
}

TEST_CASE("double character growth table separates trivial and twisted decay") {
    QuadChar triv;
    auto rows = double_char_growth(2, 8, triv, triv);
    REQUIRE(rows.size() == 7);
    std::vector<double> ps, mags;
    for (const auto& r : rows) {
        CHECK(r.ratio == std::abs(r.value) / std::sqrt(static_cast<double>(r.P + r.Q)));
        ps.push_back(static_cast<double>(r.P));
        mags.push_back(std::abs(r.value));
    }
    double exp_triv = log_slope(ps, mags);
    MESSAGE("trivial growth exponent ", exp_triv);
    CHECK(exp_triv > 0.6);
    CHECK(exp_triv < 0.95);

    auto twisted = double_char_growth(2, 8, chi_tilde(3, Mod8::psi2), QuadChar{1, Mod8::psi_m1});
    std::vector<double> tmags;
    for (const auto& r : twisted) tmags.push_back(std::abs(r.value));
    double exp_tw = log_slope(ps, tmags);
    MESSAGE("twisted growth exponent ", exp_tw);
    CHECK(exp_tw > -0.3);
    CHECK(exp_tw < 0.45);
}

TEST_CASE("large sieve ratio: closed form at Q = 1") {
    auto a = make_coeffs(1);
    a.set(1, 1.0);
    refresh_norm(a);

    for (int64_t P : {10, 100, 500}) {
        auto spf = arith::spf_table(P);
        auto n0 = kernel_table(P, spf);
        int64_t cnt = 0;
        for (int64_t m = 1; m <= P; m += 2)
            if (n0[static_cast<std::size_t>(m)] == m) ++cnt;
        // inner sum is a_1 (1/m) = 1 for every starred m
        double want = static_cast<double>(cnt) / static_cast<double>(P + 1);
        double got = large_sieve_ratio(P, 1, a);
        CHECK(got == doctest::Approx(want).epsilon(1e-14));
        CHECK(got <= 1.0);
    }
}

TEST_CASE("large sieve ratio stays below the recorded constant on seeded draws") {
    struct Shape {
        int64_t P, Q;
    };
    const Shape shapes[] = {{100, 100}, {500, 500}, {2000, 500}, {500, 2000}};
    double worst = 0.0;
    for (int si = 0; si < 4; ++si) {
        auto kern = build_kernel(shapes[si].P, shapes[si].Q);
        Rng rng(9000 + si);
        double mx = 0.0;
        for (int t = 0; t < 100; ++t) {
            auto a = sign_draw(rng, shapes[si].Q);
            double r = large_sieve_ratio(kern, a);
            CHECK(r > 0.0);
            if (r > mx) mx = r;
        }
        MESSAGE("shape (", shapes[si].P, ",", shapes[si].Q, ") max ratio ", mx);
        // observed maxima 0.27 / 0.22 / 0.31 / 0.09; 0.75 leaves 2.4x headroom
        CHECK(mx <= 0.75);
        worst = std::max(worst, mx);
    }
    CHECK(worst <= 0.75);
}

TEST_CASE("large sieve ratio refuses zero or stale norms") {
    auto kern = build_kernel(50, 50);
    auto z = make_coeffs(50);
    refresh_norm(z);
    CHECK_THROWS_AS(large_sieve_ratio(kern, z), std::domain_error);

    Rng rng(1);
    auto a = sign_draw(rng, 50);
    a.norm_sq *= 1.5;
    CHECK_THROWS_AS(large_sieve_ratio(kern, a), std::domain_error);
}

TEST_CASE("corollary-normalized bilinear form stays below the recorded constant") {
    Rng rng(501);
    double mx = 0.0;
    for (int t = 0; t < 50; ++t) {
        auto a = make_coeffs(300);
        auto b = make_coeffs(300);
        for (int64_t n = 1; n <= 300; n += 2) {
            a.set(n, rng.sign() / std::sqrt(static_cast<double>(n)));
            b.set(n, rng.sign() / std::sqrt(static_cast<double>(n)));
        }
        refresh_norm(a);
        refresh_norm(b);
        mx = std::max(mx, corollary_ratio(300, 300, a, b));
    }
    MESSAGE("corollary max ratio ", mx);
    // observed max 0.24 over these seeds; 1.0 leaves 4x headroom
    CHECK(mx <= 1.0);
    CHECK(mx > 0.0);
}

TEST_CASE("fourth moment ratio: single-term case and growth scan") {
    QuadChar triv;
    // X = 1 keeps only d0 = 1, so the ratio is |L(s, chi)|^4 / (q |s|)^{1.05}
    cplx s(0.75, 0.5);
    auto lv = lfunc::l_value_hurwitz(s, chi_tilde(5), 1e-10);
    double want = std::pow(std::abs(lv.value), 4.0) /
                  std::pow(5.0 * std::abs(s), 1.05);
    CHECK(fourth_moment_ratio(1.0, chi_tilde(5), s) ==
          doctest::Approx(want).epsilon(1e-12));

    double r200 = fourth_moment_ratio(200.0, triv, cplx(0.5, 0.0));
    MESSAGE("fourth moment X=200 trivial: ", r200);
    CHECK(r200 <= 10.0);
    CHECK(r200 > 0.0);

    for (double X : {25.0, 50.0, 100.0}) {
        double r = fourth_moment_ratio(X, triv, cplx(0.5, 0.0));
        MESSAGE("fourth moment X=", X, ": ", r);
        CHECK(r > 0.0);
        CHECK(std::isfinite(r));
    }

    double r5 = fourth_moment_ratio(100.0, chi_tilde(5), cplx(0.5, 1.0));
    MESSAGE("fourth moment X=100 chi_5 s=1/2+i: ", r5);
    CHECK(r5 <= 10.0);

    CHECK_THROWS_AS(fourth_moment_ratio(100.0, triv, cplx(0.4, 0.0)), std::domain_error);
    CHECK_THROWS_AS(fourth_moment_ratio(0.5, triv, cplx(1.5, 0.0)), std::domain_error);
}

TEST_CASE("sieve results are identical across thread counts") {
    QuadChar chi = chi_tilde(3, Mod8::psi2);
    QuadChar chip{1, Mod8::psi_m1};
    cplx s1 = double_char_sum(500, 500, chi, chip, 1);
    cplx s3 = double_char_sum(500, 500, chi, chip, 3);
    CHECK(s1 == s3);

    auto k1 = build_kernel(500, 500, 1);
    auto k4 = build_kernel(500, 500, 4);
    CHECK(k1.rows == k4.rows);
    Rng rng(77);
    auto a = sign_draw(rng, 500);
    CHECK(large_sieve_ratio(k1, a, 1) == large_sieve_ratio(k4, a, 4));
    CHECK(large_sieve_ratio(k1, a, 1) == large_sieve_ratio(500, 500, a, 2));

    CHECK(fourth_moment_ratio(150.0, chi_tilde(5), cplx(0.6, 0.3), 1) ==
          fourth_moment_ratio(150.0, chi_tilde(5), cplx(0.6, 0.3), 3));

    Rng ra(11), rb(11);
    auto ca = make_coeffs(200);
    auto cb = make_coeffs(200);
    for (int64_t n = 1; n <= 200; n += 2) {
        ca.set(n, ra.sign() / std::sqrt(static_cast<double>(n)));
        cb.set(n, rb.sign() / std::sqrt(static_cast<double>(n)));
    }
    CHECK(corollary_ratio(200, 200, ca, cb, 1) == corollary_ratio(200, 200, ca, cb, 4));
}

TEST_CASE("growth csv format") {
    std::vector<GrowthRow> rows = {{4, 4, cplx(4.3297678198630183, 0.0), 1.5308035241438699},
                                   {8, 8, cplx(-0.5, 0.25), 0.125}};
    std::string csv = growth_csv(rows);
    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "P,Q,value_re,value_im,ratio");
    REQUIRE(std::getline(in, line));
    {
        std::istringstream row(line);
        std::string tok;
        std::getline(row, tok, ',');
        CHECK(tok == "4");
        std::getline(row, tok, ',');
        CHECK(tok == "4");
        std::getline(row, tok, ',');
        CHECK(std::stod(tok) == 4.3297678198630183); // %.17g round-trips
        std::getline(row, tok, ',');
        CHECK(std::stod(tok) == 0.0);
        std::getline(row, tok, ',');
        CHECK(std::stod(tok) == 1.5308035241438699);
    }
    REQUIRE(std::getline(in, line));
    CHECK(line.substr(0, 9) == "8,8,-0.5,");
    CHECK_FALSE(std::getline(in, line));
}
