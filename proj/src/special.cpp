#include "dds/special.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dds/errors.hpp"

namespace dds::special {

namespace {

const double kLanczos[9] = {
    0.99999999999980993,    676.5203681218851,      -1259.1392167224028,
    771.32342877765313,     -176.61502916214059,    12.507343278686905,
    -0.13857109526572012,   9.9843695780195716e-6,  1.5056327351493116e-7};

bool near_nonpositive_integer(cplx z, double tol) {
    if (std::fabs(z.imag()) > tol) return false;
    double r = std::round(z.real());
    return r <= 0.5 && std::fabs(z.real() - r) < tol;
}

cplx gamma_positive_half(cplx z) {
    // Re z >= 0.5 assumed
    cplx x = kLanczos[0];
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z - 1.0 + static_cast<double>(i));
    cplx t = z + 6.5;
    return std::sqrt(2.0 * pi) * std::pow(t, z - 0.5) * std::exp(-t) * x;
}

} // namespace

cplx gamma_complex(cplx z) {
    if (near_nonpositive_integer(z, 1e-12))
        throw pole_error("gamma_complex: pole at non-positive integer");
    if (z.real() < 0.5) {
        cplx s = std::sin(pi * z);
        return pi / (s * gamma_positive_half(1.0 - z));
    }
    return gamma_positive_half(z);
}

cplx log_gamma(cplx z) {
    if (z.real() <= 0.0)
        throw std::domain_error("log_gamma: implemented for Re z > 0 only");
    cplx x = kLanczos[0];
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z - 1.0 + static_cast<double>(i));
    cplx t = z + 6.5;
    return 0.5 * std::log(2.0 * pi) + (z - 0.5) * std::log(t) - t + std::log(x);
}

cplx digamma(cplx z) {
    if (near_nonpositive_integer(z, 1e-12))
        throw pole_error("digamma: pole at non-positive integer");
    cplx acc = 0.0;
    if (z.real() < 0.0) {
        // psi(z) = psi(1-z) - pi cot(pi z)
        acc -= pi * cot_complex(pi * z);
        z = 1.0 - z;
    }
    while (z.real() < 12.0) {
        acc -= 1.0 / z;
        z += 1.0;
    }
    static const double b[7] = {1.0 / 6,  -1.0 / 30,     1.0 / 42, -1.0 / 30,
                                5.0 / 66, -691.0 / 2730, 7.0 / 6};
    cplx inv2 = 1.0 / (z * z), p = inv2;
    cplx s = std::log(z) - 0.5 / z;
    for (int n = 1; n <= 7; ++n) {
        s -= b[n - 1] / (2.0 * n) * p;
        p *= inv2;
    }
    return acc + s;
}

cplx cot_complex(cplx z) {
    cplx s = std::sin(z);
    if (std::abs(s) == 0.0) throw pole_error("cot_complex: pole");
    return std::cos(z) / s;
}

namespace {

// Euler-Maclaurin core.  deflate subtracts the 1/(s-1) pole, making the
// result entire; the (b^{1-s} - 1)/(s - 1) factor is evaluated by series
// near s = 1 to avoid cancellation.
ValueWithError hurwitz_core(cplx s, double a, bool deflate) {
    if (!(a > 0.0) || a > 1.0)
        throw std::domain_error("hurwitz_zeta: a must lie in (0, 1]");
    if (!deflate && std::abs(s - cplx(1.0, 0.0)) < 1e-10)
        throw pole_error("hurwitz_zeta: pole at s = 1");

    const int K = std::max<int>(16, static_cast<int>(std::ceil(1.4 * std::fabs(s.imag()))) + 4);
    const int J = 12;
    // B_{2j}/(2j)! for j = 1..13 (j = 13 drives the remainder bound)
    static const double b2j[13] = {1.0 / 6,        -1.0 / 30,       1.0 / 42,
                                   -1.0 / 30,      5.0 / 66,        -691.0 / 2730,
                                   7.0 / 6,        -3617.0 / 510,   43867.0 / 798,
                                   -174611.0 / 330, 854513.0 / 138, -236364091.0 / 2730,
                                   8553103.0 / 6};
    static const auto fact = [] {
        std::array<double, 27> f{};
        f[0] = 1.0;
        for (int i = 1; i <= 26; ++i) f[i] = f[i - 1] * i;
        return f;
    }();

    KahanSum head;
    double max_term = 0.0;
    for (int k = 0; k < K; ++k) {
        cplx t = cpow(a + k, -s);
        head.add(t);
        max_term = std::max(max_term, std::abs(t));
    }
    double bb = a + K;
    cplx total = head.total();
    if (!deflate) {
        total += cpow(bb, 1.0 - s) / (s - 1.0);
    } else {
        // (b^{1-s} - 1)/(s - 1) = -log b * phi(u), u = (1-s) log b,
        // phi(u) = (e^u - 1)/u
        cplx u = (1.0 - s) * std::log(bb);
        cplx phi;
        if (std::abs(u) < 1e-2)
            phi = 1.0 + u * (0.5 + u * (1.0 / 6.0 + u * (1.0 / 24.0 + u / 120.0)));
        else
            phi = (std::exp(u) - 1.0) / u;
        total += -std::log(bb) * phi;
    }
    total += 0.5 * cpow(bb, -s);

    cplx poch = s;          // (s)_{2j-1} built incrementally
    cplx bpow = cpow(bb, -s - 1.0);
    double binv2 = 1.0 / (bb * bb);
    cplx correction = 0.0;
    for (int j = 1; j <= J; ++j) {
        if (j > 1) {
            poch *= (s + static_cast<double>(2 * j - 3)) * (s + static_cast<double>(2 * j - 2));
            bpow *= binv2;
        }
        correction += b2j[j - 1] / fact[2 * j] * poch * bpow;
    }
    total += correction;

    // first omitted term times the standard reliability factor
    cplx poch_next = poch * (s + static_cast<double>(2 * J - 1)) * (s + static_cast<double>(2 * J));
    double rem = std::abs(b2j[J] / fact[2 * J + 2] * poch_next * bpow) * binv2;
    double rel = std::abs(s + static_cast<double>(2 * J + 1)) / (s.real() + 2 * J + 1);
    double err = 2.0 * rem * std::max(1.0, rel) +
                 1e-15 * (K * max_term + 4.0 * std::abs(total));
    return {total, err};
}

} // namespace

ValueWithError hurwitz_zeta(cplx s, double a) { return hurwitz_core(s, a, false); }

ValueWithError hurwitz_zeta_deflated(cplx s, double a) { return hurwitz_core(s, a, true); }

double SmoothWeight::operator()(double x) const {
    auto glue = [](double t) -> double {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        double f = std::exp(-1.0 / t);
        double g = std::exp(-1.0 / (1.0 - t));
        return f / (f + g);
    };
    double lo = support_lo(), hi = support_hi(), w = sharpness;
    if (x <= lo || x >= hi) return 0.0;
    if (x < lo + w) return glue((x - lo) / w);
    if (x > hi - w) return glue((hi - x) / w);
    return 1.0;
}

namespace {

struct GaussLegendre {
    std::vector<double> x, w; // nodes/weights on [-1, 1]
    explicit GaussLegendre(int n) : x(n), w(n) {
        for (int i = 0; i < n; ++i) {
            double xi = std::cos(pi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = xi;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
                double step = p1 / dp;
                xi -= step;
                if (std::fabs(step) < 1e-15) break;
            }
            double p0 = 1.0, p1 = xi;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
            x[i] = xi;
            w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
        }
    }
};

const GaussLegendre& gl16() {
    static const GaussLegendre g(16);
    return g;
}

cplx gl_panelized(const std::function<cplx(double)>& f, double a, double b, int panels) {
    const auto& g = gl16();
    KahanSum s;
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * h;
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            double t = lo + 0.5 * h * (g.x[i] + 1.0);
            s.add(0.5 * h * g.w[i] * f(t));
        }
    }
    return s.total();
}

} // namespace

ValueWithError integrate_gl(const std::function<cplx(double)>& f, double a, double b,
                            double target_abs, int max_panels) {
    int panels = 8;
    cplx prev = gl_panelized(f, a, b, panels);
    for (;;) {
        panels *= 2;
        cplx cur = gl_panelized(f, a, b, panels);
        double diff = std::abs(cur - prev);
        if (diff < target_abs || panels >= max_panels)
            return {cur, diff + 1e-16 * std::abs(cur)};
        prev = cur;
    }
}

ValueWithError mellin_weight(const SmoothWeight& f, cplx z, bool log_moment) {
    double lo = f.support_lo(), hi = f.support_hi();
    auto integrand = [&](double x) -> cplx {
        double v = f(x);
        if (v == 0.0) return 0.0;
        cplx out = v * cpow(x, z - 1.0);
        if (log_moment) out *= std::log(x);
        return out;
    };
    return integrate_gl(integrand, lo, hi, 1e-14, 4096);
}

namespace {

struct GTable {
    double sigma = 2.0;
    double step = 0.02;
    double tmax = 60.0;
    std::vector<cplx> u; // (step/2pi) * F(sigma + i t_k) / (sigma + i t_k)
    double abs_u = 0.0;  // |u_0| + 2 sum |u_k|
    double tail = 0.0;   // geometric bound on the |t| > tmax truncation
};

GTable build_gtable(int kappa, double sigma) {
    GTable t;
    t.sigma = sigma;
    std::size_t K = static_cast<std::size_t>(std::llround(t.tmax / t.step));
    t.u.resize(K + 1);
    cplx gden = gamma_complex(cplx((0.5 + kappa) / 2.0, 0.0));
    for (std::size_t k = 0; k <= K; ++k) {
        cplx s(sigma, t.step * static_cast<double>(k));
        cplx num = gamma_complex((0.5 + kappa + s) / 2.0);
        t.u[k] = t.step / (2.0 * pi) * num / (gden * s);
        t.abs_u += (k == 0 ? 1.0 : 2.0) * std::abs(t.u[k]);
    }
    // integrand falls like exp(-pi t / 4); bound the cut tail geometrically
    double r = std::exp(-pi * t.step / 4.0);
    t.tail = 2.0 * std::abs(t.u[K]) * r / (1.0 - r);
    return t;
}

const GTable& gtable(int kappa, bool left) {
    static const GTable t00 = build_gtable(0, 2.0);
    static const GTable t01 = build_gtable(0, -0.25);
    static const GTable t10 = build_gtable(1, 2.0);
    static const GTable t11 = build_gtable(1, -0.25);
    if (kappa == 0) return left ? t01 : t00;
    return left ? t11 : t10;
}

} // namespace

ValueWithError g_weight(int kappa, double xi) {
    if (kappa != 0 && kappa != 1) throw std::domain_error("g_weight: kappa must be 0 or 1");
    if (!(xi > 0.0)) throw std::domain_error("g_weight: xi must be positive");
    const bool left = xi < 1.0;
    const GTable& t = gtable(kappa, left);
    const double L = std::log(xi);

    // sum u_0 + 2 Re sum_k u_k e^{-i t_k L} by rotation recurrence, re-synced
    // every 512 steps against drift
    KahanSum acc;
    acc.add(t.u[0].real());
    const double C = std::cos(t.step * L), S = std::sin(t.step * L);
    double c = 1.0, s = 0.0;
    for (std::size_t k = 1; k < t.u.size(); ++k) {
        if (k % 512 == 0) {
            double th = t.step * static_cast<double>(k) * L;
            c = std::cos(th);
            s = std::sin(th);
        } else {
            double cn = c * C - s * S;
            s = s * C + c * S;
            c = cn;
        }
        acc.add(2.0 * (t.u[k].real() * c + t.u[k].imag() * s));
    }
    double scale = std::pow(xi, -t.sigma);
    double value = scale * acc.total().real() + (left ? 1.0 : 0.0);
    double err = scale * (t.tail + 3e-14 * t.abs_u) + 1e-16;
    return {cplx(value, 0.0), err};
}

ValueWithError gamma_ratio_kappa(cplx w, int khat) {
    if (khat != 0 && khat != 1) throw std::domain_error("gamma_ratio_kappa: khat must be 0 or 1");
    cplx a = (1.0 - w + static_cast<double>(khat)) / 2.0;
    cplx b = (w + static_cast<double>(khat)) / 2.0;
    if (near_nonpositive_integer(a, 1e-6))
        throw pole_error("gamma_ratio_kappa: numerator pole");
    cplx direct;
    if (near_nonpositive_integer(b, 1e-6)) {
        // denominator pole: the ratio has a zero; route through reflection
        direct = gamma_complex(a) * std::sin(pi * b) * gamma_complex(1.0 - b) / pi;
        return {direct, 1e-12 * std::abs(direct) + 1e-16};
    }
    direct = gamma_complex(a) / gamma_complex(b);

    // cross-check through the cotangent identity where that route is regular
    double route_gap = 0.0;
    try {
        cplx ct = cot_complex(pi * w / 2.0);
        if (khat == 1) {
            cplx alt = gamma_complex((1.0 - w) / 2.0) / gamma_complex(w / 2.0) * ct;
            route_gap = std::abs(direct - alt);
        } else if (std::abs(ct) > 1e-8) {
            cplx alt = gamma_complex((2.0 - w) / 2.0) / gamma_complex((w + 1.0) / 2.0) / ct;
            route_gap = std::abs(direct - alt);
        }
    } catch (const pole_error&) {
        // alternate route degenerate here, keep the direct value
    }
    return {direct, route_gap + 1e-13 * std::abs(direct)};
}

} // namespace dds::special
