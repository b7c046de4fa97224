#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace dds {

using cplx = std::complex<double>;

// A numeric result carrying a conservative absolute error bound.
//
// Propagation: errors add under +/-, and under * we keep
// |a| e_b + |b| e_a + e_a e_b (the cross term matters when both operands sit
// at the edge of their intervals) plus a machine-epsilon pad for the rounding
// of the operation itself.
struct ValueWithError {
    cplx value{0.0, 0.0};
    double abs_error = 0.0;

    ValueWithError() = default;
    ValueWithError(cplx v, double e) : value(v), abs_error(e) {}
    ValueWithError(double v, double e) : value(v, 0.0), abs_error(e) {}

    double re() const { return value.real(); }
    double im() const { return value.imag(); }
    double abs() const { return std::abs(value); }
};

namespace detail {
inline double ulp_pad(const cplx& v) {
    return 4.0 * std::numeric_limits<double>::epsilon() * std::abs(v);
}
} // namespace detail

inline ValueWithError operator+(const ValueWithError& a, const ValueWithError& b) {
    cplx v = a.value + b.value;
    return {v, a.abs_error + b.abs_error + detail::ulp_pad(v)};
}

inline ValueWithError operator-(const ValueWithError& a, const ValueWithError& b) {
    cplx v = a.value - b.value;
    return {v, a.abs_error + b.abs_error + detail::ulp_pad(v)};
}

inline ValueWithError operator*(const ValueWithError& a, const ValueWithError& b) {
    cplx v = a.value * b.value;
    double e = std::abs(a.value) * b.abs_error + std::abs(b.value) * a.abs_error +
               a.abs_error * b.abs_error + detail::ulp_pad(v);
    return {v, e};
}

inline ValueWithError operator*(const ValueWithError& a, const cplx& c) {
    cplx v = a.value * c;
    return {v, std::abs(c) * a.abs_error + detail::ulp_pad(v)};
}

inline ValueWithError operator*(const cplx& c, const ValueWithError& a) { return a * c; }
inline ValueWithError operator*(const ValueWithError& a, double c) { return a * cplx(c, 0.0); }
inline ValueWithError operator*(double c, const ValueWithError& a) { return a * cplx(c, 0.0); }

// Division by an exactly-known nonzero complex scalar.
inline ValueWithError operator/(const ValueWithError& a, const cplx& c) {
    cplx v = a.value / c;
    return {v, a.abs_error / std::abs(c) + detail::ulp_pad(v)};
}

// Neumaier compensated accumulator, componentwise over re/im.  Long sums in
// this codebase (AFE tails, Z partial sums, moment scans) all run through it
// so a fixed block-combine order gives reproducible results.
class KahanSum {
public:
    void add(const cplx& x) {
        add_part(sr_, cr_, x.real());
        add_part(si_, ci_, x.imag());
    }
    void add(double x) { add_part(sr_, cr_, x); }
    void add(const KahanSum& other) {
        // Fold another accumulator in (used for ordered block combines).
        add_part(sr_, cr_, other.sr_);
        add_part(sr_, cr_, other.cr_);
        add_part(si_, ci_, other.si_);
        add_part(si_, ci_, other.ci_);
    }
    cplx total() const { return {sr_ + cr_, si_ + ci_}; }

private:
    static void add_part(double& s, double& c, double x) {
        double t = s + x;
        if (std::fabs(s) >= std::fabs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double sr_ = 0.0, cr_ = 0.0, si_ = 0.0, ci_ = 0.0;
};

} // namespace dds
