#pragma once

#include "dds/arith.hpp"
#include "dds/value.hpp"

namespace dds::correction {

using arith::QuadChar;
using arith::SquarefreeSplit;
using std::int64_t;

// The printed Q formula runs its second sum to beta, asymmetric to P (which
// stops at alpha - 1) and incompatible with the reflection identity; both
// readings are implemented and the identities pick the survivor at runtime.
enum class Variant { P, Q_as_printed, Q_alpha_minus_one };

const char* variant_name(Variant v);

struct CorrectionPolyKey {
    SquarefreeSplit split; // of d (P) or m (Q); d = d0 d1^2
    QuadChar twist;        // chi (P) or chi' (Q)
    Variant variant = Variant::P;
};

// P_{d0,d1}^{(chi)}(s) = prod_{p^a || d1} [ sum_{n<=a} chi(p^{2n}) p^{n-2ns}
//   - sum_{n<=a-1} (chi_{d0} chi)(p^{2n+1}) p^{n-(2n+1)s} ]
cplx eval_P(const CorrectionPolyKey& key, cplx s);

// Q_{m0,m1}^{(chi')}(w), same shape with the bottom-symbol character
// chi~_{m0} inside, second-sum limit beta or beta - 1 per the variant.
cplx eval_Q(const CorrectionPolyKey& key, cplx w);

cplx eval_correction(const CorrectionPolyKey& key, cplx z);

// | poly(z) - d1^{1-2z} chi(d1^2) poly(1-z) |  (chi real, so conjugating the
// twist is a no-op)
double check_reflection(const CorrectionPolyKey& key, cplx z);

} // namespace dds::correction
