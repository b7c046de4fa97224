#pragma once

#include <cstdint>
#include <stdexcept>

namespace dds {

// Cutoffs and tolerance targets for every truncated sum and contour integral.
// Shared by the L-value, Z-series and moment code so a CLI --cutoff or
// --tolerance flag lands everywhere at once.
struct TruncationPolicy {
    std::int64_t d_cutoff = 10000;
    std::int64_t m_cutoff = 10000;
    double tail_exponent_margin = 0.25;
    double tolerance = 1e-6;

    void validate() const {
        if (d_cutoff < 10 || m_cutoff < 10)
            throw std::domain_error("TruncationPolicy: cutoffs must be >= 10");
        if (!(tolerance > 0.0))
            throw std::domain_error("TruncationPolicy: tolerance must be positive");
        if (!(tail_exponent_margin > 0.0))
            throw std::domain_error("TruncationPolicy: tail margin must be positive");
    }
};

} // namespace dds
