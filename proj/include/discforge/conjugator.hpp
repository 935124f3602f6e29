#pragma once

#include "discforge/trig_series.hpp"

namespace discforge {

struct ConjugatePair {
    TrigSeries u_series;
    TrigSeries v_series;
    double l1_certificate;  // l1_norm(v_series) + its tail bound
};

// Multiplier -i sign(k); the k = 0 term is dropped and the tail bound is kept.
// Throws std::invalid_argument if s fails is_real_valued(1e-12).
TrigSeries conjugate(const TrigSeries& s);
// Same multiplier without the real-valuedness check. On analytic-type input
// it returns -i (s - s-hat(0)).
TrigSeries conjugate_unchecked(const TrigSeries& s);

ConjugatePair conjugate_pair(const TrigSeries& u);

// u + i conjugate(u): 2 u-hat(k) for k > 0, u-hat(0), nothing for k < 0.
TrigSeries analytic_completion(const TrigSeries& u);

}  // namespace discforge
