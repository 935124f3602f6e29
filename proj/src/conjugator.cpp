#include "discforge/conjugator.hpp"

#include <stdexcept>

namespace discforge {

TrigSeries conjugate_unchecked(const TrigSeries& s) {
    std::vector<Term> out;
    out.reserve(s.size());
    for (const auto& t : s.terms()) {
        if (t.k > 0) out.push_back({t.k, t.c * cplx{0.0, -1.0}});
        else if (t.k < 0) out.push_back({t.k, t.c * cplx{0.0, 1.0}});
    }
    return TrigSeries::from_terms(std::move(out), s.tail_bound());
}

TrigSeries conjugate(const TrigSeries& s) {
    if (!s.is_real_valued(1e-12)) throw std::invalid_argument("conjugate: series is not real-valued");
    return conjugate_unchecked(s);
}

ConjugatePair conjugate_pair(const TrigSeries& u) {
    TrigSeries v = conjugate(u);
    const double cert = l1_certificate(v);
    return {u, std::move(v), cert};
}

TrigSeries analytic_completion(const TrigSeries& u) {
    if (!u.is_real_valued(1e-12)) throw std::invalid_argument("analytic_completion: series is not real-valued");
    std::vector<Term> out;
    for (const auto& t : u.terms()) {
        if (t.k == 0) out.push_back(t);
        else if (t.k > 0) out.push_back({t.k, 2.0 * t.c});
    }
    return TrigSeries::from_terms(std::move(out), u.tail_bound());
}

}  // namespace discforge
