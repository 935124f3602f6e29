#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "discforge/boundary_pl.hpp"

namespace discforge {

struct Witness {
    double theta;
    double y;         // theta < y < theta + 1/n
    double quotient;  // |u(y) - u(theta)| / (y - theta)
};

struct MembershipCertificate {
    std::int64_t n = 0;
    std::size_t probe_count = 0;
    std::vector<Witness> witnesses;  // one per probe angle
    double min_surplus = 0.0;        // min over probes of quotient - n

    bool passed() const { return !witnesses.empty() && min_surplus > 0.0; }
};

enum class WitnessPolicy {
    best_quotient,  // largest quotient, ties to the larger gap
    max_margin,     // largest (quotient - n) * gap
};

using RealFn = std::function<double(double)>;

// Probes every breakpoint plus `grid` uniform angles. Candidate y are the
// ends and midpoints of the first pieces right of theta, clipped inside
// (theta, theta + 1/n); max_margin adds y = theta + (1/n) 2^-j, j = 1..20.
// Throws std::invalid_argument for n < 1.
MembershipCertificate verify_pl(const PiecewiseLinearPeriodic& u, std::int64_t n,
                                WitnessPolicy policy = WitnessPolicy::best_quotient,
                                std::size_t grid = std::size_t{1} << 16);

// Probes probe_count uniform angles. Candidates: y = theta + (1/n) 2^-j for
// j = 1..search_depth, plus for each R hint the next few multiples of
// pi/(2R) after theta and the midpoints between them.
MembershipCertificate verify_sampled(const RealFn& u, std::int64_t n, std::size_t probe_count, int search_depth,
                                     const std::vector<std::int64_t>& r_hints = {},
                                     WitnessPolicy policy = WitnessPolicy::best_quotient);

// min over witnesses of (quotient - n) * gap / 2: any v with sup|u - v| below
// this keeps every recorded witness valid. Nonpositive for failing certificates.
double dn_margin(const MembershipCertificate& cert);
double dn_margin(const PiecewiseLinearPeriodic& u, std::int64_t n);

// Number of witnesses that fail when re-evaluated against u.
std::size_t count_witness_failures(const MembershipCertificate& cert, const RealFn& u);

nlohmann::json to_json(const MembershipCertificate& cert);
MembershipCertificate certificate_from_json(const nlohmann::json& j);

}  // namespace discforge
