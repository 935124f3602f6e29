#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "discforge/boundary_pl.hpp"
#include "discforge/nd_verifier.hpp"
#include "discforge/trig_series.hpp"

namespace discforge {

struct Constants {
    double C1;  // 1 + pi/sqrt(6)
    double C2;  // 2/pi^2
    double L;   // 1 + 2 C2 zeta(2)
    double K;   // 2 + L
};

// L and K are evaluated from a partial zeta(2) sum, not typed in.
const Constants& constants();

struct TruncationPolicy {
    std::int64_t start = std::int64_t{1} << 14;  // initial max |k| for u0's series
    std::int64_t ceiling = std::int64_t{1} << 22;  // max coefficients computed per series
    double rel_tail = 0.01;  // stop doubling once tail <= rel_tail * eps
};

struct ConstructOptions {
    TruncationPolicy trunc;
    // Level used when sizing R; 0 means the construction level n.
    std::int64_t slope_level = 0;
};

// Coefficients of Re S on the circle: (c(k) + conj(c(-k))) / 2.
TrigSeries real_part_series(const TrigSeries& s);

struct SmoothStage {
    PiecewiseLinearPeriodic u0 = PiecewiseLinearPeriodic::constant(0.0);
    std::int64_t N = 1;
    std::int64_t k_trunc = 0;
    TrigSeries U;
    TrigSeries V;
    TrigSeries g;
    double re_g_deviation = 0.0;  // grid max |Re g - u0|, at most U's tail
};

// Throws std::invalid_argument on bad input and std::runtime_error when the
// l1 certificate reaches C1 * eps.
SmoothStage smooth_to_pl_stage(const TrigSeries& f, double eps, const TruncationPolicy& trunc = {});

struct RChoice {
    std::int64_t R;
    double m;
};

// Smallest R with 2 R eps / pi > n + max |slope| + 1.
RChoice choose_R(double eps, std::int64_t n, const std::vector<double>& slopes);

struct PerturbStage {
    SawtoothParams sawtooth{1.0, 1};
    double m = 0.0;
    std::int64_t max_lambda = 0;
    PiecewiseLinearPeriodic u1 = PiecewiseLinearPeriodic::constant(0.0);
    TrigSeries s;
    TrigSeries s_tilde;
    TrigSeries h;
    double gh_bound = 0.0;
};

// Throws std::runtime_error if the sawtooth tail cannot reach the target
// within the coefficient ceiling.
PerturbStage perturb_stage(const TrigSeries& g, const PiecewiseLinearPeriodic& u0, double eps, std::int64_t n,
                           const ConstructOptions& opts = {});

struct Bounds {
    double l1_U = 0.0;
    double l1_V = 0.0;
    double tail_U = 0.0;
    double l1_s = 0.0;
    double l1_s_tilde = 0.0;
    double tail_s = 0.0;
    double s_sup = 0.0;
    double fg_bound = 0.0;
    double gh_bound = 0.0;
    double fh_bound = 0.0;
};

struct ConstructionReport {
    TrigSeries input_f;
    double eps = 0.0;
    std::int64_t n = 0;
    SmoothStage smooth;
    PerturbStage perturb;
    Bounds bounds;
    Constants consts{};
    double K_run = 0.0;        // gh_bound / eps
    double min_surplus = 0.0;  // verify_pl(u1, n)
    bool passed = false;

    const TrigSeries& h() const { return perturb.h; }
    const PiecewiseLinearPeriodic& u1() const { return perturb.u1; }
};

ConstructionReport construct(const TrigSeries& f, double eps, std::int64_t n, const ConstructOptions& opts = {});

struct BothPartsReport {
    ConstructionReport first;
    double margin = 0.0;       // sampled margin of Re h1
    double eps2 = 0.0;
    double slope_bound = 0.0;  // sum |k| |c_k| of Im h1
    SawtoothParams sawtooth2{1.0, 1};
    double m2 = 0.0;
    std::int64_t max_lambda2 = 0;
    TrigSeries s2;
    TrigSeries s2_tilde;
    TrigSeries h;
    double fh_bound = 0.0;
    MembershipCertificate re_cert;
    MembershipCertificate im_cert;
    bool passed = false;
};

// Throws std::runtime_error when the margin of Re h1 is too small.
BothPartsReport construct_both_parts(const TrigSeries& f, double eps, std::int64_t n, const ConstructOptions& opts = {},
                                     std::size_t probes = std::size_t{1} << 14);

struct LevelSpec {
    std::int64_t n;
    double eps;
};

// Throws std::invalid_argument unless nonempty with positive eps and
// strictly increasing n.
std::vector<LevelSpec> parse_schedule(const std::string& text);
void validate_schedule(const std::vector<LevelSpec>& schedule);

struct ChainLevel {
    std::int64_t n = 0;
    double eps_requested = 0.0;
    double eps_used = 0.0;
    double margin_before = 0.0;  // min margin over earlier levels
    std::int64_t R = 0;
    double m = 0.0;
    double fh_bound = 0.0;
    double partial_sum = 0.0;  // sum of fh_bound up to this level
};

struct ChainResult {
    TrigSeries h;
    PiecewiseLinearPeriodic u_final = PiecewiseLinearPeriodic::constant(0.0);
    PiecewiseLinearPeriodic u_base = PiecewiseLinearPeriodic::constant(0.0);
    std::vector<SawtoothParams> sawteeth;
    std::vector<ConstructionReport> reports;
    std::vector<ChainLevel> levels;
    std::vector<MembershipCertificate> certificates;  // verify_pl(u_final, n_j)
    std::size_t achieved = 0;                          // levels completed
    std::string failure;                               // empty on success
    bool passed = false;
};

ChainResult chain_construct(const TrigSeries& f, const std::vector<LevelSpec>& schedule,
                            const ConstructOptions& opts = {});

nlohmann::json to_json(const ConstructionReport& r);
nlohmann::json to_json(const BothPartsReport& r);
nlohmann::json to_json(const ChainResult& r);

}  // namespace discforge
