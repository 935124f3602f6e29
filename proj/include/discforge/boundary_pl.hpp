#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "discforge/trig_series.hpp"

namespace discforge {

// Continuous 2pi-periodic piecewise-linear function. breakpoints run from 0
// to 2pi inclusive and values[0] == values.back().
class PiecewiseLinearPeriodic {
public:
    // Throws std::invalid_argument on malformed input.
    PiecewiseLinearPeriodic(std::vector<double> breakpoints, std::vector<double> values);
    // Nodes 2 pi j / N, j = 0..N; node_values has N + 1 entries.
    static PiecewiseLinearPeriodic uniform(std::vector<double> node_values);
    static PiecewiseLinearPeriodic constant(double c);

    const std::vector<double>& breakpoints() const { return t_; }
    const std::vector<double>& values() const { return v_; }
    std::size_t pieces() const { return t_.size() - 1; }
    // True when built on the nodes 2 pi j / N.
    bool is_uniform() const { return uniform_; }

    // Slope of piece j, which spans [t_j, t_{j+1}].
    double slope(std::size_t j) const { return (v_[j + 1] - v_[j]) / (t_[j + 1] - t_[j]); }
    std::vector<double> slopes() const;
    double max_abs_slope() const;
    // Index of the piece containing the reduced angle x in [0, 2pi).
    std::size_t piece_of(double x) const;

private:
    std::vector<double> t_;
    std::vector<double> v_;
    bool uniform_ = false;
};

// Reduces theta into [0, 2pi).
double reduce_angle(double theta);
double eval_pl(const PiecewiseLinearPeriodic& p, double theta);
// Exact (1/2pi) * integral of p^2 over a period.
double pl_mean_square(const PiecewiseLinearPeriodic& p);
// Pointwise sum on the merged breakpoint set; breakpoints closer than
// 1e-12 are merged.
PiecewiseLinearPeriodic pl_add(const PiecewiseLinearPeriodic& a, const PiecewiseLinearPeriodic& b);

struct SmoothPeriodicFn {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

struct C1Approximation {
    PiecewiseLinearPeriodic u0;
    std::int64_t N;
    double sup_error;    // dense-sample max |u - u0|
    double slope_error;  // dense-sample max |u' - l_j| on piece interiors
};

// Interpolates u at 2 pi j / N for the smallest power of two N whose probe-grid
// moduli of continuity of u and u' at step 2pi/N are below eps/2, then
// validates by dense sampling. Throws std::runtime_error past N = 2^24.
C1Approximation approximate_c1(const SmoothPeriodicFn& u, double eps);

struct SawtoothParams {
    double eps;
    std::int64_t R;

    double slope() const;   // m = 2 R eps / pi
    double peak() const;    // m * pi / (2R) = eps, the sup norm
    double period() const;  // pi / R
};

// m * dist(theta, (pi/R) Z): 4R pieces of width pi/(2R), slopes +-m.
PiecewiseLinearPeriodic make_sawtooth(const SawtoothParams& sp);

// Exact Fourier coefficients for |k| <= max_abs_k. tail_bound() of the result
// bounds the l1 mass for |k| > max_abs_k plus any coefficient dropped below
// the rounding floor.
TrigSeries pl_fourier(const PiecewiseLinearPeriodic& p, std::int64_t max_abs_k);

// s-hat(2 lambda R); the mean eps/2 at lambda = 0.
cplx sawtooth_fourier_closed_form(const SawtoothParams& sp, std::int64_t lambda);
// 4 eps / (pi^2 max_lambda) >= sum over |lambda| > max_lambda of C2 eps / lambda^2.
double l1_tail_bound(const SawtoothParams& sp, std::int64_t max_lambda);
// Closed-form series for |lambda| <= max_lambda, carrying l1_tail_bound.
TrigSeries sawtooth_series(const SawtoothParams& sp, std::int64_t max_lambda);

nlohmann::json to_json(const PiecewiseLinearPeriodic& p);
PiecewiseLinearPeriodic pl_from_json(const nlohmann::json& j);
// Header theta,value then `grid` rows at 2 pi j / grid.
std::string pl_to_csv(const PiecewiseLinearPeriodic& p, std::size_t grid);

}  // namespace discforge
