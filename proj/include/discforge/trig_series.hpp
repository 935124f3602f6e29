#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <json.hpp>

namespace discforge {

using cplx = std::complex<double>;

struct Term {
    std::int64_t k;
    cplx c;
};

struct DiscPoint {
    double r;
    double x;
};

// Finitely supported two-sided Fourier series sum_k c_k e^{ik theta}.
// Terms are kept sorted by k with no zero coefficients. tail_bound() is a
// certified upper bound on the l1 mass of coefficients that were dropped
// when the series was truncated from an infinite one; it is 0 for exact
// trigonometric polynomials.
class TrigSeries {
public:
    TrigSeries() = default;

    // Sorts, merges repeated frequencies and drops exact zeros.
    static TrigSeries from_terms(std::vector<Term> terms, double tail = 0.0);
    static TrigSeries monomial(std::int64_t k, cplx c);

    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    cplx coeff(std::int64_t k) const;
    std::int64_t max_abs_k() const;

    double tail_bound() const { return tail_; }
    TrigSeries with_tail(double tail) const;

    // c(-k) == conj(c(k)) within tol for every k.
    bool is_real_valued(double tol = 1e-12) const;
    // No nonzero coefficient at negative frequency.
    bool is_analytic_type() const;

    friend bool operator==(const TrigSeries& a, const TrigSeries& b);

private:
    std::vector<Term> terms_;
    double tail_ = 0.0;
};

// Sum in ascending |k|, ties with k < 0 first.
cplx eval_boundary(const TrigSeries& s, double theta);
// Harmonic extension: sum c_k r^{|k|} e^{ikx}.
cplx eval_disc(const TrigSeries& s, DiscPoint p);
// Values at theta_j = 2 pi j / m, j = 0..m-1.
std::vector<cplx> eval_uniform_grid(const TrigSeries& s, std::size_t m);

// Tails add under add/subtract and scale by |c| under scale.
TrigSeries add(const TrigSeries& a, const TrigSeries& b);
TrigSeries subtract(const TrigSeries& a, const TrigSeries& b);
TrigSeries scale(const TrigSeries& s, cplx c);

// Sum of |c_k| over stored terms (upper bound for the sup norm of the stored series).
double l1_norm(const TrigSeries& s);
// l1_norm plus tail_bound: a sup-norm bound for the untruncated object.
double l1_certificate(const TrigSeries& s);
double parseval_l2(const TrigSeries& s);

struct SupNorm {
    double grid_lower;  // max of |S| over the sample grid
    double l1_upper;    // l1_norm(S)
};

// Throws std::invalid_argument when grid_size < 4 * (1 + max |k|).
SupNorm sup_norm_estimate(const TrigSeries& s, std::size_t grid_size);

// Sup of |d/dtheta S| bounded by sum |k| |c_k|.
double derivative_l1(const TrigSeries& s);

nlohmann::json to_json(const TrigSeries& s);
// Throws std::invalid_argument naming the offending field.
TrigSeries series_from_json(const nlohmann::json& j);

}  // namespace discforge
