#pragma once

// Reference computations used as test oracles. Each one is written
// independently of the library code it checks: direct sums, trapezoid
// quadrature and linear scans.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "discforge/trig_series.hpp"

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// sum c_k (cos k theta + i sin k theta), long double accumulation.
inline cplx direct_eval(const discforge::TrigSeries& s, double theta) {
    long double re = 0.0L;
    long double im = 0.0L;
    for (const auto& t : s.terms()) {
        const long double a = static_cast<long double>(t.k) * static_cast<long double>(theta);
        const long double c = std::cos(a);
        const long double sn = std::sin(a);
        re += t.c.real() * c - t.c.imag() * sn;
        im += t.c.real() * sn + t.c.imag() * c;
    }
    return {static_cast<double>(re), static_cast<double>(im)};
}

// Value at theta = 2 pi j / m with the phase k j reduced mod m exactly.
inline cplx grid_eval(const discforge::TrigSeries& s, std::size_t j, std::size_t m) {
    const auto mm = static_cast<std::int64_t>(m);
    std::complex<long double> acc = 0.0L;
    for (const auto& t : s.terms()) {
        std::int64_t r = (t.k % mm) * static_cast<std::int64_t>(j) % mm;
        if (r < 0) r += mm;
        const long double a = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(r) / static_cast<long double>(m);
        acc += std::complex<long double>(t.c.real(), t.c.imag()) * std::polar(1.0L, a);
    }
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

// Trapezoid rule on a periodic integrand: exact for trigonometric
// polynomials of degree < nodes.
template <class F>
cplx periodic_mean(F&& f, std::size_t nodes) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) acc += f(two_pi * static_cast<double>(j) / static_cast<double>(nodes));
    return acc / static_cast<double>(nodes);
}

// Fourier coefficient of a piecewise-linear function by exact integration
// of each linear piece against e^{-ik x}, done piece by piece with
// long double antiderivatives.
inline cplx pl_coefficient(const std::vector<double>& t, const std::vector<double>& v, std::int64_t k) {
    using ld = long double;
    using lc = std::complex<long double>;
    lc acc = 0.0L;
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        const ld a = t[j];
        const ld b = t[j + 1];
        const ld va = v[j];
        const ld vb = v[j + 1];
        if (k == 0) {
            acc += (b - a) * (va + vb) / 2.0L;
            continue;
        }
        const ld kk = static_cast<ld>(k);
        const ld slope = (vb - va) / (b - a);
        // integral of (va + slope (x - a)) e^{-ikx} dx
        auto prim = [&](ld x) {
            const lc e = std::polar(1.0L, -kk * x);
            const lc i_k = lc(0.0L, kk);
            const ld val = va + slope * (x - a);
            return -val * e / i_k - slope * e / (i_k * i_k);
        };
        acc += prim(b) - prim(a);
    }
    acc /= static_cast<ld>(two_pi);
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

// Linear scan evaluation of a PL function on [0, 2pi).
inline double pl_scan(const std::vector<double>& t, const std::vector<double>& v, double x) {
    x = std::fmod(x, two_pi);
    if (x < 0) x += two_pi;
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        if (x >= t[j] && x <= t[j + 1]) return v[j] + (v[j + 1] - v[j]) * (x - t[j]) / (t[j + 1] - t[j]);
    }
    return v.back();
}

// Distance from theta to the lattice (pi/R) Z.
inline double lattice_dist(double theta, std::int64_t R) {
    const double w = pi / static_cast<double>(R);
    const double r = theta - w * std::round(theta / w);
    return std::abs(r);
}

inline discforge::TrigSeries random_series(std::mt19937_64& rng, std::int64_t max_k, int count) {
    std::uniform_int_distribution<std::int64_t> kd(-max_k, max_k);
    std::uniform_real_distribution<double> cd(-1.0, 1.0);
    std::vector<discforge::Term> terms;
    for (int i = 0; i < count; ++i) terms.push_back({kd(rng), {cd(rng), cd(rng)}});
    return discforge::TrigSeries::from_terms(std::move(terms));
}

// Adds conjugate mirrors so the series is real-valued on the circle.
inline discforge::TrigSeries random_real_series(std::mt19937_64& rng, std::int64_t max_k, int count) {
    std::uniform_int_distribution<std::int64_t> kd(1, max_k);
    std::uniform_real_distribution<double> cd(-1.0, 1.0);
    std::vector<discforge::Term> terms{{0, {cd(rng), 0.0}}};
    for (int i = 0; i < count; ++i) {
        const std::int64_t k = kd(rng);
        const cplx c{cd(rng), cd(rng)};
        terms.push_back({k, c});
        terms.push_back({-k, std::conj(c)});
    }
    return discforge::TrigSeries::from_terms(std::move(terms));
}

}  // namespace oracle
