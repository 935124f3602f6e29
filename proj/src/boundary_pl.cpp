#include "discforge/boundary_pl.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace discforge {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::int64_t kMaxNodes = std::int64_t{1} << 24;
constexpr std::size_t kProbe = std::size_t{1} << 20;

// Max over cyclic windows of w+1 consecutive samples of (max - min).
double window_oscillation(const std::vector<double>& f, std::size_t w) {
    const std::size_t n = f.size();
    if (w >= n) {
        auto [lo, hi] = std::minmax_element(f.begin(), f.end());
        return *hi - *lo;
    }
    std::deque<std::size_t> qmax;
    std::deque<std::size_t> qmin;
    double best = 0.0;
    for (std::size_t i = 0; i < n + w; ++i) {
        const double x = f[i % n];
        while (!qmax.empty() && f[qmax.back() % n] <= x) qmax.pop_back();
        while (!qmin.empty() && f[qmin.back() % n] >= x) qmin.pop_back();
        qmax.push_back(i);
        qmin.push_back(i);
        while (qmax.front() + w < i) qmax.pop_front();
        while (qmin.front() + w < i) qmin.pop_front();
        if (i >= w) best = std::max(best, f[qmax.front() % n] - f[qmin.front() % n]);
    }
    return best;
}

double modulus(const std::vector<double>& f, std::int64_t nodes) {
    const auto p = static_cast<std::int64_t>(f.size());
    if (nodes <= p) return window_oscillation(f, static_cast<std::size_t>(p / nodes));
    // Below probe resolution: scale the one-step oscillation, with slack 2.
    return 2.0 * window_oscillation(f, 1) * static_cast<double>(p) / static_cast<double>(nodes);
}

double eval_in_period(const PiecewiseLinearPeriodic& p, double x) {
    const auto& t = p.breakpoints();
    const auto& v = p.values();
    if (x >= t.back()) return v.back();
    std::size_t j = p.piece_of(x);
    if (x == t[j]) return v[j];
    return v[j] + (v[j + 1] - v[j]) * ((x - t[j]) / (t[j + 1] - t[j]));
}

}  // namespace

PiecewiseLinearPeriodic::PiecewiseLinearPeriodic(std::vector<double> breakpoints, std::vector<double> values)
    : t_(std::move(breakpoints)), v_(std::move(values)) {
    if (t_.size() < 2) throw std::invalid_argument("breakpoints needs at least 2 entries");
    if (v_.size() != t_.size()) throw std::invalid_argument("values must have the same length as breakpoints");
    if (t_.front() != 0.0) throw std::invalid_argument("breakpoints[0] must be 0");
    if (std::abs(t_.back() - kTwoPi) > 1e-12) throw std::invalid_argument("last breakpoint must be 2*pi");
    t_.back() = kTwoPi;
    for (std::size_t j = 1; j < t_.size(); ++j) {
        if (!(t_[j] > t_[j - 1])) throw std::invalid_argument("breakpoints must be strictly increasing");
    }
    for (double x : v_) {
        if (!std::isfinite(x)) throw std::invalid_argument("values must be finite");
    }
    if (std::abs(v_.front() - v_.back()) > 1e-12 * (1.0 + std::abs(v_.front())))
        throw std::invalid_argument("values[0] must equal the last value (periodicity)");
    v_.back() = v_.front();
    const auto n = static_cast<double>(t_.size() - 1);
    uniform_ = true;
    for (std::size_t j = 0; j < t_.size() && uniform_; ++j) {
        if (std::abs(t_[j] - kTwoPi * static_cast<double>(j) / n) > 1e-12) uniform_ = false;
    }
}

PiecewiseLinearPeriodic PiecewiseLinearPeriodic::uniform(std::vector<double> node_values) {
    if (node_values.size() < 2) throw std::invalid_argument("uniform PL needs at least 2 node values");
    const std::size_t n = node_values.size() - 1;
    std::vector<double> t(n + 1);
    for (std::size_t j = 0; j <= n; ++j) t[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    return PiecewiseLinearPeriodic(std::move(t), std::move(node_values));
}

PiecewiseLinearPeriodic PiecewiseLinearPeriodic::constant(double c) { return uniform({c, c}); }

std::vector<double> PiecewiseLinearPeriodic::slopes() const {
    std::vector<double> out(pieces());
    for (std::size_t j = 0; j < pieces(); ++j) out[j] = slope(j);
    return out;
}

double PiecewiseLinearPeriodic::max_abs_slope() const {
    double m = 0.0;
    for (std::size_t j = 0; j < pieces(); ++j) m = std::max(m, std::abs(slope(j)));
    return m;
}

std::size_t PiecewiseLinearPeriodic::piece_of(double x) const {
    const std::size_t n = pieces();
    std::size_t j;
    if (uniform_) {
        double g = std::floor(x / kTwoPi * static_cast<double>(n));
        j = g < 0.0 ? 0 : std::min(n - 1, static_cast<std::size_t>(g));
        while (j > 0 && x < t_[j]) --j;
        while (j + 1 < n && x >= t_[j + 1]) ++j;
    } else {
        auto it = std::upper_bound(t_.begin(), t_.end(), x);
        j = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
        j = std::min(j, n - 1);
    }
    return j;
}

double reduce_angle(double theta) {
    double x = std::fmod(theta, kTwoPi);
    if (x < 0.0) x += kTwoPi;
    if (x >= kTwoPi) x = 0.0;
    return x;
}

double eval_pl(const PiecewiseLinearPeriodic& p, double theta) { return eval_in_period(p, reduce_angle(theta)); }

double pl_mean_square(const PiecewiseLinearPeriodic& p) {
    const auto& t = p.breakpoints();
    const auto& v = p.values();
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        const double a = v[j];
        const double b = v[j + 1];
        acc += (t[j + 1] - t[j]) * (a * a + a * b + b * b) / 3.0;
    }
    return acc / kTwoPi;
}

PiecewiseLinearPeriodic pl_add(const PiecewiseLinearPeriodic& a, const PiecewiseLinearPeriodic& b) {
    std::vector<double> merged;
    merged.reserve(a.breakpoints().size() + b.breakpoints().size());
    std::merge(a.breakpoints().begin(), a.breakpoints().end(), b.breakpoints().begin(), b.breakpoints().end(),
               std::back_inserter(merged));
    std::vector<double> t;
    t.reserve(merged.size());
    for (double x : merged) {
        if (t.empty() || x - t.back() >= 1e-12) t.push_back(x);
    }
    if (kTwoPi - t.back() < 1e-12) t.back() = kTwoPi;
    else t.push_back(kTwoPi);
    std::vector<double> v(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) v[j] = eval_in_period(a, t[j]) + eval_in_period(b, t[j]);
    v.back() = v.front();
    return PiecewiseLinearPeriodic(std::move(t), std::move(v));
}

C1Approximation approximate_c1(const SmoothPeriodicFn& u, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (!u.value || !u.derivative) throw std::invalid_argument("smooth function needs value and derivative");
    std::vector<double> fu(kProbe);
    std::vector<double> fd(kProbe);
    for (std::size_t i = 0; i < kProbe; ++i) {
        const double x = kTwoPi * static_cast<double>(i) / static_cast<double>(kProbe);
        fu[i] = u.value(x);
        fd[i] = u.derivative(x);
    }
    std::int64_t n = 1;
    while (n <= kMaxNodes && !(modulus(fu, n) < eps / 2 && modulus(fd, n) < eps / 2)) n *= 2;

    for (; n <= kMaxNodes; n *= 2) {
        std::vector<double> nodes(static_cast<std::size_t>(n) + 1);
        for (std::int64_t j = 0; j < n; ++j)
            nodes[static_cast<std::size_t>(j)] = u.value(kTwoPi * static_cast<double>(j) / static_cast<double>(n));
        nodes.back() = nodes.front();
        PiecewiseLinearPeriodic u0 = PiecewiseLinearPeriodic::uniform(std::move(nodes));

        const std::int64_t per_piece = std::max<std::int64_t>(8, static_cast<std::int64_t>(kProbe) / n);
        double sup_err = 0.0;
        double slope_err = 0.0;
        const auto& t = u0.breakpoints();
        for (std::size_t j = 0; j < u0.pieces(); ++j) {
            const double lj = u0.slope(j);
            const double h = t[j + 1] - t[j];
            for (std::int64_t i = 0; i < per_piece; ++i) {
                const double x = t[j] + h * (static_cast<double>(i) + 0.5) / static_cast<double>(per_piece);
                const double p0 = u0.values()[j] + lj * (x - t[j]);
                sup_err = std::max(sup_err, std::abs(u.value(x) - p0));
                slope_err = std::max(slope_err, std::abs(u.derivative(x) - lj));
            }
        }
        if (sup_err < eps && slope_err < eps) return {std::move(u0), n, sup_err, slope_err};
    }
    throw std::runtime_error("approximate_c1: no N <= 2^24 meets the modulus condition (input not C1?)");
}

double SawtoothParams::slope() const { return 2.0 * static_cast<double>(R) * eps / kPi; }
double SawtoothParams::peak() const { return eps; }
double SawtoothParams::period() const { return kPi / static_cast<double>(R); }

PiecewiseLinearPeriodic make_sawtooth(const SawtoothParams& sp) {
    if (!(sp.eps > 0.0) || sp.R < 1) throw std::invalid_argument("sawtooth needs eps > 0 and R >= 1");
    const std::size_t n = 4 * static_cast<std::size_t>(sp.R);
    std::vector<double> v(n + 1);
    for (std::size_t j = 0; j <= n; ++j) v[j] = (j % 2 == 0) ? 0.0 : sp.peak();
    return PiecewiseLinearPeriodic::uniform(std::move(v));
}

TrigSeries pl_fourier(const PiecewiseLinearPeriodic& p, std::int64_t max_abs_k) {
    if (max_abs_k < 0) throw std::invalid_argument("max_abs_k must be nonnegative");
    const auto& t = p.breakpoints();
    const auto& v = p.values();
    const std::size_t n = p.pieces();
    const auto K = static_cast<std::size_t>(max_abs_k);

    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += ((t[j + 1] - t[j]) / kTwoPi) * ((v[j] + v[j + 1]) / 2.0);

    std::vector<double> dv(n);
    double dv_l1 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        dv[j] = v[j + 1] - v[j];
        dv_l1 += std::abs(dv[j]);
    }

    std::vector<cplx> pos(K + 1, cplx{0.0, 0.0});
    double tail = 0.0;

    if (p.is_uniform()) {
        // c(k) = N sin(k pi/N) T(k mod 2N) / (2 pi^2 i k^2),
        // T(r) = sum_j dv_j exp(-i pi r (2j+1) / N).
        const std::size_t two_n = 2 * n;
        std::vector<cplx> e(two_n);
        for (std::size_t r = 0; r < two_n; ++r) e[r] = std::polar(1.0, -kPi * static_cast<double>(r) / static_cast<double>(n));
        e[0] = {1.0, 0.0};
        e[n] = {-1.0, 0.0};
        if (n % 2 == 0) {
            e[n / 2] = {0.0, -1.0};
            e[3 * n / 2] = {0.0, 1.0};
        }
        auto sin_r = [&](std::size_t r) { return (r == 0 || r == n) ? 0.0 : -e[r].imag(); };
        auto big_t = [&](std::size_t r) {
            cplx acc{0.0, 0.0};
            std::size_t idx = r % two_n;
            const std::size_t step = (2 * r) % two_n;
            for (std::size_t j = 0; j < n; ++j) {
                acc += dv[j] * e[idx];
                idx += step;
                if (idx >= two_n) idx -= two_n;
            }
            return acc;
        };
        const double nn = static_cast<double>(n);
        if (two_n <= K + 1) {
            std::vector<cplx> tr(two_n);
            for (std::size_t r = 0; r < two_n; ++r) tr[r] = big_t(r);
            for (std::size_t k = 1; k <= K; ++k) {
                const std::size_t r = k % two_n;
                const double kk = static_cast<double>(k);
                pos[k] = tr[r] * (nn * sin_r(r) / (2.0 * kPi * kPi * kk * kk)) / cplx{0.0, 1.0};
            }
            const double slack = 1e-15 * dv_l1;
            for (std::size_t r = 0; r < two_n; ++r) {
                const double a = nn * std::abs(sin_r(r)) * (std::abs(tr[r]) + slack) / (2.0 * kPi * kPi);
                if (a == 0.0) continue;
                const std::size_t k1 = K + 1 + ((r + two_n - (K + 1) % two_n) % two_n);
                const double x = static_cast<double>(k1);
                tail += 2.0 * a * (1.0 / (x * x) + 1.0 / (static_cast<double>(two_n) * x));
            }
        } else {
            for (std::size_t k = 1; k <= K; ++k) {
                const double kk = static_cast<double>(k);
                pos[k] = big_t(k) * (nn * sin_r(k) / (2.0 * kPi * kPi * kk * kk)) / cplx{0.0, 1.0};
            }
        }
    } else {
        for (std::size_t k = 1; k <= K; ++k) {
            const double kk = static_cast<double>(k);
            cplx acc{0.0, 0.0};
            for (std::size_t j = 0; j < n; ++j) {
                const double half = kk * (t[j + 1] - t[j]) / 2.0;
                const double sinc = std::sin(half) / half;
                const double c = (t[j] + t[j + 1]) / 2.0;
                acc += dv[j] * sinc * std::polar(1.0, -kk * c);
            }
            pos[k] = acc / cplx{0.0, kTwoPi * kk};
        }
    }
    if (tail == 0.0 && !(p.is_uniform() && 2 * n <= K + 1)) {
        double jumps = 0.0;
        for (std::size_t j = 0; j < n; ++j) jumps += std::abs(p.slope((j + 1) % n) - p.slope(j));
        if (jumps > 0.0) tail = K == 0 ? std::numeric_limits<double>::infinity() : jumps / (kPi * static_cast<double>(K));
    }

    double cmax = std::abs(mean);
    for (std::size_t k = 1; k <= K; ++k) cmax = std::max(cmax, std::abs(pos[k]));
    const double floor_c = 1e-15 * cmax;
    std::vector<Term> terms;
    terms.reserve(2 * K + 1);
    terms.push_back({0, {mean, 0.0}});
    for (std::size_t k = 1; k <= K; ++k) {
        const double a = std::abs(pos[k]);
        if (a == 0.0) continue;
        if (a < floor_c) {
            tail += 2.0 * a;
            continue;
        }
        const auto kk = static_cast<std::int64_t>(k);
        terms.push_back({kk, pos[k]});
        terms.push_back({-kk, std::conj(pos[k])});
    }
    return TrigSeries::from_terms(std::move(terms), tail);
}

cplx sawtooth_fourier_closed_form(const SawtoothParams& sp, std::int64_t lambda) {
    if (lambda == 0) return {sp.eps / 2.0, 0.0};
    const double l = static_cast<double>(lambda);
    const double sign = (lambda % 2 == 0) ? 1.0 : -1.0;
    return {(sp.eps / kPi) * (sign - 1.0) / (kPi * l * l), 0.0};
}

double l1_tail_bound(const SawtoothParams& sp, std::int64_t max_lambda) {
    if (max_lambda < 1) throw std::invalid_argument("max_lambda must be >= 1");
    return 2.0 * (2.0 / (kPi * kPi)) * sp.eps / static_cast<double>(max_lambda);
}

TrigSeries sawtooth_series(const SawtoothParams& sp, std::int64_t max_lambda) {
    std::vector<Term> terms;
    terms.push_back({0, sawtooth_fourier_closed_form(sp, 0)});
    for (std::int64_t l = 1; l <= max_lambda; l += 2) {
        const cplx c = sawtooth_fourier_closed_form(sp, l);
        terms.push_back({2 * l * sp.R, c});
        terms.push_back({-2 * l * sp.R, c});
    }
    return TrigSeries::from_terms(std::move(terms), l1_tail_bound(sp, max_lambda));
}

nlohmann::json to_json(const PiecewiseLinearPeriodic& p) {
    return {{"breakpoints", p.breakpoints()}, {"values", p.values()}};
}

PiecewiseLinearPeriodic pl_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("piecewise-linear JSON must be an object");
    for (const char* key : {"breakpoints", "values"}) {
        if (!j.contains(key) || !j.at(key).is_array()) throw std::invalid_argument(std::string("missing array field: ") + key);
        for (const auto& x : j.at(key)) {
            if (!x.is_number()) throw std::invalid_argument(std::string("field ") + key + " must hold numbers");
        }
    }
    return PiecewiseLinearPeriodic(j.at("breakpoints").get<std::vector<double>>(), j.at("values").get<std::vector<double>>());
}

std::string pl_to_csv(const PiecewiseLinearPeriodic& p, std::size_t grid) {
    std::ostringstream os;
    os.precision(17);
    os << "theta,value\n";
    for (std::size_t j = 0; j < grid; ++j) {
        const double x = kTwoPi * static_cast<double>(j) / static_cast<double>(grid);
        os << x << ',' << eval_pl(p, x) << '\n';
    }
    return os.str();
}

}  // namespace discforge
