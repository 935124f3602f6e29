#include "discforge/trig_series.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace discforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Phasor e^{i k theta} advanced along increasing |k| by cached step factors.
// Re-anchored with a direct sincos every kAnchor steps to bound drift.
class PhaseWalker {
public:
    explicit PhaseWalker(double theta) : theta_(theta) {}

    cplx at(std::int64_t k) {
        if (steps_ >= kAnchor || k < k_) {
            reset(k);
            return z_;
        }
        std::int64_t d = k - k_;
        if (d != 0) {
            z_ *= step(d);
            k_ = k;
            ++steps_;
        }
        return z_;
    }

private:
    static constexpr int kAnchor = 64;
    static constexpr std::size_t kCache = 8;

    void reset(std::int64_t k) {
        z_ = std::polar(1.0, static_cast<double>(k) * theta_);
        k_ = k;
        steps_ = 0;
    }

    cplx step(std::int64_t d) {
        for (std::size_t i = 0; i < used_; ++i) {
            if (keys_[i] == d) return vals_[i];
        }
        cplx w = std::polar(1.0, static_cast<double>(d) * theta_);
        std::size_t slot = used_ < kCache ? used_++ : (next_++ % kCache);
        keys_[slot] = d;
        vals_[slot] = w;
        return w;
    }

    double theta_;
    cplx z_{1.0, 0.0};
    std::int64_t k_ = 0;
    int steps_ = 0;
    std::array<std::int64_t, kCache> keys_{};
    std::array<cplx, kCache> vals_{};
    std::size_t used_ = 0;
    std::size_t next_ = 0;
};

cplx eval_impl(const TrigSeries& s, double theta, double r) {
    const auto& t = s.terms();
    if (t.empty()) return {0.0, 0.0};
    double x = std::fmod(theta, kTwoPi);
    // First index with k >= 0.
    auto split = std::lower_bound(t.begin(), t.end(), std::int64_t{0},
                                  [](const Term& a, std::int64_t k) { return a.k < k; });
    std::ptrdiff_t pos = split - t.begin();
    std::ptrdiff_t neg = pos - 1;
    PhaseWalker wp(x);
    PhaseWalker wn(x);
    cplx acc{0.0, 0.0};
    auto damp = [r](std::int64_t a) { return r == 1.0 ? 1.0 : std::pow(r, static_cast<double>(a)); };
    const auto n = static_cast<std::ptrdiff_t>(t.size());
    while (pos < n || neg >= 0) {
        bool take_neg;
        if (neg < 0) {
            take_neg = false;
        } else if (pos >= n) {
            take_neg = true;
        } else {
            take_neg = -t[neg].k <= t[pos].k;
        }
        if (take_neg) {
            std::int64_t a = -t[neg].k;
            acc += t[neg].c * std::conj(wn.at(a)) * damp(a);
            --neg;
        } else {
            std::int64_t a = t[pos].k;
            acc += t[pos].c * wp.at(a) * damp(a);
            ++pos;
        }
    }
    return acc;
}

void canonicalize(std::vector<Term>& terms) {
    std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.k < b.k; });
    std::vector<Term> out;
    out.reserve(terms.size());
    for (const auto& term : terms) {
        if (!out.empty() && out.back().k == term.k) {
            out.back().c += term.c;
        } else {
            out.push_back(term);
        }
    }
    std::erase_if(out, [](const Term& a) { return a.c == cplx{0.0, 0.0}; });
    terms = std::move(out);
}

}  // namespace

TrigSeries TrigSeries::from_terms(std::vector<Term> terms, double tail) {
    if (!(tail >= 0.0)) throw std::invalid_argument("tail bound must be nonnegative");
    canonicalize(terms);
    TrigSeries s;
    s.terms_ = std::move(terms);
    s.tail_ = tail;
    return s;
}

TrigSeries TrigSeries::monomial(std::int64_t k, cplx c) { return from_terms({{k, c}}); }

cplx TrigSeries::coeff(std::int64_t k) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                               [](const Term& a, std::int64_t key) { return a.k < key; });
    if (it != terms_.end() && it->k == k) return it->c;
    return {0.0, 0.0};
}

std::int64_t TrigSeries::max_abs_k() const {
    if (terms_.empty()) return 0;
    return std::max(std::abs(terms_.front().k), std::abs(terms_.back().k));
}

TrigSeries TrigSeries::with_tail(double tail) const {
    TrigSeries s = *this;
    if (!(tail >= 0.0)) throw std::invalid_argument("tail bound must be nonnegative");
    s.tail_ = tail;
    return s;
}

bool TrigSeries::is_real_valued(double tol) const {
    for (const auto& term : terms_) {
        if (std::abs(coeff(-term.k) - std::conj(term.c)) > tol) return false;
    }
    return true;
}

bool TrigSeries::is_analytic_type() const { return terms_.empty() || terms_.front().k >= 0; }

bool operator==(const TrigSeries& a, const TrigSeries& b) {
    if (a.tail_ != b.tail_ || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
        if (a.terms_[i].k != b.terms_[i].k || a.terms_[i].c != b.terms_[i].c) return false;
    }
    return true;
}

cplx eval_boundary(const TrigSeries& s, double theta) { return eval_impl(s, theta, 1.0); }

cplx eval_disc(const TrigSeries& s, DiscPoint p) {
    if (!(p.r >= 0.0 && p.r <= 1.0)) throw std::invalid_argument("disc point radius must lie in [0,1]");
    return eval_impl(s, p.x, p.r);
}

std::vector<cplx> eval_uniform_grid(const TrigSeries& s, std::size_t m) {
    if (m == 0) return {};
    std::vector<double> re(m, 0.0);
    std::vector<double> im(m, 0.0);
    const auto mm = static_cast<std::int64_t>(m);
    constexpr std::size_t kAnchor = 512;
    for (const auto& term : s.terms()) {
        std::int64_t kr = ((term.k % mm) + mm) % mm;
        const cplx w = std::polar(1.0, kTwoPi * static_cast<double>(kr) / static_cast<double>(m));
        const double wr = w.real();
        const double wi = w.imag();
        const double cr = term.c.real();
        const double ci = term.c.imag();
        for (std::size_t j0 = 0; j0 < m; j0 += kAnchor) {
            auto idx = static_cast<std::int64_t>((static_cast<__int128>(kr) * static_cast<__int128>(j0)) % mm);
            cplx z = std::polar(1.0, kTwoPi * static_cast<double>(idx) / static_cast<double>(m));
            double zr = z.real();
            double zi = z.imag();
            const std::size_t j1 = std::min(m, j0 + kAnchor);
            for (std::size_t j = j0; j < j1; ++j) {
                re[j] += cr * zr - ci * zi;
                im[j] += cr * zi + ci * zr;
                const double nr = zr * wr - zi * wi;
                zi = zr * wi + zi * wr;
                zr = nr;
            }
        }
    }
    std::vector<cplx> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = {re[j], im[j]};
    return out;
}

TrigSeries add(const TrigSeries& a, const TrigSeries& b) {
    std::vector<Term> t = a.terms();
    t.insert(t.end(), b.terms().begin(), b.terms().end());
    return TrigSeries::from_terms(std::move(t), a.tail_bound() + b.tail_bound());
}

TrigSeries subtract(const TrigSeries& a, const TrigSeries& b) {
    std::vector<Term> t = a.terms();
    for (const auto& term : b.terms()) t.push_back({term.k, -term.c});
    return TrigSeries::from_terms(std::move(t), a.tail_bound() + b.tail_bound());
}

TrigSeries scale(const TrigSeries& s, cplx c) {
    std::vector<Term> t;
    t.reserve(s.size());
    for (const auto& term : s.terms()) t.push_back({term.k, term.c * c});
    return TrigSeries::from_terms(std::move(t), s.tail_bound() * std::abs(c));
}

double l1_norm(const TrigSeries& s) {
    double acc = 0.0;
    for (const auto& term : s.terms()) acc += std::abs(term.c);
    return acc;
}

double l1_certificate(const TrigSeries& s) { return l1_norm(s) + s.tail_bound(); }

double parseval_l2(const TrigSeries& s) {
    double acc = 0.0;
    for (const auto& term : s.terms()) acc += std::norm(term.c);
    return acc;
}

SupNorm sup_norm_estimate(const TrigSeries& s, std::size_t grid_size) {
    const auto need = 4 * (1 + static_cast<std::uint64_t>(s.max_abs_k()));
    if (grid_size < need) {
        throw std::invalid_argument("grid_size " + std::to_string(grid_size) + " below 4*(1+max|k|) = " +
                                    std::to_string(need));
    }
    double lo = 0.0;
    for (const auto& v : eval_uniform_grid(s, grid_size)) lo = std::max(lo, std::abs(v));
    return {lo, l1_norm(s)};
}

double derivative_l1(const TrigSeries& s) {
    double acc = 0.0;
    for (const auto& term : s.terms()) acc += std::abs(static_cast<double>(term.k)) * std::abs(term.c);
    return acc;
}

nlohmann::json to_json(const TrigSeries& s) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& term : s.terms()) {
        coeffs.push_back({{"k", term.k}, {"re", term.c.real()}, {"im", term.c.imag()}});
    }
    nlohmann::json j = {{"coeffs", coeffs}};
    if (s.tail_bound() > 0.0) j["tail_bound"] = s.tail_bound();
    return j;
}

TrigSeries series_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("coeffs")) throw std::invalid_argument("missing field: coeffs");
    const auto& arr = j.at("coeffs");
    if (!arr.is_array()) throw std::invalid_argument("field coeffs must be an array");
    std::vector<Term> terms;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& e = arr[i];
        const std::string where = "coeffs[" + std::to_string(i) + "]";
        if (!e.is_object()) throw std::invalid_argument(where + " must be an object");
        if (!e.contains("k") || !e.at("k").is_number_integer()) throw std::invalid_argument(where + ".k must be an integer");
        auto num = [&](const char* key) {
            if (!e.contains(key)) return 0.0;
            if (!e.at(key).is_number()) throw std::invalid_argument(where + "." + key + " must be a number");
            return e.at(key).get<double>();
        };
        terms.push_back({e.at("k").get<std::int64_t>(), {num("re"), num("im")}});
    }
    double tail = 0.0;
    if (j.contains("tail_bound")) {
        if (!j.at("tail_bound").is_number() || j.at("tail_bound").get<double>() < 0.0)
            throw std::invalid_argument("tail_bound must be a nonnegative number");
        tail = j.at("tail_bound").get<double>();
    }
    return TrigSeries::from_terms(std::move(terms), tail);
}

}  // namespace discforge
