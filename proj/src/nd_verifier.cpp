#include "discforge/nd_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace discforge {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kPiecesAhead = 8;
constexpr int kHintKinks = 4;
constexpr int kLadder = 20;

class Picker {
public:
    Picker(double theta, double u_theta, std::int64_t n, WitnessPolicy policy)
        : theta_(theta), u_theta_(u_theta), n_(static_cast<double>(n)), policy_(policy) {}

    void offer(double y, double u_y) {
        const double gap = y - theta_;
        if (!(gap > 0.0) || !(gap < 1.0 / n_)) return;
        const double q = std::abs(u_y - u_theta_) / gap;
        if (!found_ || better(q, gap)) {
            found_ = true;
            best_ = {theta_, y, q};
        }
    }

    Witness result() const { return found_ ? best_ : Witness{theta_, theta_ + 0.5 / n_, 0.0}; }

private:
    bool better(double q, double gap) const {
        const double best_gap = best_.y - best_.theta;
        if (policy_ == WitnessPolicy::max_margin) {
            const double a = (q - n_) * gap;
            const double b = (best_.quotient - n_) * best_gap;
            return a > b || (a == b && q > best_.quotient);
        }
        if (q > best_.quotient) return true;
        return q == best_.quotient && gap > best_gap;
    }

    double theta_;
    double u_theta_;
    double n_;
    WitnessPolicy policy_;
    bool found_ = false;
    Witness best_{};
};

void check_n(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("level n must be a positive integer");
}

MembershipCertificate finish(std::int64_t n, std::vector<Witness> ws) {
    MembershipCertificate cert;
    cert.n = n;
    cert.probe_count = ws.size();
    cert.min_surplus = std::numeric_limits<double>::infinity();
    for (const auto& w : ws) cert.min_surplus = std::min(cert.min_surplus, w.quotient - static_cast<double>(n));
    if (ws.empty()) cert.min_surplus = 0.0;
    cert.witnesses = std::move(ws);
    return cert;
}

// y strictly inside (theta, limit), close to limit.
double clip_below(double theta, double limit) { return limit - (limit - theta) * 1e-9; }

}  // namespace

MembershipCertificate verify_pl(const PiecewiseLinearPeriodic& u, std::int64_t n, WitnessPolicy policy,
                                std::size_t grid) {
    check_n(n);
    const auto& t = u.breakpoints();
    const std::size_t pieces = u.pieces();
    std::vector<double> probes(t.begin(), t.end() - 1);
    for (std::size_t i = 0; i < grid; ++i) probes.push_back(kTwoPi * static_cast<double>(i) / static_cast<double>(grid));
    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

    const auto& v = u.values();
    const double window = 1.0 / static_cast<double>(n);
    const bool ladder = policy == WitnessPolicy::max_margin;
    std::vector<Witness> ws;
    ws.reserve(probes.size());
    for (double theta : probes) {
        const double limit = theta + window;
        const std::size_t j0 = u.piece_of(theta);
        const double u_theta = eval_pl(u, theta);
        Picker pick(theta, u_theta, n, policy);
        std::size_t idx = j0 + 1;
        double prev = theta;
        double u_prev = u_theta;
        for (int step = 0; step < kPiecesAhead; ++step, ++idx) {
            const double b = t[idx % pieces] + kTwoPi * static_cast<double>(idx / pieces);
            if (b >= limit) {
                const double y = clip_below(theta, limit);
                pick.offer(y, eval_pl(u, y));
                const double mid = prev + (y - prev) / 2.0;
                pick.offer(mid, eval_pl(u, mid));
                break;
            }
            if (b > prev) {
                // Values at breakpoints and piece midpoints come straight from the table.
                const double u_b = v[idx % pieces];
                pick.offer(b, u_b);
                pick.offer(prev + (b - prev) / 2.0, u_prev + (u_b - u_prev) / 2.0);
                prev = b;
                u_prev = u_b;
            }
        }
        if (ladder) {
            for (int j = 1; j <= kLadder; ++j) {
                const double y = theta + window * std::ldexp(1.0, -j);
                pick.offer(y, eval_pl(u, y));
            }
        }
        ws.push_back(pick.result());
    }
    return finish(n, std::move(ws));
}

MembershipCertificate verify_sampled(const RealFn& u, std::int64_t n, std::size_t probe_count, int search_depth,
                                     const std::vector<std::int64_t>& r_hints, WitnessPolicy policy) {
    check_n(n);
    if (probe_count < 1) throw std::invalid_argument("probe_count must be >= 1");
    if (search_depth < 1) throw std::invalid_argument("search_depth must be >= 1");
    const double window = 1.0 / static_cast<double>(n);
    std::vector<Witness> ws;
    ws.reserve(probe_count);
    for (std::size_t i = 0; i < probe_count; ++i) {
        const double theta = kTwoPi * static_cast<double>(i) / static_cast<double>(probe_count);
        const double limit = theta + window;
        Picker pick(theta, u(theta), n, policy);
        auto offer = [&](double y) {
            if (y > theta && y < limit) pick.offer(y, u(y));
        };
        for (int j = 1; j <= search_depth; ++j) offer(theta + window * std::ldexp(1.0, -j));
        for (std::int64_t r : r_hints) {
            if (r < 1) continue;
            const double w = kPi / (2.0 * static_cast<double>(r));
            const double base = std::floor(theta / w);
            double prev = theta;
            for (int k = 1; k <= kHintKinks; ++k) {
                double kink = (base + static_cast<double>(k)) * w;
                if (kink >= limit) kink = clip_below(theta, limit);
                offer(kink);
                offer(prev + (kink - prev) / 2.0);
                prev = kink;
                if (kink >= limit - window * 1e-6) break;
            }
        }
        ws.push_back(pick.result());
    }
    return finish(n, std::move(ws));
}

double dn_margin(const MembershipCertificate& cert) {
    if (cert.witnesses.empty()) return 0.0;
    double m = std::numeric_limits<double>::infinity();
    const auto n = static_cast<double>(cert.n);
    for (const auto& w : cert.witnesses) m = std::min(m, (w.quotient - n) * (w.y - w.theta) / 2.0);
    return m;
}

double dn_margin(const PiecewiseLinearPeriodic& u, std::int64_t n) {
    return dn_margin(verify_pl(u, n, WitnessPolicy::max_margin));
}

std::size_t count_witness_failures(const MembershipCertificate& cert, const RealFn& u) {
    std::size_t bad = 0;
    const auto n = static_cast<double>(cert.n);
    for (const auto& w : cert.witnesses) {
        const double gap = w.y - w.theta;
        const bool ok = gap > 0.0 && gap < 1.0 / n && std::abs(u(w.y) - u(w.theta)) > n * gap;
        if (!ok) ++bad;
    }
    return bad;
}

nlohmann::json to_json(const MembershipCertificate& cert) {
    nlohmann::json ws = nlohmann::json::array();
    for (const auto& w : cert.witnesses) ws.push_back({{"theta", w.theta}, {"y", w.y}, {"quotient", w.quotient}});
    return {{"n", cert.n}, {"probe_count", cert.probe_count}, {"min_surplus", cert.min_surplus}, {"witnesses", ws}};
}

MembershipCertificate certificate_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("certificate JSON must be an object");
    if (!j.contains("n") || !j.at("n").is_number_integer()) throw std::invalid_argument("certificate field n must be an integer");
    if (!j.contains("witnesses") || !j.at("witnesses").is_array())
        throw std::invalid_argument("certificate field witnesses must be an array");
    std::vector<Witness> ws;
    for (const auto& w : j.at("witnesses")) {
        for (const char* key : {"theta", "y", "quotient"}) {
            if (!w.contains(key) || !w.at(key).is_number())
                throw std::invalid_argument(std::string("witness field ") + key + " must be a number");
        }
        ws.push_back({w.at("theta").get<double>(), w.at("y").get<double>(), w.at("quotient").get<double>()});
    }
    return finish(j.at("n").get<std::int64_t>(), std::move(ws));
}

}  // namespace discforge
