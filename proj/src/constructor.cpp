#include "discforge/constructor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "discforge/conjugator.hpp"

namespace discforge {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kDeviationGrid = std::size_t{1} << 14;
constexpr int kSampledDepth = 24;
constexpr double kSecondTail = 1e-3;

Constants compute_constants() {
    // zeta(2) = partial sum + tail, tail in (1/(M+1), 1/M); midpoint 1/(M+1/2).
    constexpr int kTerms = 1000000;
    double zeta2 = 0.0;
    for (int l = kTerms; l >= 1; --l) zeta2 += 1.0 / (static_cast<double>(l) * static_cast<double>(l));
    zeta2 += 1.0 / (kTerms + 0.5);
    Constants c{};
    c.C1 = 1.0 + kPi / std::sqrt(6.0);
    c.C2 = 2.0 / (kPi * kPi);
    c.L = 1.0 + 2.0 * c.C2 * zeta2;
    c.K = 2.0 + c.L;
    return c;
}

std::int64_t lambda_for_tail(const SawtoothParams& sp, double target, const TruncationPolicy& trunc) {
    const std::int64_t k0 = std::max(trunc.start, 64 * sp.R);
    std::int64_t lam = std::min(trunc.ceiling, std::max<std::int64_t>(1, k0 / (2 * sp.R)));
    while (l1_tail_bound(sp, lam) > target) {
        if (2 * lam > trunc.ceiling) {
            throw std::runtime_error("sawtooth tail cannot reach " + std::to_string(target) +
                                     " within the coefficient ceiling " + std::to_string(trunc.ceiling));
        }
        lam *= 2;
    }
    return lam;
}

bool is_constant_series(const TrigSeries& s) {
    return std::all_of(s.terms().begin(), s.terms().end(), [](const Term& t) { return t.k == 0; });
}

TrigSeries derivative_series(const TrigSeries& s) {
    std::vector<Term> out;
    for (const auto& t : s.terms()) out.push_back({t.k, t.c * cplx{0.0, static_cast<double>(t.k)}});
    return TrigSeries::from_terms(std::move(out));
}

double margin_on(const MembershipCertificate& cert, const PiecewiseLinearPeriodic& u) {
    double m = std::numeric_limits<double>::infinity();
    const auto n = static_cast<double>(cert.n);
    for (const auto& w : cert.witnesses) {
        const double gap = w.y - w.theta;
        const double q = std::abs(eval_pl(u, w.y) - eval_pl(u, w.theta)) / gap;
        m = std::min(m, (q - n) * gap / 2.0);
    }
    return cert.witnesses.empty() ? 0.0 : m;
}

void fill_bounds(ConstructionReport& r) {
    Bounds& b = r.bounds;
    b.l1_U = l1_norm(r.smooth.U);
    b.l1_V = l1_norm(r.smooth.V);
    b.tail_U = r.smooth.U.tail_bound();
    b.fg_bound = b.l1_U + b.tail_U + b.l1_V + r.smooth.V.tail_bound();
    b.l1_s = l1_norm(r.perturb.s);
    b.l1_s_tilde = l1_norm(r.perturb.s_tilde);
    b.tail_s = r.perturb.s.tail_bound();
    b.s_sup = r.perturb.sawtooth.peak();
    b.gh_bound = r.perturb.gh_bound;
    b.fh_bound = b.fg_bound + b.gh_bound;
    r.K_run = b.gh_bound / r.eps;
}

}  // namespace

const Constants& constants() {
    static const Constants c = compute_constants();
    return c;
}

TrigSeries real_part_series(const TrigSeries& s) {
    std::vector<Term> out;
    out.reserve(2 * s.size());
    for (const auto& t : s.terms()) {
        out.push_back({t.k, t.c / 2.0});
        out.push_back({-t.k, std::conj(t.c) / 2.0});
    }
    return TrigSeries::from_terms(std::move(out), s.tail_bound());
}

SmoothStage smooth_to_pl_stage(const TrigSeries& f, double eps, const TruncationPolicy& trunc) {
    if (!f.is_analytic_type()) throw std::invalid_argument("input is not analytic type (negative frequency present)");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    SmoothStage st;
    const TrigSeries u = real_part_series(f);
    if (is_constant_series(u)) {
        st.u0 = PiecewiseLinearPeriodic::constant(u.coeff(0).real());
        st.g = f;
        return st;
    }
    const TrigSeries du = derivative_series(u);
    SmoothPeriodicFn fn{[&u](double x) { return eval_boundary(u, x).real(); },
                        [&du](double x) { return eval_boundary(du, x).real(); }};
    C1Approximation ap = approximate_c1(fn, eps);
    st.u0 = std::move(ap.u0);
    st.N = ap.N;

    std::int64_t k = std::min(trunc.start, trunc.ceiling);
    TrigSeries u0s = pl_fourier(st.u0, k);
    while (u0s.tail_bound() > trunc.rel_tail * eps && 2 * k <= trunc.ceiling) {
        k *= 2;
        u0s = pl_fourier(st.u0, k);
    }
    st.k_trunc = k;
    st.U = subtract(u, u0s);
    st.V = conjugate(st.U);
    st.g = subtract(f, analytic_completion(st.U));

    const auto vals = eval_uniform_grid(st.g, kDeviationGrid);
    for (std::size_t j = 0; j < kDeviationGrid; ++j) {
        const double x = kTwoPi * static_cast<double>(j) / static_cast<double>(kDeviationGrid);
        st.re_g_deviation = std::max(st.re_g_deviation, std::abs(vals[j].real() - eval_pl(st.u0, x)));
    }
    const double cert = l1_certificate(st.U);
    if (!(cert < constants().C1 * eps)) {
        throw std::runtime_error("l1 certificate " + std::to_string(cert) + " is not below C1*eps = " +
                                 std::to_string(constants().C1 * eps));
    }
    return st;
}

RChoice choose_R(double eps, std::int64_t n, const std::vector<double>& slopes) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    double lmax = 0.0;
    for (double s : slopes) lmax = std::max(lmax, std::abs(s));
    const double target = static_cast<double>(n) + lmax + 1.0;
    const double guess = std::floor(kPi * target / (2.0 * eps));
    if (!(guess < 4e18)) throw std::runtime_error("required R overflows: eps too small for the slopes");
    auto R = std::max<std::int64_t>(1, static_cast<std::int64_t>(guess));
    auto m_of = [eps](std::int64_t r) { return 2.0 * static_cast<double>(r) * eps / kPi; };
    while (!(m_of(R) > target)) ++R;
    while (R > 1 && m_of(R - 1) > target) --R;
    return {R, m_of(R)};
}

PerturbStage perturb_stage(const TrigSeries& g, const PiecewiseLinearPeriodic& u0, double eps, std::int64_t n,
                           const ConstructOptions& opts) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    const std::int64_t level = std::max(n, opts.slope_level);
    const RChoice rc = choose_R(eps, level, {u0.max_abs_slope()});
    PerturbStage ps;
    ps.sawtooth = {eps, rc.R};
    ps.m = rc.m;
    ps.max_lambda = lambda_for_tail(ps.sawtooth, opts.trunc.rel_tail * eps, opts.trunc);
    ps.s = sawtooth_series(ps.sawtooth, ps.max_lambda);
    ps.s_tilde = conjugate(ps.s);
    ps.u1 = pl_add(u0, make_sawtooth(ps.sawtooth));
    ps.h = add(g, analytic_completion(ps.s));
    ps.gh_bound = ps.sawtooth.peak() + ps.s.tail_bound() + l1_norm(ps.s_tilde);
    return ps;
}

ConstructionReport construct(const TrigSeries& f, double eps, std::int64_t n, const ConstructOptions& opts) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    ConstructionReport r;
    r.input_f = f;
    r.eps = eps;
    r.n = n;
    r.consts = constants();
    r.smooth = smooth_to_pl_stage(f, eps, opts.trunc);
    r.perturb = perturb_stage(r.smooth.g, r.smooth.u0, eps, n, opts);
    fill_bounds(r);
    r.min_surplus = verify_pl(r.perturb.u1, n).min_surplus;
    const Constants& c = r.consts;
    r.passed = r.min_surplus > 0.0 && r.bounds.fh_bound <= (2.0 * c.C1 + c.K) * eps &&
               r.bounds.l1_U + r.bounds.tail_U < c.C1 * eps;
    return r;
}

BothPartsReport construct_both_parts(const TrigSeries& f, double eps, std::int64_t n, const ConstructOptions& opts,
                                     std::size_t probes) {
    BothPartsReport b;
    b.first = construct(f, eps, n, opts);
    const TrigSeries& h1 = b.first.h();
    const std::int64_t r1 = b.first.perturb.sawtooth.R;
    auto re_h1 = [&h1](double x) { return eval_boundary(h1, x).real(); };
    b.margin = dn_margin(verify_sampled(re_h1, n, probes, kSampledDepth, {r1}, WitnessPolicy::max_margin));
    if (!(b.margin > 0.0)) {
        throw std::runtime_error("Re h1 has no positive margin at level " + std::to_string(n) + "; retry with a larger eps");
    }
    const Constants& c = constants();
    b.eps2 = b.margin / (2.0 * (2.0 * c.C1 + c.K));
    if (!(b.eps2 > 1e-12)) throw std::runtime_error("second-stage eps underflows; retry with a larger eps");

    // Rotated frame: Re(-i h1) = Im h1, perturbed by s2 + i s2~, then rotated back.
    const TrigSeries rotated_re = real_part_series(scale(h1, cplx{0.0, -1.0}));
    b.slope_bound = derivative_l1(rotated_re);
    const RChoice rc = choose_R(b.eps2, n, {b.slope_bound});
    b.sawtooth2 = {b.eps2, rc.R};
    b.m2 = rc.m;
    b.max_lambda2 = lambda_for_tail(b.sawtooth2, std::min(opts.trunc.rel_tail, kSecondTail) * b.eps2, opts.trunc);
    b.s2 = sawtooth_series(b.sawtooth2, b.max_lambda2);
    b.s2_tilde = conjugate(b.s2);
    b.h = add(h1, scale(analytic_completion(b.s2), cplx{0.0, 1.0}));
    b.fh_bound = b.first.bounds.fh_bound + b.sawtooth2.peak() + b.s2.tail_bound() + l1_norm(b.s2_tilde);

    const TrigSeries& h = b.h;
    auto re_h = [&h](double x) { return eval_boundary(h, x).real(); };
    auto im_h = [&h](double x) { return eval_boundary(h, x).imag(); };
    b.re_cert = verify_sampled(re_h, n, probes, kSampledDepth, {r1, rc.R});
    b.im_cert = verify_sampled(im_h, n, probes, kSampledDepth, {rc.R});
    b.passed = b.re_cert.passed() && b.im_cert.passed();
    return b;
}

std::vector<LevelSpec> parse_schedule(const std::string& text) {
    std::vector<LevelSpec> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("schedule entry '" + item + "' is not n:eps");
        try {
            std::size_t used = 0;
            const std::string ns = item.substr(0, colon);
            const std::string es = item.substr(colon + 1);
            const long long n = std::stoll(ns, &used);
            if (used != ns.size()) throw std::invalid_argument("bad n");
            const double e = std::stod(es, &used);
            if (used != es.size()) throw std::invalid_argument("bad eps");
            out.push_back({n, e});
        } catch (const std::exception&) {
            throw std::invalid_argument("schedule entry '" + item + "' is not n:eps");
        }
    }
    validate_schedule(out);
    return out;
}

void validate_schedule(const std::vector<LevelSpec>& schedule) {
    if (schedule.empty()) throw std::invalid_argument("schedule must be nonempty");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i].n < 1) throw std::invalid_argument("schedule n must be >= 1");
        if (!(schedule[i].eps > 0.0)) throw std::invalid_argument("schedule eps must be positive");
        if (i > 0 && schedule[i].n <= schedule[i - 1].n)
            throw std::invalid_argument("schedule n must be strictly increasing");
    }
}

ChainResult chain_construct(const TrigSeries& f, const std::vector<LevelSpec>& schedule, const ConstructOptions& opts) {
    validate_schedule(schedule);
    const Constants& c = constants();
    ChainResult out;

    // The first sawtooth is sized for the largest scheduled n so that its
    // coarse witnesses serve every later level and keep their margins wide.
    ConstructOptions first_opts = opts;
    first_opts.slope_level = std::max(opts.slope_level, schedule.back().n);
    ConstructionReport first = construct(f, schedule[0].eps, schedule[0].n, first_opts);
    out.u_base = first.smooth.u0;
    out.sawteeth.push_back(first.perturb.sawtooth);
    PiecewiseLinearPeriodic u_cur = first.u1();
    TrigSeries h_cur = first.h();
    double partial = first.bounds.fh_bound;
    out.levels.push_back({schedule[0].n, schedule[0].eps, schedule[0].eps, 0.0, first.perturb.sawtooth.R,
                          first.perturb.m, first.bounds.fh_bound, partial});
    out.reports.push_back(std::move(first));
    out.achieved = 1;

    std::vector<MembershipCertificate> held;
    for (const auto& lv : schedule) held.push_back(verify_pl(u_cur, lv.n, WitnessPolicy::max_margin));

    for (std::size_t k = 1; k < schedule.size(); ++k) {
        double mu = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) mu = std::min(mu, margin_on(held[j], u_cur));
        if (!(mu > 0.0)) {
            out.failure = "no positive margin before level " + std::to_string(schedule[k].n);
            break;
        }
        const double eps_k = std::min(schedule[k].eps, 0.99 * mu / (2.0 * (2.0 * c.C1 + c.K)));
        if (!(eps_k > 1e-12)) {
            out.failure = "eps underflows before level " + std::to_string(schedule[k].n);
            break;
        }
        ConstructionReport rep;
        rep.input_f = h_cur;
        rep.eps = eps_k;
        rep.n = schedule[k].n;
        rep.consts = c;
        rep.smooth.u0 = u_cur;
        rep.smooth.N = static_cast<std::int64_t>(u_cur.pieces());
        rep.smooth.g = h_cur;
        rep.perturb = perturb_stage(h_cur, u_cur, eps_k, schedule[k].n, opts);
        fill_bounds(rep);
        u_cur = rep.u1();
        h_cur = rep.h();
        partial += rep.bounds.fh_bound;
        out.levels.push_back({schedule[k].n, schedule[k].eps, eps_k, mu, rep.perturb.sawtooth.R, rep.perturb.m,
                              rep.bounds.fh_bound, partial});
        out.sawteeth.push_back(rep.perturb.sawtooth);
        out.reports.push_back(std::move(rep));
        out.achieved = k + 1;
    }

    out.h = h_cur;
    out.u_final = u_cur;
    bool all = out.achieved == schedule.size();
    for (std::size_t j = 0; j < schedule.size(); ++j) {
        out.certificates.push_back(verify_pl(u_cur, schedule[j].n));
        if (j < out.reports.size()) out.reports[j].min_surplus = out.certificates.back().min_surplus;
        all = all && out.certificates.back().passed();
    }
    for (auto& rep : out.reports) rep.passed = rep.min_surplus > 0.0 && rep.bounds.fh_bound <= (2.0 * c.C1 + c.K) * rep.eps;
    out.passed = all;
    return out;
}

namespace {

nlohmann::json bounds_json(const Bounds& b) {
    return {{"l1_U", b.l1_U},         {"l1_V", b.l1_V},         {"tail_U", b.tail_U},
            {"l1_s", b.l1_s},         {"l1_s_tilde", b.l1_s_tilde}, {"tail_s", b.tail_s},
            {"s_sup", b.s_sup},       {"fg_bound", b.fg_bound}, {"gh_bound", b.gh_bound},
            {"fh_bound", b.fh_bound}};
}

nlohmann::json constants_json(const Constants& c) { return {{"C1", c.C1}, {"C2", c.C2}, {"L", c.L}, {"K", c.K}}; }

nlohmann::json saw_json(const SawtoothParams& sp) { return {{"eps", sp.eps}, {"R", sp.R}}; }

}  // namespace

nlohmann::json to_json(const ConstructionReport& r) {
    return {{"input_f", to_json(r.input_f)},
            {"eps", r.eps},
            {"n", r.n},
            {"u0", to_json(r.smooth.u0)},
            {"N", r.smooth.N},
            {"k_trunc", r.smooth.k_trunc},
            {"U_series", to_json(r.smooth.U)},
            {"V_series", to_json(r.smooth.V)},
            {"g", to_json(r.smooth.g)},
            {"re_g_deviation", r.smooth.re_g_deviation},
            {"sawtooth", saw_json(r.perturb.sawtooth)},
            {"R", r.perturb.sawtooth.R},
            {"m", r.perturb.m},
            {"max_lambda", r.perturb.max_lambda},
            {"s_series", to_json(r.perturb.s)},
            {"s_tilde_series", to_json(r.perturb.s_tilde)},
            {"h", to_json(r.perturb.h)},
            {"u1", to_json(r.perturb.u1)},
            {"bounds", bounds_json(r.bounds)},
            {"constants", constants_json(r.consts)},
            {"K_run", r.K_run},
            {"min_surplus", r.min_surplus},
            {"passed", r.passed}};
}

nlohmann::json to_json(const BothPartsReport& r) {
    return {{"first", to_json(r.first)},
            {"margin", r.margin},
            {"eps2", r.eps2},
            {"slope_bound", r.slope_bound},
            {"sawtooth2", saw_json(r.sawtooth2)},
            {"m2", r.m2},
            {"max_lambda2", r.max_lambda2},
            {"s2_series", to_json(r.s2)},
            {"s2_tilde_series", to_json(r.s2_tilde)},
            {"h", to_json(r.h)},
            {"fh_bound", r.fh_bound},
            {"re_min_surplus", r.re_cert.min_surplus},
            {"im_min_surplus", r.im_cert.min_surplus},
            {"R_hints", {r.first.perturb.sawtooth.R, r.sawtooth2.R}},
            {"passed", r.passed}};
}

nlohmann::json to_json(const ChainResult& r) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& lv : r.levels) {
        levels.push_back({{"n", lv.n},
                          {"eps_requested", lv.eps_requested},
                          {"eps_used", lv.eps_used},
                          {"margin_before", lv.margin_before},
                          {"R", lv.R},
                          {"m", lv.m},
                          {"fh_bound", lv.fh_bound},
                          {"partial_sum", lv.partial_sum}});
    }
    nlohmann::json saws = nlohmann::json::array();
    for (const auto& sp : r.sawteeth) saws.push_back(saw_json(sp));
    nlohmann::json certs = nlohmann::json::array();
    for (const auto& c : r.certificates) {
        certs.push_back({{"n", c.n}, {"probe_count", c.probe_count}, {"min_surplus", c.min_surplus}});
    }
    return {{"levels", levels},    {"u_base", to_json(r.u_base)}, {"sawteeth", saws},
            {"h", to_json(r.h)},   {"certificates", certs},       {"achieved", r.achieved},
            {"failure", r.failure}, {"passed", r.passed}};
}

}  // namespace discforge
