// Command-line front end: construct, construct-both, chain, verify,
// conjugate, sample, plot.
//
// Exit codes: 0 success, 1 usage or input error, 2 certificate failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "discforge/conjugator.hpp"
#include "discforge/constructor.hpp"

using namespace discforge;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kCertificateFailure = 2;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Bad input: maps to exit code 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string input;
    double eps = 0.0;
    std::int64_t n = 0;
    std::size_t grid = 0;
    std::string schedule;
    std::string out;
    std::string format;  // empty: the command's default
    std::string cert;
};

json load_json(const std::string& source) {
    const auto first = source.find_first_not_of(" \t\r\n");
    std::string text;
    if (first != std::string::npos && source[first] == '{') {
        text = source;
    } else {
        std::ifstream in(source);
        if (!in) throw InputError("cannot read input file '" + source + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("input is not valid JSON: ") + e.what());
    }
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(cfg.out, std::ios::binary);
    if (!os) throw InputError("cannot write output file '" + cfg.out + "'");
    os << text;
    if (!os) throw InputError("write to '" + cfg.out + "' failed");
}

// Summary lines go to stdout when the payload goes to a file, else stderr.
std::ostream& summary_stream(const RunConfig& cfg) { return cfg.out.empty() ? std::cerr : std::cout; }

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

ConstructOptions options_from_env() {
    ConstructOptions opts;
    if (const char* env = std::getenv("DISCFORGE_MAX_TRUNC")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw InputError("DISCFORGE_MAX_TRUNC must be a positive integer");
        opts.trunc.ceiling = v;
    }
    return opts;
}

void require_eps_n(const RunConfig& cfg) {
    if (!(cfg.eps > 0.0)) throw InputError("eps must be positive");
    if (cfg.n < 1) throw InputError("n must be a positive integer");
}

TrigSeries series_input(const json& j) {
    try {
        return series_from_json(j);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

TrigSeries analytic_input(const json& j) {
    TrigSeries f = series_input(j);
    if (!f.is_analytic_type()) throw InputError("input series is not analytic type (negative frequency present)");
    return f;
}

PiecewiseLinearPeriodic pl_input(const json& j) {
    try {
        return pl_from_json(j);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_construct(const RunConfig& cfg) {
    require_eps_n(cfg);
    const TrigSeries f = analytic_input(load_json(cfg.input));
    const ConstructionReport r = construct(f, cfg.eps, cfg.n, options_from_env());
    emit(cfg, dump(to_json(r)));
    summary_stream(cfg) << "fh_bound=" << fmt(r.bounds.fh_bound) << " R=" << r.perturb.sawtooth.R
                        << " m=" << fmt(r.perturb.m) << " min_surplus=" << fmt(r.min_surplus)
                        << (r.passed ? " PASS" : " FAIL") << "\n";
    return r.passed ? kOk : kCertificateFailure;
}

int cmd_construct_both(const RunConfig& cfg) {
    require_eps_n(cfg);
    const TrigSeries f = analytic_input(load_json(cfg.input));
    const std::size_t probes = cfg.grid > 0 ? cfg.grid : std::size_t{1} << 14;
    const BothPartsReport r = construct_both_parts(f, cfg.eps, cfg.n, options_from_env(), probes);
    emit(cfg, dump(to_json(r)));
    summary_stream(cfg) << "fh_bound=" << fmt(r.fh_bound) << " R=" << r.first.perturb.sawtooth.R << ","
                        << r.sawtooth2.R << " m=" << fmt(r.first.perturb.m) << "," << fmt(r.m2)
                        << " min_surplus=" << fmt(r.re_cert.min_surplus) << "," << fmt(r.im_cert.min_surplus)
                        << (r.passed ? " PASS" : " FAIL") << "\n";
    return r.passed ? kOk : kCertificateFailure;
}

int cmd_chain(const RunConfig& cfg) {
    if (cfg.schedule.empty()) throw InputError("chain needs --schedule n1:eps1,n2:eps2,...");
    std::vector<LevelSpec> schedule;
    try {
        schedule = parse_schedule(cfg.schedule);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    const TrigSeries f = analytic_input(load_json(cfg.input));
    const ChainResult r = chain_construct(f, schedule, options_from_env());
    emit(cfg, dump(to_json(r)));
    auto& os = summary_stream(cfg);
    for (const auto& lv : r.levels) {
        os << "level n=" << lv.n << " eps=" << fmt(lv.eps_used) << " fh_bound=" << fmt(lv.fh_bound)
           << " partial_sum=" << fmt(lv.partial_sum) << " R=" << lv.R << " m=" << fmt(lv.m) << "\n";
    }
    double worst = r.certificates.empty() ? 0.0 : r.certificates.front().min_surplus;
    for (const auto& c : r.certificates) worst = std::min(worst, c.min_surplus);
    os << "fh_bound=" << fmt(r.levels.empty() ? 0.0 : r.levels.back().partial_sum)
       << " R=" << (r.levels.empty() ? 0 : r.levels.back().R) << " m=" << fmt(r.levels.empty() ? 0.0 : r.levels.back().m)
       << " min_surplus=" << fmt(worst) << (r.passed ? " PASS" : " FAIL");
    if (!r.failure.empty()) os << " (" << r.failure << ")";
    os << "\n";
    return r.passed ? kOk : kCertificateFailure;
}

PiecewiseLinearPeriodic chain_function(const json& j) {
    PiecewiseLinearPeriodic u = pl_input(j.at("u_base"));
    for (const auto& s : j.at("sawteeth")) {
        if (!s.contains("eps") || !s.contains("R") || !s.at("R").is_number_integer())
            throw InputError("sawteeth entries need eps and integer R");
        u = pl_add(u, make_sawtooth({s.at("eps").get<double>(), s.at("R").get<std::int64_t>()}));
    }
    return u;
}

std::int64_t level_for(const RunConfig& cfg, const json& j) {
    if (cfg.n > 0) return cfg.n;
    if (j.contains("n") && j.at("n").is_number_integer()) return j.at("n").get<std::int64_t>();
    throw InputError("verify needs --n for this input");
}

int cmd_verify(const RunConfig& cfg) {
    const json j = load_json(cfg.input);
    if (!j.is_object()) throw InputError("input must be a JSON object");
    auto finish = [&](const MembershipCertificate& c) {
        emit(cfg, dump(to_json(c)));
        summary_stream(cfg) << "n=" << c.n << " probes=" << c.probe_count << " min_surplus=" << fmt(c.min_surplus)
                            << (c.passed() ? " PASS" : " FAIL") << "\n";
        return c.passed() ? kOk : kCertificateFailure;
    };
    const std::size_t grid = cfg.grid > 0 ? cfg.grid : std::size_t{1} << 16;

    if (j.contains("breakpoints")) return finish(verify_pl(pl_input(j), level_for(cfg, j), WitnessPolicy::best_quotient, grid));
    if (j.contains("u1")) return finish(verify_pl(pl_input(j.at("u1")), level_for(cfg, j), WitnessPolicy::best_quotient, grid));
    if (j.contains("u_base") && j.contains("sawteeth")) {
        if (cfg.n < 1) throw InputError("verify needs --n for a chain result");
        return finish(verify_pl(chain_function(j), cfg.n, WitnessPolicy::best_quotient, grid));
    }
    if (j.contains("coeffs") || (j.contains("h") && j.contains("R_hints"))) {
        const TrigSeries h = series_input(j.contains("coeffs") ? j : j.at("h"));
        std::vector<std::int64_t> hints;
        if (j.contains("R_hints")) hints = j.at("R_hints").get<std::vector<std::int64_t>>();
        std::int64_t n = cfg.n;
        if (n < 1 && j.contains("first")) n = j.at("first").at("n").get<std::int64_t>();
        if (n < 1) throw InputError("verify needs --n for a series");
        const std::size_t probes = cfg.grid > 0 ? cfg.grid : 4096;
        auto re = verify_sampled([&](double x) { return eval_boundary(h, x).real(); }, n, probes, 24, hints);
        if (!j.contains("R_hints")) return finish(re);
        auto im = verify_sampled([&](double x) { return eval_boundary(h, x).imag(); }, n, probes, 24, {hints.back()});
        emit(cfg, dump({{"re", to_json(re)}, {"im", to_json(im)}}));
        summary_stream(cfg) << "n=" << n << " min_surplus=" << fmt(re.min_surplus) << "," << fmt(im.min_surplus)
                            << (re.passed() && im.passed() ? " PASS" : " FAIL") << "\n";
        return re.passed() && im.passed() ? kOk : kCertificateFailure;
    }
    throw InputError("verify input must be a piecewise-linear function, a series or a construction output");
}

int cmd_conjugate(const RunConfig& cfg) {
    const TrigSeries s = series_input(load_json(cfg.input));
    if (!s.is_real_valued()) throw InputError("conjugate needs a real-valued series (c(-k) = conj c(k))");
    emit(cfg, dump(to_json(conjugate(s))));
    return kOk;
}

// Boundary values at theta_j = 2 pi j / grid for any supported input.
struct Samples {
    std::vector<double> re;
    std::vector<double> im;
    bool has_im = true;
};

Samples sample_input(const json& j, std::size_t grid) {
    if (!j.is_object()) throw InputError("input must be a JSON object");
    Samples s;
    if (j.contains("breakpoints") || (j.contains("u_base") && !j.contains("h"))) {
        const PiecewiseLinearPeriodic u = j.contains("breakpoints") ? pl_input(j) : chain_function(j);
        s.has_im = false;
        for (std::size_t i = 0; i < grid; ++i) {
            s.re.push_back(eval_pl(u, kTwoPi * static_cast<double>(i) / static_cast<double>(grid)));
            s.im.push_back(0.0);
        }
        return s;
    }
    const TrigSeries h = j.contains("coeffs") ? series_input(j) : j.contains("h") ? series_input(j.at("h"))
                                                                                  : throw InputError("input has no function to sample");
    for (const auto& z : eval_uniform_grid(h, grid)) {
        s.re.push_back(z.real());
        s.im.push_back(z.imag());
    }
    return s;
}

int cmd_sample(const RunConfig& cfg) {
    const std::size_t grid = cfg.grid > 0 ? cfg.grid : 1024;
    const Samples s = sample_input(load_json(cfg.input), grid);
    const std::string format = cfg.format.empty() ? "csv" : cfg.format;
    if (format == "json") {
        json rows = json::array();
        for (std::size_t i = 0; i < grid; ++i) {
            rows.push_back({{"theta", kTwoPi * static_cast<double>(i) / static_cast<double>(grid)},
                            {"re", s.re[i]},
                            {"im", s.im[i]}});
        }
        emit(cfg, dump(rows));
        return kOk;
    }
    if (format != "csv") throw InputError("sample supports --format csv or json");
    std::ostringstream os;
    os.precision(17);
    os << "theta,re,im\n";
    for (std::size_t i = 0; i < grid; ++i) {
        os << kTwoPi * static_cast<double>(i) / static_cast<double>(grid) << ',' << s.re[i] << ',' << s.im[i] << '\n';
    }
    emit(cfg, os.str());
    return kOk;
}

int cmd_plot(const RunConfig& cfg) {
    if (!cfg.format.empty() && cfg.format != "svg") throw InputError("plot supports --format svg only");
    const std::size_t grid = cfg.grid > 0 ? cfg.grid : 2000;
    const Samples s = sample_input(load_json(cfg.input), grid);
    std::optional<MembershipCertificate> cert;
    if (!cfg.cert.empty()) {
        try {
            cert = certificate_from_json(load_json(cfg.cert));
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
    }

    constexpr double kW = 1000.0;
    constexpr double kH = 400.0;
    constexpr double kLeft = 60.0;
    constexpr double kRight = 980.0;
    constexpr double kTop = 20.0;
    constexpr double kBottom = 370.0;
    double lo = *std::min_element(s.re.begin(), s.re.end());
    double hi = *std::max_element(s.re.begin(), s.re.end());
    if (s.has_im) {
        lo = std::min(lo, *std::min_element(s.im.begin(), s.im.end()));
        hi = std::max(hi, *std::max_element(s.im.begin(), s.im.end()));
    }
    if (hi - lo < 1e-12) {
        lo -= 1.0;
        hi += 1.0;
    }
    auto px = [&](double theta) { return kLeft + (kRight - kLeft) * theta / kTwoPi; };
    auto py = [&](double v) { return kBottom - (kBottom - kTop) * (v - lo) / (hi - lo); };
    char buf[96];
    auto polyline = [&](const std::vector<double>& vals, const char* colour) {
        std::string out = std::string("<polyline fill=\"none\" stroke=\"") + colour + "\" stroke-width=\"1\" points=\"";
        for (std::size_t i = 0; i < grid; ++i) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(kTwoPi * static_cast<double>(i) / static_cast<double>(grid)),
                          py(vals[i]));
            out += buf;
        }
        return out + "\"/>\n";
    };

    std::string svg;
    std::snprintf(buf, sizeof buf, "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 %.0f %.0f\">\n", kW, kH);
    svg += buf;
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", kLeft,
                  kBottom, kRight, kBottom);
    svg += buf;
    const char* labels[] = {"0", "π/2", "π", "3π/2", "2π"};
    for (int q = 0; q <= 4; ++q) {
        const double x = px(kTwoPi * q / 4.0);
        std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#ccc\"/>\n", x, kTop,
                      x, kBottom);
        svg += buf;
        std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"392\" font-size=\"14\" text-anchor=\"middle\">", x);
        svg += buf;
        svg += labels[q];
        svg += "</text>\n";
    }
    std::snprintf(buf, sizeof buf, "<text x=\"4\" y=\"%.2f\" font-size=\"12\">%.4g</text>\n", kTop + 10.0, hi);
    svg += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"4\" y=\"%.2f\" font-size=\"12\">%.4g</text>\n", kBottom, lo);
    svg += buf;
    svg += polyline(s.re, "#1f4e9c");
    if (s.has_im) svg += polyline(s.im, "#b5332e");
    if (cert) {
        // At most 2000 markers, evenly strided over the witnesses.
        const std::size_t count = cert->witnesses.size();
        const std::size_t stride = std::max<std::size_t>(1, count / 2000);
        for (std::size_t i = 0; i < count; i += stride) {
            const auto& w = cert->witnesses[i];
            const double t = std::fmod(w.theta, kTwoPi);
            const auto idx = std::min(grid - 1, static_cast<std::size_t>(t / kTwoPi * static_cast<double>(grid)));
            std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2\" fill=\"#2a9d4b\"/>\n", px(t),
                          py(s.re[idx]));
            svg += buf;
        }
    }
    svg += "</svg>\n";
    emit(cfg, svg);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discforge: certified perturbations of disc-algebra functions"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub, bool eps_n) {
        sub->add_option("input", cfg.input, "Input JSON file, or inline JSON starting with '{'")->required();
        sub->add_option("--out", cfg.out, "Output path (default stdout)");
        if (eps_n) {
            sub->add_option("--eps", cfg.eps, "Approximation tolerance")->required();
            sub->add_option("--n", cfg.n, "Level n")->required();
        }
    };
    auto* construct_cmd = app.add_subcommand("construct", "Perturb f into E_n within the certified distance");
    add_common(construct_cmd, true);
    auto* both_cmd = app.add_subcommand("construct-both", "Perturb so that both Re h and Im h are in D_n");
    add_common(both_cmd, true);
    both_cmd->add_option("--grid", cfg.grid, "Probe count for sampled verification");
    auto* chain_cmd = app.add_subcommand("chain", "Run a multi-level schedule");
    add_common(chain_cmd, false);
    chain_cmd->add_option("--schedule", cfg.schedule, "n1:eps1,n2:eps2,...")->required();
    auto* verify_cmd = app.add_subcommand("verify", "Check D_n membership and write a certificate");
    add_common(verify_cmd, false);
    verify_cmd->add_option("--n", cfg.n, "Level n (defaults to the report's n)");
    verify_cmd->add_option("--grid", cfg.grid, "Uniform probe count");
    auto* conj_cmd = app.add_subcommand("conjugate", "Harmonic conjugate of a real-valued series");
    add_common(conj_cmd, false);
    auto* sample_cmd = app.add_subcommand("sample", "Sample boundary values on a uniform grid");
    add_common(sample_cmd, false);
    sample_cmd->add_option("--grid", cfg.grid, "Number of samples (endpoint excluded)");
    sample_cmd->add_option("--format", cfg.format, "csv (default) or json");
    auto* plot_cmd = app.add_subcommand("plot", "Write an SVG plot of Re and Im on the circle");
    add_common(plot_cmd, false);
    plot_cmd->add_option("--grid", cfg.grid, "Number of samples");
    plot_cmd->add_option("--format", cfg.format, "svg (the only plot format)");
    plot_cmd->add_option("--cert", cfg.cert, "Certificate JSON whose witnesses are marked");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    try {
        if (construct_cmd->parsed()) return cmd_construct(cfg);
        if (both_cmd->parsed()) return cmd_construct_both(cfg);
        if (chain_cmd->parsed()) return cmd_chain(cfg);
        if (verify_cmd->parsed()) return cmd_verify(cfg);
        if (conj_cmd->parsed()) return cmd_conjugate(cfg);
        if (sample_cmd->parsed()) return cmd_sample(cfg);
        if (plot_cmd->parsed()) return cmd_plot(cfg);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed input: " << e.what() << "\n";
        return kInputError;
    } catch (const std::runtime_error& e) {
        std::cerr << "certificate failure: " << e.what() << "\n";
        return kCertificateFailure;
    }
    return kInputError;
}
