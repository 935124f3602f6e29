#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "discforge/boundary_pl.hpp"
#include "oracles.hpp"

using namespace discforge;
using oracle::pi;
using oracle::two_pi;

namespace {

PiecewiseLinearPeriodic random_pl(std::mt19937_64& rng, int pieces) {
    std::uniform_real_distribution<double> ud(0.0, two_pi);
    std::uniform_real_distribution<double> vd(-2.0, 2.0);
    std::vector<double> t{0.0};
    for (int i = 1; i < pieces; ++i) t.push_back(ud(rng));
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    t.push_back(two_pi);
    std::vector<double> v;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) v.push_back(vd(rng));
    v.push_back(v.front());
    return {t, v};
}

// Composite Simpson on each piece: exact for the quadratic p^2.
double simpson_mean_square(const PiecewiseLinearPeriodic& p) {
    const auto& t = p.breakpoints();
    const auto& v = p.values();
    long double acc = 0.0L;
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        const long double a = v[j];
        const long double b = v[j + 1];
        const long double m = (a + b) / 2.0L;
        acc += (t[j + 1] - t[j]) * (a * a + 4.0L * m * m + b * b) / 6.0L;
    }
    return static_cast<double>(acc / two_pi);
}

}  // namespace

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(PiecewiseLinearPeriodic({0.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PiecewiseLinearPeriodic({0.0, two_pi}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PiecewiseLinearPeriodic({0.1, two_pi}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PiecewiseLinearPeriodic({0.0, 3.0}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PiecewiseLinearPeriodic({0.0, 2.0, 1.0, two_pi}, {0, 1, 2, 0}), std::invalid_argument);
    CHECK_THROWS_AS(PiecewiseLinearPeriodic({0.0, pi, two_pi}, {0, 1, 2}), std::invalid_argument);
}

TEST_CASE("eval_pl basics") {
    auto c = PiecewiseLinearPeriodic::constant(3.5);
    CHECK(eval_pl(c, 1.234) == 3.5);
    PiecewiseLinearPeriodic hat({0.0, pi, two_pi}, {0.0, 1.0, 0.0});
    CHECK(eval_pl(hat, pi / 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(eval_pl(hat, pi / 2 + two_pi) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(eval_pl(hat, -pi / 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(eval_pl(hat, pi) == 1.0);
}

TEST_CASE("eval_pl matches a linear scan") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> th(-10.0, 10.0);
    for (int rep = 0; rep < 20; ++rep) {
        auto p = random_pl(rng, 30);
        for (int i = 0; i < 100; ++i) {
            const double x = th(rng);
            CHECK(std::abs(eval_pl(p, x) - oracle::pl_scan(p.breakpoints(), p.values(), x)) < 1e-12);
        }
    }
}

TEST_CASE("slopes and piece lookup") {
    auto p = PiecewiseLinearPeriodic::uniform({0.0, 1.0, -1.0, 0.0});
    CHECK(p.is_uniform());
    CHECK(p.pieces() == 3);
    CHECK(p.slope(1) == doctest::Approx(-2.0 / (two_pi / 3)));
    CHECK(p.max_abs_slope() == doctest::Approx(2.0 / (two_pi / 3)));
    CHECK(p.piece_of(0.0) == 0);
    CHECK(p.piece_of(two_pi / 3 + 1e-9) == 1);
}

TEST_CASE("pl_mean_square is exact") {
    std::mt19937_64 rng(22);
    for (int rep = 0; rep < 20; ++rep) {
        auto p = random_pl(rng, 40);
        CHECK(std::abs(pl_mean_square(p) - simpson_mean_square(p)) < 1e-13);
    }
}

TEST_CASE("pl_add is the pointwise sum") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> th(0.0, two_pi);
    for (int rep = 0; rep < 10; ++rep) {
        auto a = random_pl(rng, 20);
        auto b = random_pl(rng, 25);
        auto s = pl_add(a, b);
        for (int i = 0; i < 200; ++i) {
            const double x = th(rng);
            CHECK(std::abs(eval_pl(s, x) - eval_pl(a, x) - eval_pl(b, x)) < 1e-12);
        }
    }
}

TEST_CASE("approximate_c1 on a constant") {
    SmoothPeriodicFn five{[](double) { return 5.0; }, [](double) { return 0.0; }};
    auto ap = approximate_c1(five, 0.1);
    CHECK(ap.sup_error == 0.0);
    for (double x : {0.0, 1.0, 4.0}) CHECK(eval_pl(ap.u0, x) == 5.0);
    CHECK_THROWS_AS(approximate_c1(five, 0.0), std::invalid_argument);
}

TEST_CASE("approximate_c1 on cos: dense checks and exact interpolation") {
    SmoothPeriodicFn u{[](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); }};
    auto ap = approximate_c1(u, 0.1);
    CHECK((ap.N == 128 || ap.N == 256));
    const auto& t = ap.u0.breakpoints();
    const auto& v = ap.u0.values();
    for (std::size_t j = 0; j + 1 < t.size(); ++j) CHECK(v[j] == std::cos(t[j]));

    double sup = 0.0;
    double slope = 0.0;
    const int per_piece = 1000000 / static_cast<int>(ap.N);
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        const double l = ap.u0.slope(j);
        for (int i = 1; i < per_piece; ++i) {
            const double x = t[j] + (t[j + 1] - t[j]) * i / per_piece;
            sup = std::max(sup, std::abs(std::cos(x) - eval_pl(ap.u0, x)));
            slope = std::max(slope, std::abs(-std::sin(x) - l));
        }
    }
    CHECK(sup < 0.1);
    CHECK(slope < 0.1);
}

TEST_CASE("make_sawtooth shape") {
    for (auto sp : {SawtoothParams{0.05, 100}, SawtoothParams{pi, 1}, SawtoothParams{0.3, 7}}) {
        auto s = make_sawtooth(sp);
        CHECK(s.pieces() == static_cast<std::size_t>(4 * sp.R));
        CHECK(eval_pl(s, 0.0) == 0.0);
        CHECK(sp.slope() == doctest::Approx(2.0 * sp.R * sp.eps / pi));
        CHECK(eval_pl(s, pi / (2.0 * sp.R)) == doctest::Approx(sp.eps));
        CHECK(s.slope(0) == doctest::Approx(sp.slope()));
        CHECK(s.slope(1) == doctest::Approx(-sp.slope()));
        CHECK(s.max_abs_slope() == doctest::Approx(sp.slope()));
    }
    // Dense maximum equals the peak.
    SawtoothParams sp{0.05, 100};
    auto s = make_sawtooth(sp);
    double mx = 0.0;
    for (int j = 0; j < 800000; ++j) mx = std::max(mx, eval_pl(s, two_pi * j / 800000.0));
    CHECK(std::abs(mx - sp.eps) < 1e-12);

    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> th(0.0, two_pi);
    for (int i = 0; i < 100000; ++i) {
        const double x = th(rng);
        CHECK(std::abs(eval_pl(s, x) - sp.slope() * oracle::lattice_dist(x, sp.R)) < 1e-14);
    }
}

TEST_CASE("pl_fourier on a constant") {
    auto f = pl_fourier(PiecewiseLinearPeriodic::constant(2.5), 16);
    CHECK(f.size() == 1);
    CHECK(f.coeff(0) == cplx{2.5, 0.0});
    CHECK(f.tail_bound() == 0.0);
}

TEST_CASE("pl_fourier matches exact piecewise integration") {
    std::mt19937_64 rng(25);
    for (int rep = 0; rep < 10; ++rep) {
        auto p = random_pl(rng, 12);
        auto f = pl_fourier(p, 200);
        for (std::int64_t k = -200; k <= 200; k += 7) {
            CHECK(std::abs(f.coeff(k) - oracle::pl_coefficient(p.breakpoints(), p.values(), k)) < 1e-12);
        }
    }
    auto u = PiecewiseLinearPeriodic::uniform({0.3, 1.0, -0.5, 2.0, 0.0, 0.3});
    auto fu = pl_fourier(u, 100);
    for (std::int64_t k = -100; k <= 100; ++k) {
        CHECK(std::abs(fu.coeff(k) - oracle::pl_coefficient(u.breakpoints(), u.values(), k)) < 1e-13);
    }
}

TEST_CASE("pl_fourier tail bound covers the dropped mass") {
    std::mt19937_64 rng(26);
    for (int rep = 0; rep < 5; ++rep) {
        auto p = random_pl(rng, 10);
        auto low = pl_fourier(p, 64);
        auto high = pl_fourier(p, 1 << 15);
        double dropped = 0.0;
        for (const auto& t : high.terms()) {
            if (std::abs(t.k) > 64) dropped += std::abs(t.c);
        }
        CHECK(dropped <= low.tail_bound());
    }
    for (std::int64_t n : {5, 8, 64}) {
        std::vector<double> nodes;
        for (std::int64_t j = 0; j < n; ++j) nodes.push_back(std::sin(0.7 * j) + 0.1 * j);
        nodes.push_back(nodes.front());
        auto u = PiecewiseLinearPeriodic::uniform(nodes);
        auto low = pl_fourier(u, 256);
        auto high = pl_fourier(u, 1 << 16);
        double dropped = 0.0;
        for (const auto& t : high.terms()) {
            if (std::abs(t.k) > 256) dropped += std::abs(t.c);
        }
        CHECK(dropped <= low.tail_bound());
    }
}

TEST_CASE("triangle wave coefficient: two ways") {
    SawtoothParams sp{pi, 1};
    auto s = make_sawtooth(sp);
    const cplx closed = sawtooth_fourier_closed_form(sp, 1);
    // Composite Simpson with nodes aligned to the kinks.
    const int nodes = 100000;
    const double h = two_pi / nodes;
    cplx acc = 0.0;
    for (int j = 0; j <= nodes; ++j) {
        const double x = h * j;
        const double w = (j == 0 || j == nodes) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        acc += w * eval_pl(s, x) * std::polar(1.0, -2.0 * x);
    }
    acc *= h / 3.0 / two_pi;
    CHECK(std::abs(pl_fourier(s, 4).coeff(2) - closed) < 1e-10);
    CHECK(std::abs(acc - closed) < 1e-10);
}

TEST_CASE("sawtooth closed form") {
    SawtoothParams sp{0.2, 5};
    CHECK(std::abs(sawtooth_fourier_closed_form(sp, 1) - cplx{-2.0 * 0.2 / (pi * pi), 0.0}) < 1e-16);
    CHECK(sawtooth_fourier_closed_form(sp, 2) == cplx{0.0, 0.0});
    // The mean of m * dist, from quadrature of the exact PL function.
    const double mean = oracle::pl_coefficient(make_sawtooth(sp).breakpoints(), make_sawtooth(sp).values(), 0).real();
    CHECK(std::abs(sawtooth_fourier_closed_form(sp, 0).real() - mean) < 1e-14);
    for (std::int64_t l = 1; l <= 51; ++l) {
        const cplx c = sawtooth_fourier_closed_form(sp, l);
        CHECK(c.imag() == 0.0);
        CHECK(c.real() <= 0.0);
        if (l % 2 == 0) CHECK(c.real() == 0.0);
        CHECK(std::abs(c) <= 2.0 / (pi * pi) * sp.eps / static_cast<double>(l * l) + 1e-18);
        CHECK(sawtooth_fourier_closed_form(sp, -l) == c);
    }
}

TEST_CASE("pl_fourier agrees with the closed form and vanishes off the lattice") {
    std::mt19937_64 rng(27);
    std::uniform_real_distribution<double> ed(0.001, 1.0);
    std::uniform_int_distribution<std::int64_t> rd(1, 512);
    for (int rep = 0; rep < 20; ++rep) {
        SawtoothParams sp{ed(rng), rd(rng)};
        auto f = pl_fourier(make_sawtooth(sp), 50 * 2 * sp.R);
        for (std::int64_t l = -50; l <= 50; ++l) {
            if (l == 0) continue;
            CHECK(std::abs(f.coeff(2 * l * sp.R) - sawtooth_fourier_closed_form(sp, l)) < 1e-12);
        }
        for (const auto& t : f.terms()) {
            if (t.k % (2 * sp.R) != 0) CHECK(std::abs(t.c) < 1e-14);
        }
    }
}

TEST_CASE("Parseval gap for sawtooth series") {
    for (std::int64_t R : {1, 3, 17, 32}) {
        SawtoothParams sp{0.5, R};
        auto p = make_sawtooth(sp);
        auto f = pl_fourier(p, 10000);
        const double gap = pl_mean_square(p) - parseval_l2(f);
        CHECK(gap >= -1e-15);
        CHECK(gap < 1e-6);
        CHECK(std::abs(pl_mean_square(p) - simpson_mean_square(p)) < 1e-14);
    }
}

TEST_CASE("l1_tail_bound") {
    SawtoothParams sp{1.0, 3};
    CHECK(l1_tail_bound(sp, 10) <= 4.0 / (10 * pi * pi) + 1e-16);
    double direct = 0.0;
    for (std::int64_t l = 1000000; l > 10; --l) direct += 2.0 * std::abs(sawtooth_fourier_closed_form(sp, l));
    CHECK(direct <= l1_tail_bound(sp, 10));
    CHECK(l1_tail_bound(sp, 20) == doctest::Approx(l1_tail_bound(sp, 10) / 2));
    for (std::int64_t l = 1; l < 100; ++l) CHECK(l1_tail_bound(sp, l + 1) < l1_tail_bound(sp, l));
    CHECK_THROWS_AS(l1_tail_bound(sp, 0), std::invalid_argument);
}

TEST_CASE("sawtooth_series carries its tail") {
    SawtoothParams sp{0.1, 4};
    auto s = sawtooth_series(sp, 9);
    CHECK(s.tail_bound() == l1_tail_bound(sp, 9));
    CHECK(s.coeff(0) == sawtooth_fourier_closed_form(sp, 0));
    CHECK(s.coeff(8) == sawtooth_fourier_closed_form(sp, 1));
    CHECK(s.coeff(-72) == sawtooth_fourier_closed_form(sp, -9));
    CHECK(s.coeff(80) == cplx{0.0, 0.0});
    CHECK(s.is_real_valued());
}

TEST_CASE("json and csv") {
    std::mt19937_64 rng(28);
    auto p = random_pl(rng, 8);
    auto q = pl_from_json(to_json(p));
    CHECK(q.breakpoints() == p.breakpoints());
    CHECK(q.values() == p.values());
    CHECK_THROWS_AS(pl_from_json(nlohmann::json::parse(R"({"values":[1,1]})")), std::invalid_argument);

    const std::string csv = pl_to_csv(PiecewiseLinearPeriodic::constant(1.0), 4);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "theta,value");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 4);
}
