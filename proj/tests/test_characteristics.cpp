#include "rcns/characteristics.hpp"
#include "rcns/initdata.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace rcns;

namespace {

ModelParams default_params(double A = 1.0) {
    ModelParams p;
    p.A = A;
    p.gamma = 2.0;
    p.alpha = 1.0;
    p.d = 3;
    p.m = 2;
    return p;
}

/// History with time-independent fields rho(r), u(r) sampled at uniform times.
SolutionHistory frozen_history(const RadialGrid& g, const ModelParams& p,
                               const std::function<double(double)>& rho,
                               const std::function<double(double)>& u, double t_end,
                               int snapshots) {
    SolutionHistory h(g, p);
    for (int k = 0; k < snapshots; ++k) {
        std::vector<double> rv(g.size()), uv(g.size());
        for (int i = 0; i < g.size(); ++i) {
            rv[i] = rho(g.node(i));
            uv[i] = u(g.node(i));
        }
        h.append(t_end * k / (snapshots - 1), std::move(rv), std::move(uv));
    }
    return h;
}

} // namespace

TEST_CASE("characteristics of a quiescent field stay put") {
    RadialGrid g(1.0, 20.0, 64);
    auto h = frozen_history(g, default_params(), [](double) { return 1.0; },
                            [](double) { return 0.0; }, 1.0, 11);
    CharacteristicPath path = trace_characteristic(h, 3.0, 1.0);
    CHECK_FALSE(path.exited);
    for (double y : path.positions) CHECK(y == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("constant advection gives straight characteristics") {
    RadialGrid g(1.0, 20.0, 64);
    auto h = frozen_history(g, default_params(), [](double) { return 1.0; },
                            [](double) { return 0.5; }, 2.0, 41);
    CharacteristicPath path = trace_characteristic(h, 3.0, 2.0);
    REQUIRE_FALSE(path.exited);
    for (std::size_t j = 0; j < path.times.size(); ++j)
        CHECK(path.positions[j] ==
              doctest::Approx(3.0 + 0.5 * path.times[j]).epsilon(1e-12));
}

TEST_CASE("linear velocity field integrates to exponential growth") {
    RadialGrid g(1.0, 20.0, 512);
    auto h = frozen_history(g, default_params(), [](double) { return 1.0; },
                            [](double r) { return r; }, 1.0, 101);
    CharacteristicPath path = trace_characteristic(h, 2.0, 1.0);
    REQUIRE_FALSE(path.exited);
    CHECK(path.positions.back() == doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-8));
}

TEST_CASE("paths leaving the domain are flagged exited") {
    RadialGrid g(1.0, 3.0, 64);
    auto h = frozen_history(g, default_params(), [](double) { return 1.0; },
                            [](double) { return 1.0; }, 5.0, 101);
    CharacteristicPath path = trace_characteristic(h, 2.5, 5.0);
    CHECK(path.exited);
    CHECK(path.positions.back() <= 3.0);
}

TEST_CASE("damping factor basics") {
    RadialGrid g(1.0, 20.0, 64);

    SUBCASE("pressure off means no damping") {
        auto h = frozen_history(g, default_params(0.0), [](double) { return 0.7; },
                                [](double) { return 0.1; }, 1.0, 21);
        CharacteristicPath path = trace_characteristic(h, 3.0, 1.0);
        CHECK(damping_factor(h, path, 1.0) == 1.0);
    }

    SUBCASE("constant coefficient closed form") {
        // A = 1, gamma = 2, alpha = 1, rho = 1: rate = A g/(2a) rho = 1
        auto h = frozen_history(g, default_params(), [](double) { return 1.0; },
                                [](double) { return 0.0; }, 1.0, 201);
        CharacteristicPath path = trace_characteristic(h, 3.0, 1.0);
        CHECK(damping_factor(h, path, 1.0) ==
              doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    }

    SUBCASE("power-law density along a moving path against adaptive quadrature") {
        const double u0 = 0.3;
        auto h = frozen_history(
            g, default_params(),
            [](double r) { return test::power_law_rho(r, 2.0); },
            [u0](double) { return u0; }, 1.0, 2001);
        CharacteristicPath path = trace_characteristic(h, 3.0, 1.0);
        // y(t) = 3 + u0 t; the oracle integrates the same sampled coefficient
        // adaptively in time, isolating the trapezoid accumulation
        const double want = std::exp(-test::integrate(
            [&h, u0](double s) { return h.rho_at(s, 3.0 + u0 * s); }, 0.0, 1.0, 1e-9));
        CHECK(damping_factor(h, path, 1.0) == doctest::Approx(want).epsilon(1e-6));
    }
}

TEST_CASE("damping factor stays in (0, 1] and decays for a positive rate") {
    RadialGrid g(1.0, 20.0, 64);
    auto h = frozen_history(g, default_params(),
                            [](double r) { return test::power_law_rho(r, 2.0); },
                            [](double) { return 0.05; }, 2.0, 101);
    CharacteristicPath path = trace_characteristic(h, 4.0, 2.0);
    double prev = 1.0 + 1e-15;
    for (double t : {0.25, 0.5, 1.0, 2.0}) {
        const double f = damping_factor(h, path, t);
        CHECK(f > 0.0);
        CHECK(f < prev);
        prev = f;
    }
}

TEST_CASE("closed-form v is exactly transported when pressure is off") {
    RadialGrid g(1.0, 20.0, 256);
    auto p = default_params(0.0);
    auto h = frozen_history(g, p, [](double r) { return test::power_law_rho(r, 2.0); },
                            [](double r) { return 0.2 * std::sin(r); }, 1.0, 201);
    for (double r0 : {2.0, 5.0, 9.0}) {
        CharacteristicPath path = trace_characteristic(h, r0, 1.0);
        auto v = v_along_path(h, path);
        const double v0 = h.v0_at(r0);
        for (double vt : v) CHECK(vt == doctest::Approx(v0).epsilon(1e-12));
    }
}

TEST_CASE("static density and zero velocity reduce to pure exponential decay") {
    RadialGrid g(1.0, 20.0, 512);
    auto h = frozen_history(g, default_params(),
                            [](double r) { return test::power_law_rho(r, 2.0); },
                            [](double) { return 0.0; }, 1.5, 301);
    const double r0 = 3.0;
    CharacteristicPath path = trace_characteristic(h, r0, 1.5);
    const double v = v_along_path(h, path).back();
    // u = 0: v(t) = v0 exp(-rate(r0) t), rate frozen at the launch radius
    // (sampled value, A g/(2a) = 1 here)
    const double rate = h.rho_at(0.0, r0);
    const double v0 = h.v0_at(r0);
    CHECK(v == doctest::Approx(v0 * std::exp(-rate * 1.5)).epsilon(1e-9));
    CHECK(v_closed_form(h, r0, 1.5) == doctest::Approx(v).epsilon(1e-14));
}

TEST_CASE("per-path transport bound with explicit constant 1") {
    RadialGrid g(1.0, 20.0, 256);
    auto p = default_params();
    auto h = frozen_history(g, p, [](double r) { return test::power_law_rho(r, 2.0); },
                            [](double r) { return 0.3 * std::sin(1.7 * r); }, 1.0, 201);
    const double c = p.A * p.gamma / (2.0 * p.alpha);
    double worst_rate = 0.0; // max_r |rho^(g-1) u|
    for (int i = 0; i < g.size(); ++i)
        worst_rate = std::max(
            worst_rate, std::pow(test::power_law_rho(g.node(i), 2.0), p.gamma - 1.0) *
                            std::abs(0.3 * std::sin(1.7 * g.node(i))));
    for (double r0 : {2.0, 4.0, 7.5, 10.0}) {
        CharacteristicPath path = trace_characteristic(h, r0, 1.0);
        auto v = v_along_path(h, path);
        for (std::size_t j = 0; j < v.size(); ++j)
            CHECK(std::abs(v[j]) <=
                  std::abs(h.v0_at(r0)) + c * worst_rate * path.times[j] + 1e-10);
    }
}

TEST_CASE("default launch radii avoid both boundaries") {
    RadialGrid g(1.0, 20.0, 64);
    auto radii = default_launch_radii(g, 16);
    CHECK(radii.size() == 16);
    CHECK(radii.front() == doctest::Approx(1.0 + 0.05 * 19.0));
    CHECK(radii.back() == doctest::Approx(1.0 + 0.6 * 19.0));
    for (std::size_t i = 1; i < radii.size(); ++i) CHECK(radii[i] > radii[i - 1]);
}

TEST_CASE("tracing beyond the stored history or domain is rejected") {
    RadialGrid g(1.0, 20.0, 64);
    auto h = frozen_history(g, default_params(), [](double) { return 1.0; },
                            [](double) { return 0.0; }, 1.0, 11);
    CHECK_THROWS_AS(trace_characteristic(h, 3.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(trace_characteristic(h, 0.5, 1.0), std::invalid_argument);
}
