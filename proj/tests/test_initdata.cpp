#include "rcns/initdata.hpp"
#include "rcns/solver.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace rcns;

namespace {

ModelParams default_params() {
    ModelParams p;
    p.A = 1.0;
    p.gamma = 2.0;
    p.alpha = 1.0;
    p.d = 3;
    p.m = 2;
    return p;
}

InitSpec default_spec() {
    InitSpec s;
    s.kind = InitKind::PowerLaw;
    s.sigma = 2.0;
    s.u_amplitude = 0.5;
    s.u_support_lo = 2.0;
    s.u_support_hi = 5.0;
    return s;
}

} // namespace

TEST_CASE("power-law density values") {
    RadialGrid g(1.0, 20.0, 400);
    FluidState s = build(default_spec(), g, default_params());
    CHECK(s.rho[0] == doctest::Approx(0.5).epsilon(1e-14)); // r = 1, 1/(1+1) = 1/2
    for (int i = 0; i < g.size(); ++i) {
        CHECK(s.rho[i] > 0.0);
        if (i > 0) CHECK(s.rho[i] < s.rho[i - 1]); // strictly decreasing
    }
}

TEST_CASE("exponential density is positive and strictly decreasing") {
    InitSpec spec = default_spec();
    spec.kind = InitKind::Exponential;
    RadialGrid g(1.0, 20.0, 256);
    FluidState s = build(spec, g, default_params());
    for (int i = 1; i < g.size(); ++i) {
        CHECK(s.rho[i] > 0.0);
        CHECK(s.rho[i] < s.rho[i - 1]);
    }
}

TEST_CASE("velocity bump vanishes at the support ends and at the wall") {
    RadialGrid g(1.0, 20.0, 1001);
    FluidState s = build(default_spec(), g, default_params());
    CHECK(s.u[0] == 0.0); // exact, not approximate
    CHECK(velocity_bump(2.0, 0.5, 2.0, 5.0) == 0.0);
    CHECK(velocity_bump(5.0, 0.5, 2.0, 5.0) == 0.0);
    CHECK(velocity_bump(1.5, 0.5, 2.0, 5.0) == 0.0);
    CHECK(velocity_bump(7.0, 0.5, 2.0, 5.0) == 0.0);
    CHECK(velocity_bump(3.5, 0.5, 2.0, 5.0) ==
          doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-14));
    for (int i = 0; i < g.size(); ++i) {
        const double r = g.node(i);
        if (r <= 2.0 || r >= 5.0) CHECK(s.u[i] == 0.0);
    }
}

TEST_CASE("derived psi0 matches the analytic log-derivative at second order") {
    auto max_err = [](int N) {
        RadialGrid g(1.0, 20.0, N);
        FluidState s = build(default_spec(), g, default_params());
        double worst = 0.0;
        for (int i = 0; i < g.size(); ++i) {
            // psi = -4 r^3 / (1 + r^4) for sigma = 2
            const double analytic = test::power_law_psi(g.node(i), 2.0);
            worst = std::max(worst, std::abs(s.psi[i] - analytic));
        }
        return worst;
    };
    const double e1 = max_err(500);
    const double e2 = max_err(999); // nested spacing, dr halves
    CHECK(e1 < 1e-2);
    CHECK(e1 / e2 > 3.0);
}

TEST_CASE("built states pass the initial-data validator") {
    RadialGrid g(1.0, 20.0, 800);
    auto p = default_params();
    FluidState s = build(default_spec(), g, p);
    InitDataReport rep = validate_initial_data(s, p, g, 4.0, 1e-8, 2.0);
    CHECK(rep.all_finite);
    CHECK_FALSE(rep.tail_flag);
    REQUIRE(rep.sigma_ok.has_value());
    CHECK(*rep.sigma_ok);
}

TEST_CASE("sigma at or below d/2 trips the tail flag (report-only)") {
    InitSpec spec = default_spec();
    spec.sigma = 0.5;
    RadialGrid g(1.0, 20.0, 800);
    auto p = default_params();
    FluidState s = build(spec, g, p); // construction permitted outside the strict regime
    InitDataReport rep = validate_initial_data(s, p, g, 4.0, 1e-8, 0.5);
    CHECK(rep.tail_flag);
    REQUIRE(rep.sigma_ok.has_value());
    CHECK_FALSE(*rep.sigma_ok);
}

TEST_CASE("strict regime rejects shallow power-law decay at build time") {
    InitSpec spec = default_spec();
    spec.sigma = 1.2;
    spec.require_global_regime = true;
    RadialGrid g(1.0, 20.0, 128);
    CHECK_THROWS_AS(build(spec, g, default_params()), std::invalid_argument);
    spec.sigma = 1.6; // > d/2 = 1.5
    CHECK_NOTHROW(build(spec, g, default_params()));
}

TEST_CASE("velocity support must sit strictly inside (a, R)") {
    RadialGrid g(1.0, 20.0, 128);
    InitSpec spec = default_spec();
    spec.u_support_lo = 0.5;
    CHECK_THROWS_AS(build(spec, g, default_params()), std::invalid_argument);
    spec = default_spec();
    spec.u_support_hi = 25.0;
    CHECK_THROWS_AS(build(spec, g, default_params()), std::invalid_argument);
}

TEST_CASE("custom profiles load from two-column CSV tables") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "rcns_initdata_test";
    fs::create_directories(dir);
    const std::string rho_path = (dir / "rho.csv").string();
    {
        std::ofstream out(rho_path);
        for (double r = 0.5; r <= 21.0; r += 0.25)
            out << r << "," << std::exp(-0.3 * r) << "\n";
    }
    InitSpec spec;
    spec.kind = InitKind::Custom;
    spec.rho_file = rho_path;
    spec.u_amplitude = 0.0;

    RadialGrid g(1.0, 20.0, 321);
    FluidState s = build(spec, g, default_params());
    for (int i = 0; i < g.size(); i += 17)
        CHECK(s.rho[i] == doctest::Approx(std::exp(-0.3 * g.node(i))).epsilon(1e-3));
    for (int i = 0; i < g.size(); ++i) CHECK(s.u[i] == 0.0);
    fs::remove_all(dir);
}

TEST_CASE("validator norms agree with adaptive quadrature on the exponential profile") {
    InitSpec spec = default_spec();
    spec.kind = InitKind::Exponential;
    spec.u_amplitude = 0.0;
    RadialGrid g(1.0, 30.0, 20001);
    auto p = default_params();
    FluidState s = build(spec, g, p);
    InitDataReport rep = validate_initial_data(s, p, g, 4.0);

    auto find = [&rep](const std::string& needle) {
        for (const auto& e : rep.norms)
            if (e.name.find(needle) != std::string::npos) return e.value;
        FAIL("norm not found: ", needle);
        return 0.0;
    };

    // total mass: int r^2 e^{-r} dr
    const double mass =
        test::integrate([](double r) { return r * r * std::exp(-r); }, 1.0, 30.0);
    CHECK(find("total mass") == doctest::Approx(mass).epsilon(1e-6));

    // |r rho0^{g-1}|_2 with gamma = 2: sqrt(int r^2 e^{-2r})
    const double w2 = std::sqrt(
        test::integrate([](double r) { return r * r * std::exp(-2.0 * r); }, 1.0, 30.0));
    CHECK(find("|r^(m/2) rho0^(g-1)|_2") == doctest::Approx(w2).epsilon(1e-6));

    // psi0 = -1 identically: |psi0|_inf = 1, |r^(m/q) psi0|_q = (int r^2)^{1/4}
    CHECK(find("|psi0|_inf") == doctest::Approx(1.0).epsilon(1e-6));
    const double lq =
        std::pow(test::integrate([](double r) { return r * r; }, 1.0, 30.0), 0.25);
    CHECK(find("|r^(m/q) psi0|_q") == doctest::Approx(lq).epsilon(1e-5));
}
