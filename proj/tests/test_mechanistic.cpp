#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sparseset/mechanistic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace sparseset;

namespace {

MechanisticParams mmk_params(double vmax, double km, double s0, double p0 = 0.0) {
    MechanisticParams p;
    p.kind = ModelKind::MMK;
    p.values = {vmax, km, s0, p0};
    return p;
}

MechanisticParams ecoli_midpoint() {
    auto prior = default_prior(ModelKind::ECOLI);
    MechanisticParams p;
    p.kind = ModelKind::ECOLI;
    for (std::size_t i = 0; i < prior.lo.size(); ++i)
        p.values.push_back(0.5 * (prior.lo[i] + prior.hi[i]));
    return p;
}

// Fixed-step driver over the embedded 4th-order solution, for order checks.
double fixed_step_order4_final(double y0, double t1, int n_steps) {
    auto rhs = [](double, const double* y, double* dy) { dy[0] = -y[0]; };
    double y = y0, y5, y4;
    const double h = t1 / n_steps;
    for (int i = 0; i < n_steps; ++i) {
        dopri5_step(rhs, i * h, &y, h, 1, &y5, &y4);
        y = y4;
    }
    return y;
}

} // namespace

TEST_CASE("mmk_rhs half saturation and exhaustion") {
    auto p = mmk_params(1.4, 0.3, 1.0);
    double state[2] = {0.3, 0.0}; // S == Km
    double d[2];
    mmk_rhs(state, p, d);
    CHECK(d[0] == doctest::Approx(-0.7).epsilon(1e-15));
    CHECK(d[1] == doctest::Approx(0.7).epsilon(1e-15));

    state[0] = 0.0;
    mmk_rhs(state, p, d);
    CHECK(d[0] == 0.0);
    CHECK(d[1] == 0.0);
}

TEST_CASE("mmk_rhs conserves S+P by construction") {
    Rng rng(3);
    auto prior = default_prior(ModelKind::MMK);
    for (int i = 0; i < 100; ++i) {
        auto p = sample_params(ModelKind::MMK, prior, rng);
        double state[2] = {rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)};
        double d[2];
        mmk_rhs(state, p, d);
        CHECK(d[0] + d[1] == 0.0);
    }
}

TEST_CASE("ecoli_rhs starved state only aerates") {
    auto p = ecoli_midpoint();
    double state[4] = {0.5, 0.0, 0.0, 60.0};
    double d[4];
    ecoli_rhs(state, p, d);
    CHECK(d[0] == 0.0);
    CHECK(d[1] == 0.0);
    CHECK(d[2] == 0.0);
    CHECK(d[3] == doctest::Approx(p.get("kLa") * 40.0).epsilon(1e-12));
}

TEST_CASE("ecoli_rhs below overflow threshold acetate only consumed") {
    auto p = ecoli_midpoint();
    // S small so qs < qs_crit; some acetate present
    double state[4] = {0.5, 0.01, 0.3, 80.0};
    double d[4];
    ecoli_rhs(state, p, d);
    CHECK(d[2] <= 0.0);
}

TEST_CASE("ecoli_rhs saturated DOT with no biomass is a fixed point") {
    auto p = ecoli_midpoint();
    double state[4] = {0.0, 5.0, 0.0, 100.0};
    double d[4];
    ecoli_rhs(state, p, d);
    CHECK(d[0] == 0.0);
    CHECK(d[3] == 0.0);
}

TEST_CASE("adaptive integrator matches exp(-1) within 1e-6") {
    auto rhs = [](double, const double* y, double* dy) { dy[0] = -y[0]; };
    auto traj = integrate_adaptive(rhs, {1.0}, 1.0);
    CHECK(std::abs(traj.eval(1.0)[0] - std::exp(-1.0)) <= 1e-6);
}

TEST_CASE("embedded 4th-order component has convergence order >= 3.8") {
    const double exact = std::exp(-1.0);
    double e1 = std::abs(fixed_step_order4_final(1.0, 1.0, 8) - exact);
    double e2 = std::abs(fixed_step_order4_final(1.0, 1.0, 16) - exact);
    double order = std::log2(e1 / e2);
    CHECK(order >= 3.8);
}

TEST_CASE("MMK conservation and monotone substrate across prior draws") {
    Rng rng(42);
    auto prior = default_prior(ModelKind::MMK);
    for (int i = 0; i < 100; ++i) {
        auto p = sample_params(ModelKind::MMK, prior, rng);
        auto traj = integrate(ModelKind::MMK, p, 4.0);
        const double total0 = p.get("S0") + p.get("P0");
        double prev_s = p.get("S0");
        for (int k = 0; k <= 100; ++k) {
            double t = 4.0 * k / 100.0;
            auto y = traj.eval(t);
            CHECK(std::abs(y[0] + y[1] - total0) <= 1e-8 * std::max(total0, 1.0));
            CHECK(y[0] <= prev_s + 1e-8);
            CHECK(y[0] >= -1e-8);
            prev_s = y[0];
        }
    }
}

TEST_CASE("ecoli trajectories stay in bounds") {
    Rng rng(7);
    auto prior = default_prior(ModelKind::ECOLI);
    for (int i = 0; i < 20; ++i) {
        auto p = sample_params(ModelKind::ECOLI, prior, rng);
        auto traj = integrate(ModelKind::ECOLI, p, 10.0);
        for (int k = 0; k <= 100; ++k) {
            auto y = traj.eval(10.0 * k / 100.0);
            for (double v : y) CHECK(v >= -1e-8);
            CHECK(y[3] <= 100.0 + 1e-8);
        }
    }
}

TEST_CASE("dense output endpoints and stored steps are exact") {
    auto p = mmk_params(1.0, 0.5, 1.5, 0.25);
    auto traj = integrate(ModelKind::MMK, p, 4.0);
    auto y0 = traj.eval(0.0);
    CHECK(y0[0] == 1.5);
    CHECK(y0[1] == 0.25);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        auto y = traj.eval(traj.times[i]);
        CHECK(y[0] == traj.states[i][0]);
        CHECK(y[1] == traj.states[i][1]);
    }
    CHECK_THROWS_AS(traj.eval(4.0001), std::out_of_range);
    CHECK_THROWS_AS(traj.eval(-0.1), std::out_of_range);
}

TEST_CASE("dense output midpoint accuracy on exponential decay") {
    auto rhs = [](double, const double* y, double* dy) { dy[0] = -y[0]; };
    auto traj = integrate_adaptive(rhs, {1.0}, 1.0);
    for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
        double mid = 0.5 * (traj.times[i] + traj.times[i + 1]);
        CHECK(std::abs(traj.eval(mid)[0] - std::exp(-mid)) <= 1e-6);
    }
}

TEST_CASE("integration is deterministic") {
    auto p = mmk_params(1.3, 0.4, 1.8);
    auto a = integrate(ModelKind::MMK, p, 4.0);
    auto b = integrate(ModelKind::MMK, p, 4.0);
    CHECK(a.times == b.times);
    CHECK(a.states == b.states);
}

TEST_CASE("sample_params bounds, determinism, fixed parameters") {
    auto prior = default_prior(ModelKind::MMK);
    Rng rng(11);
    for (int i = 0; i < 100000; ++i) {
        auto p = sample_params(ModelKind::MMK, prior, rng);
        for (std::size_t j = 0; j < p.values.size(); ++j) {
            CHECK(p.values[j] >= prior.lo[j]);
            CHECK(p.values[j] <= prior.hi[j]);
        }
    }
    Rng r1(123), r2(123);
    auto a = sample_params(ModelKind::ECOLI, default_prior(ModelKind::ECOLI), r1);
    auto b = sample_params(ModelKind::ECOLI, default_prior(ModelKind::ECOLI), r2);
    CHECK(a.values == b.values);
    CHECK(a.get("A0") == 0.0);
    CHECK(a.get("DOT0") == 100.0);
}

TEST_CASE("Vmax draws pass KS uniformity at alpha 0.001") {
    auto prior = default_prior(ModelKind::MMK);
    Rng rng(2024);
    const int n = 100000;
    std::vector<double> u;
    u.reserve(n);
    for (int i = 0; i < n; ++i) {
        auto p = sample_params(ModelKind::MMK, prior, rng);
        u.push_back((p.get("Vmax") - 0.5) / 1.5);
    }
    std::sort(u.begin(), u.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        d = std::max(d, std::abs(u[i] - (i + 1.0) / n));
        d = std::max(d, std::abs(u[i] - static_cast<double>(i) / n));
    }
    // critical value at alpha = 0.001: 1.9495 / sqrt(n)
    CHECK(d < 1.9495 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("stiffness reported as IntegrationError") {
    // Absurd kLa makes the explicit method give up via step underflow.
    auto p = ecoli_midpoint();
    p.set("kLa", 1e14);
    CHECK_THROWS_AS(integrate(ModelKind::ECOLI, p, 10.0), IntegrationError);
}
