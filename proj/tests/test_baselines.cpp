#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sparseset/baselines.hpp"

#include <cmath>

using namespace sparseset;

namespace {

SparseSeries make_series(std::vector<TripletRecord> recs, double t_split = 2.0,
                         double t_max = 4.0) {
    return SparseSeries(std::move(recs), t_split, t_max);
}

} // namespace

TEST_CASE("regular grid endpoints and spacing") {
    auto g = make_regular_grid(3, 2.0);
    REQUIRE(g.size() == 3);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g[2] == doctest::Approx(2.0).epsilon(1e-15));

    auto g14 = make_regular_grid(14, 2.0);
    for (std::size_t i = 0; i + 1 < g14.size(); ++i)
        CHECK(g14[i + 1] - g14[i] == doctest::Approx(2.0 / 13.0).epsilon(1e-12));
}

TEST_CASE("linear imputation reproduces a line exactly") {
    std::vector<TripletRecord> recs;
    for (double t : {0.1, 0.4, 0.9, 1.3, 1.9}) recs.push_back({t, 0, 3.0 * t - 1.0});
    auto grid = make_regular_grid(11, 2.0);
    auto imp = impute_linear(make_series(recs), grid, 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = std::clamp(grid[i], 0.1, 1.9); // flat extrapolation outside hull
        CHECK(imp.values[i][0] == doctest::Approx(3.0 * t - 1.0).epsilon(1e-12));
    }
}

TEST_CASE("linear imputation extrapolates flat") {
    auto imp = impute_linear(make_series({{1.0, 0, 5.0}, {1.5, 0, 7.0}}),
                             {0.0, 0.5, 1.75, 2.0}, 1);
    CHECK(imp.values[0][0] == 5.0);
    CHECK(imp.values[1][0] == 5.0);
    CHECK(imp.values[3][0] == 7.0);
}

TEST_CASE("empty channel gets the fill value") {
    auto imp = impute_linear(make_series({{1.0, 0, 5.0}}), {0.0, 1.0, 2.0}, 2, {0.0, -3.0});
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(imp.values[i][0] == 5.0);
        CHECK(imp.values[i][1] == -3.0);
    }
    auto rbf = impute_rbf(make_series({{1.0, 0, 5.0}}), {0.0, 1.0, 2.0}, 2, {0.0, -3.0});
    for (std::size_t i = 0; i < 3; ++i) CHECK(rbf.values[i][1] == -3.0);
}

TEST_CASE("RBF imputation of a single point is constant") {
    auto imp = impute_rbf(make_series({{0.7, 0, 2.5}}), make_regular_grid(9, 2.0), 1);
    for (const auto& row : imp.values) CHECK(row[0] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("RBF imputation of constant data is constant") {
    std::vector<TripletRecord> recs;
    for (double t : {0.2, 0.6, 1.1, 1.8}) recs.push_back({t, 0, 4.0});
    auto imp = impute_rbf(make_series(recs), make_regular_grid(9, 2.0), 1);
    for (const auto& row : imp.values) CHECK(row[0] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("RBF prediction stays inside the observed value hull") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<TripletRecord> recs;
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i < 8; ++i) {
            double v = rng.uniform(-5.0, 5.0);
            recs.push_back({rng.uniform(0.0, 2.0), 0, v});
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        auto imp = impute_rbf(make_series(std::move(recs)), make_regular_grid(25, 2.0), 1);
        for (const auto& row : imp.values) {
            CHECK(row[0] >= lo - 1e-9);
            CHECK(row[0] <= hi + 1e-9);
        }
    }
}

TEST_CASE("mechanistic nll identities") {
    MechanisticParams p{ModelKind::MMK, {1.0, 0.5, 1.5, 0.0}};
    auto traj = integrate(ModelKind::MMK, p, 4.0);

    SUBCASE("exact observations give zero") {
        std::vector<TripletRecord> recs;
        for (double t : {0.3, 1.1, 2.7}) {
            recs.push_back({t, 0, traj.eval(t)[0]});
            recs.push_back({t, 1, traj.eval(t)[1]});
        }
        CHECK(mechanistic_nll(p, make_series(recs), ModelKind::MMK, {0.1, 0.1}) ==
              doctest::Approx(0.0).epsilon(1e-9));
    }

    SUBCASE("one residual of one sigma gives one half") {
        auto s = make_series({{1.0, 0, traj.eval(1.0)[0] + 0.1}});
        CHECK(mechanistic_nll(p, s, ModelKind::MMK, {0.1, 0.1}) ==
              doctest::Approx(0.5).epsilon(1e-6));
    }

    SUBCASE("hand-computed three-record value") {
        auto s = make_series({{0.5, 0, traj.eval(0.5)[0] + 0.2},
                              {1.5, 1, traj.eval(1.5)[1] - 0.3},
                              {3.0, 0, traj.eval(3.0)[0] + 0.1}});
        std::vector<double> sig = {0.1, 0.2};
        double expect = 0.5 * (4.0 + 2.25 + 1.0);
        CHECK(mechanistic_nll(p, s, ModelKind::MMK, sig) ==
              doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("BFGS solves a strictly convex quadratic") {
    auto f = [](const std::vector<double>& x) {
        return (x[0] - 3.0) * (x[0] - 3.0) + 2.0 * (x[1] + 1.0) * (x[1] + 1.0);
    };
    auto r = bfgs_minimize(f, {0.0, 0.0});
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-4));
    CHECK(r.x[1] == doctest::Approx(-1.0).epsilon(1e-4));
    CHECK(r.f == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("BFGS solves Rosenbrock from the classic start") {
    auto f = [](const std::vector<double>& x) {
        double a = 1.0 - x[0];
        double b = x[1] - x[0] * x[0];
        return a * a + 100.0 * b * b;
    };
    auto r = bfgs_minimize(f, {-1.2, 1.0});
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("BFGS stops immediately at a stationary start") {
    auto f = [](const std::vector<double>& x) { return x[0] * x[0]; };
    auto r = bfgs_minimize(f, {0.0});
    CHECK(r.iterations == 0);
    CHECK(r.converged);
    CHECK(r.f == 0.0);
}

TEST_CASE("BFGS returns the best value it evaluated") {
    double best = 1e300;
    auto f = [&](const std::vector<double>& x) {
        double v = std::pow(x[0] - 2.0, 4) + std::pow(x[1] + 1.0, 2);
        best = std::min(best, v);
        return v;
    };
    auto r = bfgs_minimize(f, {5.0, 5.0});
    CHECK(r.f <= std::pow(3.0, 4) + std::pow(6.0, 2));
    CHECK(r.f >= best);
    CHECK(r.f - best <= 1e-9); // FD probes may dip marginally below the iterate
}

TEST_CASE("BFGS requires a finite starting value") {
    auto f = [](const std::vector<double>& x) { return std::log(x[0]); };
    CHECK_THROWS_AS(bfgs_minimize(f, {-1.0}), std::invalid_argument);
}

TEST_CASE("mechanistic fit recovers parameters from dense noise-free data") {
    MechanisticParams truth{ModelKind::MMK, {1.3, 0.4, 1.6, 0.0}};
    auto traj = integrate(ModelKind::MMK, truth, 4.0);
    std::vector<TripletRecord> recs;
    for (int i = 1; i <= 40; ++i) {
        double t = 4.0 * i / 41.0;
        recs.push_back({t, 0, traj.eval(t)[0]});
        recs.push_back({t, 1, traj.eval(t)[1]});
    }
    auto prior = default_prior(ModelKind::MMK);
    auto fit = fit_mechanistic_bfgs(make_series(recs), ModelKind::MMK, prior, {0.05, 0.05}, 1, 0);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(fit.params.values[i] == doctest::Approx(truth.values[i]).epsilon(0.01));
    CHECK(fit.params.values[3] == 0.0); // pinned fixed parameter
}

TEST_CASE("multistart never does worse than a single start") {
    MechanisticParams truth{ModelKind::MMK, {0.8, 0.7, 1.2, 0.0}};
    auto traj = integrate(ModelKind::MMK, truth, 4.0);
    Rng rng(17);
    std::vector<TripletRecord> recs;
    for (int i = 0; i < 14; ++i) {
        double t = rng.uniform(0.0, 2.0);
        int c = static_cast<int>(rng.uniform_int(2));
        recs.push_back({t, c, traj.eval(t)[static_cast<std::size_t>(c)] + 0.05 * rng.gaussian()});
    }
    auto s = make_series(std::move(recs));
    auto prior = default_prior(ModelKind::MMK);
    auto one = fit_mechanistic_bfgs(s, ModelKind::MMK, prior, {0.05, 0.05}, 1, 5);
    auto five = fit_mechanistic_bfgs(s, ModelKind::MMK, prior, {0.05, 0.05}, 5, 5);
    CHECK(five.loss <= one.loss + 1e-12);
}
