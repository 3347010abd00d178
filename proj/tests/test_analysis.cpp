#include <doctest.h>

#include <cmath>
#include <random>

#include "pathlab/analysis.hpp"

using namespace pathlab;

TEST_CASE("observables") {
    const auto l = make_lattice(1.0, 4);
    const Path p{1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK(evaluate_observable(p, ObservableId::MidpointSq, l)[0] == 9.0);
    CHECK(evaluate_observable(p, ObservableId::Endpoint, l)[0] == 5.0);
    // (1/2T) eps sum_{i<N} phi_i^2 = 0.5 * 0.5 * 30
    CHECK(evaluate_observable(p, ObservableId::MeanSq, l)[0] == doctest::Approx(7.5));
    CHECK(evaluate_observable(p, ObservableId::MeanPath, l) == p.values());
    CHECK(observable_dim(ObservableId::MeanPath, l) == 5);
    CHECK(observable_dim(ObservableId::Endpoint, l) == 1);

    const auto odd = make_lattice(1.0, 3);
    CHECK_THROWS_AS((void)evaluate_observable(Path{0, 1, 2, 3}, ObservableId::MidpointSq, odd),
                    std::invalid_argument);
    CHECK(parse_observable("MEAN_SQ") == ObservableId::MeanSq);
    CHECK(to_string(ObservableId::MidpointSq) == "MIDPOINT_SQ");
    CHECK_THROWS_AS((void)parse_observable("MEDIAN"), std::invalid_argument);
}

TEST_CASE("blocked error of independent samples is the naive error") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> nd(3.0, 2.0);
    std::vector<double> x(1 << 16);
    for (auto& v : x) v = nd(rng);
    const auto e = estimate(x);
    CHECK(e.mean[0] == doctest::Approx(3.0).epsilon(0.01));
    CHECK(e.std_error[0] == doctest::Approx(2.0 / std::sqrt(double(x.size()))).epsilon(0.15));
    CHECK(e.n_samples == x.size());
}

TEST_CASE("blocked error captures AR(1) autocorrelation") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> nd(0.0, 1.0);
    const double rho = 0.9;
    std::vector<double> x(1 << 18);
    double v = 0.0;
    for (auto& s : x) s = v = rho * v + nd(rng);
    // var of the mean: sigma^2 / (1 - rho^2) * (1 + rho) / (1 - rho) / n
    const double want = std::sqrt(1.0 / (1 - rho * rho) * (1 + rho) / (1 - rho) / double(x.size()));
    const auto e = estimate(x);
    CHECK(e.std_error[0] == doctest::Approx(want).epsilon(0.2));
    CHECK(e.block_size > 1);
}

TEST_CASE("estimate and compare edge cases") {
    CHECK_THROWS_AS((void)estimate(std::vector<double>(15, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS((void)estimate(std::vector<double>(33, 1.0), 2), std::invalid_argument);

    const auto c = estimate(std::vector<double>(64, 1.0));
    CHECK(c.std_error[0] == 0.0);
    CHECK(compare(c, c).z == 0.0);
    CHECK_THROWS_AS((void)compare(c, estimate(std::vector<double>(64, 2.0))), DegenerateComparisonError);

    EstimatorResult a{{1.0}, {0.3}, 100, 1}, b{{2.0}, {0.4}, 100, 1};
    const auto r = compare(a, b);
    CHECK(r.z == doctest::Approx(-2.0));
    CHECK(r.pass);
    b.mean[0] = 2.6;
    CHECK_FALSE(compare(a, b).pass);
}

TEST_CASE("multi-component estimates") {
    std::vector<double> rows;
    for (int i = 0; i < 64; ++i) {
        rows.push_back(i % 2);
        rows.push_back(10.0);
    }
    const auto e = estimate(rows, 2);
    CHECK(e.mean[0] == doctest::Approx(0.5));
    CHECK(e.mean[1] == doctest::Approx(10.0));
    CHECK(e.n_samples == 64);
}

TEST_CASE("sweep reference is the classical flow solution") {
    const auto l = make_lattice(1.0, 64);
    const auto p = make_params(1.0, 2.0, 1.0);
    const auto plus = sweep_reference(l, p, Branch::Plus, 0.0);
    CHECK(plus[0] == doctest::Approx(0.0));
    CHECK(plus.back() == doctest::Approx(std::tanh(2.0)));
    const auto minus = sweep_reference(l, p, Branch::Minus, 0.0);
    for (std::size_t i = 0; i < plus.size(); ++i) CHECK(minus[i] == doctest::Approx(-plus[i]));
}

TEST_CASE("hbar sweep approaches the kink") {
    // the hbar -> 0 limit is the lattice recursion, which sits O(eps) off the
    // continuum kink, so a fine lattice keeps that floor below the hbar effect
    const auto l = make_lattice(1.0, 128);
    const auto p = make_params(1.0, 2.0, 1.0);
    SamplerConfig cfg;
    cfg.n_samples = 20000;
    const auto r = hbar_sweep(l, p, Branch::Plus, {0.1, 0.03, 0.01}, cfg);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rms_strictly_decreasing);
    CHECK(r.rows[2].rms_dev_from_kink < 0.002);
    CHECK(r.rows[2].mean_el9_residual == doctest::Approx(1.0).epsilon(0.2));
    CHECK_THROWS_AS((void)hbar_sweep(l, p, Branch::Plus, {0.1, 0.2}, cfg), std::invalid_argument);
}

TEST_CASE("Ito check on Wiener paths") {
    const auto l = make_lattice(1.0, 32);
    const auto p = make_params(1.0, 2.0, 1.0);
    SamplerConfig cfg;
    cfg.n_samples = 20000;
    const auto r = ito_check(l, p, cfg);
    CHECK(r.identity_pass);
    CHECK(r.max_relative_identity_residual < kItoIdentityTolerance);
    CHECK(r.statistical_pass);
    CHECK(std::abs(r.z) < 3.0);
    // E[sum phi_i (dphi_i)^2] = hbar eps sum E[phi_i] = 0 for x0 = 0, so test x0 != 0 too
    cfg.x0 = 1.5;
    const auto shifted = ito_check(l, p, cfg);
    CHECK(shifted.drift_term.mean[0] == doctest::Approx(1.5 * 2.0).epsilon(0.05));
    CHECK(shifted.statistical_pass);
}
