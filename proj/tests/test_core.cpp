#include <doctest.h>

#include <cmath>

#include "pathlab/core.hpp"

using namespace pathlab;

TEST_CASE("model parameters derive beta and reject bad input") {
    const auto p = make_params(1.0, 2.0, 1.0);
    CHECK(p.beta() == doctest::Approx(1.0));
    CHECK(p.beta_sq() == doctest::Approx(1.0));
    CHECK(make_params(2.0, 3.0, 0.5).beta() == doctest::Approx(0.75));
    CHECK(p.with_hbar(0.05).hbar() == 0.05);
    CHECK(p.with_hbar(0.05).a() == 1.0);

    CHECK_THROWS_AS((void)make_params(0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)make_params(1.0, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)make_params(1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)make_params(1.0, NAN, 1.0), std::invalid_argument);
    CHECK_NOTHROW((void)make_params(1.0, 0.0, 1.0));
}

TEST_CASE("lattice spans [-T, T] with N equal steps") {
    const auto l = make_lattice(1.0, 32);
    CHECK(l.n_nodes() == 33);
    CHECK(l.epsilon() == doctest::Approx(1.0 / 16));
    CHECK(l.time(0) == -1.0);
    CHECK(l.time(32) == 1.0);
    CHECK(l.time(16) == doctest::Approx(0.0));
    for (std::size_t i = 0; i + 1 < l.n_nodes(); ++i)
        CHECK(l.time(i + 1) - l.time(i) == doctest::Approx(l.epsilon()));

    CHECK_THROWS_AS((void)make_lattice(1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)make_lattice(-1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS((void)make_lattice(INFINITY, 8), std::invalid_argument);
}

TEST_CASE("paths") {
    const Path p{1.0, -2.0, 3.0};
    CHECK(p.size() == 3);
    CHECK(p.front() == 1.0);
    CHECK(p.back() == 3.0);
    CHECK(p.negated() == Path{-1.0, 2.0, -3.0});

    const auto l = make_lattice(2.0, 4);
    const auto s = sample_on(l, [](double t) { return t * t; });
    CHECK(s[0] == 4.0);
    CHECK(s[2] == 0.0);
    CHECK_NOTHROW(require_matching(s, l));
    CHECK_THROWS_AS(require_matching(p, l), std::invalid_argument);
}

TEST_CASE("branch names") {
    CHECK(parse_branch("PLUS") == Branch::Plus);
    CHECK(parse_branch("MINUS") == Branch::Minus);
    CHECK(to_string(Branch::Minus) == "MINUS");
    CHECK(branch_sign(Branch::Plus) == 1.0);
    CHECK(branch_sign(Branch::Minus) == -1.0);
    CHECK_THROWS_AS((void)parse_branch("plus-ish"), std::invalid_argument);
}
