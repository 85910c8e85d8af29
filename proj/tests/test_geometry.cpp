#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "scatter2d/geometry.hpp"
#include "scatter2d/verify.hpp"

using namespace scatter2d;

namespace {

void check_in_g_xi(const ExperimentParams& ep, Vec2 xi) {
    const Vec2 lhs = (ep.theta_out - ep.theta_in) * ep.k;
    const Vec2 rhs = xi * (2.0 * pi);
    CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm()));
    CHECK(std::abs(ep.theta_in.norm() - 1.0) <= 1e-12);
    CHECK(std::abs(ep.theta_out.norm() - 1.0) <= 1e-12);
}

}  // namespace

TEST_CASE("omega membership") {
    const FixedEnergy fe(10.0);
    CHECK_FALSE(in_omega(fe, {3.2, 0.0}));  // 3.2 >= 10/pi
    CHECK(in_omega(fe, {3.1, 0.0}));
    CHECK(in_omega(fe, {0.0, 0.0}));  // origin lies inside the disk

    const FixedAngle fa({1.0, 0.0});
    CHECK_FALSE(in_omega(fa, {0.0, 1.0}));  // on the hyperplane
    CHECK_FALSE(in_omega(fa, {0.0, 0.0}));
    CHECK(in_omega(fa, {0.5, 1.0}));

    CHECK_FALSE(in_omega(Backscattering{}, {0.0, 0.0}));
    CHECK(in_omega(Backscattering{}, {1e-9, 0.0}));

    const FullData fd = FullData::equispaced(10);
    CHECK_FALSE(in_omega(fd, {0.0, 0.0}));
    CHECK(in_omega(fd, {1.0, 1.0}));
}

TEST_CASE("backscattering parameters") {
    const auto ep = experiment_params(Backscattering{}, {1.0, 0.0});
    REQUIRE(ep.has_value());
    CHECK(ep->k == doctest::Approx(pi).epsilon(1e-15));
    CHECK(ep->theta_in.x == doctest::Approx(-1.0));
    CHECK(ep->theta_in.y == doctest::Approx(0.0));
    CHECK(ep->theta_out.x == doctest::Approx(1.0));
    check_in_g_xi(*ep, {1.0, 0.0});

    CHECK_FALSE(experiment_params(Backscattering{}, {0.0, 0.0}).has_value());
}

TEST_CASE("fixed-angle parameters") {
    const FixedAngle fa({1.0, 0.0});
    const auto ep = experiment_params(fa, {1.0, 0.0});
    REQUIRE(ep.has_value());
    CHECK(ep->k == doctest::Approx(-pi).epsilon(1e-15));  // negative k occurs
    CHECK(ep->theta_out.x == doctest::Approx(-1.0));
    CHECK(ep->theta_out.y == doctest::Approx(0.0));
    check_in_g_xi(*ep, {1.0, 0.0});

    // sign(k) = -sign(xi . theta0)
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> box(-4.0, 4.0);
    int positives = 0, negatives = 0;
    for (int i = 0; i < 500; ++i) {
        const Vec2 xi{box(rng), box(rng)};
        if (!in_omega(fa, xi)) continue;
        const auto p = experiment_params(fa, xi);
        REQUIRE(p.has_value());
        CHECK(std::signbit(p->k) == !std::signbit(xi.dot(fa.theta0)));
        (p->k > 0 ? positives : negatives)++;
    }
    CHECK(positives > 0);
    CHECK(negatives > 0);
}

TEST_CASE("fixed-energy parameters") {
    const FixedEnergy fe(2.0 * pi);
    const auto ep = experiment_params(fe, {1.0, 0.0});
    REQUIRE(ep.has_value());
    // alpha = arccos(-1/2) = 2 pi/3
    CHECK(ep->theta_in.x == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(ep->theta_in.y == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
    CHECK(ep->theta_out.x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ep->theta_out.y == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
    check_in_g_xi(*ep, {1.0, 0.0});

    // |theta' - theta| = 2 pi |xi| / k0 exactly
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> box(-1.9, 1.9);
    for (int i = 0; i < 500; ++i) {
        const Vec2 xi{box(rng), box(rng)};
        if (!in_omega(fe, xi)) continue;
        const auto p = experiment_params(fe, xi);
        REQUIRE(p.has_value());
        CHECK((p->theta_out - p->theta_in).norm() ==
              doctest::Approx(2.0 * pi * xi.norm() / fe.k0).epsilon(1e-12));
    }

    // origin: forward scattering at the fixed energy
    const auto origin = experiment_params(fe, {0.0, 0.0});
    REQUIRE(origin.has_value());
    CHECK(origin->k == fe.k0);
    CHECK((origin->theta_out - origin->theta_in).norm() == 0.0);
}

TEST_CASE("backscattering is the boundary limit of fixed energy") {
    const FixedEnergy fe(10.0);
    const Vec2 dir{std::cos(0.3), std::sin(0.3)};
    // approach |xi| -> k0/pi from inside: theta' -> -theta like 2 sqrt(2 eps)
    for (double eps : {1e-4, 1e-6, 1e-8}) {
        const auto near = experiment_params(fe, dir * ((1.0 - eps) * fe.k0 / pi));
        REQUIRE(near.has_value());
        CHECK((near->theta_out + near->theta_in).norm() ==
              doctest::Approx(2.0 * std::sqrt(2.0 * eps)).epsilon(0.01));
    }

    const auto back = experiment_params(Backscattering{}, dir * (fe.k0 / pi));
    REQUIRE(back.has_value());
    CHECK(back->k == doctest::Approx(fe.k0).epsilon(1e-12));
    CHECK((back->theta_out + back->theta_in).norm() == 0.0);
}

TEST_CASE("random in-omega identities for all scenarios") {
    for (const auto& r : verify_geometry(1000)) {
        INFO(r.name, ": ", r.detail);
        CHECK(r.pass);
    }
}

TEST_CASE("full data components") {
    const FullData fd = FullData::equispaced(10);
    CHECK(fd.angles.size() == 10);
    for (const auto& a : fd.angles) CHECK(std::abs(a.norm() - 1.0) <= 1e-14);
    const auto comps = full_data_components(fd);
    CHECK(comps.size() == 10);
    CHECK(comps[0].theta0 == Vec2{1.0, 0.0});

    CHECK_THROWS_AS(experiment_params(ScatteringScenario(fd), Vec2{1.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(FullData(std::vector<Vec2>{}), std::invalid_argument);
    CHECK_THROWS_AS(FullData::equispaced(0), std::invalid_argument);
}

TEST_CASE("full-coverage mesh bound") {
    CHECK(max_full_mesh_N(FixedEnergy(10.0), 2.1) == 26);
    CHECK(max_full_mesh_N(FixedEnergy(100.0), 2.1) == 266);
    CHECK(max_full_mesh_N(FixedEnergy(1e-6), 2.1) == 0);
    // strict inequality around an even bound
    CHECK(max_full_mesh_N(FixedEnergy(26.0001 * pi / 8.4), 2.1) == 26);
    CHECK(max_full_mesh_N(FixedEnergy(25.9999 * pi / 8.4), 2.1) == 24);
    // defining property: largest even N strictly below 4Rk/pi
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> kd(0.1, 50.0);
    for (int i = 0; i < 200; ++i) {
        const double k0 = kd(rng);
        const int n = max_full_mesh_N(FixedEnergy(k0), 2.1);
        const double bound = 4.0 * 2.1 * k0 / pi;
        CHECK(n % 2 == 0);
        if (n > 0) CHECK(n < bound);
        CHECK(n + 2 >= bound);
    }
}

TEST_CASE("scenario serialization round trip") {
    const std::vector<ScatteringScenario> cases = {
        FixedEnergy(10.0), FixedAngle::from_angle(pi / 4), Backscattering{},
        FullData::equispaced(3)};
    for (const auto& s : cases) {
        const ScatteringScenario parsed =
            parse_scenario(scenario_name(s), scenario_params_string(s));
        CHECK(scenario_name(parsed) == scenario_name(s));
        CHECK(scenario_params_string(parsed) == scenario_params_string(s));
    }
    CHECK_THROWS_AS(parse_scenario("nonsense", "-"), std::runtime_error);

    CHECK_THROWS_AS(FixedEnergy(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(FixedEnergy(0.0), std::invalid_argument);
    CHECK_THROWS_AS(FixedAngle({0.0, 0.0}), std::invalid_argument);
}
