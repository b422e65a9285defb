#include <doctest.h>

#include <cmath>
#include <random>

#include "cislunar/errors.hpp"
#include "cislunar/relkinematics.hpp"

using namespace cislunar;

namespace {

const EphemerisConfig cfg;
const PotentialField field = PotentialField::earth_moon(cfg);
constexpr double day = 86400.0;

double c2() { return cfg.speed_of_light * cfg.speed_of_light; }

double mean_rate(const Worldline& w, double span) {
    const auto iv = accumulate_proper_time(w, 0.0, span, default_integration_step, field, cfg);
    return iv.deviation / iv.coordinate_span;
}

}  // namespace

TEST_CASE("clock at rest with no potential keeps coordinate time") {
    const Worldline w{FixedPoint{1e9, 0.0, 0.0}};
    CHECK(proper_rate(w, 0.0, PotentialField::empty(), cfg) == 1.0);
    const auto iv = accumulate_proper_time(w, 0.0, day, 60.0, PotentialField::empty(), cfg);
    CHECK(iv.deviation == 0.0);
    CHECK(iv.elapsed() == day);
}

TEST_CASE("perigee to apogee speed ratio is (1+e)/(1-e)") {
    const auto peri = detail::relative_orbit(0.0, cfg);
    const auto apo = detail::relative_orbit(cfg.orbital_period / 2.0, cfg);
    const double e = cfg.orbital_eccentricity;
    const double ratio = peri.velocity.norm() / apo.velocity.norm();
    CHECK(ratio == doctest::Approx((1.0 + e) / (1.0 - e)).epsilon(1e-12));
    CHECK(ratio == doctest::Approx(1.116178).epsilon(1e-6));

    // Closed form at perigee: r = a(1-e), v = a n sqrt((1+e)/(1-e)).
    const double n = 2.0 * std::numbers::pi / cfg.orbital_period;
    const double a = cfg.earth_moon_distance;
    CHECK(peri.position.x() == doctest::Approx(a * (1.0 - e)).epsilon(1e-14));
    CHECK(peri.velocity.y() == doctest::Approx(a * n * std::sqrt((1.0 + e) / (1.0 - e))).epsilon(1e-14));
}

TEST_CASE("barycentre is the mass-weighted mean of the two bodies") {
    for (const double t : {0.0, 3.3 * day, 17.0 * day}) {
        const auto earth = body_position(Body::earth, t, cfg);
        const auto moon = body_position(Body::moon, t, cfg);
        const Vec3<double> com = cfg.earth_gm * earth + cfg.moon_gm * moon;
        CHECK(com.norm() < 1e-6 * cfg.earth_gm);
    }
}

TEST_CASE("Earth equatorial site rate at t = 0 matches a closed-form evaluation") {
    // At t = 0 the Moon is at perigee on +x and the longitude-0 site faces it.
    const double e = cfg.orbital_eccentricity;
    const double a = cfg.earth_moon_distance;
    const double n = 2.0 * std::numbers::pi / cfg.orbital_period;
    const double mu_m = cfg.moon_gm / (cfg.earth_gm + cfg.moon_gm);
    const double r_p = a * (1.0 - e);
    const double v_p = a * n * std::sqrt((1.0 + e) / (1.0 - e));
    const double spin = 2.0 * std::numbers::pi / cfg.earth_spin_period;
    const double site_speed = -mu_m * v_p + spin * cfg.earth_radius;
    const double phi = -cfg.earth_gm / cfg.earth_radius - cfg.moon_gm / (r_p - cfg.earth_radius);
    const double expected = phi / c2() - site_speed * site_speed / (2.0 * c2());

    const Worldline site{EarthSurface{0.0, 0.0}};
    const double got = proper_rate_deviation(site, 0.0, field, cfg);
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    CHECK(got == doctest::Approx(-6.967e-10).epsilon(1e-3));
}

TEST_CASE("lunar surface clock gains about 56 us/day on an Earth surface clock") {
    const double lunar = secular_rate_deviation(Worldline{MoonSurface{}}, 60.0, field, cfg);
    const double earth = secular_rate_deviation(Worldline{EarthSurface{}}, 60.0, field, cfg);
    const double us_per_day = (lunar - earth) * day * 1e6;
    CHECK(us_per_day == doctest::Approx(56.02).epsilon(0.5 / 56.02));

    const double ten_day = (mean_rate(Worldline{MoonSurface{}}, 10 * day) - mean_rate(Worldline{EarthSurface{}}, 10 * day)) *
                           day * 1e6;
    CHECK(std::abs(ten_day - 56.02) <= 0.5);
}

TEST_CASE("GPS orbit gains about 38 us/day on the ground, matching the textbook formula") {
    const double r = 26561.75e3;
    const double gps = mean_rate(Worldline{EarthOrbit{r}}, day);
    const double ground = mean_rate(Worldline{EarthSurface{}}, day);
    const double us_per_day = (gps - ground) * day * 1e6;
    CHECK(std::abs(us_per_day - 38.0) <= 1.0);

    // Earth-only closed form; the Moon and the Earth's own motion contribute
    // well under 0.01 us/day over a day.
    const double spin = 2.0 * std::numbers::pi / cfg.earth_spin_period;
    const double v_ground = spin * cfg.earth_radius;
    const double textbook = (cfg.earth_gm * (1.0 / cfg.earth_radius - 1.0 / r) -
                             0.5 * (cfg.earth_gm / r - v_ground * v_ground)) /
                            c2();
    CHECK(us_per_day == doctest::Approx(textbook * day * 1e6).epsilon(0.01 / 38.0));
}

TEST_CASE("a -1000 m^2/s^2 mascon slows a site by about 0.96 ns/day") {
    const Worldline plain{MoonSurface{10.0, 20.0, 0.0}};
    const Worldline mascon{MoonSurface{10.0, 20.0, -1000.0}};
    const double rate = proper_rate_deviation(mascon, 0.0, field, cfg) - proper_rate_deviation(plain, 0.0, field, cfg);
    CHECK(rate == doctest::Approx(-1.11e-14).epsilon(0.01));
    const auto a = accumulate_proper_time(mascon, 0.0, day, 60.0, field, cfg);
    const auto b = accumulate_proper_time(plain, 0.0, day, 60.0, field, cfg);
    CHECK((a.deviation - b.deviation) == doctest::Approx(-1000.0 / c2() * day).epsilon(1e-9));
    CHECK((a.deviation - b.deviation) * 1e9 == doctest::Approx(-0.96).epsilon(0.01));
}

TEST_CASE("proper time is additive over adjacent intervals") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Worldline sites[] = {Worldline{EarthSurface{30.0, 40.0}}, Worldline{MoonSurface{-5.0, 60.0, -300.0}},
                               Worldline{MoonOrbit{1.9e6}}};
    for (int trial = 0; trial < 30; ++trial) {
        const double t0 = u(rng) * 20 * day;
        const double t1 = t0 + 600.0 + u(rng) * day;
        const double t2 = t1 + 600.0 + u(rng) * day;
        for (const auto& w : sites) {
            const auto whole = accumulate_proper_time(w, t0, t2, 60.0, field, cfg);
            const auto first = accumulate_proper_time(w, t0, t1, 60.0, field, cfg);
            const auto second = accumulate_proper_time(w, t1, t2, 60.0, field, cfg);
            CHECK(std::abs(whole.deviation - (first.deviation + second.deviation)) < 1e-15);
        }
    }
}

TEST_CASE("halving the step leaves the integral unchanged to well under a picosecond") {
    const Worldline w{EarthSurface{20.0, 0.0}};
    const auto coarse = accumulate_proper_time(w, 0.0, 5 * day, 60.0, field, cfg);
    const auto fine = accumulate_proper_time(w, 0.0, 5 * day, 30.0, field, cfg);
    CHECK(std::abs(coarse.deviation - fine.deviation) < 1e-15);
}

TEST_CASE("on a circular orbit a polar site runs at a constant rate") {
    EphemerisConfig circular = cfg;
    circular.orbital_eccentricity = 0.0;
    const auto f = PotentialField::earth_moon(circular);
    const Worldline pole{EarthSurface{90.0, 0.0}};
    double lo = 1.0;
    double hi = -1.0;
    for (int k = 0; k <= 200; ++k) {
        const double t = k * circular.orbital_period / 200.0;
        const double r = proper_rate_deviation(pole, t, f, circular);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    CHECK(hi - lo < 1e-16);
}

TEST_CASE("a global potential constant shifts every rate alike") {
    PotentialField shifted = field;
    shifted.constant_offset = 5.0e4;
    const Worldline a{MoonSurface{}};
    const Worldline b{EarthSurface{}};
    for (const double t : {0.0, 1e5, 1e6}) {
        const double plain = proper_rate_deviation(a, t, field, cfg) - proper_rate_deviation(b, t, field, cfg);
        const double moved = proper_rate_deviation(a, t, shifted, cfg) - proper_rate_deviation(b, t, shifted, cfg);
        CHECK(std::abs(plain - moved) < 1e-22);
        CHECK(proper_rate_deviation(a, t, shifted, cfg) - proper_rate_deviation(a, t, field, cfg) ==
              doctest::Approx(5.0e4 / c2()).epsilon(1e-9));
    }
}

TEST_CASE("worldlines inside a body are rejected") {
    // The Earth-Moon barycentre lies about 4700 km from the Earth's centre.
    const Worldline barycentre{FixedPoint{0.0, 0.0, 0.0}};
    CHECK_THROWS_AS(proper_rate_deviation(barycentre, 0.0, field, cfg), DomainError);
    const Worldline low{EarthOrbit{6.0e6}};
    CHECK_THROWS_AS(proper_rate_deviation(low, 0.0, field, cfg), DomainError);
}

TEST_CASE("integration preconditions") {
    const Worldline w{MoonSurface{}};
    CHECK_THROWS_AS(accumulate_proper_time(w, 10.0, 10.0, 1.0, field, cfg), InputError);
    CHECK_THROWS_AS(accumulate_proper_time(w, 0.0, 10.0, 20.0, field, cfg), InputError);
    CHECK_THROWS_AS(accumulate_proper_time(w, 0.0, 10.0, 0.0, field, cfg), InputError);
    const double epochs[] = {0.0, 10.0, 10.0};
    CHECK_THROWS_AS(proper_offset_series(w, epochs, 1.0, field, cfg), InputError);
}

TEST_CASE("ephemeris validation cites the violated invariant") {
    EphemerisConfig bad = cfg;
    bad.orbital_eccentricity = 1.2;
    try {
        bad.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("0 ≤ e < 1") != std::string::npos);
        CHECK(e.key() == "ephemeris.orbital_eccentricity");
    }
    bad = cfg;
    bad.speed_of_light = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("kinematics templates agree across scalar types") {
    const Worldline w{MoonSurface{15.0, -40.0, -200.0}};
    for (const double t : {0.0, 2.5e5, 1.7e6}) {
        const double d = proper_rate_deviation<double>(w, t, field, cfg);
        const long double ld = proper_rate_deviation<long double>(w, t, field, cfg);
        const float f = proper_rate_deviation<float>(w, static_cast<float>(t), field, cfg);
        CHECK(static_cast<double>(ld) == doctest::Approx(d).epsilon(1e-12));
        CHECK(static_cast<double>(f) == doctest::Approx(d).epsilon(1e-4));
    }
}

TEST_CASE("proper offset series starts at zero and tracks the interval integral") {
    const Worldline w{EarthSurface{}};
    const double epochs[] = {0.0, 600.0, 1800.0, 86400.0};
    const auto series = proper_offset_series(w, epochs, 60.0, field, cfg);
    REQUIRE(series.size() == 4);
    CHECK(series[0] == 0.0);
    const auto iv = accumulate_proper_time(w, 0.0, 86400.0, 60.0, field, cfg);
    CHECK(std::abs(series[3] - iv.deviation) < 1e-16);
}
