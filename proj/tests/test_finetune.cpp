#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "cislunar/broadcastnet.hpp"
#include "cislunar/errors.hpp"
#include "cislunar/finetune.hpp"
#include "fixtures.hpp"

using namespace cislunar;

namespace {

// The pair with one sync at the start and no contact afterwards, so every
// mis-scaled family accumulates freely.
Scenario free_running_pair(bool noisy) {
    auto s = fixtures::lunar_earth_pair();
    s.topology.links[0].disruptions = {{3000.0, s.duration + 1.0}};
    if (!noisy) {
        for (auto& c : s.clocks) c.model.white_fm_sigma = 0.0;
    }
    return s;
}

CorrectionVector with_family(std::size_t family, double scale) {
    auto a = CorrectionVector{}.as_array();
    a[family] = scale;
    return CorrectionVector::from_array(a);
}

}  // namespace

TEST_CASE("latin hypercube puts exactly one sample in every stratum of every axis") {
    const std::size_t n = 257;
    const double max = 2.0;
    const auto v = latin_hypercube(n, 9, max);
    REQUIRE(v.size() == n);
    for (std::size_t axis = 0; axis < CorrectionVector::families; ++axis) {
        std::vector<int> seen(n, 0);
        for (const auto& c : v) {
            const double x = c.as_array()[axis];
            REQUIRE(x >= 0.0);
            REQUIRE(x < max);
            ++seen[static_cast<std::size_t>(x / max * static_cast<double>(n))];
        }
        CHECK(std::all_of(seen.begin(), seen.end(), [](int k) { return k == 1; }));
    }
    CHECK(latin_hypercube(n, 9, max) == v);
    CHECK(latin_hypercube(n, 10, max) != v);
    CHECK_THROWS_AS(latin_hypercube(0, 1), InputError);
}

TEST_CASE("faithfulness counts results under epsilon") {
    std::vector<SweepResult> r(4);
    r[0].worst_pair_error = 1e-9;
    r[1].worst_pair_error = 2e-8;
    r[2].worst_pair_error = 5e-9;
    r[3].worst_pair_error = 1e-8;
    CHECK(faithfulness_score(r, 1e-8) == 0.5);
    CHECK(faithfulness_score(r, INFINITY) == 1.0);
    CHECK(faithfulness_score(r, 0.0) == 0.0);
    CHECK_THROWS_AS(faithfulness_score(std::span<const SweepResult>{}, 1e-8), InputError);
}

TEST_CASE("sweep results match individual runs and keep input order") {
    const auto s = free_running_pair(true);
    const auto truth = compute_truth(s);
    std::vector<CorrectionVector> v{CorrectionVector{}, with_family(0, 0.0), with_family(3, 0.0),
                                    with_family(4, 0.5)};
    const auto results = sweep_corrections(s, truth, v, 3);
    REQUIRE(results.size() == v.size());
    BroadcastOptions quiet;
    quiet.record_trace = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK(results[i].vector == v[i]);
        const auto m = summarize(simulate_broadcast(s, truth, v[i], s.seed, quiet), s.sweep.epsilon);
        CHECK(results[i].worst_pair_error == m.worst_pair_error);
        CHECK(results[i].divergence_rate == m.divergence_rate);
    }
    CHECK(results[0].worst_pair_error < s.sweep.epsilon);
    CHECK(std::abs(results[1].divergence_rate * 1e6 - 56.0) < 0.6);
    CHECK(results[2].divergence_rate * 1e6 == doctest::Approx(0.864).epsilon(0.01 / 0.864));
}

TEST_CASE("a failing sweep vector is named in the error") {
    const auto s = free_running_pair(true);
    const auto truth = compute_truth(s);
    std::vector<CorrectionVector> v{CorrectionVector{}, CorrectionVector{}, with_family(2, -1.0)};
    try {
        sweep_corrections(s, truth, v, 2);
        FAIL("expected the sweep to fail");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("#2") != std::string::npos);
    }
}

TEST_CASE("error grows monotonically as any family moves away from its tuned value") {
    const auto s = free_running_pair(false);
    const auto truth = compute_truth(s);
    const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
    for (std::size_t family = 0; family < CorrectionVector::families; ++family) {
        CAPTURE(CorrectionVector::names[family]);
        std::vector<CorrectionVector> v;
        for (double g : grid) v.push_back(with_family(family, g));
        const auto r = sweep_corrections(s, truth, v, 2);
        // Index 4 is the tuned point; walk outwards on each side.
        for (std::size_t i = 4; i + 1 < r.size(); ++i)
            CHECK(r[i + 1].worst_pair_error >= r[i].worst_pair_error - 1e-15);
        for (std::size_t i = 4; i > 0; --i) CHECK(r[i - 1].worst_pair_error >= r[i].worst_pair_error - 1e-15);
    }
}

TEST_CASE("the tuned pair stays under epsilon while its clocks' noise is independent") {
    const auto s = fixtures::lunar_earth_pair();
    const auto truth = compute_truth(s);
    const std::vector<CorrectionVector> tuned{CorrectionVector{}};
    const auto r = sweep_corrections(s, truth, tuned, 1);
    CHECK(r[0].worst_pair_error < s.sweep.epsilon);
    CHECK(faithfulness_score(r, s.sweep.epsilon) == 1.0);
}

TEST_CASE("swapping a convention for itself changes nothing") {
    const auto s = fixtures::lunar_earth_pair(1.0);
    const auto truth = compute_truth(s);
    const auto r = model_swap(s, truth, default_model_a(), default_model_a());
    CHECK(r.max_pairwise_delta == 0.0);
    CHECK(r.max_label_delta == 0.0);
}

TEST_CASE("the two default conventions disagree on labels but never on observables") {
    const auto s = fixtures::lunar_earth_pair(10.0);
    const auto truth = compute_truth(s);
    const auto r = model_swap(s, truth, default_model_a(), default_model_b());
    CHECK(r.max_pairwise_delta == 0.0);
    // Both peak a quarter synodic month in (7.4 days), inside the window.
    CHECK(r.max_label_delta == doctest::Approx(0.1e-6).epsilon(1e-6));
    REQUIRE(r.rows.size() == truth.epochs.size());
    const auto& row = r.rows[100];
    CHECK(row.label_offset_a == doctest::Approx(0.4e-6 * std::sin(synodic_angular_frequency * row.epoch)));
}

TEST_CASE("a secular rate offset shows up in labels only") {
    const auto s = fixtures::lunar_earth_pair(1.0);
    const auto truth = compute_truth(s);
    const CoordinateConvention fast("fast", 1e-12, {});
    const CoordinateConvention plain("plain", 0.0, {});
    const auto r = model_swap(s, truth, fast, plain);
    CHECK(r.max_pairwise_delta == 0.0);
    CHECK(r.max_label_delta >= 86.4e-9 * (1.0 - 1e-9));
}

TEST_CASE("random convention pairs never move an observable") {
    const auto s = fixtures::lunar_earth_pair(3.0);
    const auto truth = compute_truth(s);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto random_convention = [&](const char* name) {
        std::vector<PeriodicTerm> terms;
        const int k = 1 + static_cast<int>(u(rng) * 3);
        for (int i = 0; i < k; ++i) {
            terms.push_back({1e-6 * u(rng), 2.0 * std::numbers::pi / (86400.0 * (0.5 + 30.0 * u(rng))),
                             2.0 * std::numbers::pi * u(rng)});
        }
        return CoordinateConvention(name, (u(rng) - 0.5) * 1e-10, terms);
    };
    for (int trial = 0; trial < 100; ++trial) {
        const auto r = model_swap(s, truth, random_convention("a"), random_convention("b"));
        CHECK(r.max_pairwise_delta == 0.0);
    }
}

TEST_CASE("a harmonic model recovers in-family data to the picosecond") {
    const EphemerisConfig cfg;
    const auto freqs = earth_moon_frequencies(cfg);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> coeff(2 + 2 * freqs.size());
    coeff[0] = 1e-7 * u(rng);
    coeff[1] = 6.5e-10 * u(rng);
    for (std::size_t k = 2; k < coeff.size(); ++k) coeff[k] = 1e-6 * u(rng);
    auto synth = [&](double t) {
        double v = coeff[0] + coeff[1] * t;
        for (std::size_t k = 0; k < freqs.size(); ++k)
            v += coeff[2 + 2 * k] * std::sin(freqs[k] * t) + coeff[3 + 2 * k] * std::cos(freqs[k] * t);
        return v;
    };
    const auto epochs = prediction_epochs(60.0, 3650.0, 3600.0, 86400.0);
    OffsetSeries series;
    series.t = epochs;
    for (double t : epochs) series.value.push_back(synth(t));
    const auto report = long_horizon_prediction(60.0, 3650.0, series, series, freqs);
    CHECK(report.fit_residual < 1e-12);
    CHECK(report.max_error() < 1e-12);
    CHECK(report.first_exceedance(1e-12) < 0.0);
}

TEST_CASE("harmonic fit rejects a degenerate design") {
    const double w = 2.0 * std::numbers::pi / 86400.0;
    std::vector<double> t;
    std::vector<double> v;
    for (int k = 0; k < 500; ++k) {
        t.push_back(600.0 * k);
        v.push_back(std::sin(w * t.back()));
    }
    const double dup[] = {w, w};
    CHECK_THROWS_AS(fit_harmonic_model(t, v, dup), FitFailure);
    const double one[] = {w};
    CHECK_THROWS_AS(fit_harmonic_model(std::span(t).first(3), std::span(v).first(3), one), FitFailure);
    const auto m = fit_harmonic_model(t, v, one);
    CHECK(m(12345.0) == doctest::Approx(std::sin(w * 12345.0)).scale(1.0).epsilon(1e-12));
}

TEST_CASE("prediction over the fit window itself only sees the fit residual") {
    const EphemerisConfig cfg;
    const auto epochs = prediction_epochs(30.0, 30.0, 3600.0, 86400.0);
    const auto series = relative_offset_series(Worldline{MoonSurface{}}, Worldline{EarthSurface{}}, epochs, 300.0, cfg);
    const auto report = long_horizon_prediction(30.0, 30.0, series, series, earth_moon_frequencies(cfg));
    CHECK(report.max_error() == doctest::Approx(report.fit_residual));
}

TEST_CASE("long-horizon prediction preconditions") {
    OffsetSeries s;
    const double f[] = {1e-6};
    CHECK_THROWS_AS(long_horizon_prediction(10.0, 100.0, s, s, f), InputError);
    CHECK_THROWS_AS(long_horizon_prediction(60.0, 30.0, s, s, f), InputError);
    for (int k = 0; k <= 40; ++k) {
        s.t.push_back(86400.0 * k);
        s.value.push_back(0.0);
    }
    CHECK_THROWS_AS(long_horizon_prediction(60.0, 60.0, s, s, f), InputError);
}
