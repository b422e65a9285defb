#include "cislunar/finetune.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

#include "cislunar/broadcastnet.hpp"
#include "cislunar/errors.hpp"

namespace cislunar {

std::vector<CorrectionVector> latin_hypercube(std::size_t n, std::uint64_t seed, double max) {
    if (n == 0) throw InputError("latin_hypercube needs n >= 1");
    if (!(max > 0.0) || !std::isfinite(max)) throw InputError("latin_hypercube needs a finite max > 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    std::vector<std::array<double, CorrectionVector::families>> points(n);
    std::vector<std::size_t> strata(n);
    for (std::size_t axis = 0; axis < CorrectionVector::families; ++axis) {
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        std::shuffle(strata.begin(), strata.end(), rng);
        for (std::size_t i = 0; i < n; ++i) {
            points[i][axis] = max * (static_cast<double>(strata[i]) + jitter(rng)) / static_cast<double>(n);
        }
    }
    std::vector<CorrectionVector> out;
    out.reserve(n);
    for (const auto& p : points) out.push_back(CorrectionVector::from_array(p));
    return out;
}

namespace {

std::string describe(const CorrectionVector& v) {
    const auto a = v.as_array();
    return fmt::format("({}, {}, {}, {}, {})", a[0], a[1], a[2], a[3], a[4]);
}

}  // namespace

std::vector<SweepResult> sweep_corrections(const Scenario& scenario, const Truth& truth,
                                           std::span<const CorrectionVector> vectors, unsigned threads) {
    scenario.validate();
    std::vector<SweepResult> results(vectors.size());
    if (vectors.empty()) return results;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, vectors.size()));

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex failure_mutex;
    std::size_t failure_index = vectors.size();
    std::string failure_message;

    auto worker = [&] {
        BroadcastOptions options;
        options.record_trace = false;
        for (std::size_t i = next++; i < vectors.size() && !failed; i = next++) {
            try {
                vectors[i].validate();
                const auto run = simulate_broadcast(scenario, truth, vectors[i], scenario.seed, options);
                const auto m = summarize(run, scenario.sweep.epsilon);
                results[i] = {vectors[i], m.rms_sync_error, m.divergence_rate, m.agreement_fraction,
                              m.worst_pair_error};
            } catch (const std::exception& e) {
                std::lock_guard lock(failure_mutex);
                if (i < failure_index) {
                    failure_index = i;
                    failure_message = e.what();
                }
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    if (failed) {
        throw Error(fmt::format("sweep vector #{} {} failed: {}", failure_index, describe(vectors[failure_index]),
                                failure_message));
    }
    return results;
}

double faithfulness_score(std::span<const SweepResult> results, double epsilon) {
    if (results.empty()) throw InputError("faithfulness_score needs at least one sweep result");
    std::size_t passing = 0;
    for (const auto& r : results) {
        if (r.worst_pair_error < epsilon) ++passing;
    }
    return static_cast<double>(passing) / static_cast<double>(results.size());
}

namespace {

// Events keyed by the label a convention assigns them. A labeling is a
// bijection onto events, so walking both tables in label order visits the
// same events; the observable itself is read off the event.
std::vector<std::size_t> events_in_label_order(const CoordinateConvention& conv, const std::vector<double>& epochs) {
    std::vector<std::pair<double, std::size_t>> keyed(epochs.size());
    for (std::size_t k = 0; k < epochs.size(); ++k) keyed[k] = {coordinate_label(conv, epochs[k]), k};
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::size_t> order(keyed.size());
    for (std::size_t k = 0; k < keyed.size(); ++k) order[k] = keyed[k].second;
    return order;
}

double pairwise_observable(const Truth& truth, std::size_t i, std::size_t j, std::size_t k) {
    return truth.clocks[i].displayed_offset[k] - truth.clocks[j].displayed_offset[k];
}

}  // namespace

ModelSwapResult model_swap(const Scenario& scenario, const Truth& truth, const CoordinateConvention& conv_a,
                           const CoordinateConvention& conv_b) {
    (void)scenario;
    ModelSwapResult out;
    const auto order_a = events_in_label_order(conv_a, truth.epochs);
    const auto order_b = events_in_label_order(conv_b, truth.epochs);
    const std::size_t n_clocks = truth.clocks.size();

    out.rows.resize(truth.epochs.size());
    for (std::size_t pos = 0; pos < truth.epochs.size(); ++pos) {
        const std::size_t ka = order_a[pos];
        const std::size_t kb = order_b[pos];
        double worst = 0.0;
        for (std::size_t i = 0; i < n_clocks; ++i) {
            for (std::size_t j = i + 1; j < n_clocks; ++j) {
                worst = std::max(worst, std::abs(pairwise_observable(truth, i, j, ka) -
                                                 pairwise_observable(truth, i, j, kb)));
            }
        }
        const double t = truth.epochs[ka];
        out.rows[pos] = {t, conv_a.label_offset(t), conv_b.label_offset(t), worst};
        out.max_pairwise_delta = std::max(out.max_pairwise_delta, worst);
    }
    if (truth.epochs.size() >= 2) {
        out.max_label_delta = convention_discrepancy(conv_a, conv_b, truth.epochs.front(), truth.epochs.back()).max_abs;
    } else if (!truth.epochs.empty()) {
        const double t = truth.epochs.front();
        out.max_label_delta = std::abs(conv_a.label_offset(t) - conv_b.label_offset(t));
    }
    return out;
}

double HarmonicModel::operator()(double t) const {
    double v = coefficients[0] + coefficients[1] * t;
    for (std::size_t k = 0; k < frequencies.size(); ++k) {
        const double phase = frequencies[k] * t;
        v += coefficients[2 + 2 * k] * std::sin(phase) + coefficients[3 + 2 * k] * std::cos(phase);
    }
    return v;
}

HarmonicModel fit_harmonic_model(std::span<const double> t, std::span<const double> value,
                                 std::span<const double> frequencies) {
    if (t.size() != value.size()) throw InputError("fit needs equally many times and values");
    const auto n = static_cast<Eigen::Index>(t.size());
    const auto p = static_cast<Eigen::Index>(2 + 2 * frequencies.size());
    if (n < p) throw FitFailure(fmt::format("fit has {} samples for {} parameters", n, p));

    // Time is scaled to [-1, 1]-ish so the linear column is not orders of
    // magnitude away from the harmonic ones.
    const double scale = std::max(std::abs(t.front()), std::abs(t.back()));
    const double inv_scale = scale > 0.0 ? 1.0 / scale : 1.0;
    Eigen::MatrixXd design(n, p);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const double tr = t[static_cast<std::size_t>(r)];
        design(r, 0) = 1.0;
        design(r, 1) = tr * inv_scale;
        for (std::size_t k = 0; k < frequencies.size(); ++k) {
            const double phase = frequencies[k] * tr;
            design(r, static_cast<Eigen::Index>(2 + 2 * k)) = std::sin(phase);
            design(r, static_cast<Eigen::Index>(3 + 2 * k)) = std::cos(phase);
        }
        rhs[r] = value[static_cast<std::size_t>(r)];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
        throw FitFailure(fmt::format("design matrix is rank deficient (rank {} of {})", qr.rank(), p));
    }
    HarmonicModel model;
    model.frequencies.assign(frequencies.begin(), frequencies.end());
    model.coefficients = qr.solve(rhs);
    model.coefficients[1] *= inv_scale;
    return model;
}

OffsetSeries relative_offset_series(const Worldline& a, const Worldline& b, std::span<const double> epochs,
                                    double step, const EphemerisConfig& cfg) {
    const auto field = PotentialField::earth_moon(cfg);
    const auto pa = proper_offset_series(a, epochs, step, field, cfg);
    const auto pb = proper_offset_series(b, epochs, step, field, cfg);
    OffsetSeries out;
    out.t.assign(epochs.begin(), epochs.end());
    out.value.resize(pa.size());
    for (std::size_t k = 0; k < pa.size(); ++k) out.value[k] = pa[k] - pb[k];
    return out;
}

std::vector<double> prediction_epochs(double fit_window_days, double predict_window_days, double fit_sample,
                                      double predict_sample) {
    if (!(fit_sample > 0.0) || !(predict_sample > 0.0)) throw InputError("sample spacing must be positive");
    const double fit_end = fit_window_days * 86400.0;
    const double predict_end = predict_window_days * 86400.0;
    std::vector<double> out;
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * fit_sample;
        if (t > fit_end) break;
        out.push_back(t);
    }
    const double start = out.back();
    for (std::size_t k = 1;; ++k) {
        const double t = start + static_cast<double>(k) * predict_sample;
        if (t > predict_end) break;
        out.push_back(t);
    }
    return out;
}

std::vector<double> earth_moon_frequencies(const EphemerisConfig& cfg) {
    const double n = 2.0 * std::numbers::pi / cfg.orbital_period;
    const double spin = 2.0 * std::numbers::pi / cfg.earth_spin_period;
    return {n, 2.0 * n, 3.0 * n, 4.0 * n, spin, spin - n, spin - 2.0 * n, 2.0 * (spin - n)};
}

double PredictionReport::first_exceedance(double threshold) const {
    for (const auto& p : errors) {
        if (p.error > threshold) return p.t;
    }
    return -1.0;
}

double PredictionReport::max_error() const {
    double m = 0.0;
    for (const auto& p : errors) m = std::max(m, p.error);
    return m;
}

PredictionReport long_horizon_prediction(double fit_window_days, double predict_window_days, const OffsetSeries& truth,
                                         const OffsetSeries& fit_source, std::span<const double> frequencies) {
    if (!(fit_window_days >= 30.0)) throw InputError("long_horizon_prediction needs a fit window of at least 30 days");
    if (!(predict_window_days >= fit_window_days)) {
        throw InputError("long_horizon_prediction needs predict_window >= fit_window");
    }
    const double fit_end = fit_window_days * 86400.0;
    const double predict_end = predict_window_days * 86400.0;

    std::vector<double> ft;
    std::vector<double> fv;
    for (std::size_t k = 0; k < fit_source.t.size(); ++k) {
        if (fit_source.t[k] > fit_end) break;
        ft.push_back(fit_source.t[k]);
        fv.push_back(fit_source.value[k]);
    }
    if (ft.empty() || ft.back() < fit_end * (1.0 - 1e-9)) {
        throw InputError("fit source does not cover the fit window");
    }

    PredictionReport report;
    report.model = fit_harmonic_model(ft, fv, frequencies);
    for (std::size_t k = 0; k < ft.size(); ++k) {
        report.fit_residual = std::max(report.fit_residual, std::abs(report.model(ft[k]) - fv[k]));
    }
    for (std::size_t k = 0; k < truth.t.size(); ++k) {
        if (truth.t[k] > predict_end) break;
        report.errors.push_back({truth.t[k], std::abs(report.model(truth.t[k]) - truth.value[k])});
    }
    return report;
}

}  // namespace cislunar
