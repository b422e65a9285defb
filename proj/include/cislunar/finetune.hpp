#pragma once

// Sensitivity of synchronization to the correction scales, the coordinate
// convention swap, and long-horizon extrapolation of a fitted rate model.

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cislunar/coordmodels.hpp"
#include "cislunar/corrections.hpp"
#include "cislunar/relkinematics.hpp"
#include "cislunar/scenario.hpp"
#include "cislunar/truth.hpp"

namespace cislunar {

struct SweepResult {
    CorrectionVector vector;
    double rms_sync_error = 0.0;   // s
    double divergence_rate = 0.0;  // s/day
    double agreement_fraction = 0.0;
    double worst_pair_error = 0.0;  // s
};

/// n stratified samples of [0, max]^5, one stratum per sample on every axis.
std::vector<CorrectionVector> latin_hypercube(std::size_t n, std::uint64_t seed, double max = 2.0);

/// One broadcast run per vector against the shared truth, spread over worker
/// threads. Results come back in input order. A failing run aborts the sweep
/// with an Error naming the vector.
std::vector<SweepResult> sweep_corrections(const Scenario& scenario, const Truth& truth,
                                           std::span<const CorrectionVector> vectors, unsigned threads = 0);

/// Fraction of results whose worst-pair error is below epsilon.
double faithfulness_score(std::span<const SweepResult> results, double epsilon);

struct ModelSwapRow {
    double epoch = 0.0;
    double label_offset_a = 0.0;
    double label_offset_b = 0.0;
    double pairwise_delta = 0.0;  // largest |observable_a - observable_b| over clock pairs at this epoch
};

struct ModelSwapResult {
    double max_pairwise_delta = 0.0;
    double max_label_delta = 0.0;
    std::vector<ModelSwapRow> rows;
};

/// Evaluates every pairwise displayed-time difference with each convention in
/// force and compares them, alongside the label disagreement over the run.
ModelSwapResult model_swap(const Scenario& scenario, const Truth& truth, const CoordinateConvention& conv_a,
                           const CoordinateConvention& conv_b);

/// offset(t) = c0 + c1 t + sum_k (a_k sin w_k t + b_k cos w_k t).
struct HarmonicModel {
    std::vector<double> frequencies;  // rad/s
    Eigen::VectorXd coefficients;     // [c0, c1, a_1, b_1, a_2, b_2, ...]

    double operator()(double t) const;
};

/// Least-squares fit over the samples. Throws FitFailure when the design
/// matrix is rank deficient.
HarmonicModel fit_harmonic_model(std::span<const double> t, std::span<const double> value,
                                 std::span<const double> frequencies);

struct OffsetSeries {
    std::vector<double> t;
    std::vector<double> value;
};

/// proper offset of `a` minus that of `b` at the given epochs.
OffsetSeries relative_offset_series(const Worldline& a, const Worldline& b, std::span<const double> epochs,
                                    double step, const EphemerisConfig& cfg);

/// Sampling grid: every fit_sample seconds through the fit window, then every
/// predict_sample seconds through the prediction window.
std::vector<double> prediction_epochs(double fit_window_days, double predict_window_days, double fit_sample,
                                      double predict_sample);

/// The lines a lunar-minus-terrestrial offset carries: monthly harmonics, the
/// Earth spin, and its beats with the Moon.
std::vector<double> earth_moon_frequencies(const EphemerisConfig& cfg);

struct PredictionPoint {
    double t = 0.0;
    double error = 0.0;  // |predicted - truth|, s
};

struct PredictionReport {
    HarmonicModel model;
    double fit_residual = 0.0;  // max |model - fit source| inside the fit window
    std::vector<PredictionPoint> errors;

    /// First t with error above threshold, or a negative value if none.
    double first_exceedance(double threshold) const;
    double max_error() const;
};

/// Fits `frequencies` to `fit_source` over [0, fit_window] and reports its
/// error against `truth` at every truth sample in [0, predict_window].
/// Requires fit_window >= 30 days and predict_window >= fit_window.
PredictionReport long_horizon_prediction(double fit_window_days, double predict_window_days, const OffsetSeries& truth,
                                         const OffsetSeries& fit_source, std::span<const double> frequencies);

}  // namespace cislunar
