#pragma once

// Physical ground truth for a scenario, evaluated once on the epoch grid and
// shared read-only by every network run and sweep point.

#include <string>
#include <vector>

#include "cislunar/clockmodels.hpp"
#include "cislunar/scenario.hpp"

namespace cislunar {

/// All series are offsets from coordinate time on the scenario epoch grid,
/// zero at the first epoch. They decompose as
///   proper_offset   = secular + periodic + anomaly
///   displayed_offset = proper_offset + hardware + noise.
struct ClockTruth {
    std::string id;
    double secular_rate = 0.0;  // mean relativistic rate deviation, anomaly excluded
    std::vector<double> proper_offset;
    std::vector<double> secular;
    std::vector<double> periodic;
    std::vector<double> anomaly;
    std::vector<double> hardware;  // deterministic frequency offset and drift
    std::vector<double> displayed_offset;

    std::vector<ClockReading> readings(const std::vector<double>& epochs) const;
};

struct Truth {
    std::vector<double> epochs;
    double epoch_step = 0.0;
    std::vector<ClockTruth> clocks;  // scenario clock order
    std::vector<std::size_t> authorities;
    std::vector<double> authority_weights;
    /// The ensemble paper clock over the authorities, with the same
    /// decomposition weighted by `authority_weights`. Empty without authorities.
    ClockTruth reference;

    std::size_t index_of(const std::string& id) const;
    /// Linear interpolation of a grid series at coordinate time t (clamped).
    double at(const std::vector<double>& series, double t) const;
    bool has_reference() const { return !authorities.empty(); }
};

Truth compute_truth(const Scenario& scenario);

/// Mean rate of clock `a` relative to clock `b` over the run, from proper time
/// alone, in seconds per day.
double mean_rate_difference_per_day(const Truth& truth, const std::string& a, const std::string& b);

}  // namespace cislunar
