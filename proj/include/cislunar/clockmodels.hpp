#pragma once

// Hardware clock model: maps proper time onto what an imperfect oscillator
// displays, plus the overlapping Allan deviation used to validate it.

#include <cstdint>
#include <span>
#include <vector>

namespace cislunar {

struct ClockModel {
    double frequency_offset = 0.0;  // y0
    double linear_drift = 0.0;      // dy/dtau, 1/s
    double white_fm_sigma = 0.0;    // sigma_y(1 s) of the white-FM component
    double rw_fm_sigma = 0.0;       // sigma_y(1 s) of the random-walk-FM component
    std::uint64_t seed = 0;

    void validate() const;
    bool noiseless() const { return white_fm_sigma == 0.0 && rw_fm_sigma == 0.0; }
    /// Deterministic part of displayed - proper after `tau` proper seconds.
    double deterministic_error(double tau) const {
        return frequency_offset * tau + 0.5 * linear_drift * tau * tau;
    }

    friend bool operator==(const ClockModel&, const ClockModel&) = default;
};

/// Proper time at a coordinate epoch, as the offset tau - t.
struct ProperTimeSample {
    double coordinate_epoch = 0.0;
    double proper_offset = 0.0;

    double proper_time() const { return coordinate_epoch + proper_offset; }
};

/// Offsets are relative to the coordinate epoch so that nanosecond-scale
/// structure survives at large epochs.
struct ClockReading {
    double coordinate_epoch = 0.0;
    double proper_offset = 0.0;     // true proper time - epoch
    double displayed_offset = 0.0;  // displayed time - epoch

    double true_proper_time() const { return coordinate_epoch + proper_offset; }
    double displayed_time() const { return coordinate_epoch + displayed_offset; }
    /// displayed - true proper, at full precision.
    double clock_error() const { return displayed_offset - proper_offset; }

    friend bool operator==(const ClockReading&, const ClockReading&) = default;
};

/// displayed = tau + y0 tau + drift tau^2 / 2 + integrated noise. The noise is
/// synthesized in the clock's own proper time. Throws InputError when epochs are
/// not strictly increasing.
std::vector<ClockReading> sample_clock(const ClockModel& model, std::span<const ProperTimeSample> proper_times);

struct AllanPoint {
    double tau = 0.0;
    double sigma_y = 0.0;
};

struct AllanResult {
    std::vector<AllanPoint> points;  // sorted by tau
    std::vector<double> omitted;     // requested taus that could not be evaluated
    bool warning() const { return !omitted.empty(); }
};

/// Overlapping Allan deviation of displayed vs proper time. Requires a uniform
/// proper-time sampling interval; each tau must be a multiple of it with at
/// least 2m + 1 samples available.
AllanResult allan_deviation(std::span<const ClockReading> readings, std::span<const double> taus);

}  // namespace cislunar
