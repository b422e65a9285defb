#include "cislunar/clockmodels.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cislunar/errors.hpp"

namespace cislunar {

void ClockModel::validate() const {
    if (!std::isfinite(frequency_offset) || !std::isfinite(linear_drift)) {
        throw ConfigError("clock frequency_offset and linear_drift must be finite", "model");
    }
    if (!(white_fm_sigma >= 0.0) || !std::isfinite(white_fm_sigma)) {
        throw ConfigError("clock white_fm_sigma must be >= 0", "model.white_fm_sigma");
    }
    if (!(rw_fm_sigma >= 0.0) || !std::isfinite(rw_fm_sigma)) {
        throw ConfigError("clock rw_fm_sigma must be >= 0", "model.rw_fm_sigma");
    }
}

std::vector<ClockReading> sample_clock(const ClockModel& model, std::span<const ProperTimeSample> proper_times) {
    for (std::size_t k = 1; k < proper_times.size(); ++k) {
        if (!(proper_times[k].coordinate_epoch > proper_times[k - 1].coordinate_epoch)) {
            throw InputError("sample_clock requires strictly increasing epochs");
        }
    }

    std::mt19937_64 rng(model.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<ClockReading> out;
    out.reserve(proper_times.size());
    // Phase (time error) from noise, and the random-walk frequency state.
    double phase = 0.0;
    double rw_frequency = 0.0;
    // A random walk in frequency with diffusion D has AVAR(tau) = D tau / 3.
    const double rw_diffusion = 3.0 * model.rw_fm_sigma * model.rw_fm_sigma;

    for (std::size_t k = 0; k < proper_times.size(); ++k) {
        const auto& sample = proper_times[k];
        if (k > 0) {
            const auto& prev = proper_times[k - 1];
            const double dtau = (sample.coordinate_epoch - prev.coordinate_epoch) +
                                (sample.proper_offset - prev.proper_offset);
            const double white = normal(rng) * model.white_fm_sigma / std::sqrt(dtau);
            rw_frequency += normal(rng) * std::sqrt(rw_diffusion * dtau);
            phase += (white + rw_frequency) * dtau;
        }
        const double tau = sample.proper_time();
        out.push_back({sample.coordinate_epoch, sample.proper_offset,
                       sample.proper_offset + model.deterministic_error(tau) + phase});
    }
    return out;
}

AllanResult allan_deviation(std::span<const ClockReading> readings, std::span<const double> taus) {
    AllanResult result;
    std::vector<double> sorted(taus.begin(), taus.end());
    std::sort(sorted.begin(), sorted.end());

    if (readings.size() < 3) {
        result.omitted = sorted;
        return result;
    }
    auto interval = [&](std::size_t k) {
        return (readings[k + 1].coordinate_epoch - readings[k].coordinate_epoch) +
               (readings[k + 1].proper_offset - readings[k].proper_offset);
    };
    const double tau0 = interval(0);
    for (std::size_t k = 1; k + 1 < readings.size(); ++k) {
        if (std::abs(interval(k) - tau0) > 1e-6 * tau0) {
            throw InputError("allan_deviation requires a uniform sampling interval");
        }
    }

    const std::size_t n = readings.size();
    for (const double tau : sorted) {
        const double ratio = tau / tau0;
        const long m = std::lround(ratio);
        if (!(tau > 0.0) || m < 1 || std::abs(static_cast<double>(m) - ratio) > 1e-6 * ratio ||
            n < static_cast<std::size_t>(2 * m + 1)) {
            result.omitted.push_back(tau);
            continue;
        }
        const auto step = static_cast<std::size_t>(m);
        double sum = 0.0;
        const std::size_t terms = n - 2 * step;
        for (std::size_t i = 0; i < terms; ++i) {
            const double d = readings[i + 2 * step].clock_error() - 2.0 * readings[i + step].clock_error() +
                             readings[i].clock_error();
            sum += d * d;
        }
        const double m_tau = static_cast<double>(m) * tau0;
        result.points.push_back({tau, std::sqrt(sum / (2.0 * m_tau * m_tau * static_cast<double>(terms)))});
    }
    return result;
}

}  // namespace cislunar
