#include "cislunar/truth.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cislunar/ensemble.hpp"
#include "cislunar/errors.hpp"

namespace cislunar {

std::vector<ClockReading> ClockTruth::readings(const std::vector<double>& epochs) const {
    std::vector<ClockReading> out(epochs.size());
    for (std::size_t k = 0; k < epochs.size(); ++k) out[k] = {epochs[k], proper_offset[k], displayed_offset[k]};
    return out;
}

std::size_t Truth::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < clocks.size(); ++i) {
        if (clocks[i].id == id) return i;
    }
    throw InputError("truth has no clock '" + id + "'");
}

double Truth::at(const std::vector<double>& series, double t) const {
    if (series.empty()) throw InputError("interpolating an empty series");
    if (t <= epochs.front()) return series.front();
    if (t >= epochs.back()) return series.back();
    const double x = (t - epochs.front()) / epoch_step;
    const auto k = std::min(static_cast<std::size_t>(x), series.size() - 2);
    const double frac = (t - epochs[k]) / epoch_step;
    return series[k] + (series[k + 1] - series[k]) * frac;
}

namespace {

ClockTruth evaluate_clock(const ClockSpec& spec, const std::vector<double>& epochs, const Scenario& scenario) {
    const auto field = PotentialField::earth_moon(scenario.ephemeris);
    const double step = scenario.integration_step;
    const Worldline bare = spec.worldline.with_anomaly_scaled(0.0);

    ClockTruth truth;
    truth.id = spec.id;
    truth.proper_offset = proper_offset_series(spec.worldline, epochs, step, field, scenario.ephemeris);
    const auto relativistic = spec.worldline.anomaly() == 0.0
                                  ? truth.proper_offset
                                  : proper_offset_series(bare, epochs, step, field, scenario.ephemeris);
    truth.secular_rate = secular_rate_deviation(bare, step, field, scenario.ephemeris);

    const std::size_t n = epochs.size();
    truth.secular.resize(n);
    truth.periodic.resize(n);
    truth.anomaly.resize(n);
    truth.hardware.resize(n);
    std::vector<ProperTimeSample> proper(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double elapsed = epochs[k] - epochs.front();
        truth.secular[k] = truth.secular_rate * elapsed;
        truth.periodic[k] = relativistic[k] - truth.secular[k];
        truth.anomaly[k] = truth.proper_offset[k] - relativistic[k];
        proper[k] = {epochs[k], truth.proper_offset[k]};
        truth.hardware[k] = spec.model.deterministic_error(proper[k].proper_time());
    }
    const auto readings = sample_clock(spec.model, proper);
    truth.displayed_offset.resize(n);
    for (std::size_t k = 0; k < n; ++k) truth.displayed_offset[k] = readings[k].displayed_offset;
    return truth;
}

}  // namespace

Truth compute_truth(const Scenario& scenario) {
    Truth truth;
    truth.epochs = scenario.epoch_grid();
    truth.epoch_step = scenario.epoch_step;
    truth.clocks.reserve(scenario.clocks.size());
    for (const auto& spec : scenario.clocks) truth.clocks.push_back(evaluate_clock(spec, truth.epochs, scenario));

    for (const auto& id : scenario.topology.ids_with_role(Role::authority)) {
        truth.authorities.push_back(truth.index_of(id));
    }
    if (truth.authorities.empty()) return truth;

    std::vector<double> sigmas;
    const std::array<double, 1> tau{scenario.epoch_step};
    for (const auto i : truth.authorities) {
        const auto readings = truth.clocks[i].readings(truth.epochs);
        const auto adev = allan_deviation(readings, tau);
        sigmas.push_back(adev.points.empty() ? scenario.clocks[i].model.white_fm_sigma : adev.points.front().sigma_y);
    }
    truth.authority_weights = compute_weights(sigmas);

    ClockTruth& ref = truth.reference;
    ref.id = "ensemble";
    const std::size_t n = truth.epochs.size();
    for (auto* series : {&ref.proper_offset, &ref.secular, &ref.periodic, &ref.anomaly, &ref.hardware,
                         &ref.displayed_offset}) {
        series->assign(n, 0.0);
    }
    for (std::size_t j = 0; j < truth.authorities.size(); ++j) {
        const ClockTruth& member = truth.clocks[truth.authorities[j]];
        const double w = truth.authority_weights[j];
        ref.secular_rate += w * member.secular_rate;
        for (std::size_t k = 0; k < n; ++k) {
            ref.proper_offset[k] += w * member.proper_offset[k];
            ref.secular[k] += w * member.secular[k];
            ref.periodic[k] += w * member.periodic[k];
            ref.anomaly[k] += w * member.anomaly[k];
            ref.hardware[k] += w * member.hardware[k];
            ref.displayed_offset[k] += w * member.displayed_offset[k];
        }
    }
    return truth;
}

double mean_rate_difference_per_day(const Truth& truth, const std::string& a, const std::string& b) {
    const auto& ca = truth.clocks[truth.index_of(a)];
    const auto& cb = truth.clocks[truth.index_of(b)];
    const double span = truth.epochs.back() - truth.epochs.front();
    if (!(span > 0.0)) throw InputError("rate difference needs a run longer than one epoch");
    return (ca.proper_offset.back() - cb.proper_offset.back()) / span * 86400.0;
}

}  // namespace cislunar
