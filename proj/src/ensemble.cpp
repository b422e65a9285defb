#include "cislunar/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cislunar/errors.hpp"

namespace cislunar {

std::vector<double> compute_weights(std::span<const double> sigmas, double cap) {
    const std::size_t n = sigmas.size();
    if (n == 0) throw InputError("compute_weights requires at least one member");
    for (const double s : sigmas) {
        if (!std::isfinite(s) || s < 0.0) throw InputError("compute_weights requires finite sigma >= 0");
    }
    if (!(cap > 0.0)) throw InputError("compute_weights requires cap > 0");
    if (n == 1) return {1.0};

    const double effective_cap = std::max(cap, 1.0 / static_cast<double>(n));
    std::vector<bool> capped(n, false);
    for (std::size_t i = 0; i < n; ++i) capped[i] = sigmas[i] == 0.0;

    std::vector<double> weights(n, 0.0);
    while (true) {
        const auto n_capped = static_cast<double>(std::count(capped.begin(), capped.end(), true));
        if (n_capped * effective_cap >= 1.0 - 1e-15 || n_capped == static_cast<double>(n)) {
            // Every remaining share belongs to the pinned clocks.
            for (std::size_t i = 0; i < n; ++i) weights[i] = capped[i] ? 1.0 / n_capped : 0.0;
            return weights;
        }
        const double remaining = 1.0 - n_capped * effective_cap;
        double inverse_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!capped[i]) inverse_sum += 1.0 / (sigmas[i] * sigmas[i]);
        }
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (capped[i]) {
                weights[i] = effective_cap;
                continue;
            }
            weights[i] = remaining * (1.0 / (sigmas[i] * sigmas[i])) / inverse_sum;
            if (weights[i] > effective_cap * (1.0 + 1e-12)) {
                capped[i] = true;
                changed = true;
            }
        }
        if (!changed) return weights;
    }
}

bool EnsembleEpoch::degraded() const {
    return std::any_of(excluded.begin(), excluded.end(), [](bool e) { return e; });
}

EnsembleEpoch ensemble_time(std::span<const std::optional<ClockReading>> readings, std::span<const double> weights) {
    if (readings.size() != weights.size()) throw InputError("ensemble_time: readings and weights differ in size");
    EnsembleEpoch out;
    out.weights_used.assign(weights.size(), 0.0);
    out.excluded.assign(weights.size(), false);

    bool have_epoch = false;
    double present_weight = 0.0;
    for (std::size_t i = 0; i < readings.size(); ++i) {
        if (!readings[i]) {
            out.excluded[i] = true;
            continue;
        }
        if (!have_epoch) {
            out.coordinate_epoch = readings[i]->coordinate_epoch;
            have_epoch = true;
        } else if (readings[i]->coordinate_epoch != out.coordinate_epoch) {
            throw InputError("ensemble_time: member readings do not share an epoch");
        }
        present_weight += weights[i];
    }
    if (!have_epoch) throw InputError("ensemble_time: no member reported a reading");
    if (!(present_weight > 0.0)) throw InputError("ensemble_time: reporting members carry zero weight");

    double offset = 0.0;
    for (std::size_t i = 0; i < readings.size(); ++i) {
        if (!readings[i]) continue;
        out.weights_used[i] = weights[i] / present_weight;
        offset += out.weights_used[i] * readings[i]->displayed_offset;
    }
    out.paper_offset = offset;
    return out;
}

Ensemble::Ensemble(std::vector<std::string> member_ids, std::vector<double> weights)
    : member_ids_(std::move(member_ids)) {
    if (member_ids_.empty()) throw InputError("ensemble requires at least one member");
    set_weights(std::move(weights));
}

void Ensemble::set_weights(std::vector<double> weights) {
    if (weights.size() != member_ids_.size()) throw InputError("ensemble weights do not match members");
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::any_of(weights.begin(), weights.end(), [](double w) { return !(w >= 0.0); }) ||
        std::abs(sum - 1.0) > 1e-12) {
        throw InputError("ensemble weights must be >= 0 and sum to 1");
    }
    weights_ = std::move(weights);
}

const EnsembleEpoch& Ensemble::update(std::span<const std::optional<ClockReading>> readings) {
    last_ = ensemble_time(readings, weights_);
    paper_offset_ = last_.paper_offset;
    last_update_epoch_ = last_.coordinate_epoch;
    return last_;
}

}  // namespace cislunar
