#pragma once

// Weighted "paper clock" built from surface clock readings.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cislunar/clockmodels.hpp"

namespace cislunar {

inline constexpr double default_weight_cap = 0.4;

/// Inverse-variance weights with a per-clock cap. Clocks whose raw share
/// exceeds the cap are pinned at the cap and the remainder is redistributed
/// among the others, repeatedly, until no clock exceeds it. A zero sigma is
/// pinned at the cap directly. When n * cap < 1 the cap is infeasible and is
/// raised to 1/n. A single member always gets weight 1.
std::vector<double> compute_weights(std::span<const double> sigmas, double cap = default_weight_cap);

struct EnsembleEpoch {
    double coordinate_epoch = 0.0;
    double paper_offset = 0.0;  // paper time - epoch
    std::vector<double> weights_used;
    std::vector<bool> excluded;  // member had no reading at this epoch

    double paper_time() const { return coordinate_epoch + paper_offset; }
    bool degraded() const;
};

/// Weighted mean of member displayed times. Missing members are excluded and
/// the remaining weights renormalized. Throws InputError when readings disagree
/// on the epoch, sizes mismatch, or no member reported.
EnsembleEpoch ensemble_time(std::span<const std::optional<ClockReading>> readings, std::span<const double> weights);

class Ensemble {
public:
    Ensemble(std::vector<std::string> member_ids, std::vector<double> weights);

    const std::vector<std::string>& member_ids() const { return member_ids_; }
    const std::vector<double>& weights() const { return weights_; }
    double paper_offset() const { return paper_offset_; }
    double last_update_epoch() const { return last_update_epoch_; }

    void set_weights(std::vector<double> weights);
    const EnsembleEpoch& update(std::span<const std::optional<ClockReading>> readings);
    const EnsembleEpoch& last() const { return last_; }

private:
    std::vector<std::string> member_ids_;
    std::vector<double> weights_;
    double paper_offset_ = 0.0;
    double last_update_epoch_ = 0.0;
    EnsembleEpoch last_;
};

}  // namespace cislunar
