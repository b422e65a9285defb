#pragma once

#include <array>
#include <string_view>

namespace cislunar {

/// Scale applied to each correction family a dependent node uses. 1 is the
/// fully tuned value, 0 disables the family.
struct CorrectionVector {
    double secular_scale = 1.0;
    double periodic_scale = 1.0;
    double anomaly_scale = 1.0;
    double drift_scale = 1.0;
    double delay_scale = 1.0;

    static constexpr std::size_t families = 5;
    static constexpr std::array<std::string_view, families> names{"secular", "periodic", "anomaly", "drift", "delay"};

    std::array<double, families> as_array() const {
        return {secular_scale, periodic_scale, anomaly_scale, drift_scale, delay_scale};
    }
    static CorrectionVector from_array(const std::array<double, families>& v) {
        return {v[0], v[1], v[2], v[3], v[4]};
    }
    /// Throws ConfigError unless every scale is finite and >= 0.
    void validate() const;

    friend bool operator==(const CorrectionVector&, const CorrectionVector&) = default;
};

}  // namespace cislunar
