#pragma once

// Coordinate-time conventions: relabelings of the reference coordinate time by
// a secular rate plus a stack of sinusoids. A convention owns no physical state
// and never enters a proper-time computation.

#include <string>
#include <vector>

namespace cislunar {

struct PeriodicTerm {
    double amplitude = 0.0;          // s
    double angular_frequency = 0.0;  // rad/s
    double phase = 0.0;              // rad

    friend bool operator==(const PeriodicTerm&, const PeriodicTerm&) = default;
};

/// Synodic month angular frequency.
inline constexpr double synodic_angular_frequency = 2.0 * 3.14159265358979323846 / (29.530589 * 86400.0);

class CoordinateConvention {
public:
    /// Throws ConfigError for negative amplitudes or a non-monotone labeling
    /// (sum |A w| >= 1 + secular_rate_offset).
    CoordinateConvention(std::string name, double secular_rate_offset, std::vector<PeriodicTerm> periodic_terms);

    const std::string& name() const { return name_; }
    double secular_rate_offset() const { return secular_rate_offset_; }
    const std::vector<PeriodicTerm>& periodic_terms() const { return periodic_terms_; }

    /// Sum of the sinusoids at reference time t.
    double periodic_part(double reference_t) const;
    /// label - reference_t; kept separate from the label itself for precision.
    double label_offset(double reference_t) const;

    friend bool operator==(const CoordinateConvention&, const CoordinateConvention&) = default;

private:
    std::string name_;
    double secular_rate_offset_;
    std::vector<PeriodicTerm> periodic_terms_;
};

double coordinate_label(const CoordinateConvention& conv, double reference_t);

struct Discrepancy {
    double max_abs = 0.0;
    double mean = 0.0;  // mean signed label_a - label_b over the window
};

/// Pure-relabeling disagreement between two conventions over [t0, t1].
/// The maximum is located by dense sampling and golden-section refinement.
Discrepancy convention_discrepancy(const CoordinateConvention& a, const CoordinateConvention& b, double t0, double t1);

/// The two default illustrative conventions: 0.4 us and 0.3 us at the synodic
/// frequency, zero phase and zero secular offset.
CoordinateConvention default_model_a();
CoordinateConvention default_model_b();

}  // namespace cislunar
