#include "cislunar/coordmodels.hpp"

#include <cmath>

#include "cislunar/errors.hpp"

namespace cislunar {

CoordinateConvention::CoordinateConvention(std::string name, double secular_rate_offset,
                                           std::vector<PeriodicTerm> periodic_terms)
    : name_(std::move(name)), secular_rate_offset_(secular_rate_offset), periodic_terms_(std::move(periodic_terms)) {
    if (!std::isfinite(secular_rate_offset_)) {
        throw ConfigError("convention '" + name_ + "': secular_rate_offset must be finite", "secular_rate_offset");
    }
    double slope_bound = 0.0;
    for (const auto& term : periodic_terms_) {
        if (!(term.amplitude >= 0.0) || !std::isfinite(term.amplitude) || !std::isfinite(term.angular_frequency) ||
            !std::isfinite(term.phase)) {
            throw ConfigError("convention '" + name_ + "': periodic amplitudes must be finite and >= 0",
                              "periodic_terms");
        }
        slope_bound += term.amplitude * std::abs(term.angular_frequency);
    }
    if (!(slope_bound < 1.0 + secular_rate_offset_)) {
        throw ConfigError("convention '" + name_ + "': labeling is not monotone (sum A*w >= 1 + secular)",
                          "periodic_terms");
    }
}

double CoordinateConvention::periodic_part(double reference_t) const {
    double sum = 0.0;
    for (const auto& term : periodic_terms_) {
        sum += term.amplitude * std::sin(term.angular_frequency * reference_t + term.phase);
    }
    return sum;
}

double CoordinateConvention::label_offset(double reference_t) const {
    return reference_t * secular_rate_offset_ + periodic_part(reference_t);
}

double coordinate_label(const CoordinateConvention& conv, double reference_t) {
    return reference_t + conv.label_offset(reference_t);
}

namespace {

double golden_max(auto&& f, double lo, double hi) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < 200 && (hi - lo) > 1e-9 * (1.0 + std::abs(lo)); ++i) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    return std::max(fc, fd);
}

}  // namespace

Discrepancy convention_discrepancy(const CoordinateConvention& a, const CoordinateConvention& b, double t0, double t1) {
    if (!(t1 > t0)) throw InputError("convention_discrepancy requires t1 > t0");
    auto delta = [&](double t) { return a.label_offset(t) - b.label_offset(t); };
    auto magnitude = [&](double t) { return std::abs(delta(t)); };

    constexpr int samples = 20000;
    const double h = (t1 - t0) / samples;
    double best = -1.0;
    int best_index = 0;
    double integral = 0.0;
    double prev = delta(t0);
    for (int i = 0; i <= samples; ++i) {
        const double t = i == samples ? t1 : t0 + h * i;
        const double d = delta(t);
        if (i > 0) integral += 0.5 * (prev + d) * h;
        prev = d;
        if (std::abs(d) > best) {
            best = std::abs(d);
            best_index = i;
        }
    }
    const double lo = t0 + h * std::max(0, best_index - 1);
    const double hi = std::min(t1, t0 + h * std::min(samples, best_index + 1));
    if (hi > lo) best = std::max(best, golden_max(magnitude, lo, hi));
    return {best, integral / (t1 - t0)};
}

CoordinateConvention default_model_a() {
    return {"ModelA", 0.0, {{0.4e-6, synodic_angular_frequency, 0.0}}};
}

CoordinateConvention default_model_b() {
    return {"ModelB", 0.0, {{0.3e-6, synodic_angular_frequency, 0.0}}};
}

}  // namespace cislunar
