#include "cislunar/relkinematics.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace cislunar {

void EphemerisConfig::validate() const {
    const std::pair<const char*, double> positive[] = {
        {"earth_gm", earth_gm},
        {"moon_gm", moon_gm},
        {"earth_radius", earth_radius},
        {"moon_radius", moon_radius},
        {"earth_moon_distance", earth_moon_distance},
        {"orbital_period", orbital_period},
        {"earth_spin_period", earth_spin_period},
        {"speed_of_light", speed_of_light},
    };
    for (const auto& [key, value] : positive) {
        if (!std::isfinite(value) || value <= 0.0) {
            throw ConfigError(std::string("ephemeris.") + key + " must be finite and > 0",
                              std::string("ephemeris.") + key);
        }
    }
    if (!std::isfinite(orbital_eccentricity) || orbital_eccentricity < 0.0 || orbital_eccentricity >= 1.0) {
        throw ConfigError("ephemeris.orbital_eccentricity violates 0 ≤ e < 1",
                          "ephemeris.orbital_eccentricity");
    }
}

std::string to_string(Body body) {
    return body == Body::earth ? "earth" : "moon";
}

double Worldline::anomaly() const {
    if (const auto* site = std::get_if<MoonSurface>(&kind)) return site->mascon_anomaly;
    return 0.0;
}

Worldline Worldline::with_anomaly_scaled(double scale) const {
    Worldline copy = *this;
    if (auto* site = std::get_if<MoonSurface>(&copy.kind)) site->mascon_anomaly *= scale;
    return copy;
}

std::string Worldline::kind_name() const {
    return std::visit(
        [](const auto& k) -> std::string {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, EarthSurface>) return "earth_surface";
            else if constexpr (std::is_same_v<K, MoonSurface>) return "moon_surface";
            else if constexpr (std::is_same_v<K, EarthOrbit>) return "earth_orbit";
            else if constexpr (std::is_same_v<K, MoonOrbit>) return "moon_orbit";
            else return "fixed_point";
        },
        kind);
}

PotentialField PotentialField::earth_moon(const EphemerisConfig& cfg) {
    return {{{Body::earth, cfg.earth_gm}, {Body::moon, cfg.moon_gm}}, 0.0};
}

double body_radius(Body body, const EphemerisConfig& cfg) {
    return body == Body::earth ? cfg.earth_radius : cfg.moon_radius;
}

namespace {

// One RK4 step of d(dev)/dt = f(t); the rate has no state dependence, so the
// stages collapse to f(t), f(t + h/2) (twice) and f(t + h).
class RateIntegrator {
public:
    RateIntegrator(const Worldline& w, const PotentialField& field, const EphemerisConfig& cfg)
        : w_(w), field_(field), cfg_(cfg) {}

    double rate(double t) const {
        const double r = proper_rate_deviation<double>(w_, t, field_, cfg_);
        if (!std::isfinite(r)) throw IntegrationError("non-finite proper rate at t = " + std::to_string(t));
        return r;
    }

    // Integrates over [t0, t1] in n equal steps. `f0` is rate(t0) and is
    // replaced by rate(t1) on return.
    double integrate(double t0, double t1, long n, double& f0) const {
        const double h = (t1 - t0) / static_cast<double>(n);
        double sum = 0.0;
        for (long i = 0; i < n; ++i) {
            const double a = t0 + h * static_cast<double>(i);
            const double b = i + 1 == n ? t1 : t0 + h * static_cast<double>(i + 1);
            const double mid = rate(0.5 * (a + b));
            const double f1 = rate(b);
            sum += (b - a) / 6.0 * (f0 + 4.0 * mid + f1);
            f0 = f1;
        }
        if (!std::isfinite(sum)) throw IntegrationError("non-finite proper-time integral");
        return sum;
    }

private:
    const Worldline& w_;
    const PotentialField& field_;
    const EphemerisConfig& cfg_;
};

long step_count(double span, double step) {
    return std::max(1L, static_cast<long>(std::ceil(span / step - 1e-9)));
}

}  // namespace

ProperTimeInterval accumulate_proper_time(const Worldline& w, double t0, double t1, double step,
                                          const PotentialField& field, const EphemerisConfig& cfg) {
    if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 > t0)) {
        throw InputError("accumulate_proper_time requires t1 > t0");
    }
    if (!(step > 0.0) || step > (t1 - t0)) {
        throw InputError("accumulate_proper_time requires 0 < step <= t1 - t0");
    }
    RateIntegrator integrator(w, field, cfg);
    double f0 = integrator.rate(t0);
    return {t1 - t0, integrator.integrate(t0, t1, step_count(t1 - t0, step), f0)};
}

std::vector<double> proper_offset_series(const Worldline& w, std::span<const double> epochs,
                                         double step, const PotentialField& field,
                                         const EphemerisConfig& cfg) {
    if (!(step > 0.0)) throw InputError("proper_offset_series requires step > 0");
    std::vector<double> out;
    if (epochs.empty()) return out;
    out.reserve(epochs.size());
    out.push_back(0.0);
    RateIntegrator integrator(w, field, cfg);
    double f0 = integrator.rate(epochs[0]);
    double acc = 0.0;
    for (std::size_t k = 1; k < epochs.size(); ++k) {
        const double span = epochs[k] - epochs[k - 1];
        if (!(span > 0.0)) throw InputError("proper_offset_series requires strictly increasing epochs");
        acc += integrator.integrate(epochs[k - 1], epochs[k], step_count(span, step), f0);
        out.push_back(acc);
    }
    return out;
}

double secular_rate_deviation(const Worldline& w, double step, const PotentialField& field,
                              const EphemerisConfig& cfg) {
    const auto interval = accumulate_proper_time(w, 0.0, cfg.orbital_period, step, field, cfg);
    return interval.deviation / interval.coordinate_span;
}

}  // namespace cislunar
