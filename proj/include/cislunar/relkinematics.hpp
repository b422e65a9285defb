#pragma once

// Earth-Moon geometry and proper time along clock worldlines.
//
// Everything is expressed in a nonrotating frame centered on the Earth-Moon
// barycenter. The Earth and Moon follow a Keplerian two-body ellipse about the
// barycenter (perigee on +x at t = 0, orbit in the xy plane). Proper time uses
// the weak-field rate law
//
//     dtau/dt = 1 + Phi/c^2 - |v|^2 / (2 c^2),   Phi = -sum GM/r.
//
// Rates are carried as deviations (dtau/dt - 1) and elapsed proper time as a
// coordinate span plus a deviation, so sub-nanosecond differences survive over
// multi-day spans in double precision.

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "cislunar/errors.hpp"

namespace cislunar {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

struct EphemerisConfig {
    double earth_gm = 3.986004418e14;
    double moon_gm = 4.9028e12;
    double earth_radius = 6.378137e6;
    double moon_radius = 1.7374e6;
    double earth_moon_distance = 3.84399e8;
    double orbital_eccentricity = 0.0549;
    double orbital_period = 27.321661 * 86400.0;
    double earth_spin_period = 86164.0905;
    double speed_of_light = 299792458.0;

    // Throws ConfigError naming the first violated invariant.
    void validate() const;

    friend bool operator==(const EphemerisConfig&, const EphemerisConfig&) = default;
};

enum class Body { earth, moon };

std::string to_string(Body body);

template <typename Scalar>
struct State {
    Vec3<Scalar> position;
    Vec3<Scalar> velocity;
};

/// Site fixed on the rotating Earth. Degrees.
struct EarthSurface {
    double latitude = 0.0;
    double longitude = 0.0;
    friend bool operator==(const EarthSurface&, const EarthSurface&) = default;
};

/// Site fixed on the synchronously rotating Moon; longitude 0 is the mean
/// sub-Earth point. `mascon_anomaly` is a local potential offset in m^2/s^2.
struct MoonSurface {
    double latitude = 0.0;
    double longitude = 0.0;
    double mascon_anomaly = 0.0;
    friend bool operator==(const MoonSurface&, const MoonSurface&) = default;
};

/// Circular orbit in the Earth's equatorial (= orbital) plane.
struct EarthOrbit {
    double radius = 0.0;
    friend bool operator==(const EarthOrbit&, const EarthOrbit&) = default;
};

struct MoonOrbit {
    double radius = 0.0;
    friend bool operator==(const MoonOrbit&, const MoonOrbit&) = default;
};

/// A point at rest in the barycentric frame. Only useful as a test rig.
struct FixedPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    friend bool operator==(const FixedPoint&, const FixedPoint&) = default;
};

struct Worldline {
    std::variant<EarthSurface, MoonSurface, EarthOrbit, MoonOrbit, FixedPoint> kind;

    /// Local potential offset carried by the site (nonzero only for mascon sites).
    double anomaly() const;
    /// Copy with the site anomaly multiplied by `scale`.
    Worldline with_anomaly_scaled(double scale) const;
    std::string kind_name() const;

    friend bool operator==(const Worldline&, const Worldline&) = default;
};

struct PointMass {
    Body body;
    double gm;
};

/// Sum of point-mass potentials plus a global constant. The constant has no
/// physical effect on rate differences; it exists to check exactly that.
struct PotentialField {
    std::vector<PointMass> masses;
    double constant_offset = 0.0;

    static PotentialField earth_moon(const EphemerisConfig& cfg);
    static PotentialField empty() { return {}; }
};

namespace detail {

template <typename Scalar>
Scalar solve_kepler(Scalar mean_anomaly, Scalar eccentricity) {
    using std::abs;
    using std::cos;
    using std::sin;
    Scalar ecc_anomaly = eccentricity < Scalar(0.8) ? mean_anomaly : Scalar(std::numbers::pi);
    for (int i = 0; i < 50; ++i) {
        const Scalar delta = (ecc_anomaly - eccentricity * sin(ecc_anomaly) - mean_anomaly) /
                             (Scalar(1) - eccentricity * cos(ecc_anomaly));
        ecc_anomaly -= delta;
        if (abs(delta) < Scalar(1e-15)) break;
    }
    return ecc_anomaly;
}

// Moon relative to Earth.
template <typename Scalar>
State<Scalar> relative_orbit(Scalar t, const EphemerisConfig& cfg) {
    using std::cos;
    using std::fmod;
    using std::sin;
    using std::sqrt;
    const Scalar two_pi = Scalar(2) * Scalar(std::numbers::pi);
    const Scalar a = cfg.earth_moon_distance;
    const Scalar e = cfg.orbital_eccentricity;
    const Scalar mean_motion = two_pi / Scalar(cfg.orbital_period);
    const Scalar mean_anomaly = fmod(mean_motion * t, two_pi);
    const Scalar ecc_anomaly = solve_kepler(mean_anomaly, e);
    const Scalar cos_e = cos(ecc_anomaly);
    const Scalar sin_e = sin(ecc_anomaly);
    const Scalar root = sqrt(Scalar(1) - e * e);
    const Scalar ecc_rate = mean_motion / (Scalar(1) - e * cos_e);

    State<Scalar> rel;
    rel.position << a * (cos_e - e), a * root * sin_e, Scalar(0);
    rel.velocity << -a * sin_e * ecc_rate, a * root * cos_e * ecc_rate, Scalar(0);
    return rel;
}

template <typename Scalar>
Vec3<Scalar> site_offset(Scalar radius, Scalar lat_deg, Scalar angle) {
    using std::cos;
    using std::sin;
    const Scalar lat = lat_deg * Scalar(std::numbers::pi) / Scalar(180);
    return Vec3<Scalar>(radius * cos(lat) * cos(angle), radius * cos(lat) * sin(angle),
                        radius * sin(lat));
}

// Velocity of a point at `offset` rotating about +z at `rate` rad/s.
template <typename Scalar>
Vec3<Scalar> spin_velocity(const Vec3<Scalar>& offset, Scalar rate) {
    return Vec3<Scalar>(-rate * offset.y(), rate * offset.x(), Scalar(0));
}

template <typename Scalar>
Scalar deg2rad(Scalar deg) {
    return deg * Scalar(std::numbers::pi) / Scalar(180);
}

}  // namespace detail

template <typename Scalar>
State<Scalar> body_state(Body body, Scalar t, const EphemerisConfig& cfg) {
    const State<Scalar> rel = detail::relative_orbit(t, cfg);
    const Scalar total = Scalar(cfg.earth_gm) + Scalar(cfg.moon_gm);
    const Scalar factor = body == Body::earth ? -Scalar(cfg.moon_gm) / total
                                              : Scalar(cfg.earth_gm) / total;
    return {factor * rel.position, factor * rel.velocity};
}

/// Barycentric position of a body at coordinate time t.
template <typename Scalar>
Vec3<Scalar> body_position(Body body, Scalar t, const EphemerisConfig& cfg) {
    return body_state(body, t, cfg).position;
}

template <typename Scalar>
State<Scalar> worldline_state(const Worldline& w, Scalar t, const EphemerisConfig& cfg) {
    using std::sqrt;
    const Scalar two_pi = Scalar(2) * Scalar(std::numbers::pi);
    return std::visit(
        [&](const auto& k) -> State<Scalar> {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, FixedPoint>) {
                return {Vec3<Scalar>(k.x, k.y, k.z), Vec3<Scalar>::Zero()};
            } else if constexpr (std::is_same_v<K, EarthSurface>) {
                const auto earth = body_state(Body::earth, t, cfg);
                const Scalar spin = two_pi / Scalar(cfg.earth_spin_period);
                const Scalar angle = detail::deg2rad(Scalar(k.longitude)) + spin * t;
                const auto offset = detail::site_offset(Scalar(cfg.earth_radius), Scalar(k.latitude), angle);
                return {earth.position + offset, earth.velocity + detail::spin_velocity(offset, spin)};
            } else if constexpr (std::is_same_v<K, MoonSurface>) {
                // Synchronous rotation: the body-fixed frame turns at the mean
                // motion, longitude 0 pointing at the Earth on average.
                const auto moon = body_state(Body::moon, t, cfg);
                const Scalar spin = two_pi / Scalar(cfg.orbital_period);
                const Scalar angle = detail::deg2rad(Scalar(k.longitude)) + Scalar(std::numbers::pi) + spin * t;
                const auto offset = detail::site_offset(Scalar(cfg.moon_radius), Scalar(k.latitude), angle);
                return {moon.position + offset, moon.velocity + detail::spin_velocity(offset, spin)};
            } else {
                constexpr bool around_earth = std::is_same_v<K, EarthOrbit>;
                const auto center = body_state(around_earth ? Body::earth : Body::moon, t, cfg);
                const Scalar gm = around_earth ? Scalar(cfg.earth_gm) : Scalar(cfg.moon_gm);
                const Scalar r = k.radius;
                const Scalar rate = sqrt(gm / (r * r * r));
                const auto offset = detail::site_offset(r, Scalar(0), rate * t);
                return {center.position + offset, center.velocity + detail::spin_velocity(offset, rate)};
            }
        },
        w.kind);
}

double body_radius(Body body, const EphemerisConfig& cfg);

/// Gravitational potential (m^2/s^2) at `position`, without site anomalies.
/// Throws DomainError when the position lies inside a modeled body.
template <typename Scalar>
Scalar potential(const PotentialField& field, const Vec3<Scalar>& position, Scalar t,
                 const EphemerisConfig& cfg) {
    Scalar phi = Scalar(field.constant_offset);
    for (const auto& mass : field.masses) {
        const Vec3<Scalar> centre = body_position(mass.body, t, cfg);
        const Scalar r = (position - centre).norm();
        // Surface sites sit exactly on the radius; allow for the rounding of
        // the scalar type at barycentric distances.
        using std::max;
        const Scalar slack = Scalar(body_radius(mass.body, cfg) * 1e-9) +
                             Scalar(16) * std::numeric_limits<Scalar>::epsilon() * max(position.norm(), centre.norm());
        if (r < Scalar(body_radius(mass.body, cfg)) - slack) {
            throw DomainError("worldline passes inside the " + to_string(mass.body));
        }
        phi -= Scalar(mass.gm) / r;
    }
    return phi;
}

/// dtau/dt - 1 for a given potential and squared speed.
template <typename Scalar>
Scalar rate_deviation(Scalar phi, Scalar speed_squared, Scalar c) {
    const Scalar c2 = c * c;
    return phi / c2 - speed_squared / (Scalar(2) * c2);
}

/// dtau/dt - 1 along a worldline, including its site anomaly.
template <typename Scalar>
Scalar proper_rate_deviation(const Worldline& w, Scalar t, const PotentialField& field,
                             const EphemerisConfig& cfg) {
    const State<Scalar> s = worldline_state(w, t, cfg);
    const Scalar phi = potential(field, s.position, t, cfg) + Scalar(w.anomaly());
    return rate_deviation(phi, s.velocity.squaredNorm(), Scalar(cfg.speed_of_light));
}

template <typename Scalar>
Scalar proper_rate(const Worldline& w, Scalar t, const PotentialField& field, const EphemerisConfig& cfg) {
    return Scalar(1) + proper_rate_deviation(w, t, field, cfg);
}

/// Elapsed proper time split as coordinate span + (tau - t) accumulated over it.
struct ProperTimeInterval {
    double coordinate_span = 0.0;
    double deviation = 0.0;

    double elapsed() const { return coordinate_span + deviation; }
};

inline constexpr double default_integration_step = 60.0;

/// Integrates the proper rate over [t0, t1] with fixed RK4 steps no longer than
/// `step`.
ProperTimeInterval accumulate_proper_time(const Worldline& w, double t0, double t1, double step,
                                          const PotentialField& field, const EphemerisConfig& cfg);

/// tau(t_k) - t_k relative to epochs.front(), for every epoch in a strictly
/// increasing grid. Integration substeps never exceed `step`.
std::vector<double> proper_offset_series(const Worldline& w, std::span<const double> epochs,
                                         double step, const PotentialField& field,
                                         const EphemerisConfig& cfg);

/// Mean rate deviation over one orbital period starting at t = 0.
double secular_rate_deviation(const Worldline& w, double step, const PotentialField& field,
                              const EphemerisConfig& cfg);

}  // namespace cislunar
