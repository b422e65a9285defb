#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cislunar/clockmodels.hpp"
#include "cislunar/coordmodels.hpp"
#include "cislunar/corrections.hpp"
#include "cislunar/relkinematics.hpp"
#include "cislunar/topology.hpp"

namespace cislunar {

struct ClockSpec {
    std::string id;
    Worldline worldline;
    ClockModel model;

    friend bool operator==(const ClockSpec&, const ClockSpec&) = default;
};

enum class Architecture { broadcast, transactional, both };
enum class SyncMode { one_way, two_way };

struct NetworkConfig {
    double broadcast_interval = 10.0;
    double resync_interval = 3600.0;  // minimum gap between corrections at a dependent
    SyncMode sync_mode = SyncMode::one_way;
    std::string periodic_model = "truth";  // "truth" or a convention name
    unsigned ack_rounds = 3;

    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

struct TransactConfig {
    double comparison_interval = 3600.0;
    double measurement_noise = 1e-9;
    double staleness_rate = 1e-12;

    friend bool operator==(const TransactConfig&, const TransactConfig&) = default;
};

struct SweepConfig {
    std::size_t samples = 10000;
    double epsilon = 10e-9;
    std::uint64_t seed = 20240402;
    double scale_max = 2.0;

    friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

/// Rate of clock `a` relative to clock `b`, in microseconds per day.
struct RateCheck {
    std::string name;
    std::string a;
    std::string b;
    double expected = 0.0;
    double tolerance = 0.0;

    friend bool operator==(const RateCheck&, const RateCheck&) = default;
};

struct Scenario {
    std::string name = "scenario";
    EphemerisConfig ephemeris;
    std::vector<ClockSpec> clocks;
    std::vector<CoordinateConvention> conventions;
    Topology topology;
    Architecture architecture = Architecture::broadcast;
    double duration = 86400.0;
    double epoch_step = 600.0;
    double integration_step = default_integration_step;
    std::uint64_t seed = 1;
    CorrectionVector corrections;
    NetworkConfig network;
    TransactConfig transact;
    SweepConfig sweep;
    std::vector<RateCheck> checks;

    /// Checks every cross-reference and invariant; throws ConfigError naming
    /// the offending key.
    void validate() const;

    const ClockSpec* find_clock(const std::string& id) const;
    std::size_t clock_index(const std::string& id) const;
    const CoordinateConvention* find_convention(const std::string& name) const;
    /// k * epoch_step for k = 0 .. floor(duration / epoch_step).
    std::vector<double> epoch_grid() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

std::string to_string(Architecture a);
std::string to_string(SyncMode m);

}  // namespace cislunar
