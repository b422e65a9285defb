#pragma once

#include <string>

#include "cislunar/scenario.hpp"
#include "cislunar/scenario_io.hpp"

namespace fixtures {

inline cislunar::Scenario bundled(const std::string& name) {
    return cislunar::load_scenario(std::string(CISLUNAR_SCENARIO_DIR) + "/" + name + ".yaml");
}

/// One lunar authority, one Earth dependent, one 1.3 s link.
inline cislunar::Scenario lunar_earth_pair(double days = 2.0) {
    using namespace cislunar;
    Scenario s;
    s.name = "pair";
    s.duration = days * 86400.0;
    s.epoch_step = 600.0;
    s.seed = 17;
    ClockModel quiet;
    quiet.white_fm_sigma = 1e-13;
    quiet.seed = 1;
    ClockModel dep = quiet;
    dep.seed = 2;
    dep.frequency_offset = 1e-11;
    s.clocks = {{"moon", Worldline{MoonSurface{}}, quiet}, {"earth", Worldline{EarthSurface{}}, dep}};
    s.topology.nodes = {{"moon", Role::authority}, {"earth", Role::dependent}};
    Link link;
    link.a = "moon";
    link.b = "earth";
    link.base_delay = 1.3;
    s.topology.links = {link};
    s.network.broadcast_interval = 600.0;
    s.network.resync_interval = 3600.0;
    return s;
}

}  // namespace fixtures
