#include "cislunar/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "cislunar/errors.hpp"

namespace cislunar {

bool Link::disrupted(double t) const {
    return std::any_of(disruptions.begin(), disruptions.end(), [t](const Window& w) { return w.contains(t); });
}

void Link::validate() const {
    const std::string where = "link " + a + "-" + b;
    if (!(base_delay >= 0.0) || !std::isfinite(base_delay) || !(base_delay + asymmetry >= 0.0) ||
        !std::isfinite(asymmetry)) {
        throw ConfigError(where + ": delays must be >= 0", "topology.links.base_delay");
    }
    if (!(loss_probability >= 0.0 && loss_probability < 1.0)) {
        throw ConfigError(where + ": loss_probability violates 0 <= loss < 1", "topology.links.loss_probability");
    }
    std::vector<Window> sorted = disruptions;
    std::sort(sorted.begin(), sorted.end(), [](const Window& x, const Window& y) { return x.start < y.start; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (!(sorted[i].end > sorted[i].start)) {
            throw ConfigError(where + ": disruption window must have end > start", "topology.links.disruptions");
        }
        if (i > 0 && sorted[i].start < sorted[i - 1].end) {
            throw ConfigError(where + ": disruption windows overlap", "topology.links.disruptions");
        }
    }
}

const Node* Topology::find_node(const std::string& id) const {
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const Node& n) { return n.id == id; });
    return it == nodes.end() ? nullptr : &*it;
}

const Link* Topology::find_link(const std::string& x, const std::string& y) const {
    auto it = std::find_if(links.begin(), links.end(), [&](const Link& l) { return l.connects(x, y); });
    return it == links.end() ? nullptr : &*it;
}

std::vector<std::string> Topology::ids_with_role(Role role) const {
    std::vector<std::string> out;
    for (const auto& n : nodes) {
        if (n.role == role) out.push_back(n.id);
    }
    return out;
}

std::string to_string(Role role) {
    return role == Role::authority ? "authority" : "dependent";
}

void CorrectionVector::validate() const {
    const auto values = as_array();
    for (std::size_t i = 0; i < families; ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0) {
            throw ConfigError("corrections." + std::string(names[i]) + " must be finite and >= 0",
                              "corrections." + std::string(names[i]));
        }
    }
}

std::string to_string(Architecture a) {
    switch (a) {
        case Architecture::broadcast: return "broadcast";
        case Architecture::transactional: return "transactional";
        case Architecture::both: return "both";
    }
    return "broadcast";
}

std::string to_string(SyncMode m) {
    return m == SyncMode::one_way ? "one_way" : "two_way";
}

const ClockSpec* Scenario::find_clock(const std::string& id) const {
    auto it = std::find_if(clocks.begin(), clocks.end(), [&](const ClockSpec& c) { return c.id == id; });
    return it == clocks.end() ? nullptr : &*it;
}

std::size_t Scenario::clock_index(const std::string& id) const {
    for (std::size_t i = 0; i < clocks.size(); ++i) {
        if (clocks[i].id == id) return i;
    }
    throw InputError("unknown clock id '" + id + "'");
}

const CoordinateConvention* Scenario::find_convention(const std::string& conv_name) const {
    auto it = std::find_if(conventions.begin(), conventions.end(),
                           [&](const CoordinateConvention& c) { return c.name() == conv_name; });
    return it == conventions.end() ? nullptr : &*it;
}

std::vector<double> Scenario::epoch_grid() const {
    const auto n = static_cast<std::size_t>(std::floor(duration / epoch_step + 1e-9));
    std::vector<double> grid(n + 1);
    for (std::size_t k = 0; k <= n; ++k) grid[k] = static_cast<double>(k) * epoch_step;
    return grid;
}

namespace {

void require_positive(double value, const char* key) {
    if (!std::isfinite(value) || value <= 0.0) throw ConfigError(std::string(key) + " must be finite and > 0", key);
}

}  // namespace

void Scenario::validate() const {
    ephemeris.validate();
    require_positive(duration, "duration");
    require_positive(epoch_step, "epoch_step");
    require_positive(integration_step, "integration_step");
    if (epoch_step > duration) throw ConfigError("epoch_step must not exceed duration", "epoch_step");
    if (clocks.empty()) throw ConfigError("at least one clock is required", "clocks");

    std::set<std::string> ids;
    for (const auto& clock : clocks) {
        if (clock.id.empty()) throw ConfigError("clock id must not be empty", "clocks.id");
        const bool plain = std::all_of(clock.id.begin(), clock.id.end(), [](unsigned char c) {
            return std::isalnum(c) || c == '_' || c == '-' || c == '.';
        });
        if (!plain) {
            throw ConfigError("clock id '" + clock.id + "' may only use letters, digits, '_', '-' and '.'", "clocks.id");
        }
        if (!ids.insert(clock.id).second) {
            throw ConfigError("duplicate clock id '" + clock.id + "'", "clocks.id");
        }
        clock.model.validate();
        const auto* orbit_e = std::get_if<EarthOrbit>(&clock.worldline.kind);
        const auto* orbit_m = std::get_if<MoonOrbit>(&clock.worldline.kind);
        if ((orbit_e && !(orbit_e->radius > ephemeris.earth_radius)) ||
            (orbit_m && !(orbit_m->radius > ephemeris.moon_radius))) {
            throw ConfigError("clock '" + clock.id + "': orbit radius must exceed the body radius",
                              "clocks.worldline.radius");
        }
    }

    std::set<std::string> conv_names;
    for (const auto& conv : conventions) {
        if (!conv_names.insert(conv.name()).second) {
            throw ConfigError("duplicate convention name '" + conv.name() + "'", "conventions.name");
        }
    }

    std::set<std::string> node_ids;
    for (const auto& node : topology.nodes) {
        if (!ids.count(node.id)) {
            throw ConfigError("topology node '" + node.id + "' does not reference a clock", "topology.nodes.id");
        }
        if (!node_ids.insert(node.id).second) {
            throw ConfigError("duplicate topology node '" + node.id + "'", "topology.nodes.id");
        }
    }
    for (const auto& link : topology.links) {
        for (const auto* end : {&link.a, &link.b}) {
            if (!node_ids.count(*end)) {
                throw ConfigError("link endpoint '" + *end + "' is not a topology node", "topology.links");
            }
        }
        if (link.a == link.b) throw ConfigError("link endpoints must differ", "topology.links");
        link.validate();
    }

    corrections.validate();
    require_positive(network.broadcast_interval, "network.broadcast_interval");
    require_positive(network.resync_interval, "network.resync_interval");
    if (network.periodic_model != "truth" && !find_convention(network.periodic_model)) {
        throw ConfigError("network.periodic_model '" + network.periodic_model + "' names no convention",
                          "network.periodic_model");
    }
    require_positive(transact.comparison_interval, "transact.comparison_interval");
    if (!(transact.measurement_noise >= 0.0) || !std::isfinite(transact.measurement_noise)) {
        throw ConfigError("transact.measurement_noise must be >= 0", "transact.measurement_noise");
    }
    if (!(transact.staleness_rate >= 0.0) || !std::isfinite(transact.staleness_rate)) {
        throw ConfigError("transact.staleness_rate must be >= 0", "transact.staleness_rate");
    }
    if (sweep.samples == 0) throw ConfigError("sweep.samples must be > 0", "sweep.samples");
    if (!(sweep.epsilon >= 0.0)) throw ConfigError("sweep.epsilon must be >= 0", "sweep.epsilon");
    require_positive(sweep.scale_max, "sweep.scale_max");

    for (const auto& check : checks) {
        for (const auto* id : {&check.a, &check.b}) {
            if (!ids.count(*id)) {
                throw ConfigError("check '" + check.name + "' references unknown clock '" + *id + "'", "checks");
            }
        }
        if (!(check.tolerance >= 0.0)) throw ConfigError("check tolerance must be >= 0", "checks.tolerance");
    }
}

}  // namespace cislunar
