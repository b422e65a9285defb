#include "cislunar/scenario_io.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "cislunar/errors.hpp"

namespace cislunar {

namespace {

int line_of(const YAML::Node& node) {
    const auto mark = node.Mark();
    return mark.line >= 0 ? mark.line + 1 : 0;
}

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void require_map(const YAML::Node& node, const std::string& path) {
    if (!node.IsMap()) throw ConfigError(path + ": expected a mapping", path, line_of(node));
}

void require_seq(const YAML::Node& node, const std::string& path) {
    if (!node.IsSequence()) throw ConfigError(path + ": expected a list", path, line_of(node));
}

void allow_keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> keys) {
    require_map(node, path.empty() ? "document" : path);
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& entry : node) {
        const auto key = entry.first.as<std::string>();
        if (!allowed.count(key)) {
            throw ConfigError("unknown key '" + join(path, key) + "'", join(path, key), line_of(entry.first));
        }
    }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& path, const char* what) {
    if (!node.IsScalar()) throw ConfigError(path + ": expected " + what, path, line_of(node));
    try {
        return node.as<T>();
    } catch (const YAML::BadConversion&) {
        throw ConfigError(path + ": expected " + what + ", got '" + node.Scalar() + "'", path, line_of(node));
    }
}

double number(const YAML::Node& node, const std::string& path) { return scalar<double>(node, path, "a number"); }

void read(const YAML::Node& map, const char* key, const std::string& path, double& out) {
    if (const auto n = map[key]) out = number(n, join(path, key));
}

void read(const YAML::Node& map, const char* key, const std::string& path, std::uint64_t& out) {
    if (const auto n = map[key]) out = scalar<std::uint64_t>(n, join(path, key), "a non-negative integer");
}

void read(const YAML::Node& map, const char* key, const std::string& path, std::string& out) {
    if (const auto n = map[key]) out = scalar<std::string>(n, join(path, key), "a string");
}

std::string required_string(const YAML::Node& map, const char* key, const std::string& path) {
    const auto n = map[key];
    if (!n) throw ConfigError(join(path, key) + " is required", join(path, key), line_of(map));
    return scalar<std::string>(n, join(path, key), "a string");
}

EphemerisConfig parse_ephemeris(const YAML::Node& node) {
    const std::string p = "ephemeris";
    allow_keys(node, p,
               {"earth_gm", "moon_gm", "earth_radius", "moon_radius", "earth_moon_distance", "orbital_eccentricity",
                "orbital_period", "earth_spin_period", "speed_of_light"});
    EphemerisConfig cfg;
    read(node, "earth_gm", p, cfg.earth_gm);
    read(node, "moon_gm", p, cfg.moon_gm);
    read(node, "earth_radius", p, cfg.earth_radius);
    read(node, "moon_radius", p, cfg.moon_radius);
    read(node, "earth_moon_distance", p, cfg.earth_moon_distance);
    read(node, "orbital_eccentricity", p, cfg.orbital_eccentricity);
    read(node, "orbital_period", p, cfg.orbital_period);
    read(node, "earth_spin_period", p, cfg.earth_spin_period);
    read(node, "speed_of_light", p, cfg.speed_of_light);
    return cfg;
}

Worldline parse_worldline(const YAML::Node& node, const std::string& p) {
    require_map(node, p);
    const std::string kind = required_string(node, "kind", p);
    if (kind == "earth_surface") {
        allow_keys(node, p, {"kind", "latitude", "longitude"});
        EarthSurface k;
        read(node, "latitude", p, k.latitude);
        read(node, "longitude", p, k.longitude);
        return {k};
    }
    if (kind == "moon_surface") {
        allow_keys(node, p, {"kind", "latitude", "longitude", "mascon_anomaly"});
        MoonSurface k;
        read(node, "latitude", p, k.latitude);
        read(node, "longitude", p, k.longitude);
        read(node, "mascon_anomaly", p, k.mascon_anomaly);
        return {k};
    }
    if (kind == "earth_orbit" || kind == "moon_orbit") {
        allow_keys(node, p, {"kind", "radius"});
        if (!node["radius"]) throw ConfigError(p + ".radius is required", p + ".radius", line_of(node));
        const double r = number(node["radius"], p + ".radius");
        if (kind == "earth_orbit") return {EarthOrbit{r}};
        return {MoonOrbit{r}};
    }
    if (kind == "fixed_point") {
        allow_keys(node, p, {"kind", "x", "y", "z"});
        FixedPoint k;
        read(node, "x", p, k.x);
        read(node, "y", p, k.y);
        read(node, "z", p, k.z);
        return {k};
    }
    throw ConfigError(p + ".kind: unknown worldline kind '" + kind + "'", p + ".kind", line_of(node["kind"]));
}

ClockModel parse_model(const YAML::Node& node, const std::string& p) {
    allow_keys(node, p, {"frequency_offset", "linear_drift", "white_fm_sigma", "rw_fm_sigma", "seed"});
    ClockModel m;
    read(node, "frequency_offset", p, m.frequency_offset);
    read(node, "linear_drift", p, m.linear_drift);
    read(node, "white_fm_sigma", p, m.white_fm_sigma);
    read(node, "rw_fm_sigma", p, m.rw_fm_sigma);
    read(node, "seed", p, m.seed);
    return m;
}

std::vector<ClockSpec> parse_clocks(const YAML::Node& node) {
    require_seq(node, "clocks");
    std::vector<ClockSpec> clocks;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const std::string p = fmt::format("clocks[{}]", i);
        const auto c = node[i];
        allow_keys(c, p, {"id", "worldline", "model"});
        ClockSpec spec;
        spec.id = required_string(c, "id", p);
        if (!seen.insert(spec.id).second) {
            throw ConfigError("duplicate clock id '" + spec.id + "'", p + ".id", line_of(c["id"]));
        }
        if (!c["worldline"]) throw ConfigError(p + ".worldline is required", p + ".worldline", line_of(c));
        spec.worldline = parse_worldline(c["worldline"], p + ".worldline");
        if (const auto m = c["model"]) spec.model = parse_model(m, p + ".model");
        clocks.push_back(std::move(spec));
    }
    return clocks;
}

double angular_frequency(const YAML::Node& node, const std::string& p) {
    if (node.IsScalar() && node.Scalar() == "synodic") return synodic_angular_frequency;
    return number(node, p);
}

std::vector<CoordinateConvention> parse_conventions(const YAML::Node& node) {
    require_seq(node, "conventions");
    std::vector<CoordinateConvention> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const std::string p = fmt::format("conventions[{}]", i);
        const auto c = node[i];
        allow_keys(c, p, {"name", "secular_rate_offset", "terms"});
        const std::string name = required_string(c, "name", p);
        double secular = 0.0;
        read(c, "secular_rate_offset", p, secular);
        std::vector<PeriodicTerm> terms;
        if (const auto ts = c["terms"]) {
            require_seq(ts, p + ".terms");
            for (std::size_t j = 0; j < ts.size(); ++j) {
                const std::string tp = fmt::format("{}.terms[{}]", p, j);
                allow_keys(ts[j], tp, {"amplitude", "angular_frequency", "phase"});
                PeriodicTerm term;
                read(ts[j], "amplitude", tp, term.amplitude);
                if (const auto w = ts[j]["angular_frequency"]) {
                    term.angular_frequency = angular_frequency(w, tp + ".angular_frequency");
                }
                read(ts[j], "phase", tp, term.phase);
                terms.push_back(term);
            }
        }
        try {
            out.emplace_back(name, secular, std::move(terms));
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), p, line_of(c));
        }
    }
    return out;
}

Role parse_role(const YAML::Node& node, const std::string& p) {
    const auto s = scalar<std::string>(node, p, "a role");
    if (s == "authority") return Role::authority;
    if (s == "dependent") return Role::dependent;
    throw ConfigError(p + ": role must be authority or dependent", p, line_of(node));
}

Topology parse_topology(const YAML::Node& node) {
    allow_keys(node, "topology", {"nodes", "links"});
    Topology topo;
    if (const auto ns = node["nodes"]) {
        require_seq(ns, "topology.nodes");
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const std::string p = fmt::format("topology.nodes[{}]", i);
            allow_keys(ns[i], p, {"id", "role"});
            Node n;
            n.id = required_string(ns[i], "id", p);
            if (const auto r = ns[i]["role"]) n.role = parse_role(r, p + ".role");
            topo.nodes.push_back(std::move(n));
        }
    }
    if (const auto ls = node["links"]) {
        require_seq(ls, "topology.links");
        for (std::size_t i = 0; i < ls.size(); ++i) {
            const std::string p = fmt::format("topology.links[{}]", i);
            const auto l = ls[i];
            allow_keys(l, p, {"a", "b", "base_delay", "asymmetry", "loss_probability", "disruptions"});
            Link link;
            link.a = required_string(l, "a", p);
            link.b = required_string(l, "b", p);
            read(l, "base_delay", p, link.base_delay);
            read(l, "asymmetry", p, link.asymmetry);
            read(l, "loss_probability", p, link.loss_probability);
            if (const auto ds = l["disruptions"]) {
                require_seq(ds, p + ".disruptions");
                for (std::size_t j = 0; j < ds.size(); ++j) {
                    const std::string dp = fmt::format("{}.disruptions[{}]", p, j);
                    if (!ds[j].IsSequence() || ds[j].size() != 2) {
                        throw ConfigError(dp + ": expected [start, end]", dp, line_of(ds[j]));
                    }
                    link.disruptions.push_back({number(ds[j][0], dp), number(ds[j][1], dp)});
                }
            }
            try {
                link.validate();
            } catch (const ConfigError& e) {
                throw ConfigError(e.what(), p, line_of(l));
            }
            topo.links.push_back(std::move(link));
        }
    }
    return topo;
}

CorrectionVector parse_corrections(const YAML::Node& node) {
    const std::string p = "corrections";
    allow_keys(node, p, {"secular", "periodic", "anomaly", "drift", "delay"});
    CorrectionVector v;
    read(node, "secular", p, v.secular_scale);
    read(node, "periodic", p, v.periodic_scale);
    read(node, "anomaly", p, v.anomaly_scale);
    read(node, "drift", p, v.drift_scale);
    read(node, "delay", p, v.delay_scale);
    return v;
}

NetworkConfig parse_network(const YAML::Node& node) {
    const std::string p = "network";
    allow_keys(node, p, {"broadcast_interval", "resync_interval", "sync_mode", "periodic_model", "ack_rounds"});
    NetworkConfig n;
    read(node, "broadcast_interval", p, n.broadcast_interval);
    read(node, "resync_interval", p, n.resync_interval);
    if (const auto m = node["sync_mode"]) {
        const auto s = scalar<std::string>(m, "network.sync_mode", "a sync mode");
        if (s == "one_way") n.sync_mode = SyncMode::one_way;
        else if (s == "two_way") n.sync_mode = SyncMode::two_way;
        else throw ConfigError("network.sync_mode must be one_way or two_way", "network.sync_mode", line_of(m));
    }
    read(node, "periodic_model", p, n.periodic_model);
    if (const auto a = node["ack_rounds"]) n.ack_rounds = scalar<unsigned>(a, "network.ack_rounds", "an integer");
    return n;
}

TransactConfig parse_transact(const YAML::Node& node) {
    const std::string p = "transact";
    allow_keys(node, p, {"comparison_interval", "measurement_noise", "staleness_rate"});
    TransactConfig t;
    read(node, "comparison_interval", p, t.comparison_interval);
    read(node, "measurement_noise", p, t.measurement_noise);
    read(node, "staleness_rate", p, t.staleness_rate);
    return t;
}

SweepConfig parse_sweep(const YAML::Node& node) {
    const std::string p = "sweep";
    allow_keys(node, p, {"samples", "epsilon", "seed", "scale_max"});
    SweepConfig s;
    std::uint64_t samples = s.samples;
    read(node, "samples", p, samples);
    s.samples = static_cast<std::size_t>(samples);
    read(node, "epsilon", p, s.epsilon);
    read(node, "seed", p, s.seed);
    read(node, "scale_max", p, s.scale_max);
    return s;
}

std::vector<RateCheck> parse_checks(const YAML::Node& node) {
    require_seq(node, "checks");
    std::vector<RateCheck> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const std::string p = fmt::format("checks[{}]", i);
        allow_keys(node[i], p, {"name", "a", "b", "expected", "tolerance"});
        RateCheck c;
        c.name = required_string(node[i], "name", p);
        c.a = required_string(node[i], "a", p);
        c.b = required_string(node[i], "b", p);
        read(node[i], "expected", p, c.expected);
        read(node[i], "tolerance", p, c.tolerance);
        out.push_back(std::move(c));
    }
    return out;
}

Architecture parse_architecture(const YAML::Node& node) {
    const auto s = scalar<std::string>(node, "architecture", "an architecture");
    if (s == "broadcast") return Architecture::broadcast;
    if (s == "transactional") return Architecture::transactional;
    if (s == "both") return Architecture::both;
    throw ConfigError("architecture must be broadcast, transactional or both", "architecture", line_of(node));
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        const int line = e.mark.line >= 0 ? e.mark.line + 1 : 0;
        throw ConfigError(fmt::format("syntax error at line {}: {}", line, e.msg), {}, line);
    }
    if (!root.IsMap()) throw ConfigError("scenario document must be a mapping", {}, line_of(root));
    allow_keys(root, "",
               {"name", "ephemeris", "clocks", "conventions", "topology", "architecture", "duration", "epoch_step",
                "integration_step", "seed", "corrections", "network", "transact", "sweep", "checks"});

    Scenario s;
    read(root, "name", "", s.name);
    if (const auto n = root["ephemeris"]) s.ephemeris = parse_ephemeris(n);
    if (!root["clocks"]) throw ConfigError("clocks is required", "clocks", line_of(root));
    s.clocks = parse_clocks(root["clocks"]);
    if (const auto n = root["conventions"]) s.conventions = parse_conventions(n);
    if (const auto n = root["topology"]) s.topology = parse_topology(n);
    if (const auto n = root["architecture"]) s.architecture = parse_architecture(n);
    read(root, "duration", "", s.duration);
    read(root, "epoch_step", "", s.epoch_step);
    read(root, "integration_step", "", s.integration_step);
    read(root, "seed", "", s.seed);
    if (const auto n = root["corrections"]) s.corrections = parse_corrections(n);
    if (const auto n = root["network"]) s.network = parse_network(n);
    if (const auto n = root["transact"]) s.transact = parse_transact(n);
    if (const auto n = root["sweep"]) s.sweep = parse_sweep(n);
    if (const auto n = root["checks"]) s.checks = parse_checks(n);

    try {
        s.validate();
    } catch (const ConfigError& e) {
        // Point at the deepest mapping along the key path that exists.
        int line = 0;
        YAML::Node node = root;
        std::string_view rest = e.key();
        while (!rest.empty() && node.IsMap()) {
            const auto dot = rest.find('.');
            const YAML::Node child = node[std::string(rest.substr(0, dot))];
            if (!child) break;
            line = line_of(child);
            node = child;
            rest = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
        }
        throw ConfigError(e.what(), e.key(), line);
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read scenario file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str());
}

namespace {

std::string num(double v) { return fmt::format("{:.18g}", v); }

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string worldline_fields(const Worldline& w) {
    return std::visit(
        [&](const auto& k) -> std::string {
            using K = std::decay_t<decltype(k)>;
            std::string kind = "kind: " + w.kind_name();
            if constexpr (std::is_same_v<K, EarthSurface>) {
                return fmt::format("{}, latitude: {}, longitude: {}", kind, num(k.latitude), num(k.longitude));
            } else if constexpr (std::is_same_v<K, MoonSurface>) {
                return fmt::format("{}, latitude: {}, longitude: {}, mascon_anomaly: {}", kind, num(k.latitude),
                                   num(k.longitude), num(k.mascon_anomaly));
            } else if constexpr (std::is_same_v<K, FixedPoint>) {
                return fmt::format("{}, x: {}, y: {}, z: {}", kind, num(k.x), num(k.y), num(k.z));
            } else {
                return fmt::format("{}, radius: {}", kind, num(k.radius));
            }
        },
        w.kind);
}

}  // namespace

std::string render_scenario(const Scenario& s) {
    std::string o;
    auto line = [&](const std::string& l) { o += l + "\n"; };
    const auto& e = s.ephemeris;
    line("name: " + quoted(s.name));
    line("architecture: " + to_string(s.architecture));
    line("duration: " + num(s.duration));
    line("epoch_step: " + num(s.epoch_step));
    line("integration_step: " + num(s.integration_step));
    line("seed: " + std::to_string(s.seed));
    line("ephemeris:");
    line("  earth_gm: " + num(e.earth_gm));
    line("  moon_gm: " + num(e.moon_gm));
    line("  earth_radius: " + num(e.earth_radius));
    line("  moon_radius: " + num(e.moon_radius));
    line("  earth_moon_distance: " + num(e.earth_moon_distance));
    line("  orbital_eccentricity: " + num(e.orbital_eccentricity));
    line("  orbital_period: " + num(e.orbital_period));
    line("  earth_spin_period: " + num(e.earth_spin_period));
    line("  speed_of_light: " + num(e.speed_of_light));

    line("clocks:");
    for (const auto& c : s.clocks) {
        const auto& m = c.model;
        line("  - id: " + quoted(c.id));
        line("    worldline: {" + worldline_fields(c.worldline) + "}");
        line(fmt::format("    model: {{frequency_offset: {}, linear_drift: {}, white_fm_sigma: {}, rw_fm_sigma: {}, "
                         "seed: {}}}",
                         num(m.frequency_offset), num(m.linear_drift), num(m.white_fm_sigma), num(m.rw_fm_sigma),
                         m.seed));
    }

    line(s.conventions.empty() ? "conventions: []" : "conventions:");
    for (const auto& c : s.conventions) {
        line("  - name: " + quoted(c.name()));
        line("    secular_rate_offset: " + num(c.secular_rate_offset()));
        line(c.periodic_terms().empty() ? "    terms: []" : "    terms:");
        for (const auto& t : c.periodic_terms()) {
            line(fmt::format("      - {{amplitude: {}, angular_frequency: {}, phase: {}}}", num(t.amplitude),
                             num(t.angular_frequency), num(t.phase)));
        }
    }

    line("topology:");
    line(s.topology.nodes.empty() ? "  nodes: []" : "  nodes:");
    for (const auto& n : s.topology.nodes) {
        line(fmt::format("    - {{id: {}, role: {}}}", quoted(n.id), to_string(n.role)));
    }
    line(s.topology.links.empty() ? "  links: []" : "  links:");
    for (const auto& l : s.topology.links) {
        std::string windows;
        for (const auto& w : l.disruptions) {
            if (!windows.empty()) windows += ", ";
            windows += fmt::format("[{}, {}]", num(w.start), num(w.end));
        }
        line(fmt::format("    - {{a: {}, b: {}, base_delay: {}, asymmetry: {}, loss_probability: {}, "
                         "disruptions: [{}]}}",
                         quoted(l.a), quoted(l.b), num(l.base_delay), num(l.asymmetry), num(l.loss_probability),
                         windows));
    }

    const auto& v = s.corrections;
    line(fmt::format("corrections: {{secular: {}, periodic: {}, anomaly: {}, drift: {}, delay: {}}}",
                     num(v.secular_scale), num(v.periodic_scale), num(v.anomaly_scale), num(v.drift_scale),
                     num(v.delay_scale)));
    const auto& n = s.network;
    line("network:");
    line("  broadcast_interval: " + num(n.broadcast_interval));
    line("  resync_interval: " + num(n.resync_interval));
    line("  sync_mode: " + to_string(n.sync_mode));
    line("  periodic_model: " + quoted(n.periodic_model));
    line("  ack_rounds: " + std::to_string(n.ack_rounds));
    line("transact:");
    line("  comparison_interval: " + num(s.transact.comparison_interval));
    line("  measurement_noise: " + num(s.transact.measurement_noise));
    line("  staleness_rate: " + num(s.transact.staleness_rate));
    line("sweep:");
    line("  samples: " + std::to_string(s.sweep.samples));
    line("  epsilon: " + num(s.sweep.epsilon));
    line("  seed: " + std::to_string(s.sweep.seed));
    line("  scale_max: " + num(s.sweep.scale_max));

    line(s.checks.empty() ? "checks: []" : "checks:");
    for (const auto& c : s.checks) {
        line(fmt::format("  - {{name: {}, a: {}, b: {}, expected: {}, tolerance: {}}}", quoted(c.name), quoted(c.a),
                         quoted(c.b), num(c.expected), num(c.tolerance)));
    }
    return o;
}

}  // namespace cislunar
