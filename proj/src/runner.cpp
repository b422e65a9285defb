#include "cislunar/runner.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "cislunar/broadcastnet.hpp"
#include "cislunar/csv.hpp"
#include "cislunar/ensemble.hpp"
#include "cislunar/errors.hpp"
#include "cislunar/transactnet.hpp"
#include "cislunar/truth.hpp"

namespace cislunar {

using nlohmann::ordered_json;

fs::path default_out_dir() {
    const char* env = std::getenv("CISLUNAR_OUT_DIR");
    return env && *env ? fs::path(env) : fs::path("out");
}

bool RunArtifacts::all_checks_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.pass; });
}

std::vector<CheckVerdict> evaluate_checks(const Scenario& scenario, const Truth& truth) {
    std::vector<CheckVerdict> out;
    for (const auto& check : scenario.checks) {
        CheckVerdict v{check, mean_rate_difference_per_day(truth, check.a, check.b) * 1e6, false};
        v.pass = std::abs(v.measured - check.expected) <= check.tolerance;
        out.push_back(v);
    }
    return out;
}

namespace {

class Writer {
public:
    Writer(const fs::path& dir, const std::string& name, std::vector<fs::path>& manifest)
        : path_(dir / name), out_(path_, std::ios::binary) {
        if (!out_) throw Error("cannot write " + path_.string());
        manifest.push_back(path_);
    }
    void line(const std::vector<std::string>& fields) { out_ << csv::row(fields) << '\n'; }
    void raw(const std::string& text) { out_ << text; }
    ~Writer() { out_.flush(); }

private:
    fs::path path_;
    std::ofstream out_;
};

std::string opt_number(const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string(); }

void write_trace(const fs::path& dir, std::vector<fs::path>& manifest, std::vector<TraceEvent> events) {
    std::stable_sort(events.begin(), events.end(), [](const auto& x, const auto& y) { return x.epoch < y.epoch; });
    Writer w(dir, "event_trace.csv", manifest);
    w.line({"epoch", "node", "event", "offset_estimate", "residual_error", "lamport"});
    for (const auto& e : events) {
        w.line({csv::number(e.epoch), e.node, e.kind, csv::number(e.offset_estimate), csv::number(e.residual_error),
                opt_number(e.lamport)});
    }
}

void write_ensemble(const fs::path& dir, std::vector<fs::path>& manifest, const Truth& truth) {
    Writer w(dir, "ensemble.csv", manifest);
    std::vector<std::string> header{"epoch", "paper_time"};
    for (const auto i : truth.authorities) header.push_back("weight_" + truth.clocks[i].id);
    for (const auto i : truth.authorities) header.push_back("offset_" + truth.clocks[i].id);
    w.line(header);
    if (!truth.has_reference()) return;

    std::vector<std::string> ids;
    for (const auto i : truth.authorities) ids.push_back(truth.clocks[i].id);
    Ensemble ensemble(ids, truth.authority_weights);
    std::vector<std::optional<ClockReading>> readings(truth.authorities.size());
    for (std::size_t k = 0; k < truth.epochs.size(); ++k) {
        for (std::size_t j = 0; j < truth.authorities.size(); ++j) {
            const auto& c = truth.clocks[truth.authorities[j]];
            readings[j] = ClockReading{truth.epochs[k], c.proper_offset[k], c.displayed_offset[k]};
        }
        const auto& epoch = ensemble.update(readings);
        std::vector<std::string> row{csv::number(epoch.coordinate_epoch), csv::number(epoch.paper_time())};
        for (const double wgt : epoch.weights_used) row.push_back(csv::number(wgt));
        // Member displayed time minus paper time.
        for (const auto& r : readings) row.push_back(csv::number(r->displayed_offset - epoch.paper_offset));
        w.line(row);
    }
}

ordered_json write_adev(const fs::path& dir, std::vector<fs::path>& manifest, const Truth& truth) {
    Writer w(dir, "adev.csv", manifest);
    w.line({"clock", "tau", "sigma_y"});
    std::vector<double> taus;
    const std::size_t n = truth.epochs.size();
    for (double decade = 1.0; decade * truth.epoch_step * 3.0 <= truth.epoch_step * static_cast<double>(n);
         decade *= 10.0) {
        for (const double m : {1.0, 2.0, 5.0}) taus.push_back(m * decade * truth.epoch_step);
    }
    ordered_json warnings = ordered_json::object();
    for (const auto& c : truth.clocks) {
        const auto result = allan_deviation(c.readings(truth.epochs), taus);
        for (const auto& p : result.points) w.line({c.id, csv::number(p.tau), csv::number(p.sigma_y)});
        if (result.warning()) warnings[c.id] = result.omitted;
    }
    return warnings;
}

ordered_json broadcast_json(const BroadcastRunResult& run, const SyncMetrics& m) {
    ordered_json j;
    j["rms_sync_error_s"] = m.rms_sync_error;
    j["worst_pair_error_s"] = m.worst_pair_error;
    j["divergence_rate_us_per_day"] = m.divergence_rate * 1e6;
    j["agreement_fraction"] = m.agreement_fraction;
    j["corrections_applied"] = run.corrections_applied;
    j["signals_lost"] = run.signals_lost;
    j["signals_blocked"] = run.signals_blocked;
    j["lamport_monotone"] = run.lamport_monotone;
    return j;
}

}  // namespace

RunArtifacts run_scenario(const Scenario& scenario, const fs::path& out_dir) {
    scenario.validate();
    fs::create_directories(out_dir);
    RunArtifacts artifacts;
    const Truth truth = compute_truth(scenario);
    artifacts.verdicts = evaluate_checks(scenario, truth);

    ordered_json summary;
    summary["scenario"] = scenario.name;
    summary["seed"] = scenario.seed;
    summary["architecture"] = to_string(scenario.architecture);
    summary["duration_s"] = scenario.duration;

    ordered_json checks = ordered_json::array();
    for (const auto& v : artifacts.verdicts) {
        checks.push_back({{"name", v.check.name},
                          {"a", v.check.a},
                          {"b", v.check.b},
                          {"expected_us_per_day", v.check.expected},
                          {"tolerance_us_per_day", v.check.tolerance},
                          {"measured_us_per_day", v.measured},
                          {"verdict", v.pass ? "pass" : "fail"}});
    }
    summary["checks"] = checks;

    ordered_json weights = ordered_json::object();
    for (std::size_t j = 0; j < truth.authorities.size(); ++j) {
        weights[truth.clocks[truth.authorities[j]].id] = truth.authority_weights[j];
    }
    summary["authority_weights"] = weights;

    std::vector<TraceEvent> events;
    const bool broadcast = scenario.architecture != Architecture::transactional;
    const bool transactional = scenario.architecture != Architecture::broadcast;

    if (broadcast && truth.has_reference()) {
        auto run = simulate_broadcast(scenario, truth, scenario.corrections, scenario.seed);
        summary["broadcast"] = broadcast_json(run, summarize(run, scenario.sweep.epsilon));
        events.insert(events.end(), run.trace.begin(), run.trace.end());

        // Knowledge depth reached by an ack chain over every authority link.
        Rng rng(scenario.seed ^ 0x9e3779b97f4a7c15ULL);
        KnowledgeLadder ladder;
        for (const auto& link : scenario.topology.links) {
            run_ack_chain(ladder, link.a, link.b, scenario.network.ack_rounds, link.loss_probability, rng);
        }
        ordered_json depths = ordered_json::array();
        for (const auto& [pair, depth] : ladder.entries()) {
            depths.push_back({{"a", pair.first}, {"b", pair.second}, {"depth", depth},
                              {"rounds", scenario.network.ack_rounds}});
        }
        summary["knowledge_ladder"] = depths;
    }

    OffsetGraph graph;
    if (transactional) {
        auto run = simulate_transactional(scenario, truth, scenario.seed);
        double sum_sq = 0.0;
        std::size_t answered = 0;
        for (const auto& q : run.queries) {
            if (!q.residual) continue;
            sum_sq += *q.residual * *q.residual;
            ++answered;
        }
        ordered_json t;
        t["attempts"] = run.attempts;
        t["commits"] = run.commits;
        t["atomicity_violations"] = run.audit_violations;
        t["queries"] = run.queries.size();
        t["queries_answered"] = answered;
        t["rms_query_residual_s"] = answered ? std::sqrt(sum_sq / static_cast<double>(answered)) : 0.0;
        summary["transactional"] = t;
        events.insert(events.end(), run.trace.begin(), run.trace.end());
        graph = std::move(run.graph);
    }

    write_trace(out_dir, artifacts.files, std::move(events));
    write_ensemble(out_dir, artifacts.files, truth);
    {
        Writer w(out_dir, "offset_graph.csv", artifacts.files);
        std::ostringstream snapshot;
        write_snapshot(snapshot, graph);
        w.raw(snapshot.str());
    }
    summary["adev_omitted_taus"] = write_adev(out_dir, artifacts.files, truth);
    {
        Writer w(out_dir, "cycle_residuals.csv", artifacts.files);
        w.line({"cycle", "residual"});
        for (const auto& tri : triangles(graph)) {
            w.line({tri[0] + ">" + tri[1] + ">" + tri[2], csv::number(cycle_residual(graph, tri))});
        }
    }

    ordered_json files = ordered_json::array();
    for (const auto& f : artifacts.files) files.push_back(f.filename().string());
    files.push_back("summary.json");
    summary["artifacts"] = files;
    summary["verdict"] = artifacts.all_checks_pass() ? "pass" : "fail";

    const fs::path summary_path = out_dir / "summary.json";
    std::ofstream(summary_path, std::ios::binary) << summary.dump(2) << '\n';
    artifacts.files.push_back(summary_path);
    return artifacts;
}

namespace {

ordered_json sweep_json(const SweepResult& r) {
    ordered_json j;
    ordered_json scales;
    const auto a = r.vector.as_array();
    for (std::size_t f = 0; f < CorrectionVector::families; ++f) scales[std::string(CorrectionVector::names[f])] = a[f];
    j["scales"] = scales;
    j["rms_sync_error_s"] = r.rms_sync_error;
    j["worst_pair_error_s"] = r.worst_pair_error;
    j["divergence_rate_us_per_day"] = r.divergence_rate * 1e6;
    j["agreement_fraction"] = r.agreement_fraction;
    return j;
}

}  // namespace

SweepSummary run_sweep(const Scenario& scenario, const fs::path& out_dir, unsigned threads) {
    scenario.validate();
    fs::create_directories(out_dir);
    const Truth truth = compute_truth(scenario);
    const auto vectors = latin_hypercube(scenario.sweep.samples, scenario.sweep.seed, scenario.sweep.scale_max);
    const auto results = sweep_corrections(scenario, truth, vectors, threads);

    CorrectionVector secular_off;
    secular_off.secular_scale = 0.0;
    CorrectionVector drift_off;
    drift_off.drift_scale = 0.0;
    const std::vector<CorrectionVector> reference{CorrectionVector{}, secular_off, drift_off};
    const auto ref = sweep_corrections(scenario, truth, reference, threads);

    SweepSummary s;
    s.samples = results.size();
    s.epsilon = scenario.sweep.epsilon;
    s.faithfulness = faithfulness_score(results, s.epsilon);
    s.tuned = ref[0];
    s.secular_off = ref[1];
    s.drift_off = ref[2];
    for (const auto& r : results) {
        if (!(r.worst_pair_error < s.epsilon)) continue;
        ++s.passing;
        for (const double v : r.vector.as_array()) s.max_norm_of_passing = std::max(s.max_norm_of_passing, std::abs(v - 1.0));
    }

    std::vector<fs::path> manifest;
    {
        Writer w(out_dir, "sweep.csv", manifest);
        w.line({"secular_scale", "periodic_scale", "anomaly_scale", "drift_scale", "delay_scale", "rms_sync_error",
                "divergence_rate", "agreement_fraction", "worst_pair_error"});
        for (const auto& r : results) {
            std::vector<std::string> row;
            for (const double v : r.vector.as_array()) row.push_back(csv::number(v));
            row.push_back(csv::number(r.rms_sync_error));
            row.push_back(csv::number(r.divergence_rate));
            row.push_back(csv::number(r.agreement_fraction));
            row.push_back(csv::number(r.worst_pair_error));
            w.line(row);
        }
    }
    ordered_json j;
    j["scenario"] = scenario.name;
    j["samples"] = s.samples;
    j["sweep_seed"] = scenario.sweep.seed;
    j["epsilon_s"] = s.epsilon;
    j["faithfulness"] = s.faithfulness;
    j["passing"] = s.passing;
    j["max_norm_of_passing"] = s.max_norm_of_passing;
    j["tuned"] = sweep_json(s.tuned);
    j["secular_off"] = sweep_json(s.secular_off);
    j["drift_off"] = sweep_json(s.drift_off);
    std::ofstream(out_dir / "sweep_summary.json", std::ios::binary) << j.dump(2) << '\n';
    return s;
}

ModelSwapResult run_compare_models(const Scenario& scenario, const std::string& conv_a, const std::string& conv_b,
                                   const fs::path& out_dir) {
    scenario.validate();
    const auto* a = scenario.find_convention(conv_a);
    const auto* b = scenario.find_convention(conv_b);
    if (!a) throw ConfigError("no convention named '" + conv_a + "'", "conventions");
    if (!b) throw ConfigError("no convention named '" + conv_b + "'", "conventions");
    fs::create_directories(out_dir);
    const Truth truth = compute_truth(scenario);
    auto result = model_swap(scenario, truth, *a, *b);

    std::vector<fs::path> manifest;
    Writer w(out_dir, "model_swap.csv", manifest);
    w.line({"epoch", "label_offset_a", "label_offset_b", "label_delta", "pairwise_delta"});
    for (const auto& r : result.rows) {
        w.line({csv::number(r.epoch), csv::number(r.label_offset_a), csv::number(r.label_offset_b),
                csv::number(r.label_offset_a - r.label_offset_b), csv::number(r.pairwise_delta)});
    }
    return result;
}

void print_report(const fs::path& out_dir, std::ostream& out) {
    const fs::path path = out_dir / "summary.json";
    std::ifstream in(path);
    if (!in) throw InputError("no summary.json in " + out_dir.string() + "; run the scenario first");
    const auto j = ordered_json::parse(in);
    out << fmt::format("scenario {} (seed {}, {})\n", j.at("scenario").get<std::string>(), j.at("seed").get<std::uint64_t>(),
                       j.at("architecture").get<std::string>());
    for (const auto& c : j.at("checks")) {
        out << fmt::format("  check {:<20} {:+.3f} us/day (expected {:+.3f} +/- {:.3f})  {}\n",
                           c.at("name").get<std::string>(), c.at("measured_us_per_day").get<double>(),
                           c.at("expected_us_per_day").get<double>(), c.at("tolerance_us_per_day").get<double>(),
                           c.at("verdict").get<std::string>());
    }
    if (j.contains("broadcast")) {
        const auto& b = j.at("broadcast");
        out << fmt::format("  broadcast: rms {:.3e} s, worst pair {:.3e} s, divergence {:.4f} us/day, agreement {:.3f}\n",
                           b.at("rms_sync_error_s").get<double>(), b.at("worst_pair_error_s").get<double>(),
                           b.at("divergence_rate_us_per_day").get<double>(), b.at("agreement_fraction").get<double>());
    }
    if (j.contains("transactional")) {
        const auto& t = j.at("transactional");
        out << fmt::format("  transactional: {} commits of {} attempts, {} atomicity violations, rms residual {:.3e} s\n",
                           t.at("commits").get<std::size_t>(), t.at("attempts").get<std::size_t>(),
                           t.at("atomicity_violations").get<std::size_t>(), t.at("rms_query_residual_s").get<double>());
    }
    std::ifstream sweep_in(out_dir / "sweep_summary.json");
    if (sweep_in) {
        const auto s = ordered_json::parse(sweep_in);
        out << fmt::format("  sweep: {} samples, faithfulness {:.4f} at {:.1e} s, secular off {:.3f} us/day, "
                           "drift off {:.4f} us/day\n",
                           s.at("samples").get<std::size_t>(), s.at("faithfulness").get<double>(),
                           s.at("epsilon_s").get<double>(),
                           s.at("secular_off").at("divergence_rate_us_per_day").get<double>(),
                           s.at("drift_off").at("divergence_rate_us_per_day").get<double>());
    }
    out << "  verdict: " << j.at("verdict").get<std::string>() << '\n';
}

}  // namespace cislunar
