#include "cislunar/broadcastnet.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "cislunar/errors.hpp"

namespace cislunar {

DeliveryOutcome transmit(const Link& link, Direction dir, double t, Rng& rng) {
    if (link.disrupted(t)) return Blocked{};
    std::bernoulli_distribution lose(link.loss_probability);
    if (lose(rng)) return Lost{};
    const double delay = link.delay(dir);
    return Delivered{t + delay, delay};
}

DeliveryOutcome deliver(TimeSignal& signal, const std::string& receiver_id, LamportClock& receiver,
                        const Link& link, Direction dir, double t, Rng& rng) {
    auto outcome = transmit(link, dir, t, rng);
    if (std::holds_alternative<Delivered>(outcome)) {
        signal.lamport_stamp = receiver.receive(signal.lamport_stamp);
        signal.path.push_back(receiver_id);
    }
    return outcome;
}

double one_way_sync(const TimeLabel& emit_label, double assumed_delay, const TimeLabel& local_displayed) {
    return (emit_label - local_displayed) + assumed_delay;
}

double two_way_offset(const TwoWayTimestamps& ts) {
    return 0.5 * ((ts.t2 - ts.t1) + (ts.t3 - ts.t4));
}

unsigned KnowledgeLadder::depth(const std::string& a, const std::string& b) const {
    auto it = depth_.find({a, b});
    return it == depth_.end() ? 0u : it->second;
}

void KnowledgeLadder::record(const std::string& a, const std::string& b, unsigned depth) {
    depth_[{a, b}] = depth;
}

unsigned run_ack_chain(KnowledgeLadder& ladder, const std::string& a, const std::string& b, unsigned k, double p,
                       Rng& rng) {
    if (k == 0) throw InputError("run_ack_chain requires k >= 1");
    if (!(p >= 0.0 && p < 1.0)) throw InputError("run_ack_chain requires 0 <= p < 1");
    std::bernoulli_distribution lose(p);
    unsigned depth = 0;
    while (depth < k && !lose(rng)) ++depth;
    ladder.record(a, b, depth);
    return depth;
}

namespace {

constexpr std::size_t kPredictedFamilies = 4;  // secular, periodic, anomaly, drift

struct DependentState {
    std::size_t clock = 0;
    LamportClock lamport;
    bool synced = false;
    double correction = 0.0;
    double sync_epoch = 0.0;
    double last_sync = -std::numeric_limits<double>::infinity();
    std::array<double, kPredictedFamilies> family_at_sync{};
    std::size_t segment = 0;
};

enum class EventKind { emit, arrive, sample, two_way };

struct Event {
    double t = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::sample;
    std::size_t index = 0;  // authority, dependent or epoch index
    TimeSignal signal{};
    const Link* link = nullptr;
    Direction dir = Direction::forward;
    double delay = 0.0;
};

struct Later {
    bool operator()(const Event& x, const Event& y) const {
        return x.t != y.t ? x.t > y.t : x.seq > y.seq;
    }
};

class BroadcastSim {
public:
    BroadcastSim(const Scenario& scenario, const Truth& truth, const CorrectionVector& scales, std::uint64_t seed,
                 const BroadcastOptions& options)
        : scenario_(scenario), truth_(truth), scales_(scales), rng_(seed), options_(options) {
        if (!truth.has_reference()) throw InputError("broadcast run needs at least one authority node");
        if (scenario.network.periodic_model != "truth") {
            convention_ = scenario.find_convention(scenario.network.periodic_model);
        }
        for (const auto& id : scenario.topology.ids_with_role(Role::authority)) {
            result_.authorities.push_back({id, {}, 0, {}, {}});
        }
        for (const auto& id : scenario.topology.ids_with_role(Role::dependent)) {
            result_.dependents.push_back(id);
            DependentState d;
            d.clock = truth.index_of(id);
            dependents_.push_back(d);
        }
        result_.residuals.resize(dependents_.size());
        end_ = truth.epochs.back();
    }

    BroadcastRunResult run() {
        for (std::size_t i = 0; i < result_.authorities.size(); ++i) push({0.0, 0, EventKind::emit, i});
        push({0.0, 0, EventKind::sample, 0});
        if (scenario_.network.sync_mode == SyncMode::two_way) {
            for (std::size_t i = 0; i < dependents_.size(); ++i) push({0.0, 0, EventKind::two_way, i});
        }
        while (!queue_.empty()) {
            Event ev = queue_.top();
            queue_.pop();
            switch (ev.kind) {
                case EventKind::emit: emit(ev); break;
                case EventKind::arrive: arrive(ev); break;
                case EventKind::sample: sample(ev); break;
                case EventKind::two_way: two_way(ev); break;
            }
        }
        return std::move(result_);
    }

private:
    void push(Event ev) {
        if (ev.t > end_) return;
        ev.seq = next_seq_++;
        queue_.push(std::move(ev));
    }

    void trace(double t, const std::string& node, const char* kind, std::optional<double> estimate = {},
               std::optional<double> residual = {}, std::optional<std::uint64_t> lamport = {}) {
        if (options_.record_trace) result_.trace.push_back({t, node, kind, estimate, residual, lamport});
    }

    TimeLabel reference_label(double t) const { return {t, truth_.at(truth_.reference.displayed_offset, t)}; }
    TimeLabel local_label(const DependentState& d, double t) const {
        return {t, truth_.at(truth_.clocks[d.clock].displayed_offset, t)};
    }

    std::array<double, kPredictedFamilies> families(const DependentState& d, double t) const {
        const ClockTruth& ref = truth_.reference;
        const ClockTruth& own = truth_.clocks[d.clock];
        const double periodic = convention_ ? convention_->periodic_part(t)
                                            : truth_.at(ref.periodic, t) - truth_.at(own.periodic, t);
        return {truth_.at(ref.secular, t) - truth_.at(own.secular, t), periodic,
                truth_.at(ref.anomaly, t) - truth_.at(own.anomaly, t),
                truth_.at(ref.hardware, t) - truth_.at(own.hardware, t)};
    }

    double estimated_offset(const DependentState& d, double t) const {
        const auto now = families(d, t);
        const std::array<double, kPredictedFamilies> scale{scales_.secular_scale, scales_.periodic_scale,
                                                           scales_.anomaly_scale, scales_.drift_scale};
        double predicted = 0.0;
        for (std::size_t f = 0; f < kPredictedFamilies; ++f) predicted += scale[f] * (now[f] - d.family_at_sync[f]);
        return d.correction + predicted;
    }

    double true_offset(const DependentState& d, double t) const { return reference_label(t) - local_label(d, t); }

    void apply_correction(DependentState& d, double t, double estimate, const std::string& id) {
        d.synced = true;
        d.correction = estimate;
        d.sync_epoch = t;
        d.last_sync = t;
        d.family_at_sync = families(d, t);
        ++d.segment;
        ++result_.corrections_applied;
        trace(t, id, "sync", estimate, true_offset(d, t) - estimate, d.lamport.value());
    }

    bool due(const DependentState& d, double t) const {
        return !d.synced || t - d.last_sync >= scenario_.network.resync_interval - 1e-9;
    }

    void emit(const Event& ev) {
        AuthorityState& auth = result_.authorities[ev.index];
        const double t = ev.t;
        TimeSignal signal{auth.id, reference_label(t), auth.lamport.send(), {auth.id}};
        ++auth.emitted;
        auth.stamps.push_back(signal.lamport_stamp);
        auth.label_offsets.push_back(signal.emit_label.offset);
        trace(t, auth.id, "emit", {}, {}, signal.lamport_stamp);

        for (const auto& link : scenario_.topology.links) {
            const std::string* other = link.a == auth.id ? &link.b : link.b == auth.id ? &link.a : nullptr;
            if (!other) continue;
            const auto dep = dependent_index(*other);
            if (!dep) continue;
            const Direction dir = link.direction_from(auth.id);
            const auto outcome = transmit(link, dir, t, rng_);
            if (const auto* d = std::get_if<Delivered>(&outcome)) {
                Event arrival{d->at, 0, EventKind::arrive, *dep, signal, &link, dir, d->delay};
                push(std::move(arrival));
            } else if (std::holds_alternative<Lost>(outcome)) {
                ++result_.signals_lost;
                trace(t, *other, "lost", {}, {}, signal.lamport_stamp);
            } else {
                ++result_.signals_blocked;
                trace(t, *other, "blocked", {}, {}, signal.lamport_stamp);
            }
        }
        push({t + scenario_.network.broadcast_interval, 0, EventKind::emit, ev.index});
    }

    void arrive(const Event& ev) {
        DependentState& d = dependents_[ev.index];
        const std::string& id = result_.dependents[ev.index];
        const std::uint64_t stamp = d.lamport.receive(ev.signal.lamport_stamp);
        if (stamp <= ev.signal.lamport_stamp) result_.lamport_monotone = false;
        trace(ev.t, id, "deliver", {}, {}, stamp);
        if (scenario_.network.sync_mode != SyncMode::one_way || !due(d, ev.t)) return;

        const double assumed = scales_.delay_scale * ev.link->delay(ev.dir);
        // The arrival label is anchored at the emission epoch plus the exact
        // delay so the label difference carries no epoch rounding.
        const TimeLabel local{ev.signal.emit_label.epoch,
                              ev.delay + truth_.at(truth_.clocks[d.clock].displayed_offset, ev.t)};
        apply_correction(d, ev.t, one_way_sync(ev.signal.emit_label, assumed, local), id);
    }

    void two_way(const Event& ev) {
        DependentState& d = dependents_[ev.index];
        const std::string& id = result_.dependents[ev.index];
        const Link* link = nullptr;
        std::size_t auth_index = 0;
        for (std::size_t i = 0; i < result_.authorities.size() && !link; ++i) {
            link = scenario_.topology.find_link(id, result_.authorities[i].id);
            auth_index = i;
        }
        if (link) {
            d.lamport.send();
            auto exchange = two_way_transfer(
                *link, id, ev.t, rng_, [&](double t) { return local_label(d, t); },
                [&](double t) { return reference_label(t); });
            if (exchange) {
                auto& auth = result_.authorities[auth_index];
                auth.lamport.receive(d.lamport.value());
                d.lamport.receive(auth.lamport.send());
                apply_correction(d, exchange->remote_epoch, exchange->offset, id);
            } else {
                trace(ev.t, id, "two_way_failed", {}, {}, d.lamport.value());
            }
        }
        push({ev.t + scenario_.network.resync_interval, 0, EventKind::two_way, ev.index});
    }

    void sample(const Event& ev) {
        const double t = truth_.epochs[ev.index];
        for (std::size_t i = 0; i < dependents_.size(); ++i) {
            const DependentState& d = dependents_[i];
            if (!d.synced) continue;
            const double estimate = estimated_offset(d, t);
            const double residual = true_offset(d, t) - estimate;
            result_.residuals[i].push_back({t, d.segment, residual});
            trace(t, result_.dependents[i], "sample", estimate, residual);
        }
        if (ev.index + 1 < truth_.epochs.size()) {
            push({truth_.epochs[ev.index + 1], 0, EventKind::sample, ev.index + 1});
        }
    }

    std::optional<std::size_t> dependent_index(const std::string& id) const {
        for (std::size_t i = 0; i < result_.dependents.size(); ++i) {
            if (result_.dependents[i] == id) return i;
        }
        return std::nullopt;
    }

    const Scenario& scenario_;
    const Truth& truth_;
    const CorrectionVector& scales_;
    Rng rng_;
    BroadcastOptions options_;
    const CoordinateConvention* convention_ = nullptr;
    std::vector<DependentState> dependents_;
    BroadcastRunResult result_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t next_seq_ = 0;
    double end_ = 0.0;
};

}  // namespace

BroadcastRunResult simulate_broadcast(const Scenario& scenario, const Truth& truth, const CorrectionVector& scales,
                                      std::uint64_t seed, const BroadcastOptions& options) {
    return BroadcastSim(scenario, truth, scales, seed, options).run();
}

SyncMetrics summarize(const BroadcastRunResult& run, double agreement_epsilon) {
    SyncMetrics m;
    double sum_sq = 0.0;
    std::size_t count = 0;
    std::map<double, std::vector<double>> by_epoch;
    double worst_slope = 0.0;

    for (const auto& series : run.residuals) {
        for (const auto& s : series) {
            sum_sq += s.residual * s.residual;
            ++count;
            by_epoch[s.epoch].push_back(s.residual);
        }
        // Common slope across segments, each segment centred on its own mean.
        double sxy = 0.0;
        double sxx = 0.0;
        std::size_t begin = 0;
        while (begin < series.size()) {
            std::size_t end = begin;
            double mean_t = 0.0;
            double mean_r = 0.0;
            while (end < series.size() && series[end].segment == series[begin].segment) {
                mean_t += series[end].epoch;
                mean_r += series[end].residual;
                ++end;
            }
            const auto n = static_cast<double>(end - begin);
            mean_t /= n;
            mean_r /= n;
            for (std::size_t i = begin; i < end; ++i) {
                const double dt = series[i].epoch - mean_t;
                sxy += dt * (series[i].residual - mean_r);
                sxx += dt * dt;
            }
            begin = end;
        }
        if (sxx > 0.0) worst_slope = std::max(worst_slope, std::abs(sxy / sxx));
    }
    m.rms_sync_error = count ? std::sqrt(sum_sq / static_cast<double>(count)) : 0.0;
    m.divergence_rate = worst_slope * 86400.0;

    std::size_t agreeing = 0;
    for (const auto& [epoch, residuals] : by_epoch) {
        double worst = 0.0;
        for (std::size_t i = 0; i < residuals.size(); ++i) {
            worst = std::max(worst, std::abs(residuals[i]));
            for (std::size_t j = i + 1; j < residuals.size(); ++j) {
                worst = std::max(worst, std::abs(residuals[i] - residuals[j]));
            }
        }
        m.worst_pair_error = std::max(m.worst_pair_error, worst);
        if (worst < agreement_epsilon) ++agreeing;
    }
    m.agreement_fraction = by_epoch.empty() ? 0.0 : static_cast<double>(agreeing) / static_cast<double>(by_epoch.size());
    return m;
}

}  // namespace cislunar
