#pragma once

// One-way broadcast and two-way time transfer over a disruption-tolerant
// network, with Lamport stamps and a knowledge-depth ledger for ack chains.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cislunar/corrections.hpp"
#include "cislunar/scenario.hpp"
#include "cislunar/topology.hpp"
#include "cislunar/truth.hpp"

namespace cislunar {

using Rng = std::mt19937_64;

/// A clock label held as coordinate epoch + offset so that differences of
/// nearby labels keep full precision.
struct TimeLabel {
    double epoch = 0.0;
    double offset = 0.0;

    double value() const { return epoch + offset; }
    friend double operator-(const TimeLabel& x, const TimeLabel& y) {
        return (x.epoch - y.epoch) + (x.offset - y.offset);
    }
    friend TimeLabel operator+(const TimeLabel& x, double dt) { return {x.epoch, x.offset + dt}; }
};

class LamportClock {
public:
    std::uint64_t value() const { return value_; }
    std::uint64_t send() { return ++value_; }
    std::uint64_t receive(std::uint64_t stamp) {
        value_ = std::max(value_, stamp) + 1;
        return value_;
    }

    friend bool operator==(const LamportClock&, const LamportClock&) = default;

private:
    std::uint64_t value_ = 0;
};

struct TimeSignal {
    std::string origin;
    TimeLabel emit_label;  // origin's displayed (paper) time at emission
    std::uint64_t lamport_stamp = 0;
    std::vector<std::string> path;
};

struct Delivered {
    double at = 0.0;
    double delay = 0.0;
};
struct Lost {};
struct Blocked {};
using DeliveryOutcome = std::variant<Delivered, Lost, Blocked>;

/// Outcome of sending on `link` in direction `dir` at coordinate time t.
/// Blocked inside a disruption window (no random draw); otherwise lost with the
/// link's loss probability.
DeliveryOutcome transmit(const Link& link, Direction dir, double t, Rng& rng);

/// transmit() plus the receive side: on delivery the receiver's Lamport clock
/// merges the stamp and the receiver is appended to the signal path. Lost and
/// blocked signals leave the receiver untouched.
DeliveryOutcome deliver(TimeSignal& signal, const std::string& receiver_id, LamportClock& receiver,
                        const Link& link, Direction dir, double t, Rng& rng);

/// Offset the dependent must add to its displayed time:
/// emit_label + assumed_delay - local_displayed.
double one_way_sync(const TimeLabel& emit_label, double assumed_delay, const TimeLabel& local_displayed);

struct TwoWayTimestamps {
    TimeLabel t1;  // a sends
    TimeLabel t2;  // b receives
    TimeLabel t3;  // b replies
    TimeLabel t4;  // a receives
};

/// ((t2 - t1) + (t3 - t4)) / 2: estimate of clock b minus clock a.
double two_way_offset(const TwoWayTimestamps& ts);

struct TwoWayExchange {
    TwoWayTimestamps timestamps;
    double offset = 0.0;
    double remote_epoch = 0.0;  // coordinate time t2 was taken
    double completed_at = 0.0;  // coordinate time t4 was taken
};

/// Runs the four-timestamp exchange from `a` over `link` starting at t. The
/// clock callables map a coordinate epoch to that clock's displayed label.
/// Either leg failing yields no estimate and draws nothing further.
template <typename ClockA, typename ClockB>
std::optional<TwoWayExchange> two_way_transfer(const Link& link, const std::string& a, double t, Rng& rng,
                                               ClockA&& clock_a, ClockB&& clock_b, double turnaround = 0.0) {
    const Direction out = link.direction_from(a);
    const Direction back = out == Direction::forward ? Direction::reverse : Direction::forward;
    const auto first = transmit(link, out, t, rng);
    const auto* leg1 = std::get_if<Delivered>(&first);
    if (!leg1) return std::nullopt;
    const double reply_at = leg1->at + turnaround;
    const auto second = transmit(link, back, reply_at, rng);
    const auto* leg2 = std::get_if<Delivered>(&second);
    if (!leg2) return std::nullopt;

    TwoWayExchange ex;
    ex.timestamps = {clock_a(t), clock_b(leg1->at), clock_b(reply_at), clock_a(leg2->at)};
    ex.offset = two_way_offset(ex.timestamps);
    ex.remote_epoch = leg1->at;
    ex.completed_at = leg2->at;
    return ex;
}

/// Depth k for an ordered pair means "a knows that b knows ... (k levels)".
/// There is deliberately no value for common knowledge.
class KnowledgeLadder {
public:
    unsigned depth(const std::string& a, const std::string& b) const;
    void record(const std::string& a, const std::string& b, unsigned depth);
    const std::map<std::pair<std::string, std::string>, unsigned>& entries() const { return depth_; }

private:
    std::map<std::pair<std::string, std::string>, unsigned> depth_;
};

/// Sends up to k alternating messages (offset, ack, ack-of-ack, ...) each lost
/// with probability p; depth is the count delivered before the first loss.
unsigned run_ack_chain(KnowledgeLadder& ladder, const std::string& a, const std::string& b, unsigned k, double p,
                       Rng& rng);

struct TraceEvent {
    double epoch = 0.0;
    std::string node;
    std::string kind;
    std::optional<double> offset_estimate;
    std::optional<double> residual_error;
    std::optional<std::uint64_t> lamport;
};

struct ResidualSample {
    double epoch = 0.0;
    std::size_t segment = 0;  // number of corrections applied so far
    double residual = 0.0;    // true offset - estimated offset
};

struct AuthorityState {
    std::string id;
    LamportClock lamport;
    std::uint64_t emitted = 0;
    std::vector<std::uint64_t> stamps;
    std::vector<double> label_offsets;

    friend bool operator==(const AuthorityState&, const AuthorityState&) = default;
};

struct BroadcastOptions {
    bool record_trace = true;
};

struct BroadcastRunResult {
    std::vector<std::string> dependents;
    std::vector<std::vector<ResidualSample>> residuals;  // per dependent
    std::vector<AuthorityState> authorities;
    std::vector<TraceEvent> trace;
    std::size_t corrections_applied = 0;
    std::size_t signals_lost = 0;
    std::size_t signals_blocked = 0;
    /// Every delivered signal had a receiver stamp above its emission stamp.
    bool lamport_monotone = true;
};

/// Runs the broadcast architecture over one scenario. All network randomness
/// comes from one generator seeded with `seed`; clock noise is already in
/// `truth`. Dependent corrections are scaled by `scales`.
BroadcastRunResult simulate_broadcast(const Scenario& scenario, const Truth& truth, const CorrectionVector& scales,
                                      std::uint64_t seed, const BroadcastOptions& options = {});

struct SyncMetrics {
    double rms_sync_error = 0.0;    // s
    double worst_pair_error = 0.0;  // s, max over epochs and pairs (reference included)
    double divergence_rate = 0.0;   // s/day, largest within-segment residual slope
    double agreement_fraction = 0.0;
};

SyncMetrics summarize(const BroadcastRunResult& run, double agreement_epsilon);

}  // namespace cislunar
