#pragma once

// Bilateral clock comparisons committed atomically to both participants'
// ledgers, and the relational offset graph built from them. There is no global
// time coordinate here and no acknowledgement chain anywhere in the API.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cislunar/broadcastnet.hpp"
#include "cislunar/scenario.hpp"
#include "cislunar/topology.hpp"
#include "cislunar/truth.hpp"

namespace cislunar {

enum class TransactionState { proposed, committed, aborted };

std::string to_string(TransactionState s);

struct ComparisonTransaction {
    std::uint64_t id = 0;
    std::string a;
    std::string b;
    TransactionState state = TransactionState::proposed;
    double committed_offset = 0.0;  // displayed_a - displayed_b at the rendezvous
    double uncertainty = 0.0;
    double rendezvous_epoch = 0.0;
};

struct LedgerRecord {
    std::uint64_t transaction = 0;
    std::string a;
    std::string b;
    double offset = 0.0;
    double uncertainty = 0.0;
    double rendezvous_epoch = 0.0;

    friend bool operator==(const LedgerRecord&, const LedgerRecord&) = default;
};

/// Per-node ledgers. The only mutation is commit(), which writes the same
/// record to both participants in one step.
class Ledgers {
public:
    void add_node(const std::string& id);
    const std::map<std::uint64_t, LedgerRecord>& of(const std::string& id) const;
    const std::map<std::string, std::map<std::uint64_t, LedgerRecord>>& all() const { return ledgers_; }
    std::uint64_t next_transaction_id() { return next_id_++; }
    std::size_t total_records() const;

    void commit(const LedgerRecord& record);

    friend bool operator==(const Ledgers&, const Ledgers&) = default;

private:
    std::map<std::string, std::map<std::uint64_t, LedgerRecord>> ledgers_;
    std::uint64_t next_id_ = 1;
};

/// Transaction ids found in exactly one participant's ledger, in a ledger that
/// is not a participant, or with differing contents between the two sides.
std::vector<std::uint64_t> audit_atomicity(const Ledgers& ledgers);

/// Displayed-time offset (displayed - coordinate epoch) of a clock at t.
using DisplayedOffsetFn = std::function<double(const std::string& id, double t)>;

/// One rendezvous slot between the link endpoints at t. The slot succeeds with
/// probability (1 - loss)^2 outside disruption windows; on success both
/// ledgers receive the identical record, otherwise neither changes.
ComparisonTransaction attempt_comparison(Ledgers& ledgers, const Link& link, double t, std::mt19937_64& rng,
                                         const DisplayedOffsetFn& displayed_offset, double measurement_noise);

struct OffsetEdge {
    std::string a;
    std::string b;
    double offset = 0.0;  // a - b
    double uncertainty = 0.0;
    double rendezvous_epoch = 0.0;

    friend bool operator==(const OffsetEdge&, const OffsetEdge&) = default;
};

class OffsetGraph {
public:
    void add_node(const std::string& id);
    void add_edge(OffsetEdge edge);
    static OffsetGraph from_ledgers(const Ledgers& ledgers);

    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::vector<OffsetEdge>& edges() const { return edges_; }
    bool has_node(const std::string& id) const;
    /// Most recent edge between x and y, oriented so offset = x - y.
    std::optional<OffsetEdge> latest_edge(const std::string& x, const std::string& y) const;

private:
    std::vector<std::string> nodes_;
    std::vector<OffsetEdge> edges_;
};

struct OffsetEstimate {
    double offset = 0.0;  // displayed_a - displayed_b
    double uncertainty = 0.0;
    std::vector<std::string> path;
};

/// Minimum-variance path between a and b where each edge contributes
/// u^2 + ((now - epoch) * staleness_rate)^2. Offsets compose by signed sum.
/// std::nullopt means the two clocks have no measured relationship.
std::optional<OffsetEstimate> query_offset(const OffsetGraph& g, const std::string& a, const std::string& b, double now,
                                           double staleness_rate);

/// Signed sum of offsets around a closed cycle using the latest edge of each
/// hop. The first node may be repeated at the end. Throws InputError on a
/// missing edge.
double cycle_residual(const OffsetGraph& g, const std::vector<std::string>& cycle);

/// All node triangles that have an edge on every side, in lexicographic order.
std::vector<std::vector<std::string>> triangles(const OffsetGraph& g);

/// Snapshot: CSV header then one edge per line, numbers to 18 significant digits.
void write_snapshot(std::ostream& out, const OffsetGraph& g);
OffsetGraph read_snapshot(std::istream& in);

struct QuerySample {
    double epoch = 0.0;
    std::string node;
    std::optional<double> residual;  // true - estimate; empty when no relation
};

struct TransactOptions {
    bool record_trace = true;
    bool audit_every_event = false;
};

struct TransactRunResult {
    Ledgers ledgers;
    OffsetGraph graph;
    std::vector<TraceEvent> trace;
    std::vector<QuerySample> queries;
    std::size_t attempts = 0;
    std::size_t commits = 0;
    std::size_t audit_violations = 0;
};

/// Every link attempts a comparison each transact.comparison_interval; at each
/// epoch every dependent queries its offset to the first authority.
TransactRunResult simulate_transactional(const Scenario& scenario, const Truth& truth, std::uint64_t seed,
                                         const TransactOptions& options = {});

}  // namespace cislunar
