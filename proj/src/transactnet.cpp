#include "cislunar/transactnet.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <set>

#include "cislunar/csv.hpp"
#include "cislunar/errors.hpp"

namespace cislunar {

std::string to_string(TransactionState s) {
    switch (s) {
        case TransactionState::proposed: return "proposed";
        case TransactionState::committed: return "committed";
        case TransactionState::aborted: return "aborted";
    }
    return "proposed";
}

void Ledgers::add_node(const std::string& id) {
    ledgers_.try_emplace(id);
}

const std::map<std::uint64_t, LedgerRecord>& Ledgers::of(const std::string& id) const {
    static const std::map<std::uint64_t, LedgerRecord> empty;
    auto it = ledgers_.find(id);
    return it == ledgers_.end() ? empty : it->second;
}

std::size_t Ledgers::total_records() const {
    std::size_t n = 0;
    for (const auto& [id, ledger] : ledgers_) n += ledger.size();
    return n;
}

void Ledgers::commit(const LedgerRecord& record) {
    if (record.a == record.b) throw InputError("a comparison needs two distinct participants");
    auto& left = ledgers_[record.a];
    auto& right = ledgers_[record.b];
    if (left.count(record.transaction) || right.count(record.transaction)) {
        throw InputError("transaction " + std::to_string(record.transaction) + " already recorded");
    }
    left.emplace(record.transaction, record);
    right.emplace(record.transaction, record);
}

std::vector<std::uint64_t> audit_atomicity(const Ledgers& ledgers) {
    std::set<std::uint64_t> bad;
    for (const auto& [node, ledger] : ledgers.all()) {
        for (const auto& [id, record] : ledger) {
            if (record.a != node && record.b != node) {
                bad.insert(id);
                continue;
            }
            const std::string& other = record.a == node ? record.b : record.a;
            const auto& counterpart = ledgers.of(other);
            auto it = counterpart.find(id);
            if (it == counterpart.end() || !(it->second == record)) bad.insert(id);
        }
    }
    return {bad.begin(), bad.end()};
}

ComparisonTransaction attempt_comparison(Ledgers& ledgers, const Link& link, double t, std::mt19937_64& rng,
                                         const DisplayedOffsetFn& displayed_offset, double measurement_noise) {
    ComparisonTransaction txn;
    txn.id = ledgers.next_transaction_id();
    txn.a = link.a;
    txn.b = link.b;
    txn.rendezvous_epoch = t;

    const double keep = 1.0 - link.loss_probability;
    std::bernoulli_distribution slot(keep * keep);
    if (link.disrupted(t) || !slot(rng)) {
        txn.state = TransactionState::aborted;
        return txn;
    }

    // Light time is removed symmetrically inside the slot; what asymmetry
    // remains biases the reading by half and is carried in the uncertainty.
    std::normal_distribution<double> noise(0.0, 1.0);
    const double half_asymmetry = 0.5 * link.asymmetry;
    txn.committed_offset = displayed_offset(link.a, t) - displayed_offset(link.b, t) + half_asymmetry +
                           measurement_noise * noise(rng);
    txn.uncertainty = std::hypot(measurement_noise, half_asymmetry);
    txn.state = TransactionState::committed;
    ledgers.commit({txn.id, txn.a, txn.b, txn.committed_offset, txn.uncertainty, txn.rendezvous_epoch});
    return txn;
}

void OffsetGraph::add_node(const std::string& id) {
    if (!has_node(id)) nodes_.push_back(id);
}

bool OffsetGraph::has_node(const std::string& id) const {
    return std::find(nodes_.begin(), nodes_.end(), id) != nodes_.end();
}

void OffsetGraph::add_edge(OffsetEdge edge) {
    if (edge.a == edge.b) throw InputError("offset edge endpoints must differ");
    add_node(edge.a);
    add_node(edge.b);
    edges_.push_back(std::move(edge));
}

OffsetGraph OffsetGraph::from_ledgers(const Ledgers& ledgers) {
    OffsetGraph g;
    std::map<std::uint64_t, const LedgerRecord*> records;
    for (const auto& [node, ledger] : ledgers.all()) {
        g.add_node(node);
        for (const auto& [id, record] : ledger) records.emplace(id, &record);
    }
    for (const auto& [id, record] : records) {
        g.add_edge({record->a, record->b, record->offset, record->uncertainty, record->rendezvous_epoch});
    }
    return g;
}

std::optional<OffsetEdge> OffsetGraph::latest_edge(const std::string& x, const std::string& y) const {
    std::optional<OffsetEdge> best;
    for (const auto& e : edges_) {
        const bool forward = e.a == x && e.b == y;
        const bool backward = e.a == y && e.b == x;
        if (!forward && !backward) continue;
        if (best && e.rendezvous_epoch < best->rendezvous_epoch) continue;
        best = forward ? e : OffsetEdge{x, y, -e.offset, e.uncertainty, e.rendezvous_epoch};
    }
    return best;
}

namespace {

std::optional<OffsetEstimate> shortest_path(const OffsetGraph& g, const std::string& source, const std::string& target,
                                            double now, double staleness_rate) {
    const auto& nodes = g.nodes();
    auto index = [&](const std::string& id) -> std::size_t {
        return static_cast<std::size_t>(std::find(nodes.begin(), nodes.end(), id) - nodes.begin());
    };
    const std::size_t n = nodes.size();
    const std::size_t s = index(source);
    const std::size_t t = index(target);
    if (s == n || t == n) return std::nullopt;

    struct Arc {
        std::size_t to;
        double variance;
        double offset;  // from - to
    };
    std::vector<std::vector<Arc>> adjacency(n);
    for (const auto& e : g.edges()) {
        const double stale = (now - e.rendezvous_epoch) * staleness_rate;
        const double variance = e.uncertainty * e.uncertainty + stale * stale;
        const std::size_t ia = index(e.a);
        const std::size_t ib = index(e.b);
        adjacency[ia].push_back({ib, variance, e.offset});
        adjacency[ib].push_back({ia, variance, -e.offset});
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, inf);
    std::vector<std::size_t> parent(n, n);
    std::vector<double> parent_offset(n, 0.0);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;
    dist[s] = 0.0;
    frontier.push({0.0, s});
    while (!frontier.empty()) {
        const auto [d, u] = frontier.top();
        frontier.pop();
        if (d > dist[u]) continue;
        if (u == t) break;
        for (const auto& arc : adjacency[u]) {
            const double nd = d + arc.variance;
            if (nd < dist[arc.to]) {
                dist[arc.to] = nd;
                parent[arc.to] = u;
                parent_offset[arc.to] = arc.offset;
                frontier.push({nd, arc.to});
            }
        }
    }
    if (dist[t] == inf) return std::nullopt;

    std::vector<std::size_t> hops;
    for (std::size_t v = t; v != s; v = parent[v]) hops.push_back(v);
    std::reverse(hops.begin(), hops.end());
    OffsetEstimate est;
    est.path.push_back(source);
    for (const auto v : hops) {
        est.offset += parent_offset[v];
        est.path.push_back(nodes[v]);
    }
    est.uncertainty = std::sqrt(dist[t]);
    return est;
}

}  // namespace

std::optional<OffsetEstimate> query_offset(const OffsetGraph& g, const std::string& a, const std::string& b, double now,
                                           double staleness_rate) {
    if (a == b) {
        if (!g.has_node(a)) return std::nullopt;
        return OffsetEstimate{0.0, 0.0, {a}};
    }
    // Always search from the lexicographically smaller id so that swapping the
    // arguments flips the sign exactly.
    if (b < a) {
        auto reversed = shortest_path(g, b, a, now, staleness_rate);
        if (!reversed) return std::nullopt;
        reversed->offset = -reversed->offset;
        std::reverse(reversed->path.begin(), reversed->path.end());
        return reversed;
    }
    return shortest_path(g, a, b, now, staleness_rate);
}

double cycle_residual(const OffsetGraph& g, const std::vector<std::string>& cycle) {
    std::vector<std::string> closed = cycle;
    if (closed.size() < 2) throw InputError("a cycle needs at least two nodes");
    if (closed.front() != closed.back()) closed.push_back(closed.front());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < closed.size(); ++i) {
        const auto edge = g.latest_edge(closed[i], closed[i + 1]);
        if (!edge) throw InputError("cycle hop " + closed[i] + "-" + closed[i + 1] + " has no edge");
        sum += edge->offset;
    }
    return sum;
}

std::vector<std::vector<std::string>> triangles(const OffsetGraph& g) {
    std::vector<std::string> ids = g.nodes();
    std::sort(ids.begin(), ids.end());
    std::set<std::pair<std::string, std::string>> adjacent;
    for (const auto& e : g.edges()) {
        adjacent.insert({std::min(e.a, e.b), std::max(e.a, e.b)});
    }
    auto linked = [&](const std::string& x, const std::string& y) { return adjacent.count({x, y}) > 0; };
    std::vector<std::vector<std::string>> out;
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j)
            for (std::size_t k = j + 1; k < ids.size(); ++k)
                if (linked(ids[i], ids[j]) && linked(ids[j], ids[k]) && linked(ids[i], ids[k]))
                    out.push_back({ids[i], ids[j], ids[k]});
    return out;
}

void write_snapshot(std::ostream& out, const OffsetGraph& g) {
    out << "a,b,offset,uncertainty,rendezvous_epoch\n";
    for (const auto& e : g.edges()) {
        out << csv::row({e.a, e.b, csv::number(e.offset), csv::number(e.uncertainty), csv::number(e.rendezvous_epoch)})
            << '\n';
    }
}

OffsetGraph read_snapshot(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || csv::split(line) != std::vector<std::string>{"a", "b", "offset", "uncertainty",
                                                                                  "rendezvous_epoch"}) {
        throw InputError("offset-graph snapshot: missing or wrong header");
    }
    OffsetGraph g;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 5) throw InputError("offset-graph snapshot line " + std::to_string(line_no) + ": need 5 fields");
        try {
            g.add_edge({f[0], f[1], std::stod(f[2]), std::stod(f[3]), std::stod(f[4])});
        } catch (const std::logic_error&) {
            throw InputError("offset-graph snapshot line " + std::to_string(line_no) + ": bad number");
        }
    }
    return g;
}

TransactRunResult simulate_transactional(const Scenario& scenario, const Truth& truth, std::uint64_t seed,
                                         const TransactOptions& options) {
    TransactRunResult result;
    std::mt19937_64 rng(seed);
    for (const auto& node : scenario.topology.nodes) result.ledgers.add_node(node.id);

    const DisplayedOffsetFn displayed = [&](const std::string& id, double t) {
        return truth.at(truth.clocks[truth.index_of(id)].displayed_offset, t);
    };
    auto trace = [&](TraceEvent ev) {
        if (options.record_trace) result.trace.push_back(std::move(ev));
    };

    const auto authorities = scenario.topology.ids_with_role(Role::authority);
    const auto dependents = scenario.topology.ids_with_role(Role::dependent);
    const std::string reference = !authorities.empty() ? authorities.front()
                                  : !scenario.topology.nodes.empty() ? scenario.topology.nodes.front().id
                                                                      : std::string();
    const double end = truth.epochs.back();
    const double interval = scenario.transact.comparison_interval;

    std::size_t next_epoch = 0;
    double next_comparison = 0.0;
    while (next_epoch < truth.epochs.size() || next_comparison <= end) {
        const bool comparisons_first = next_comparison <= end &&
                                       (next_epoch >= truth.epochs.size() || next_comparison <= truth.epochs[next_epoch]);
        if (comparisons_first) {
            const double t = next_comparison;
            for (const auto& link : scenario.topology.links) {
                const auto txn = attempt_comparison(result.ledgers, link, t, rng, displayed,
                                                    scenario.transact.measurement_noise);
                ++result.attempts;
                const bool committed = txn.state == TransactionState::committed;
                if (committed) {
                    ++result.commits;
                    const double truth_offset = displayed(link.a, t) - displayed(link.b, t);
                    trace({t, link.a + "|" + link.b, "commit", txn.committed_offset, truth_offset - txn.committed_offset,
                           {}});
                } else {
                    trace({t, link.a + "|" + link.b, "abort", {}, {}, {}});
                }
                if (options.audit_every_event) result.audit_violations += audit_atomicity(result.ledgers).size();
            }
            next_comparison = interval * std::round(t / interval + 1.0);
            continue;
        }

        const double t = truth.epochs[next_epoch++];
        if (reference.empty()) continue;
        const OffsetGraph graph = OffsetGraph::from_ledgers(result.ledgers);
        for (const auto& dep : dependents) {
            const auto est = query_offset(graph, dep, reference, t, scenario.transact.staleness_rate);
            QuerySample q{t, dep, std::nullopt};
            if (est) {
                q.residual = (displayed(dep, t) - displayed(reference, t)) - est->offset;
                trace({t, dep, "query", est->offset, q.residual, {}});
            } else {
                trace({t, dep, "no_relation", {}, {}, {}});
            }
            result.queries.push_back(std::move(q));
        }
    }
    result.audit_violations += audit_atomicity(result.ledgers).size();
    result.graph = OffsetGraph::from_ledgers(result.ledgers);
    return result;
}

}  // namespace cislunar
