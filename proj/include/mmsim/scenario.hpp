#ifndef MMSIM_SCENARIO_HPP
#define MMSIM_SCENARIO_HPP

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mmsim/metrics.hpp"
#include "mmsim/sim.hpp"

namespace mmsim {

struct GraphNodeConfig {
    NodeId id = kNoNode;
    NodeKind kind = NodeKind::InteriorRouter;
};

struct GraphLinkConfig {
    NodeId a = kNoNode;
    NodeId b = kNoNode;
    double delay_s = 0.010;
    double bandwidth_bps = 10e6;
};

struct TopologyConfig {
    enum class Kind { Tree, Graph } kind = Kind::Tree;
    TreeSpec tree;
    std::vector<GraphNodeConfig> nodes;
    std::vector<GraphLinkConfig> links;
};

struct TrafficConfig {
    double interval_s = 0.010;
    std::uint32_t size_bytes = 512;
    double start_s = 0.5;
    double stop_s = -1.0;  // auto: t_end - 1.0
};

struct CellsConfig {
    enum class Mode { Linear, Clique, Explicit } mode = Mode::Linear;
    std::vector<std::pair<NodeId, NodeId>> adjacency;
};

struct MobilityConfig {
    std::vector<MobilityEntry> script;
    bool random_walk = false;
    double walk_start_s = 2.0;
    double walk_dwell_s = 1.0;
    int walk_steps = 0;
    HandoverKind walk_kind = HandoverKind::Proactive;
};

struct ScenarioConfig {
    std::string name;  // empty: derived from scheme/delay/hops
    std::string scheme = "mnm";
    TopologyConfig topology;
    TrafficConfig traffic;
    MobilityConfig mobility;
    CellsConfig cells;
    SimParams timers;  // prefix filled from m_subnet_sla
    std::uint16_t m_subnet_sla = 1;
    bool delayed_leave_auto = true;  // 2x max intra-CAR-set one-way delay
    NodeId rp = kNoNode;             // forced root; kNoNode: elect among candidates
    std::vector<NodeId> rp_candidates;  // empty: all border routers
    NodeId anchor = kNoNode;            // CIP/HAWAII gateway; auto: elected RP
    NodeId ingress = kNoNode;           // BR the correspondent attaches to; auto: lowest BR
    NodeId initial_ar = kNoNode;        // auto: lowest AR
    double attach_time_s = 0.0;
    double ingress_link_delay_s = -1.0;  // auto: representative topology delay
    std::uint64_t seed = 1;
    double t_end_s = 10.0;
};

// Strict parser: unknown keys are rejected, errors carry the field path.
ScenarioConfig parse_config(const std::string& json_text);

// Canonical JSON of the resolved config; hashed for CSV provenance.
std::string config_to_json(const ScenarioConfig& cfg);
std::uint64_t config_hash(const ScenarioConfig& cfg);

struct RunResult {
    std::string scenario_id;
    std::string scheme;
    double link_delay_ms = 0.0;
    int old_hops = 0;
    int new_hops = 0;
    MetricsReport report;
    ReceiveTrace trace;
    std::string mobile_rcoa;  // colon-hex
    std::string mobile_mcoa;
    std::uint64_t seed = 0;
    std::uint64_t hash = 0;
};

// Builds the simulation (topology + correspondent + mobile + scheme), runs
// it to t_end and assembles the metrics report.
RunResult run_scenario(const ScenarioConfig& cfg);

struct SweepSpec {
    ScenarioConfig base;
    std::vector<std::string> schemes{"mnm", "cip", "hawaii"};
    std::vector<double> link_delays_s{0.010, 0.005, 0.002};
    std::vector<std::pair<int, int>> hop_pairs{{3, 3}, {3, 2}, {2, 2}, {2, 1}};
    int prefix_hops = 1;  // root -> fork distance in generated fork graphs
    double bandwidth_bps = 10e6;
    double handover_time_s = 2.0;
};

SweepSpec parse_sweep(const std::string& json_text);

// Explicit graph reproducing a fork scenario: BR root, `prefix_hops` chain to
// the fork, then two branches of old/new hops ending in access routers.
// The two ARs are radio-adjacent so proactive handover is legal.
ScenarioConfig make_fork_scenario(const SweepSpec& spec, const std::string& scheme,
                                  double link_delay_s, int old_hops, int new_hops);

// One run per (scheme, link delay, hop pair), rows in deterministic sweep
// order regardless of worker count.
std::vector<RunResult> sweep(const SweepSpec& spec, unsigned jobs = 1);

void write_csv_header(std::ostream& out, std::uint64_t seed);
void write_csv_row(std::ostream& out, const RunResult& row);
void write_trace_csv(std::ostream& out, const ReceiveTrace& trace);
// Trace plus the mobile's addresses as a commented preamble.
void write_trace_csv(std::ostream& out, const RunResult& result);

}  // namespace mmsim

#endif  // MMSIM_SCENARIO_HPP
