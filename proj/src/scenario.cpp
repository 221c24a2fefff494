#include "mmsim/scenario.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <set>
#include <thread>

#include "json.hpp"
#include "mmsim/baselines.hpp"
#include "mmsim/mnm.hpp"
#include "mmsim/multicast.hpp"

namespace mmsim {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ValidationError(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (allowed.count(key) == 0) throw ValidationError(path + "." + key, "unknown key");
    }
}

double get_positive(const json& obj, const std::string& path, const std::string& key,
                    double fallback) {
    if (!obj.contains(key)) return fallback;
    double v = obj.at(key).get<double>();
    if (v <= 0.0) throw ValidationError(path + "." + key, "must be > 0");
    return v;
}

double get_non_negative(const json& obj, const std::string& path, const std::string& key,
                        double fallback) {
    if (!obj.contains(key)) return fallback;
    double v = obj.at(key).get<double>();
    if (v < 0.0) throw ValidationError(path + "." + key, "must be >= 0");
    return v;
}

NodeKind node_kind_from_string(const std::string& s, const std::string& path) {
    if (s == "border_router") return NodeKind::BorderRouter;
    if (s == "interior_router") return NodeKind::InteriorRouter;
    if (s == "access_router") return NodeKind::AccessRouter;
    if (s == "mobile_node") return NodeKind::MobileNode;
    if (s == "correspondent_host") return NodeKind::CorrespondentHost;
    throw ValidationError(path, "unknown node kind '" + s + "'");
}

HandoverKind handover_kind_from_string(const std::string& s, const std::string& path) {
    if (s == "proactive") return HandoverKind::Proactive;
    if (s == "reactive") return HandoverKind::Reactive;
    throw ValidationError(path, "unknown handover kind '" + s + "'");
}

TopologyConfig parse_topology(const json& obj) {
    require_keys(obj, "topology", {"tree", "graph"});
    TopologyConfig cfg;
    if (obj.contains("tree") == obj.contains("graph"))
        throw ValidationError("topology", "exactly one of 'tree' or 'graph' required");
    if (obj.contains("tree")) {
        const json& t = obj.at("tree");
        require_keys(t, "topology.tree", {"depth", "fanout", "link_delay_ms", "bandwidth_mbps"});
        cfg.kind = TopologyConfig::Kind::Tree;
        cfg.tree.depth = t.value("depth", 3);
        cfg.tree.fanout = t.value("fanout", 2);
        if (cfg.tree.depth < 1) throw ValidationError("topology.tree.depth", "must be >= 1");
        if (cfg.tree.fanout < 1) throw ValidationError("topology.tree.fanout", "must be >= 1");
        cfg.tree.link_delay_s = get_positive(t, "topology.tree", "link_delay_ms", 10.0) / 1e3;
        cfg.tree.bandwidth_bps = get_positive(t, "topology.tree", "bandwidth_mbps", 10.0) * 1e6;
    } else {
        const json& g = obj.at("graph");
        require_keys(g, "topology.graph", {"nodes", "links"});
        cfg.kind = TopologyConfig::Kind::Graph;
        for (const json& n : g.at("nodes")) {
            require_keys(n, "topology.graph.nodes[]", {"id", "kind"});
            GraphNodeConfig node;
            node.id = n.at("id").get<NodeId>();
            node.kind = node_kind_from_string(n.at("kind").get<std::string>(),
                                              "topology.graph.nodes[].kind");
            cfg.nodes.push_back(node);
        }
        for (const json& l : g.at("links")) {
            require_keys(l, "topology.graph.links[]", {"a", "b", "delay_ms", "bandwidth_mbps"});
            GraphLinkConfig link;
            link.a = l.at("a").get<NodeId>();
            link.b = l.at("b").get<NodeId>();
            link.delay_s = get_positive(l, "topology.graph.links[]", "delay_ms", 10.0) / 1e3;
            link.bandwidth_bps =
                get_positive(l, "topology.graph.links[]", "bandwidth_mbps", 10.0) * 1e6;
            cfg.links.push_back(link);
        }
    }
    return cfg;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }

    require_keys(root, "config",
                 {"name", "scheme", "topology", "traffic", "mobility", "cells", "timers",
                  "wireless_delay_ms", "hawaii_buffer", "mnm_car_buffer", "rp", "rp_candidates",
                  "anchor", "ingress", "initial_ar", "attach_time_s", "ingress_link_delay_ms",
                  "m_subnet_sla", "seed", "t_end_s"});

    ScenarioConfig cfg;
    cfg.name = root.value("name", std::string{});
    cfg.scheme = root.value("scheme", std::string{"mnm"});
    if (cfg.scheme != "mnm" && cfg.scheme != "cip" && cfg.scheme != "hawaii")
        throw ValidationError("scheme", "unknown scheme '" + cfg.scheme + "'");

    if (!root.contains("topology")) throw ValidationError("topology", "required");
    cfg.topology = parse_topology(root.at("topology"));

    if (root.contains("traffic")) {
        const json& t = root.at("traffic");
        require_keys(t, "traffic", {"interval_ms", "size_bytes", "start_s", "stop_s"});
        cfg.traffic.interval_s = get_positive(t, "traffic", "interval_ms", 10.0) / 1e3;
        cfg.traffic.size_bytes =
            static_cast<std::uint32_t>(get_positive(t, "traffic", "size_bytes", 512.0));
        cfg.traffic.start_s = get_non_negative(t, "traffic", "start_s", 0.5);
        if (t.contains("stop_s")) cfg.traffic.stop_s = t.at("stop_s").get<double>();
    }

    if (root.contains("mobility")) {
        const json& m = root.at("mobility");
        require_keys(m, "mobility", {"script", "random_walk"});
        if (m.contains("script") && m.contains("random_walk"))
            throw ValidationError("mobility", "give either 'script' or 'random_walk'");
        if (m.contains("script")) {
            for (const json& e : m.at("script")) {
                require_keys(e, "mobility.script[]", {"time_s", "from_ar", "to_ar", "kind"});
                MobilityEntry entry;
                entry.time_s = e.at("time_s").get<double>();
                entry.ar_from = e.at("from_ar").get<NodeId>();
                entry.ar_to = e.at("to_ar").get<NodeId>();
                entry.kind = handover_kind_from_string(e.value("kind", std::string{"proactive"}),
                                                       "mobility.script[].kind");
                cfg.mobility.script.push_back(entry);
            }
        }
        if (m.contains("random_walk")) {
            const json& w = m.at("random_walk");
            require_keys(w, "mobility.random_walk", {"start_s", "dwell_s", "steps", "kind"});
            cfg.mobility.random_walk = true;
            cfg.mobility.walk_start_s = get_positive(w, "mobility.random_walk", "start_s", 2.0);
            cfg.mobility.walk_dwell_s = get_positive(w, "mobility.random_walk", "dwell_s", 1.0);
            cfg.mobility.walk_steps = w.value("steps", 1);
            if (cfg.mobility.walk_steps < 0)
                throw ValidationError("mobility.random_walk.steps", "must be >= 0");
            cfg.mobility.walk_kind = handover_kind_from_string(
                w.value("kind", std::string{"proactive"}), "mobility.random_walk.kind");
        }
    }

    if (root.contains("cells")) {
        const json& c = root.at("cells");
        require_keys(c, "cells", {"mode", "adjacency"});
        const std::string mode = c.value("mode", std::string{"linear"});
        if (mode == "linear") {
            cfg.cells.mode = CellsConfig::Mode::Linear;
        } else if (mode == "clique") {
            cfg.cells.mode = CellsConfig::Mode::Clique;
        } else if (mode == "explicit") {
            cfg.cells.mode = CellsConfig::Mode::Explicit;
            if (!c.contains("adjacency"))
                throw ValidationError("cells.adjacency", "required for explicit cells");
            for (const json& pair : c.at("adjacency")) {
                if (!pair.is_array() || pair.size() != 2)
                    throw ValidationError("cells.adjacency", "entries must be [ar_a, ar_b]");
                cfg.cells.adjacency.emplace_back(pair[0].get<NodeId>(), pair[1].get<NodeId>());
            }
        } else {
            throw ValidationError("cells.mode", "unknown mode '" + mode + "'");
        }
    }

    if (root.contains("timers")) {
        const json& t = root.at("timers");
        require_keys(t, "timers",
                     {"prune_timeout_s", "refresh_s", "purge_s", "delayed_leave_s", "overlap_s",
                      "semisoft_window_s", "registration_delay_s", "expiry_scan_s"});
        cfg.timers.prune_timeout_s = get_positive(t, "timers", "prune_timeout_s", 1.0);
        cfg.timers.refresh_period_s = get_positive(t, "timers", "refresh_s", 0.5);
        cfg.timers.purge_period_s = get_positive(t, "timers", "purge_s", 0.5);
        cfg.timers.expiry_scan_s = get_positive(t, "timers", "expiry_scan_s", 0.1);
        if (t.contains("delayed_leave_s")) {
            cfg.timers.delayed_leave_s = get_non_negative(t, "timers", "delayed_leave_s", 0.05);
            cfg.delayed_leave_auto = false;
        }
        cfg.timers.overlap_s = get_non_negative(t, "timers", "overlap_s", 1.0);
        cfg.timers.semisoft_window_s = get_non_negative(t, "timers", "semisoft_window_s", 0.2);
        cfg.timers.registration_delay_s =
            get_non_negative(t, "timers", "registration_delay_s", 0.1);
    }

    if (root.contains("wireless_delay_ms"))
        cfg.timers.wireless_delay_s = get_positive(root, "config", "wireless_delay_ms", 2.0) / 1e3;
    if (root.contains("hawaii_buffer")) {
        long long cap = root.at("hawaii_buffer").get<long long>();
        if (cap < 1) throw ValidationError("hawaii_buffer", "must be >= 1");
        cfg.timers.hawaii_buffer_capacity = static_cast<std::size_t>(cap);
    }
    if (root.contains("mnm_car_buffer")) {
        long long cap = root.at("mnm_car_buffer").get<long long>();
        if (cap < 0) throw ValidationError("mnm_car_buffer", "must be >= 0");
        cfg.timers.car_buffer_capacity = static_cast<std::size_t>(cap);
    }
    if (root.contains("rp")) cfg.rp = root.at("rp").get<NodeId>();
    if (root.contains("rp_candidates"))
        for (const json& c : root.at("rp_candidates")) cfg.rp_candidates.push_back(c.get<NodeId>());
    if (root.contains("anchor")) cfg.anchor = root.at("anchor").get<NodeId>();
    if (root.contains("ingress")) cfg.ingress = root.at("ingress").get<NodeId>();
    if (root.contains("initial_ar")) cfg.initial_ar = root.at("initial_ar").get<NodeId>();
    cfg.attach_time_s = get_non_negative(root, "config", "attach_time_s", 0.0);
    if (root.contains("ingress_link_delay_ms"))
        cfg.ingress_link_delay_s =
            get_positive(root, "config", "ingress_link_delay_ms", 10.0) / 1e3;
    if (root.contains("m_subnet_sla"))
        cfg.m_subnet_sla = root.at("m_subnet_sla").get<std::uint16_t>();
    if (root.contains("seed")) cfg.seed = root.at("seed").get<std::uint64_t>();
    cfg.t_end_s = get_positive(root, "config", "t_end_s", 10.0);

    if (cfg.traffic.stop_s < 0.0) cfg.traffic.stop_s = cfg.t_end_s - 1.0;
    if (cfg.traffic.stop_s <= cfg.traffic.start_s)
        throw ValidationError("traffic.stop_s", "must be after traffic.start_s");
    if (cfg.traffic.start_s < cfg.attach_time_s)
        throw ValidationError("traffic.start_s", "traffic may not start before the mobile attaches");
    cfg.timers.prefix = make_m_subnet_prefix(cfg.m_subnet_sla);
    return cfg;
}

std::string config_to_json(const ScenarioConfig& cfg) {
    json root;
    root["name"] = cfg.name;
    root["scheme"] = cfg.scheme;
    if (cfg.topology.kind == TopologyConfig::Kind::Tree) {
        root["topology"]["tree"] = {{"depth", cfg.topology.tree.depth},
                                    {"fanout", cfg.topology.tree.fanout},
                                    {"link_delay_ms", cfg.topology.tree.link_delay_s * 1e3},
                                    {"bandwidth_mbps", cfg.topology.tree.bandwidth_bps / 1e6}};
    } else {
        json nodes = json::array();
        for (const auto& n : cfg.topology.nodes)
            nodes.push_back({{"id", n.id}, {"kind", to_string(n.kind)}});
        json links = json::array();
        for (const auto& l : cfg.topology.links)
            links.push_back({{"a", l.a},
                             {"b", l.b},
                             {"delay_ms", l.delay_s * 1e3},
                             {"bandwidth_mbps", l.bandwidth_bps / 1e6}});
        root["topology"]["graph"] = {{"nodes", nodes}, {"links", links}};
    }
    root["traffic"] = {{"interval_ms", cfg.traffic.interval_s * 1e3},
                       {"size_bytes", cfg.traffic.size_bytes},
                       {"start_s", cfg.traffic.start_s},
                       {"stop_s", cfg.traffic.stop_s}};
    if (cfg.mobility.random_walk) {
        root["mobility"]["random_walk"] = {
            {"start_s", cfg.mobility.walk_start_s},
            {"dwell_s", cfg.mobility.walk_dwell_s},
            {"steps", cfg.mobility.walk_steps},
            {"kind", cfg.mobility.walk_kind == HandoverKind::Proactive ? "proactive" : "reactive"}};
    } else {
        json script = json::array();
        for (const auto& e : cfg.mobility.script)
            script.push_back(
                {{"time_s", e.time_s},
                 {"from_ar", e.ar_from},
                 {"to_ar", e.ar_to},
                 {"kind", e.kind == HandoverKind::Proactive ? "proactive" : "reactive"}});
        root["mobility"]["script"] = script;
    }
    switch (cfg.cells.mode) {
        case CellsConfig::Mode::Linear: root["cells"]["mode"] = "linear"; break;
        case CellsConfig::Mode::Clique: root["cells"]["mode"] = "clique"; break;
        case CellsConfig::Mode::Explicit: {
            root["cells"]["mode"] = "explicit";
            json adj = json::array();
            for (const auto& [a, b] : cfg.cells.adjacency) adj.push_back({a, b});
            root["cells"]["adjacency"] = adj;
            break;
        }
    }
    root["timers"] = {{"prune_timeout_s", cfg.timers.prune_timeout_s},
                      {"refresh_s", cfg.timers.refresh_period_s},
                      {"purge_s", cfg.timers.purge_period_s},
                      {"delayed_leave_s", cfg.delayed_leave_auto ? -1.0 : cfg.timers.delayed_leave_s},
                      {"overlap_s", cfg.timers.overlap_s},
                      {"semisoft_window_s", cfg.timers.semisoft_window_s},
                      {"registration_delay_s", cfg.timers.registration_delay_s},
                      {"expiry_scan_s", cfg.timers.expiry_scan_s}};
    root["wireless_delay_ms"] = cfg.timers.wireless_delay_s * 1e3;
    root["hawaii_buffer"] = cfg.timers.hawaii_buffer_capacity;
    root["mnm_car_buffer"] = cfg.timers.car_buffer_capacity;
    root["rp"] = cfg.rp == kNoNode ? -1 : static_cast<long long>(cfg.rp);
    root["rp_candidates"] = cfg.rp_candidates;
    root["anchor"] = cfg.anchor == kNoNode ? -1 : static_cast<long long>(cfg.anchor);
    root["ingress"] = cfg.ingress == kNoNode ? -1 : static_cast<long long>(cfg.ingress);
    root["initial_ar"] = cfg.initial_ar == kNoNode ? -1 : static_cast<long long>(cfg.initial_ar);
    root["attach_time_s"] = cfg.attach_time_s;
    root["ingress_link_delay_ms"] =
        cfg.ingress_link_delay_s < 0 ? -1.0 : cfg.ingress_link_delay_s * 1e3;
    root["m_subnet_sla"] = cfg.m_subnet_sla;
    root["seed"] = cfg.seed;
    root["t_end_s"] = cfg.t_end_s;
    return root.dump();
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
    const std::string text = config_to_json(cfg);
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

Topology build_topology(const ScenarioConfig& cfg) {
    if (cfg.topology.kind == TopologyConfig::Kind::Tree) return build_tree(cfg.topology.tree);

    Topology topo;
    std::vector<GraphNodeConfig> nodes = cfg.topology.nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id != i)
            throw ValidationError("topology.graph.nodes",
                                  "node ids must be dense 0..N-1 in order");
        topo.add_node(nodes[i].kind);
    }
    for (const auto& l : cfg.topology.links)
        topo.add_link(l.a, l.b, l.delay_s, l.bandwidth_bps);
    if (!topo.wired_connected())
        throw ValidationError("topology.graph", "wired graph must be connected");
    return topo;
}

double representative_link_delay(const ScenarioConfig& cfg) {
    if (cfg.topology.kind == TopologyConfig::Kind::Tree) return cfg.topology.tree.link_delay_s;
    return cfg.topology.links.empty() ? 0.010 : cfg.topology.links.front().delay_s;
}

double representative_bandwidth(const ScenarioConfig& cfg) {
    if (cfg.topology.kind == TopologyConfig::Kind::Tree) return cfg.topology.tree.bandwidth_bps;
    return cfg.topology.links.empty() ? 10e6 : cfg.topology.links.front().bandwidth_bps;
}

std::map<NodeId, std::set<NodeId>> build_radio_adjacency(const CellsConfig& cells,
                                                         const std::vector<NodeId>& ars) {
    std::map<NodeId, std::set<NodeId>> adj;
    switch (cells.mode) {
        case CellsConfig::Mode::Linear:
            for (std::size_t i = 0; i + 1 < ars.size(); ++i) {
                adj[ars[i]].insert(ars[i + 1]);
                adj[ars[i + 1]].insert(ars[i]);
            }
            break;
        case CellsConfig::Mode::Clique:
            for (NodeId a : ars)
                for (NodeId b : ars)
                    if (a != b) adj[a].insert(b);
            break;
        case CellsConfig::Mode::Explicit:
            for (const auto& [a, b] : cells.adjacency) {
                adj[a].insert(b);
                adj[b].insert(a);
            }
            break;
    }
    return adj;
}

std::vector<MobilityEntry> generate_random_walk(const ScenarioConfig& cfg, NodeId initial_ar,
                                                const std::map<NodeId, std::set<NodeId>>& adj) {
    std::vector<MobilityEntry> script;
    std::mt19937_64 rng(cfg.seed);
    NodeId current = initial_ar;
    for (int k = 0; k < cfg.mobility.walk_steps; ++k) {
        auto it = adj.find(current);
        if (it == adj.end() || it->second.empty())
            throw ValidationError("mobility.random_walk",
                                  "AR " + std::to_string(current) + " has no radio neighbors");
        std::vector<NodeId> choices(it->second.begin(), it->second.end());
        std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
        MobilityEntry e;
        e.time_s = cfg.mobility.walk_start_s + k * cfg.mobility.walk_dwell_s;
        e.ar_from = current;
        e.ar_to = choices[pick(rng)];
        e.kind = cfg.mobility.walk_kind;
        script.push_back(e);
        current = e.ar_to;
    }
    return script;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
    Topology topo = build_topology(cfg);

    const std::vector<NodeId> brs = topo.nodes_of_kind(NodeKind::BorderRouter);
    const std::vector<NodeId> ars = topo.nodes_of_kind(NodeKind::AccessRouter);
    if (brs.empty()) throw ValidationError("topology", "needs at least one border router");
    if (ars.empty()) throw ValidationError("topology", "needs at least one access router");

    const NodeId ingress = cfg.ingress == kNoNode ? brs.front() : cfg.ingress;
    const NodeId initial_ar = cfg.initial_ar == kNoNode ? ars.front() : cfg.initial_ar;
    if (topo.kind(ingress) != NodeKind::BorderRouter)
        throw ValidationError("ingress", "must be a border router");
    if (topo.kind(initial_ar) != NodeKind::AccessRouter)
        throw ValidationError("initial_ar", "must be an access router");

    NodeId rp;
    if (cfg.rp != kNoNode) {
        rp = cfg.rp;  // forced root, may be an interior router
        if (topo.kind(rp) == NodeKind::MobileNode || topo.kind(rp) == NodeKind::CorrespondentHost)
            throw ValidationError("rp", "must be a router");
    } else {
        RpConfig rp_cfg;
        rp_cfg.candidates = cfg.rp_candidates.empty() ? brs : cfg.rp_candidates;
        validate_rp_candidates(topo, rp_cfg.candidates);
        rp = elect_rp(rp_cfg);
    }
    const NodeId anchor = cfg.anchor == kNoNode ? rp : cfg.anchor;

    // Correspondent host wired to the ingress BR; the mobile has no wired links.
    const double cn_delay =
        cfg.ingress_link_delay_s > 0 ? cfg.ingress_link_delay_s : representative_link_delay(cfg);
    const NodeId cn = topo.add_node(NodeKind::CorrespondentHost);
    topo.add_link(cn, ingress, cn_delay, representative_bandwidth(cfg));
    const NodeId mn = topo.add_node(NodeKind::MobileNode);

    auto radio_adjacency = build_radio_adjacency(cfg.cells, ars);

    SimParams params = cfg.timers;
    if (cfg.delayed_leave_auto) {
        double worst = 0.0;
        for (const auto& [head, members] : radio_adjacency)
            for (NodeId m : members)
                worst = std::max(worst, path_prop_delay(topo, shortest_path(topo, head, m)));
        params.delayed_leave_s = std::max(2.0 * worst, 0.01);
    }

    Simulation sim(topo, params);
    sim.set_radio_adjacency(radio_adjacency);

    if (cfg.scheme == "mnm")
        sim.set_scheme(std::make_unique<MnmScheme>(sim, rp));
    else if (cfg.scheme == "cip")
        sim.set_scheme(std::make_unique<CipScheme>(sim, anchor));
    else
        sim.set_scheme(std::make_unique<HawaiiScheme>(sim, anchor));
    sim.scheme().start();

    sim.events().at(cfg.attach_time_s, [&sim, mn, initial_ar]() {
        sim.radio_attach(mn, initial_ar);
        sim.scheme().attach(mn, initial_ar);
    });

    // The first RCOA the registry hands out; the correspondent addresses it.
    const Address128 mobile_rcoa{params.prefix.bits, 1};
    sim.start_cbr(cn, mobile_rcoa, cfg.traffic.start_s, cfg.traffic.stop_s,
                  cfg.traffic.interval_s, cfg.traffic.size_bytes);

    std::vector<MobilityEntry> script = cfg.mobility.script;
    if (cfg.mobility.random_walk)
        script = generate_random_walk(cfg, initial_ar, radio_adjacency);
    sim.run_script(mn, script);

    sim.events().run_until(cfg.t_end_s);

    // ---- report assembly ---------------------------------------------------
    RunResult result;
    result.scheme = cfg.scheme;
    result.seed = cfg.seed;
    result.hash = config_hash(cfg);
    result.link_delay_ms = representative_link_delay(cfg) * 1e3;
    result.trace = sim.trace();

    const NodeId data_root = cfg.scheme == "mnm" ? rp : anchor;
    MetricsReport& report = result.report;
    const Counters& counters = sim.counters();
    report.emitted = counters.emitted;
    report.delivered_unique = counters.delivered_unique;
    report.drops_by_cause = counters.drops;
    report.replicated = counters.replicated;
    report.in_flight_at_end = counters.in_flight;
    report.hawaii_buffered = counters.hawaii_buffered;
    report.reactive_fallbacks = counters.reactive_fallbacks;
    report.delivery_ratio =
        counters.emitted == 0
            ? 1.0
            : static_cast<double>(counters.delivered_unique) / static_cast<double>(counters.emitted);

    double episode_start = 0.0;
    double episode_end = cfg.t_end_s;
    if (!sim.handovers().empty()) {
        const HandoverLog& first = sim.handovers().front();
        report.handoff = handoff_delay(sim.trace(), first);
        episode_start = first.trigger;
        episode_end = sim.last_attachment_change() + 2.0;
        const NodeId fork = fork_router(topo, data_root, first.ar_from, first.ar_to);
        result.old_hops = static_cast<int>(hop_count(shortest_path(topo, fork, first.ar_from)));
        result.new_hops = static_cast<int>(hop_count(shortest_path(topo, fork, first.ar_to)));
    }
    report.reorder_depth = reorder_depth(sim.trace());
    const ReorderEpisodeStats stats =
        reorder_duration_and_duplicates(sim.trace(), episode_start, episode_end);
    report.reorder_duration_s = stats.duration_s;
    report.duplicates = stats.duplicates;

    const MobileBinding* binding = sim.binding_by_mn(mn);
    const NodeId serving = binding != nullptr ? binding->serving_ar : initial_ar;
    report.routing_efficiency = routing_efficiency(topo, ingress, data_root, serving);
    if (binding != nullptr) {
        result.mobile_rcoa = binding->rcoa.to_string();
        result.mobile_mcoa = binding->mcoa.to_string();
    }

    if (!cfg.name.empty()) {
        result.scenario_id = cfg.name;
    } else {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s_%gms_%dx%d", cfg.scheme.c_str(),
                      result.link_delay_ms, result.old_hops, result.new_hops);
        result.scenario_id = buf;
    }
    return result;
}

SweepSpec parse_sweep(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("sweep spec is not valid JSON: ") + e.what());
    }
    require_keys(root, "sweep",
                 {"base", "schemes", "link_delays_ms", "hop_pairs", "prefix_hops",
                  "bandwidth_mbps", "handover_time_s"});
    SweepSpec spec;
    if (root.contains("base")) spec.base = parse_config(root.at("base").dump());
    if (root.contains("schemes")) {
        spec.schemes.clear();
        for (const json& s : root.at("schemes")) {
            const std::string name = s.get<std::string>();
            if (name != "mnm" && name != "cip" && name != "hawaii")
                throw ValidationError("sweep.schemes", "unknown scheme '" + name + "'");
            spec.schemes.push_back(name);
        }
    }
    if (root.contains("link_delays_ms")) {
        spec.link_delays_s.clear();
        for (const json& d : root.at("link_delays_ms")) {
            double v = d.get<double>();
            if (v <= 0.0) throw ValidationError("sweep.link_delays_ms", "must be > 0");
            spec.link_delays_s.push_back(v / 1e3);
        }
    }
    if (root.contains("hop_pairs")) {
        spec.hop_pairs.clear();
        for (const json& p : root.at("hop_pairs")) {
            if (!p.is_array() || p.size() != 2)
                throw ValidationError("sweep.hop_pairs", "entries must be [old_hops, new_hops]");
            int a = p[0].get<int>();
            int b = p[1].get<int>();
            if (a < 1 || b < 1) throw ValidationError("sweep.hop_pairs", "hops must be >= 1");
            spec.hop_pairs.emplace_back(a, b);
        }
    }
    spec.prefix_hops = root.value("prefix_hops", 1);
    if (spec.prefix_hops < 0) throw ValidationError("sweep.prefix_hops", "must be >= 0");
    spec.bandwidth_bps = get_positive(root, "sweep", "bandwidth_mbps", 10.0) * 1e6;
    spec.handover_time_s = get_positive(root, "sweep", "handover_time_s", 2.0);
    return spec;
}

ScenarioConfig make_fork_scenario(const SweepSpec& spec, const std::string& scheme,
                                  double link_delay_s, int old_hops, int new_hops) {
    ScenarioConfig cfg = spec.base;
    cfg.scheme = scheme;
    cfg.topology = TopologyConfig{};
    cfg.topology.kind = TopologyConfig::Kind::Graph;

    auto add_node = [&cfg](NodeKind kind) {
        NodeId id = static_cast<NodeId>(cfg.topology.nodes.size());
        cfg.topology.nodes.push_back(GraphNodeConfig{id, kind});
        return id;
    };
    auto add_link = [&cfg, link_delay_s, &spec](NodeId a, NodeId b) {
        cfg.topology.links.push_back(GraphLinkConfig{a, b, link_delay_s, spec.bandwidth_bps});
    };

    const NodeId root = add_node(NodeKind::BorderRouter);
    NodeId fork = root;
    for (int i = 0; i < spec.prefix_hops; ++i) {
        NodeId next = add_node(NodeKind::InteriorRouter);
        add_link(fork, next);
        fork = next;
    }
    auto grow_branch = [&](int hops) {
        NodeId cur = fork;
        for (int i = 0; i < hops - 1; ++i) {
            NodeId next = add_node(NodeKind::InteriorRouter);
            add_link(cur, next);
            cur = next;
        }
        NodeId ar = add_node(NodeKind::AccessRouter);
        add_link(cur, ar);
        return ar;
    };
    const NodeId ar_old = grow_branch(old_hops);
    const NodeId ar_new = grow_branch(new_hops);

    cfg.cells.mode = CellsConfig::Mode::Explicit;
    cfg.cells.adjacency = {{ar_old, ar_new}};
    cfg.initial_ar = ar_old;
    cfg.ingress_link_delay_s = link_delay_s;
    cfg.mobility = MobilityConfig{};
    cfg.mobility.script.push_back(
        MobilityEntry{spec.handover_time_s, ar_old, ar_new, HandoverKind::Proactive});

    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s_%gms_%dx%d", scheme.c_str(), link_delay_s * 1e3, old_hops,
                  new_hops);
    cfg.name = buf;
    return cfg;
}

std::vector<RunResult> sweep(const SweepSpec& spec, unsigned jobs) {
    std::vector<ScenarioConfig> configs;
    for (const std::string& scheme : spec.schemes)
        for (double delay : spec.link_delays_s)
            for (const auto& [old_hops, new_hops] : spec.hop_pairs)
                configs.push_back(make_fork_scenario(spec, scheme, delay, old_hops, new_hops));

    std::vector<RunResult> results(configs.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < configs.size(); ++i) results[i] = run_scenario(configs[i]);
        return results;
    }

    // Each worker owns its engine; rows merge by sweep index, so the output
    // order is independent of scheduling.
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1))
            results[i] = run_scenario(configs[i]);
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < std::min<unsigned>(jobs, configs.size()); ++j)
        pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

void write_csv_header(std::ostream& out, std::uint64_t seed) {
    out << "# mmsim results, schema v1\n";
    out << "# metric rules: handoff_delay = first(new AR after trigger) - last(old AR), "
           "clamped at 0; reorder_depth = max positive backward seq jump on the dedup'd "
           "trace; episode = trigger .. last attachment change + 2.0 s\n";
    out << "# defaults: prune_timeout=1s refresh=0.5s purge=0.5s scan=0.1s overlap=1s "
           "semisoft=0.2s registration=0.1s wireless=2ms cbr=512B/10ms\n";
    out << "# seed: " << seed << "\n";
    out << "scenario_id,scheme,link_delay_ms,old_hops,new_hops,handoff_delay_ms,"
           "reorder_depth,reorder_duration_ms,duplicates,routing_efficiency,"
           "delivery_ratio,seed,config_hash\n";
}

void write_csv_row(std::ostream& out, const RunResult& row) {
    char buf[320];
    std::snprintf(buf, sizeof(buf), "%s,%s,%.4f,%d,%d,%.4f,%d,%.4f,%llu,%.6f,%.6f,%llu,%016llx\n",
                  row.scenario_id.c_str(), row.scheme.c_str(), row.link_delay_ms, row.old_hops,
                  row.new_hops, row.report.handoff.delay_s * 1e3, row.report.reorder_depth,
                  row.report.reorder_duration_s * 1e3,
                  static_cast<unsigned long long>(row.report.duplicates),
                  row.report.routing_efficiency, row.report.delivery_ratio,
                  static_cast<unsigned long long>(row.seed),
                  static_cast<unsigned long long>(row.hash));
    out << buf;
}

void write_trace_csv(std::ostream& out, const ReceiveTrace& trace) {
    out << "time_s,seq,via_ar,dup\n";
    char buf[96];
    for (const TraceEntry& e : trace) {
        std::snprintf(buf, sizeof(buf), "%.6f,%llu,%u,%d\n", e.time,
                      static_cast<unsigned long long>(e.seq), e.via_ar, e.dup ? 1 : 0);
        out << buf;
    }
}

void write_trace_csv(std::ostream& out, const RunResult& result) {
    out << "# scenario: " << result.scenario_id << "\n";
    if (!result.mobile_rcoa.empty()) {
        out << "# rcoa: " << result.mobile_rcoa << "\n";
        out << "# mcoa: " << result.mobile_mcoa << "\n";
    }
    write_trace_csv(out, result.trace);
}

}  // namespace mmsim
