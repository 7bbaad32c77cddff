#pragma once

#include "easic/delay.hpp"
#include "easic/netlist.hpp"
#include "easic/techlib.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

namespace easic {

using NetId = std::uint32_t;

struct TimingArc {
    NetId from = 0;
    Delay delay;

    bool operator==(const TimingArc&) const = default;
};

/// Primary output (id = port name) or FF data pin (id = "<ff id>/D", adds setup).
struct TimingEndpoint {
    std::string id;
    NetId net = 0;
    Delay extra;
};

/// Arrival-time annotated DAG over the nets of a netlist.
///
/// Every net is a node. A net driven by a combinational cell carries one arc per
/// timed input pin; a net with no arcs (primary input, FF output, constant) is a
/// startpoint whose arrival is its launch time. arrival(v) = max(arrival(u) + d)
/// over the arcs of v. Reconfigurable LUTs only get arcs on their support pins.
class TimingGraph {
public:
    std::size_t net_count() const { return names_.size(); }
    const std::string& net_name(NetId net) const { return names_[net]; }
    std::optional<NetId> find_net(std::string_view name) const;
    /// Driving cell id; empty for a primary input.
    const std::string& driver(NetId net) const { return driver_[net]; }
    std::optional<NetId> cell_net(const std::string& cell) const;
    bool reconfigurable(NetId net) const { return reconfigurable_[net] != 0; }

    Delay arrival(NetId net) const { return arrival_[net]; }
    Delay launch(NetId net) const { return launch_[net]; }
    const std::vector<TimingArc>& arcs(NetId net) const { return arcs_[net]; }
    const std::vector<TimingEndpoint>& endpoints() const { return endpoints_; }
    Delay endpoint_arrival(const TimingEndpoint& e) const { return arrival_[e.net] + e.extra; }
    /// Position in a topological order of the full (untimed) connectivity.
    std::uint32_t rank(NetId net) const { return rank_[net]; }
    const std::vector<NetId>& topological_order() const { return order_; }

    /// Replaces the arcs of the net driven by `cell`; call update_timing afterwards.
    /// Arcs may only reference nets the cell was connected to when the graph was built.
    void set_cell_timing(const std::string& cell, std::vector<TimingArc> arcs, Delay launch);
    void set_reconfigurable(const std::string& cell, bool reconfigurable);

    /// Full topological recomputation of every arrival from the current arcs.
    void recompute_all();

    /// Arrival of a single net from its arcs, without storing it.
    Delay evaluate(NetId net) const;

private:
    friend TimingGraph build_and_time(const Netlist& netlist, const TechLibrary& lib);
    friend void update_timing(TimingGraph& graph, const std::string& cell);

    std::vector<std::string> names_;
    std::unordered_map<std::string, NetId> index_;
    std::vector<std::string> driver_;
    std::unordered_map<std::string, NetId> cell_net_;
    std::vector<char> reconfigurable_;
    std::vector<std::vector<TimingArc>> arcs_;
    std::vector<std::vector<NetId>> fanin_;
    std::vector<std::vector<NetId>> fanout_;
    std::vector<Delay> launch_;
    std::vector<Delay> arrival_;
    std::vector<NetId> order_;
    std::vector<std::uint32_t> rank_;
    std::vector<TimingEndpoint> endpoints_;
};

/// Timing arcs and launch time of one cell's output under `lib`.
struct CellArcs {
    std::vector<TimingArc> arcs;
    Delay launch;
};
CellArcs cell_arcs(const TimingGraph& graph, const Cell& cell, const TechLibrary& lib);

/// Builds the graph and computes every arrival with one topological pass.
TimingGraph build_and_time(const Netlist& netlist, const TechLibrary& lib);

/// Re-propagates arrivals through the transitive fanout of `cell` after its arcs changed.
/// The result equals recompute_all().
void update_timing(TimingGraph& graph, const std::string& cell);

/// Re-derives the arcs of `cell` from its (modified) netlist description, then update_timing.
/// The cell must keep the input nets it had when the graph was built.
void refresh_cell(TimingGraph& graph, const Netlist& netlist, const TechLibrary& lib, const std::string& cell);

/// Startpoint-to-endpoint path. `cells` are the driving cells of `nets` in order
/// (a primary-input startpoint contributes a net but no cell).
struct TimedPath {
    std::vector<std::string> cells;
    std::vector<NetId> nets;
    Delay delay;
    std::string endpoint;

    /// Path identity used for exclusion: the ordered cell-id sequence.
    std::string key() const;
};

struct EndpointTiming {
    std::string id;
    Delay arrival;
    std::vector<std::string> worst_path;
};

struct TimingReport {
    Delay cp;
    Delay sum_cp;
    std::vector<EndpointTiming> endpoints;
    /// Set when the design has no endpoints (cp = sum_cp = 0).
    bool no_endpoints = false;

    /// 1 / cp in MHz, 0 when cp is zero.
    double max_frequency_mhz() const;
};

/// cp = max endpoint arrival, sum_cp = sum of endpoint arrivals.
TimingReport report(const TimingGraph& graph);
Delay critical_delay(const TimingGraph& graph);

/// Worst path ending at one endpoint (greedy max-arrival backtrack).
TimedPath worst_path(const TimingGraph& graph, const TimingEndpoint& endpoint);

/// Worst path whose key is not in `excluded`.
///
/// Paths are ordered by delay (descending), then endpoint id, then the cell-id sequence
/// read from the endpoint backwards. Per endpoint the excluded prefix of that order is
/// skipped with a Lawler-style deviation search. Returns nullopt when every path is excluded.
std::optional<TimedPath> find_critical(const TimingGraph& graph, const std::unordered_set<std::string>& excluded);

/// First path in the find_critical order that contains a reconfigurable LUT, i.e. what
/// find_critical converges to once every more-critical fully static path is excluded.
std::optional<TimedPath> find_critical_reconfigurable(const TimingGraph& graph);

/// Input positions the LUT function actually depends on.
std::vector<unsigned> lut_support(const LutMask& mask);

/// {cp_ns, sum_cp_ns, max_frequency_mhz, endpoints: [{id, arrival_ns, worst_path}]}
nlohmann::json timing_report_json(const TimingReport& report);

} // namespace easic
