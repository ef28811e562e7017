#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tds/ttf.h"

namespace tds {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

constexpr NodeId kInvalidNode = static_cast<NodeId>(-1);
constexpr EdgeId kInvalidEdge = static_cast<EdgeId>(-1);

struct TdEdge {
	NodeId tail;
	NodeId head;
	TravelTimeFunction ttf;

	friend bool operator==(const TdEdge&, const TdEdge&) = default;
};

struct InstanceStats {
	std::size_t node_count = 0;
	std::size_t edge_count = 0;
	double td_edge_fraction = 0.0;  // edges with >= 2 breakpoints
	double avg_breakpoints_per_td_edge = 0.0;
};

// Directed graph with travel-time functions on the edges. Edges are stored
// grouped by tail node; edge ids are dense positions in that order.
// Immutable after construction.
class TdGraph {
public:
	TdGraph() = default;

	// Groups edges by tail (stable within a tail) and validates every edge.
	// Throws std::invalid_argument naming the first bad edge.
	TdGraph(std::size_t node_count, std::vector<TdEdge> edges);

	std::size_t node_count() const { return first_out_.empty() ? 0 : first_out_.size() - 1; }
	std::size_t edge_count() const { return edges_.size(); }

	const TdEdge& edge(EdgeId e) const { return edges_[e]; }
	std::span<const TdEdge> edges() const { return edges_; }

	// ids of the edges leaving node v, contiguous [first_out(v), first_out(v+1))
	EdgeId first_out(NodeId v) const { return first_out_[v]; }
	std::span<const TdEdge> out_edges(NodeId v) const {
		return std::span<const TdEdge>(edges_).subspan(first_out_[v], first_out_[v + 1] - first_out_[v]);
	}

	friend bool operator==(const TdGraph&, const TdGraph&) = default;

private:
	std::vector<EdgeId> first_out_;  // size node_count + 1
	std::vector<TdEdge> edges_;
};

struct ParseError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

// Text instance format, one line per edge:
//   tdgraph v1 <n> <m>
//   <tail> <head> <k> <t_1> <w_1> ... <t_k> <w_k>
// Times are integer deciseconds in [0, 864000) strictly increasing, weights
// positive integer deciseconds. '#' starts a comment. LF line endings.
TdGraph load(const std::filesystem::path& path);
void store(const TdGraph& g, const std::filesystem::path& path);

InstanceStats stats(const TdGraph& g);

struct GeneratorConfig {
	std::size_t node_count = 1000;
	double avg_degree = 5.0;              // directed edges per node
	double td_fraction = 0.05;            // share of edges that get a non-constant ttf
	std::size_t breakpoints_per_td_edge = 15;
	std::size_t rush_hour_peaks = 2;      // 1 = morning, 2 = + evening, 3 = + midday
	std::uint64_t seed = 1;
	bool uniform_td_placement = false;    // default biases towards fast long edges
	bool quantize_speeds = false;         // round base speeds to 5 km/h steps
};

// Synthetic road-like instance: a grid with diagonals plus long random
// shortcut edges standing in for a motorway layer. Deterministic per seed;
// every generated function passes validate_fifo and the graph is strongly
// connected.
TdGraph generate(const GeneratorConfig& cfg);

}  // namespace tds
