#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <vector>

#include "tds/network.h"

namespace tds {

constexpr std::int64_t kInfWeight = std::numeric_limits<std::int64_t>::max() / 4;

struct ScalarEdge {
	NodeId tail;
	NodeId head;
	std::int64_t weight;  // > 0
	EdgeId orig;          // id in the originating TdGraph
};

struct ScalarGraph {
	std::size_t node_count = 0;
	std::vector<ScalarEdge> edges;
};

struct AltConfig {
	double stretch = 1.2;  // meeting nodes up to stretch * shortest distance
};

// One contraction hierarchy over one scalar weighting. A flat pool holds
// every arc ever created; shortcuts reference their two constituent pool
// arcs, so unpacking never needs a lookup. Immutable after build.
class ChIndex {
public:
	struct PoolArc {
		NodeId from;
		NodeId to;
		std::int64_t weight;
		EdgeId orig;         // kInvalidEdge for shortcuts
		std::uint32_t child_a = 0;  // pool ids, valid when orig == kInvalidEdge
		std::uint32_t child_b = 0;
	};
	struct SearchArc {
		NodeId node;  // the other endpoint, always of higher rank
		std::int64_t weight;
		std::uint32_t pool_id;
	};

	std::size_t node_count() const { return rank.size(); }

	std::vector<std::uint32_t> rank;  // contraction order position per node
	std::size_t orig_edge_count = 0;
	std::vector<PoolArc> pool;
	// upward search graphs: fwd[v] holds arcs v->w with rank[w] > rank[v],
	// bwd[v] holds arcs u->v with rank[u] > rank[v]
	std::vector<std::uint32_t> fwd_first, bwd_first;
	std::vector<SearchArc> fwd_arcs, bwd_arcs;
};

// Builds a hierarchy with lazy edge-difference ordering and pop-limited
// witness searches. Deterministic for a fixed input.
ChIndex build(const ScalarGraph& g);

struct ChPath {
	std::int64_t distance = 0;
	std::vector<EdgeId> edges;  // fully unpacked original edge ids, s to t
};

// Reusable query scratch. Arrays are versioned so a reset costs O(1); one
// instance can serve many indexes over the same node set, sequentially.
// Not thread-safe; give each worker its own.
class ChQuery {
public:
	// exact shortest path; nullopt when t is unreachable from s
	std::optional<ChPath> run(const ChIndex& ch, NodeId s, NodeId t);

	// union of the unpacked via-paths of every meeting node within
	// cfg.stretch of the optimum, the shortest path included; sorted unique
	std::optional<std::vector<EdgeId>> run_alternatives(const ChIndex& ch, NodeId s, NodeId t,
	                                                    const AltConfig& cfg);

private:
	struct Side {
		std::vector<std::int64_t> dist;
		std::vector<std::uint32_t> parent_arc;  // pool id, kInvalidEdge at the root
		std::vector<std::uint32_t> stamp;
		std::vector<NodeId> settled;
	};

	void prepare(const ChIndex& ch);
	std::int64_t search(const ChIndex& ch, NodeId s, NodeId t, double stretch);
	void unpack_arc(const ChIndex& ch, std::uint32_t pool_id, std::vector<EdgeId>& out);
	void collect_via_path(const ChIndex& ch, NodeId meet, std::vector<EdgeId>& out);

	Side fwd_, bwd_;
	std::vector<std::uint32_t> edge_stamp_;  // dedupe of emitted original edges
	std::uint32_t generation_ = 0;
	std::size_t pool_size_ = 0;
};

// Content hash of a scalar graph; keys the binary index cache.
std::uint64_t scalar_graph_hash(const ScalarGraph& g);

// Binary on-disk cache of a built index. load_cached returns nullopt when
// the file is missing, from a different format version, or built from a
// graph with a different hash.
void save_cached(const ChIndex& ch, std::uint64_t graph_hash, const std::filesystem::path& path);
std::optional<ChIndex> load_cached(std::uint64_t graph_hash, const std::filesystem::path& path);

}  // namespace tds
