#pragma once

// Shared fixtures and independent oracles for the test suites. Everything in
// here is deliberately brute force; the oracles must not share code with the
// implementations they check.

#include <algorithm>
#include <optional>
#include <vector>

#include "tds/ch.h"
#include "tds/network.h"
#include "tds/rng.h"
#include "tds/ttf.h"

namespace tds::test {

// Random FIFO function with breakpoints on whole seconds, so dense 1 s
// sampling oracles see the exact curve.
inline TravelTimeFunction random_ttf(Rng& rng, std::size_t max_points = 8) {
	std::size_t k = 1 + rng.next_below(max_points);
	if (k == 1)
		return TravelTimeFunction::constant(rng.next_in(10, 30000));
	std::vector<DTime> times;
	for (std::size_t i = 0; i < k; ++i)
		times.push_back(rng.next_in(0, 86399) * 10);
	std::sort(times.begin(), times.end());
	times.erase(std::unique(times.begin(), times.end()), times.end());
	std::vector<BreakPoint> pts;
	for (DTime t : times)
		pts.push_back({t, rng.next_in(10, 30000)});
	// clamp to FIFO, wrap segment included (first == last value avoids the
	// wrap issue only probabilistically, so clamp both explicitly)
	for (std::size_t i = 1; i < pts.size(); ++i)
		pts[i].travel = std::max(pts[i].travel, pts[i - 1].travel - (pts[i].at - pts[i - 1].at));
	if (pts.size() > 1)
		pts[0].travel = std::max(pts[0].travel,
		                         pts.back().travel - (kPeriod + pts[0].at - pts.back().at));
	return TravelTimeFunction(std::move(pts));
}

// Small random connected TD graph for exhaustive comparisons.
inline TdGraph random_small_graph(Rng& rng, std::size_t max_nodes = 10) {
	std::size_t n = 2 + rng.next_below(max_nodes - 1);
	std::vector<TdEdge> edges;
	// random spanning chain keeps things reachable in at least one direction
	for (NodeId v = 1; v < n; ++v) {
		NodeId u = static_cast<NodeId>(rng.next_below(v));
		edges.push_back({u, v, random_ttf(rng)});
	}
	std::size_t extra = rng.next_below(2 * n);
	for (std::size_t i = 0; i < extra; ++i) {
		NodeId u = static_cast<NodeId>(rng.next_below(n));
		NodeId v = static_cast<NodeId>(rng.next_below(n));
		if (u == v)
			continue;
		edges.push_back({u, v, random_ttf(rng)});
	}
	return TdGraph(n, std::move(edges));
}

// Earliest arrival by enumerating every simple path (FIFO guarantees a
// simple optimum exists). Usable up to ~10 nodes.
inline std::optional<DTime> brute_force_arrival(const TdGraph& g, NodeId s, NodeId t, DTime tau) {
	std::optional<DTime> best;
	std::vector<char> on_path(g.node_count(), 0);
	auto dfs = [&](auto&& self, NodeId v, DTime at) -> void {
		if (v == t) {
			if (!best || at < *best)
				best = at;
			return;
		}
		on_path[v] = 1;
		EdgeId first = g.first_out(v);
		auto edges = g.out_edges(v);
		for (std::size_t i = 0; i < edges.size(); ++i) {
			(void)first;
			if (on_path[edges[i].head])
				continue;
			self(self, edges[i].head, at + eval(edges[i].ttf, wrap_time(at)));
		}
		on_path[v] = 0;
	};
	dfs(dfs, s, tau);
	return best;
}

// Textbook Dijkstra distances from s, the oracle for CH queries.
inline std::vector<std::int64_t> dijkstra_distances(const ScalarGraph& g, NodeId s) {
	std::vector<std::vector<std::pair<NodeId, std::int64_t>>> adj(g.node_count);
	for (const ScalarEdge& e : g.edges)
		adj[e.tail].push_back({e.head, e.weight});
	std::vector<std::int64_t> dist(g.node_count, kInfWeight);
	std::vector<char> done(g.node_count, 0);
	dist[s] = 0;
	for (;;) {
		NodeId v = kInvalidNode;
		for (NodeId u = 0; u < g.node_count; ++u)
			if (!done[u] && dist[u] < kInfWeight && (v == kInvalidNode || dist[u] < dist[v]))
				v = u;
		if (v == kInvalidNode)
			break;
		done[v] = 1;
		for (auto [w, weight] : adj[v])
			dist[w] = std::min(dist[w], dist[v] + weight);
	}
	return dist;
}

// Random positive-weight scalar graph.
inline ScalarGraph random_scalar_graph(Rng& rng, std::size_t max_nodes = 40) {
	ScalarGraph g;
	g.node_count = 2 + rng.next_below(max_nodes - 1);
	std::size_t m = g.node_count + rng.next_below(3 * g.node_count);
	for (EdgeId e = 0; e < m; ++e) {
		NodeId u = static_cast<NodeId>(rng.next_below(g.node_count));
		NodeId v = static_cast<NodeId>(rng.next_below(g.node_count));
		if (u == v)
			v = (v + 1) % g.node_count;
		g.edges.push_back({u, v, rng.next_in(1, 1000), e});
	}
	return g;
}

// Four-node diamond: 0 -> {1 top, 2 bottom} -> 3. The top chain carries a
// rush-hour bump, the bottom chain is constant and slower off-peak.
inline TdGraph diamond_fixture() {
	// peak centered at 8:00, +/- 2 h ramps, top route 600 s at freeflow
	TravelTimeFunction top_td(std::vector<BreakPoint>{
	    {216000, 3000},  // 6:00, 300 s
	    {288000, 12000}, // 8:00, 1200 s
	    {360000, 3000},  // 10:00, back to 300 s
	});
	std::vector<TdEdge> edges;
	edges.push_back({0, 1, TravelTimeFunction::constant(3000)});
	edges.push_back({1, 3, top_td});
	edges.push_back({0, 2, TravelTimeFunction::constant(5000)});
	edges.push_back({2, 3, TravelTimeFunction::constant(5000)});
	return TdGraph(4, std::move(edges));
}

}  // namespace tds::test
