#include "tds/tdsearch.h"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace tds {

DTime eval_path(const TdGraph& g, const std::vector<EdgeId>& path, DTime tau) {
	DTime t = tau;
	NodeId at = kInvalidNode;
	for (EdgeId e : path) {
		const TdEdge& edge = g.edge(e);
		if (at != kInvalidNode && edge.tail != at)
			throw std::invalid_argument("eval_path: edges do not form a contiguous walk");
		t += eval(edge.ttf, wrap_time(t));
		at = edge.head;
	}
	return t;
}

template <bool restricted>
std::optional<EaResult> TdSearch::run_impl(const TdGraph& g, const EdgeMark* marks,
                                           const EaQuery& q) {
	const std::size_t n = g.node_count();
	if (arrival_.size() < n) {
		arrival_.assign(n, 0);
		parent_.assign(n, kInvalidEdge);
		stamp_.assign(n, 0);
		generation_ = 0;
	}
	++generation_;

	auto label = [&](NodeId v) -> DTime& {
		if (stamp_[v] != generation_) {
			stamp_[v] = generation_;
			arrival_[v] = std::numeric_limits<DTime>::max();
			parent_[v] = kInvalidEdge;
		}
		return arrival_[v];
	};

	using Entry = std::pair<DTime, NodeId>;
	std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
	label(q.s) = q.tau;
	heap.push({q.tau, q.s});

	while (!heap.empty()) {
		auto [t, v] = heap.top();
		heap.pop();
		if (t > label(v))
			continue;
		if (v == q.t)
			break;  // label-setting: the first pop of t is final
		EdgeId first = g.first_out(v);
		auto edges = g.out_edges(v);
		for (std::size_t i = 0; i < edges.size(); ++i) {
			EdgeId e = first + static_cast<EdgeId>(i);
			if constexpr (restricted)
				if (!marks->is_marked(e))
					continue;
			DTime nt = t + eval(edges[i].ttf, wrap_time(t));
			if (nt < label(edges[i].head)) {
				arrival_[edges[i].head] = nt;
				parent_[edges[i].head] = e;
				heap.push({nt, edges[i].head});
			}
		}
	}

	if (stamp_[q.t] != generation_ || arrival_[q.t] == std::numeric_limits<DTime>::max())
		return std::nullopt;
	EaResult result;
	result.arrival = arrival_[q.t];
	for (NodeId v = q.t; parent_[v] != kInvalidEdge; v = g.edge(parent_[v]).tail)
		result.path.push_back(parent_[v]);
	std::reverse(result.path.begin(), result.path.end());
	return result;
}

std::optional<EaResult> TdSearch::run(const TdGraph& g, const EaQuery& q) {
	return run_impl<false>(g, nullptr, q);
}

void TdSearch::run_all(const TdGraph& g, NodeId s, DTime tau, std::vector<DTime>& arrival_out) {
	const std::size_t n = g.node_count();
	arrival_out.assign(n, kUnreachableTime);
	using Entry = std::pair<DTime, NodeId>;
	std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
	arrival_out[s] = tau;
	heap.push({tau, s});
	while (!heap.empty()) {
		auto [t, v] = heap.top();
		heap.pop();
		if (t > arrival_out[v])
			continue;
		auto edges = g.out_edges(v);
		for (const TdEdge& e : edges) {
			DTime nt = t + eval(e.ttf, wrap_time(t));
			if (nt < arrival_out[e.head]) {
				arrival_out[e.head] = nt;
				heap.push({nt, e.head});
			}
		}
	}
}

std::optional<EaResult> TdSearch::run_restricted(const TdGraph& g, const EdgeMark& marks,
                                                 const EaQuery& q) {
	return run_impl<true>(g, &marks, q);
}

}  // namespace tds
