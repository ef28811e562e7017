#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "tds/network.h"
#include "tds/ttf.h"

namespace tds {

// Subset of original edges, with O(1) clear via a generation counter.
class EdgeMark {
public:
	EdgeMark() = default;
	explicit EdgeMark(std::size_t edge_count) : stamp_(edge_count, 0) {}

	void resize(std::size_t edge_count) {
		stamp_.assign(edge_count, 0);
		generation_ = 1;
	}
	void clear() { ++generation_; }
	void mark(EdgeId e) { stamp_[e] = generation_; }
	bool is_marked(EdgeId e) const { return stamp_[e] == generation_; }
	void mark_all() {
		for (auto& s : stamp_)
			s = generation_;
	}

private:
	std::vector<std::uint32_t> stamp_;
	std::uint32_t generation_ = 1;
};

struct EaQuery {
	NodeId s;
	NodeId t;
	DTime tau;  // departure time in [0, kPeriod)
};

struct EaResult {
	// arrival stays unwrapped (it may exceed kPeriod when the path crosses
	// midnight); edge entry times are taken modulo the period
	DTime arrival;
	std::vector<EdgeId> path;
};

// Chained evaluation of a contiguous walk: t_{i+1} = t_i + eval(ttf_i, t_i).
// Throws std::invalid_argument if the edges do not form a walk.
DTime eval_path(const TdGraph& g, const std::vector<EdgeId>& path, DTime tau);

// Label-setting time-dependent Dijkstra; exact under FIFO. Reusable scratch,
// one instance per thread.
class TdSearch {
public:
	// exact earliest arrival in g
	std::optional<EaResult> run(const TdGraph& g, const EaQuery& q);

	// exact earliest arrival in the subgraph induced by the marked edges
	std::optional<EaResult> run_restricted(const TdGraph& g, const EdgeMark& marks,
	                                       const EaQuery& q);

	// one-to-all variant: arrival_out[v] is the earliest arrival at v, or
	// kUnreachableTime where v cannot be reached
	static constexpr DTime kUnreachableTime = std::numeric_limits<DTime>::max();
	void run_all(const TdGraph& g, NodeId s, DTime tau, std::vector<DTime>& arrival_out);

private:
	template <bool restricted>
	std::optional<EaResult> run_impl(const TdGraph& g, const EdgeMark* marks, const EaQuery& q);

	std::vector<DTime> arrival_;
	std::vector<EdgeId> parent_;
	std::vector<std::uint32_t> stamp_;
	std::uint32_t generation_ = 0;
};

}  // namespace tds
