#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "tds/ch.h"
#include "tds/network.h"
#include "tds/tdsearch.h"
#include "tds/ttf.h"

namespace tds {

// The four daily windows bracketing the rush hours:
// 0:00-6:00, 7:00-9:00, 11:00-14:00, 17:00-19:00.
std::vector<TimeWindow> default_windows();

// One scalar weighting of the graph: window average or freeflow minimum.
// Averages are rounded to whole deciseconds, floored at 1.
ScalarGraph scalar_for_window(const TdGraph& g, const TimeWindow& w);
ScalarGraph scalar_freeflow(const TdGraph& g);

struct BuildOptions {
	unsigned workers = 1;  // the per-window builds are independent jobs
	std::optional<std::filesystem::path> cache_dir;  // reuse/store built indexes
};

// Preprocessed state of the engine: one hierarchy per time window plus one
// over freeflow weights for the baseline heuristic. The freeflow index is
// never consulted by TD-S itself. Shares hierarchies on copy; the graph must
// outlive the index.
struct TdsIndex {
	const TdGraph* graph = nullptr;
	std::vector<TimeWindow> windows;
	std::vector<std::shared_ptr<const ChIndex>> window_ch;
	std::shared_ptr<const ChIndex> freeflow_ch;

	// view with only the first `count` windows; hierarchies are shared
	TdsIndex with_windows(std::size_t count) const;
};

TdsIndex build_index(const TdGraph& g, std::vector<TimeWindow> windows,
                     const BuildOptions& opts = {});

struct TdsOptions {
	// also mark the freeflow path before the restricted search; off by
	// default, TD-S proper uses only the window paths
	bool add_freeflow_path = false;
};

struct EngineResult {
	DTime arrival;
	std::vector<EdgeId> path;
	std::size_t marked_edges = 0;  // size of the restricted search space
};

// Per-thread scratch for engine queries.
class EngineContext {
public:
	explicit EngineContext(const TdsIndex& idx) { marks_.resize(idx.graph->edge_count()); }

	ChQuery& ch_query() { return ch_query_; }
	TdSearch& search() { return search_; }
	EdgeMark& marks() { return marks_; }

private:
	ChQuery ch_query_;
	TdSearch search_;
	EdgeMark marks_;
};

// Freeflow heuristic: shortest path under freeflow weights, then the
// time-dependent travel time along that fixed path.
std::optional<EngineResult> query_freeflow(const TdsIndex& idx, EngineContext& ctx,
                                           const EaQuery& q);

// TD-S: mark the per-window shortest paths, then run the exact
// time-dependent search restricted to the marked edges.
std::optional<EngineResult> query_tds(const TdsIndex& idx, EngineContext& ctx, const EaQuery& q,
                                      const TdsOptions& opts = {});

// TD-S+A: as TD-S but marking every via-path within cfg.stretch per window.
std::optional<EngineResult> query_tds_a(const TdsIndex& idx, EngineContext& ctx, const EaQuery& q,
                                        const AltConfig& cfg, const TdsOptions& opts = {});

// The per-window scalar shortest paths for an (s, t) pair; entries are
// nullopt where the window graph has no path.
std::vector<std::optional<ChPath>> window_paths(const TdsIndex& idx, EngineContext& ctx, NodeId s,
                                                NodeId t);

// Sampled arrival-time function of an (s, t) pair (TD-S+P output).
struct Profile {
	DTime rate = 0;  // sample spacing; divides kPeriod
	std::vector<DTime> samples;  // arrival for departures 0, rate, 2*rate, ...
	std::vector<std::vector<EdgeId>> paths;
	std::size_t marked_edges = 0;
};

// Marks edges once, then runs the restricted search per departure sample.
std::optional<Profile> query_profile(const TdsIndex& idx, EngineContext& ctx, NodeId s, NodeId t,
                                     DTime rate, const TdsOptions& opts = {});

// Linear interpolation between the two samples around tau, wrapping the last
// sample to the first plus one period. Exact rational, returned as double.
double interpolate(const Profile& p, DTime tau);

// Maximum interpolation error r*(lambda_max + lambda_min)/4, in deciseconds,
// valid when the samples are exact.
double error_bound(DTime rate, const SlopeBounds& b);

// Slope bounds of the profile's travel-time curve (arrival minus departure).
SlopeBounds profile_slope_bounds(const Profile& p);

// Number of distinct edge sequences among the sampled paths.
std::size_t count_distinct_paths(const Profile& p);

}  // namespace tds
