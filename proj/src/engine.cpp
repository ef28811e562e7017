#include "tds/engine.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <numeric>
#include <set>
#include <sstream>

namespace tds {

std::vector<TimeWindow> default_windows() {
	return {
	    {0, 216000},        // 0:00 - 6:00
	    {252000, 324000},   // 7:00 - 9:00
	    {396000, 504000},   // 11:00 - 14:00
	    {612000, 684000},   // 17:00 - 19:00
	};
}

ScalarGraph scalar_for_window(const TdGraph& g, const TimeWindow& w) {
	if (!w.valid())
		throw std::invalid_argument("scalar_for_window: invalid window");
	ScalarGraph sg;
	sg.node_count = g.node_count();
	sg.edges.reserve(g.edge_count());
	for (EdgeId e = 0; e < g.edge_count(); ++e) {
		const TdEdge& edge = g.edge(e);
		std::int64_t weight = std::max<std::int64_t>(1, std::llround(average_over_window(edge.ttf, w)));
		sg.edges.push_back({edge.tail, edge.head, weight, e});
	}
	return sg;
}

ScalarGraph scalar_freeflow(const TdGraph& g) {
	ScalarGraph sg;
	sg.node_count = g.node_count();
	sg.edges.reserve(g.edge_count());
	for (EdgeId e = 0; e < g.edge_count(); ++e) {
		const TdEdge& edge = g.edge(e);
		sg.edges.push_back({edge.tail, edge.head, freeflow(edge.ttf), e});
	}
	return sg;
}

TdsIndex TdsIndex::with_windows(std::size_t count) const {
	if (count == 0 || count > windows.size())
		throw std::invalid_argument("with_windows: count out of range");
	TdsIndex view;
	view.graph = graph;
	view.windows.assign(windows.begin(), windows.begin() + count);
	view.window_ch.assign(window_ch.begin(), window_ch.begin() + count);
	view.freeflow_ch = freeflow_ch;
	return view;
}

namespace {

std::shared_ptr<const ChIndex> build_one(const ScalarGraph& sg,
                                         const std::optional<std::filesystem::path>& cache_dir) {
	if (!cache_dir)
		return std::make_shared<const ChIndex>(build(sg));
	std::uint64_t hash = scalar_graph_hash(sg);
	std::ostringstream name;
	name << "ch_" << std::hex << hash << ".bin";
	std::filesystem::path file = *cache_dir / name.str();
	if (auto cached = load_cached(hash, file))
		return std::make_shared<const ChIndex>(std::move(*cached));
	auto ch = std::make_shared<const ChIndex>(build(sg));
	std::filesystem::create_directories(*cache_dir);
	save_cached(*ch, hash, file);
	return ch;
}

}  // namespace

TdsIndex build_index(const TdGraph& g, std::vector<TimeWindow> windows, const BuildOptions& opts) {
	if (windows.empty())
		throw std::invalid_argument("build_index: at least one time window required");
	for (const TimeWindow& w : windows)
		if (!w.valid())
			throw std::invalid_argument("build_index: invalid time window");

	TdsIndex idx;
	idx.graph = &g;
	idx.windows = std::move(windows);
	idx.window_ch.resize(idx.windows.size());

	std::vector<std::function<std::shared_ptr<const ChIndex>()>> jobs;
	for (const TimeWindow& w : idx.windows)
		jobs.push_back([&g, w, &opts] { return build_one(scalar_for_window(g, w), opts.cache_dir); });
	jobs.push_back([&g, &opts] { return build_one(scalar_freeflow(g), opts.cache_dir); });

	std::vector<std::shared_ptr<const ChIndex>> built(jobs.size());
	if (opts.workers > 1) {
		std::vector<std::future<std::shared_ptr<const ChIndex>>> futures;
		for (auto& job : jobs)
			futures.push_back(std::async(std::launch::async, job));
		for (std::size_t i = 0; i < futures.size(); ++i)
			built[i] = futures[i].get();
	} else {
		for (std::size_t i = 0; i < jobs.size(); ++i)
			built[i] = jobs[i]();
	}
	for (std::size_t i = 0; i < idx.windows.size(); ++i)
		idx.window_ch[i] = built[i];
	idx.freeflow_ch = built.back();
	return idx;
}

std::optional<EngineResult> query_freeflow(const TdsIndex& idx, EngineContext& ctx,
                                           const EaQuery& q) {
	auto p = ctx.ch_query().run(*idx.freeflow_ch, q.s, q.t);
	if (!p)
		return std::nullopt;
	return EngineResult{eval_path(*idx.graph, p->edges, q.tau), std::move(p->edges), 0};
}

namespace {

std::size_t mark_edges(EdgeMark& marks, const std::vector<EdgeId>& edges, std::size_t marked) {
	for (EdgeId e : edges) {
		if (!marks.is_marked(e)) {
			marks.mark(e);
			++marked;
		}
	}
	return marked;
}

// Marks the union of per-window paths (one per window, or all via-paths when
// alt is set). Returns the mark count, or nullopt if no window connects s to t.
std::optional<std::size_t> mark_window_paths(const TdsIndex& idx, EngineContext& ctx, NodeId s,
                                             NodeId t, const AltConfig* alt,
                                             const TdsOptions& opts) {
	ctx.marks().clear();
	std::size_t marked = 0;
	bool connected = false;
	for (const auto& ch : idx.window_ch) {
		if (alt) {
			if (auto edges = ctx.ch_query().run_alternatives(*ch, s, t, *alt)) {
				connected = true;
				marked = mark_edges(ctx.marks(), *edges, marked);
			}
		} else {
			if (auto p = ctx.ch_query().run(*ch, s, t)) {
				connected = true;
				marked = mark_edges(ctx.marks(), p->edges, marked);
			}
		}
	}
	if (opts.add_freeflow_path) {
		if (auto p = ctx.ch_query().run(*idx.freeflow_ch, s, t)) {
			connected = true;
			marked = mark_edges(ctx.marks(), p->edges, marked);
		}
	}
	if (!connected)
		return std::nullopt;
	return marked;
}

}  // namespace

std::optional<EngineResult> query_tds(const TdsIndex& idx, EngineContext& ctx, const EaQuery& q,
                                      const TdsOptions& opts) {
	auto marked = mark_window_paths(idx, ctx, q.s, q.t, nullptr, opts);
	if (!marked)
		return std::nullopt;
	auto r = ctx.search().run_restricted(*idx.graph, ctx.marks(), q);
	if (!r)
		return std::nullopt;  // cannot happen: the marks contain a connecting path
	return EngineResult{r->arrival, std::move(r->path), *marked};
}

std::optional<EngineResult> query_tds_a(const TdsIndex& idx, EngineContext& ctx, const EaQuery& q,
                                        const AltConfig& cfg, const TdsOptions& opts) {
	auto marked = mark_window_paths(idx, ctx, q.s, q.t, &cfg, opts);
	if (!marked)
		return std::nullopt;
	auto r = ctx.search().run_restricted(*idx.graph, ctx.marks(), q);
	if (!r)
		return std::nullopt;
	return EngineResult{r->arrival, std::move(r->path), *marked};
}

std::vector<std::optional<ChPath>> window_paths(const TdsIndex& idx, EngineContext& ctx, NodeId s,
                                                NodeId t) {
	std::vector<std::optional<ChPath>> out;
	out.reserve(idx.window_ch.size());
	for (const auto& ch : idx.window_ch)
		out.push_back(ctx.ch_query().run(*ch, s, t));
	return out;
}

std::optional<Profile> query_profile(const TdsIndex& idx, EngineContext& ctx, NodeId s, NodeId t,
                                     DTime rate, const TdsOptions& opts) {
	if (rate <= 0 || kPeriod % rate != 0)
		throw std::invalid_argument("query_profile: rate must divide the period");
	auto marked = mark_window_paths(idx, ctx, s, t, nullptr, opts);
	if (!marked)
		return std::nullopt;

	Profile p;
	p.rate = rate;
	p.marked_edges = *marked;
	std::size_t k = static_cast<std::size_t>(kPeriod / rate);
	p.samples.reserve(k);
	p.paths.reserve(k);
	// sequential by design: after the first search the marked subgraph is warm
	for (std::size_t i = 0; i < k; ++i) {
		auto r = ctx.search().run_restricted(*idx.graph, ctx.marks(),
		                                     {s, t, static_cast<DTime>(i) * rate});
		if (!r)
			return std::nullopt;
		p.samples.push_back(r->arrival);
		p.paths.push_back(std::move(r->path));
	}
	return p;
}

double interpolate(const Profile& p, DTime tau) {
	tau = wrap_time(tau);
	std::size_t i = static_cast<std::size_t>(tau / p.rate);
	DTime off = tau % p.rate;
	if (off == 0)
		return static_cast<double>(p.samples[i]);
	DTime a = p.samples[i];
	DTime b = (i + 1 < p.samples.size()) ? p.samples[i + 1] : p.samples[0] + kPeriod;
	// exact rational ((rate-off)*a + off*b) / rate, reduced before the division
	std::int64_t num = (p.rate - off) * a + off * b;
	std::int64_t den = p.rate;
	std::int64_t g = std::gcd(num, den);
	return static_cast<double>(num / g) / static_cast<double>(den / g);
}

double error_bound(DTime rate, const SlopeBounds& b) {
	double r = static_cast<double>(rate);
	return (r * b.lambda_max + r * b.lambda_min) / 4.0;
}

SlopeBounds profile_slope_bounds(const Profile& p) {
	std::vector<BreakPoint> travel;
	travel.reserve(p.samples.size());
	for (std::size_t i = 0; i < p.samples.size(); ++i) {
		DTime departure = static_cast<DTime>(i) * p.rate;
		travel.push_back({departure, p.samples[i] - departure});
	}
	return slope_bounds(travel);
}

std::size_t count_distinct_paths(const Profile& p) {
	std::set<std::vector<EdgeId>> distinct(p.paths.begin(), p.paths.end());
	return distinct.size();
}

}  // namespace tds
