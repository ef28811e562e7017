#include "tds/eval.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <queue>
#include <stdexcept>
#include <thread>

#include "tds/rng.h"

namespace tds {

namespace {

// Kosaraju: finish order on the forward graph, then sweep the reverse graph.
std::vector<std::uint32_t> scc_ids(const TdGraph& g, std::size_t& component_count) {
	const std::size_t n = g.node_count();
	std::vector<std::vector<NodeId>> rev(n);
	for (const TdEdge& e : g.edges())
		rev[e.head].push_back(e.tail);

	std::vector<NodeId> finish_order;
	finish_order.reserve(n);
	std::vector<char> seen(n, 0);
	std::vector<std::pair<NodeId, std::uint32_t>> stack;  // (node, next child index)
	for (NodeId root = 0; root < n; ++root) {
		if (seen[root])
			continue;
		seen[root] = 1;
		stack.push_back({root, 0});
		while (!stack.empty()) {
			auto& [v, child] = stack.back();
			auto edges = g.out_edges(v);
			if (child < edges.size()) {
				NodeId w = edges[child++].head;
				if (!seen[w]) {
					seen[w] = 1;
					stack.push_back({w, 0});
				}
			} else {
				finish_order.push_back(v);
				stack.pop_back();
			}
		}
	}

	std::vector<std::uint32_t> component(n, 0);
	std::fill(seen.begin(), seen.end(), 0);
	component_count = 0;
	std::vector<NodeId> dfs;
	for (auto it = finish_order.rbegin(); it != finish_order.rend(); ++it) {
		if (seen[*it])
			continue;
		std::uint32_t id = static_cast<std::uint32_t>(component_count++);
		seen[*it] = 1;
		dfs.push_back(*it);
		while (!dfs.empty()) {
			NodeId v = dfs.back();
			dfs.pop_back();
			component[v] = id;
			for (NodeId w : rev[v]) {
				if (!seen[w]) {
					seen[w] = 1;
					dfs.push_back(w);
				}
			}
		}
	}
	return component;
}

}  // namespace

std::vector<NodeId> largest_scc(const TdGraph& g) {
	if (g.node_count() == 0)
		return {};
	std::size_t count = 0;
	std::vector<std::uint32_t> component = scc_ids(g, count);
	std::vector<std::size_t> size(count, 0);
	for (std::uint32_t c : component)
		++size[c];
	// largest component; among equals the one containing the smallest node
	std::uint32_t best = 0;
	for (NodeId v = 0; v < g.node_count(); ++v)
		if (size[component[v]] > size[best])
			best = component[v];
	std::vector<NodeId> nodes;
	nodes.reserve(size[best]);
	for (NodeId v = 0; v < g.node_count(); ++v)
		if (component[v] == best)
			nodes.push_back(v);
	return nodes;
}

std::vector<EaQuery> gen_uniform(const TdGraph& g, std::size_t n, std::uint64_t seed) {
	std::vector<NodeId> nodes = largest_scc(g);
	if (nodes.empty())
		throw std::invalid_argument("gen_uniform: empty graph");
	Rng rng(derive_seed(seed, 10));
	std::vector<EaQuery> queries;
	queries.reserve(n);
	for (std::size_t i = 0; i < n; ++i) {
		NodeId s = nodes[rng.next_below(nodes.size())];
		NodeId t = nodes[rng.next_below(nodes.size())];
		DTime tau = static_cast<DTime>(rng.next_below(kPeriod));
		queries.push_back({s, t, tau});
	}
	return queries;
}

std::vector<RankQuery> gen_rank(const TdGraph& g, std::size_t per_rank, std::uint64_t seed) {
	std::vector<NodeId> nodes = largest_scc(g);
	if (nodes.empty())
		throw std::invalid_argument("gen_rank: empty graph");
	// ranks are defined on the graph weighted by whole-day averages; the
	// edges inherit the TdGraph order, which is already grouped by tail
	ScalarGraph sg = scalar_for_window(g, TimeWindow{0, kPeriod});
	const std::size_t n = g.node_count();
	std::vector<std::uint32_t> first(n + 1, 0);
	for (const ScalarEdge& e : sg.edges)
		++first[e.tail + 1];
	for (std::size_t v = 0; v < n; ++v)
		first[v + 1] += first[v];

	Rng rng(derive_seed(seed, 11));
	std::vector<RankQuery> out;
	std::vector<std::int64_t> dist(n);
	std::vector<char> settled_flag(n);
	using Entry = std::pair<std::int64_t, NodeId>;

	for (std::size_t round = 0; round < per_rank; ++round) {
		NodeId s = nodes[rng.next_below(nodes.size())];
		std::fill(dist.begin(), dist.end(), kInfWeight);
		std::fill(settled_flag.begin(), settled_flag.end(), 0);
		std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
		dist[s] = 0;
		heap.push({0, s});
		std::vector<NodeId> order;
		order.reserve(nodes.size());
		while (!heap.empty()) {
			auto [d, v] = heap.top();
			heap.pop();
			if (settled_flag[v])
				continue;
			settled_flag[v] = 1;
			order.push_back(v);
			for (std::uint32_t i = first[v]; i < first[v + 1]; ++i) {
				const ScalarEdge& e = sg.edges[i];
				if (d + e.weight < dist[e.head]) {
					dist[e.head] = d + e.weight;
					heap.push({dist[e.head], e.head});
				}
			}
		}
		// one query per achievable rank: the node at position 2^rank (1-based)
		for (std::uint32_t rank = 0;; ++rank) {
			std::size_t p = std::size_t{1} << rank;
			if (p > order.size())
				break;
			NodeId t = order[p - 1];
			DTime tau = static_cast<DTime>(rng.next_below(kPeriod));
			out.push_back({{s, t, tau}, rank});
		}
	}
	return out;
}

double quantile(std::span<const double> values, double alpha) {
	if (values.empty())
		throw std::invalid_argument("quantile: empty input");
	if (alpha < 0.0 || alpha >= 1.0)
		throw std::invalid_argument("quantile: alpha must be in [0, 1)");
	std::vector<double> sorted(values.begin(), values.end());
	std::sort(sorted.begin(), sorted.end());
	const double need = alpha * static_cast<double>(sorted.size());
	for (std::size_t i = 0; i < sorted.size(); ++i) {
		if (i > 0 && sorted[i] == sorted[i - 1])
			continue;  // count of strictly smaller elements is the first occurrence index
		if (static_cast<double>(i) + 1e-9 >= need)
			return sorted[i];
	}
	return sorted.back();
}

std::string_view algo_name(Algo a) {
	switch (a) {
		case Algo::kFreeflow: return "freeflow";
		case Algo::kTds: return "tds";
		case Algo::kTdsA: return "tds-a";
	}
	return "?";
}

std::optional<Algo> parse_algo(std::string_view name) {
	if (name == "freeflow")
		return Algo::kFreeflow;
	if (name == "tds")
		return Algo::kTds;
	if (name == "tds-a" || name == "tds+a" || name == "tdsa")
		return Algo::kTdsA;
	return std::nullopt;
}

namespace {

double rel_error_of(DTime abs_error, DTime exact, DTime tau) {
	DTime travel = exact - tau;
	if (travel <= 0)
		return 0.0;
	return static_cast<double>(abs_error) / static_cast<double>(travel);
}

std::int64_t now_us() {
	return std::chrono::duration_cast<std::chrono::microseconds>(
	           std::chrono::steady_clock::now().time_since_epoch())
	    .count();
}

}  // namespace

BenchmarkOutput run_benchmark(const TdsIndex& idx, std::span<const EaQuery> queries,
                              const BenchmarkConfig& cfg) {
	const std::size_t q_count = queries.size();
	const std::size_t a_count = cfg.algorithms.size();

	// slot per (algorithm, query); workers fill disjoint ranges, so the merge
	// is deterministic no matter how many threads run
	std::vector<std::vector<std::optional<ErrorRecord>>> slots(
	    a_count, std::vector<std::optional<ErrorRecord>>(q_count));
	std::vector<std::int64_t> exact_us(q_count, -1);
	std::vector<char> skipped(q_count, 0);

	auto worker = [&](std::size_t begin, std::size_t end) {
		EngineContext ctx(idx);
		TdSearch exact_search;
		for (std::size_t qi = begin; qi < end; ++qi) {
			const EaQuery& q = queries[qi];
			std::int64_t t0 = now_us();
			auto exact = exact_search.run(*idx.graph, q);
			exact_us[qi] = now_us() - t0;
			if (!exact) {
				skipped[qi] = 1;
				continue;
			}
			for (std::size_t ai = 0; ai < a_count; ++ai) {
				std::optional<EngineResult> r;
				std::int64_t t1 = now_us();
				switch (cfg.algorithms[ai]) {
					case Algo::kFreeflow: r = query_freeflow(idx, ctx, q); break;
					case Algo::kTds: r = query_tds(idx, ctx, q, cfg.tds_options); break;
					case Algo::kTdsA: r = query_tds_a(idx, ctx, q, cfg.alt, cfg.tds_options); break;
				}
				std::int64_t elapsed = now_us() - t1;
				if (!r)
					throw std::logic_error("run_benchmark: algorithm unreachable where the oracle found a path");
				DTime abs = r->arrival - exact->arrival;
				if (abs < 0)
					throw std::logic_error("run_benchmark: result undercuts the exact oracle");
				ErrorRecord rec;
				rec.query_id = qi;
				rec.query = q;
				rec.exact = exact->arrival;
				rec.approx = r->arrival;
				rec.abs_error = abs;
				rec.rel_error = rel_error_of(abs, exact->arrival, q.tau);
				rec.time_us = cfg.measure_time ? elapsed : 0;
				slots[ai][qi] = rec;
			}
		}
	};

	unsigned workers = std::max(1u, cfg.workers);
	if (workers == 1 || q_count < 2 * workers) {
		worker(0, q_count);
	} else {
		std::vector<std::thread> threads;
		std::size_t chunk = (q_count + workers - 1) / workers;
		for (unsigned w = 0; w < workers; ++w) {
			std::size_t begin = std::min<std::size_t>(w * chunk, q_count);
			std::size_t end = std::min<std::size_t>(begin + chunk, q_count);
			if (begin < end)
				threads.emplace_back(worker, begin, end);
		}
		for (auto& t : threads)
			t.join();
	}

	BenchmarkOutput out;
	out.records.resize(a_count);
	out.exact_time_us.assign(exact_us.begin(), exact_us.end());
	double exact_sum = 0.0;
	std::size_t exact_n = 0;
	for (std::size_t qi = 0; qi < q_count; ++qi) {
		if (skipped[qi]) {
			++out.unreachable;
			continue;
		}
		exact_sum += static_cast<double>(exact_us[qi]);
		++exact_n;
	}
	out.mean_exact_time_us = exact_n ? exact_sum / static_cast<double>(exact_n) : 0.0;

	for (std::size_t ai = 0; ai < a_count; ++ai) {
		auto& recs = out.records[ai];
		recs.reserve(q_count - out.unreachable);
		for (std::size_t qi = 0; qi < q_count; ++qi)
			if (slots[ai][qi])
				recs.push_back(*slots[ai][qi]);

		ErrorSummary s;
		s.algo = cfg.algorithms[ai];
		s.query_count = recs.size();
		if (!recs.empty()) {
			std::size_t optimal = 0;
			double rel_sum = 0.0;
			std::vector<double> rels, times;
			rels.reserve(recs.size());
			times.reserve(recs.size());
			for (const ErrorRecord& r : recs) {
				if (r.abs_error == 0)
					++optimal;
				rel_sum += r.rel_error;
				rels.push_back(r.rel_error);
				times.push_back(static_cast<double>(r.time_us));
				s.max_rel_error = std::max(s.max_rel_error, r.rel_error);
			}
			s.optimally_solved_fraction = static_cast<double>(optimal) / static_cast<double>(recs.size());
			s.mean_rel_error = rel_sum / static_cast<double>(recs.size());
			s.q999_rel_error = quantile(rels, 0.999);
			double time_sum = 0.0;
			for (double t : times)
				time_sum += t;
			s.mean_time_us = time_sum / static_cast<double>(times.size());
			s.median_time_us = quantile(times, 0.5);
			if (s.mean_time_us > 0.0)
				s.speedup = out.mean_exact_time_us / s.mean_time_us;
		}
		out.summaries.push_back(s);
	}
	return out;
}

QueryClass classify(DTime abs_error, double rel_error) {
	if (abs_error == 0)
		return QueryClass::kOptimal;
	if (abs_error < 100 || rel_error < 0.005)
		return QueryClass::kQuasiOptimal;
	return QueryClass::kOutlier;
}

ExhaustiveOutput run_exhaustive(const TdsIndex& idx, const ExhaustiveConfig& cfg) {
	if (cfg.node_stride < 1 || cfg.time_stride < 1)
		throw std::invalid_argument("run_exhaustive: strides must be >= 1");
	const TdGraph& g = *idx.graph;
	std::vector<NodeId> component = largest_scc(g);
	std::vector<NodeId> subset;
	for (std::size_t i = 0; i < component.size(); i += cfg.node_stride)
		subset.push_back(component[i]);
	std::vector<DTime> departures;
	for (DTime tau = 0; tau < kPeriod; tau += cfg.time_stride)
		departures.push_back(tau);

	std::uint64_t total = static_cast<std::uint64_t>(subset.size()) *
	                      static_cast<std::uint64_t>(subset.size() - 1) * departures.size();
	if (total > cfg.query_budget)
		throw std::invalid_argument("run_exhaustive: " + std::to_string(total) +
		                            " queries exceed the budget of " + std::to_string(cfg.query_budget));

	ExhaustiveOutput out;
	out.total = total;

	EngineContext ctx(idx);
	TdSearch exact_search;
	// exact arrivals come from one one-to-all search per (source, departure);
	// the pruned search runs per (pair, departure) with marks reused across the day
	std::vector<std::vector<DTime>> exact(departures.size(),
	                                      std::vector<DTime>(subset.size(), -1));
	std::vector<DTime> all_arrivals;
	for (NodeId s : subset) {
		for (std::size_t di = 0; di < departures.size(); ++di) {
			exact_search.run_all(g, s, departures[di], all_arrivals);
			for (std::size_t ti = 0; ti < subset.size(); ++ti) {
				if (all_arrivals[subset[ti]] == TdSearch::kUnreachableTime)
					throw std::logic_error("run_exhaustive: unreachable pair inside the SCC");
				exact[di][ti] = all_arrivals[subset[ti]];
			}
		}
		for (std::size_t ti = 0; ti < subset.size(); ++ti) {
			NodeId t = subset[ti];
			if (t == s)
				continue;
			for (std::size_t di = 0; di < departures.size(); ++di) {
				DTime tau = departures[di];
				auto r = query_tds(idx, ctx, {s, t, tau}, cfg.tds_options);
				if (!r)
					throw std::logic_error("run_exhaustive: TD-S unreachable inside the SCC");
				DTime abs = r->arrival - exact[di][ti];
				if (abs < 0)
					throw std::logic_error("run_exhaustive: result undercuts the exact oracle");
				double rel = rel_error_of(abs, exact[di][ti], tau);
				switch (classify(abs, rel)) {
					case QueryClass::kOptimal: ++out.optimal; break;
					case QueryClass::kQuasiOptimal: ++out.quasi_optimal; break;
					case QueryClass::kOutlier:
						out.outliers.push_back({s, t, tau, exact[di][ti], r->arrival, abs, rel});
						break;
				}
			}
		}
	}
	return out;
}

namespace {

void append_double(std::string& line, double v) {
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.9g", v);
	line += buf;
}

}  // namespace

void write_records_csv(const std::filesystem::path& path, const BenchmarkOutput& out,
                       const std::vector<Algo>& algorithms, std::span<const std::uint32_t> ranks) {
	std::ofstream f(path, std::ios::binary);
	if (!f)
		throw std::runtime_error("cannot open " + path.string() + " for writing");
	if (ranks.empty()) {
		f << "# schema: tds-query-records v1; times in deciseconds\n";
		f << "query_id,s,t,tau,algo,exact,approx,abs_err,rel_err,time_us\n";
	} else {
		f << "# schema: tds-rank-records v1; times in deciseconds\n";
		f << "query_id,s,t,tau,algo,exact,approx,abs_err,rel_err,time_us,rank\n";
	}
	// grouped by query, algorithms in the configured order
	std::vector<std::size_t> cursor(out.records.size(), 0);
	for (std::uint64_t qi = 0;; ++qi) {
		bool any = false;
		for (std::size_t ai = 0; ai < out.records.size(); ++ai) {
			const auto& recs = out.records[ai];
			std::size_t& c = cursor[ai];
			if (c >= recs.size())
				continue;
			any = true;
			if (recs[c].query_id != qi)
				continue;
			const ErrorRecord& r = recs[c++];
			std::string line;
			line += std::to_string(r.query_id);
			line += ',';
			line += std::to_string(r.query.s);
			line += ',';
			line += std::to_string(r.query.t);
			line += ',';
			line += std::to_string(r.query.tau);
			line += ',';
			line += algo_name(algorithms[ai]);
			line += ',';
			line += std::to_string(r.exact);
			line += ',';
			line += std::to_string(r.approx);
			line += ',';
			line += std::to_string(r.abs_error);
			line += ',';
			append_double(line, r.rel_error);
			line += ',';
			line += std::to_string(r.time_us);
			if (!ranks.empty()) {
				line += ',';
				line += std::to_string(ranks[r.query_id]);
			}
			line += '\n';
			f << line;
		}
		if (!any)
			break;
	}
	if (!f)
		throw std::runtime_error("write to " + path.string() + " failed");
}

void write_summary_csv(const std::filesystem::path& path, const BenchmarkOutput& out) {
	std::ofstream f(path, std::ios::binary);
	if (!f)
		throw std::runtime_error("cannot open " + path.string() + " for writing");
	f << "# schema: tds-summary v1\n";
	f << "algo,queries,unreachable,opt_fraction,mean_rel,q999_rel,max_rel,mean_time_us,median_time_us,speedup\n";
	for (const ErrorSummary& s : out.summaries) {
		std::string line;
		line += algo_name(s.algo);
		line += ',';
		line += std::to_string(s.query_count);
		line += ',';
		line += std::to_string(out.unreachable);
		line += ',';
		append_double(line, s.optimally_solved_fraction);
		line += ',';
		append_double(line, s.mean_rel_error);
		line += ',';
		append_double(line, s.q999_rel_error);
		line += ',';
		append_double(line, s.max_rel_error);
		line += ',';
		append_double(line, s.mean_time_us);
		line += ',';
		append_double(line, s.median_time_us);
		line += ',';
		append_double(line, s.speedup);
		line += '\n';
		f << line;
	}
	if (!f)
		throw std::runtime_error("write to " + path.string() + " failed");
}

void write_outliers_csv(const std::filesystem::path& path, const ExhaustiveOutput& out) {
	std::ofstream f(path, std::ios::binary);
	if (!f)
		throw std::runtime_error("cannot open " + path.string() + " for writing");
	f << "# schema: tds-exhaustive-outliers v1; times in deciseconds; rows grouped by (s,t)\n";
	f << "s,t,tau,exact,approx,abs_err,rel_err\n";
	for (const ExhaustiveRecord& r : out.outliers) {
		std::string line;
		line += std::to_string(r.s);
		line += ',';
		line += std::to_string(r.t);
		line += ',';
		line += std::to_string(r.tau);
		line += ',';
		line += std::to_string(r.exact);
		line += ',';
		line += std::to_string(r.approx);
		line += ',';
		line += std::to_string(r.abs_error);
		line += ',';
		append_double(line, r.rel_error);
		line += '\n';
		f << line;
	}
	if (!f)
		throw std::runtime_error("write to " + path.string() + " failed");
}

}  // namespace tds
