#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tds/engine.h"
#include "tds/eval.h"
#include "tds/network.h"

namespace {

using namespace tds;

double now_s() {
	return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
	    .count();
}

std::string fmt_clock(DTime t) {
	DTime s = wrap_time(t) / 10;
	char buf[16];
	std::snprintf(buf, sizeof buf, "%lld:%02lld:%02lld", static_cast<long long>(s / 3600),
	              static_cast<long long>(s / 60 % 60), static_cast<long long>(s % 60));
	return buf;
}

DTime parse_clock(const std::string& text) {
	// H[:MM[:SS]]
	int h = 0, m = 0, sec = 0;
	char dummy;
	if (std::sscanf(text.c_str(), "%d:%d:%d%c", &h, &m, &sec, &dummy) == 3 ||
	    std::sscanf(text.c_str(), "%d:%d%c", &h, &m, &dummy) == 2 ||
	    std::sscanf(text.c_str(), "%d%c", &h, &dummy) == 1) {
		if (h < 0 || h > 24 || m < 0 || m > 59 || sec < 0 || sec > 59)
			throw CLI::ValidationError("windows", "invalid clock time '" + text + "'");
		return (static_cast<DTime>(h) * 3600 + m * 60 + sec) * 10;
	}
	throw CLI::ValidationError("windows", "invalid clock time '" + text + "'");
}

std::vector<TimeWindow> parse_windows(const std::string& spec) {
	std::vector<TimeWindow> windows;
	std::size_t pos = 0;
	while (pos < spec.size()) {
		std::size_t comma = spec.find(',', pos);
		std::string token = spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
		pos = comma == std::string::npos ? spec.size() : comma + 1;
		std::size_t dash = token.find('-');
		if (dash == std::string::npos)
			throw CLI::ValidationError("windows", "expected 'begin-end', got '" + token + "'");
		TimeWindow w{parse_clock(token.substr(0, dash)), parse_clock(token.substr(dash + 1))};
		if (!w.valid())
			throw CLI::ValidationError("windows", "window '" + token + "' must satisfy 0 <= begin < end <= 24:00");
		windows.push_back(w);
	}
	if (windows.empty())
		throw CLI::ValidationError("windows", "at least one window required");
	return windows;
}

struct SessionFlags {
	std::string instance;
	std::string windows = "0:00-6:00,7:00-9:00,11:00-14:00,17:00-19:00";
	std::string cache_dir;
	unsigned workers = 1;

	void attach(CLI::App* cmd) {
		cmd->add_option("--instance", instance, "instance file (tdgraph v1)")->required();
		cmd->add_option("--windows", windows, "time windows, e.g. 0:00-6:00,7:00-9:00");
		cmd->add_option("--cache", cache_dir, "directory for cached hierarchies");
		cmd->add_option("--workers", workers, "parallel index builds")->check(CLI::PositiveNumber);
	}
};

struct Session {
	TdGraph graph;
	TdsIndex idx;
};

Session open_session(const SessionFlags& flags) {
	Session s;
	s.graph = load(flags.instance);
	BuildOptions opts;
	opts.workers = flags.workers;
	if (!flags.cache_dir.empty())
		opts.cache_dir = flags.cache_dir;
	double t0 = now_s();
	s.idx = build_index(s.graph, parse_windows(flags.windows), opts);
	std::cout << "instance: " << flags.instance << " (" << s.graph.node_count() << " nodes, "
	          << s.graph.edge_count() << " edges)\n";
	std::cout << "index: " << s.idx.windows.size() << " window hierarchies + freeflow, built in "
	          << now_s() - t0 << " s\n";
	return s;
}

void require_node(const TdGraph& g, std::uint64_t v, const char* what) {
	if (v >= g.node_count())
		throw std::runtime_error(std::string(what) + " node " + std::to_string(v) + " out of range");
}

int cmd_generate(const GeneratorConfig& cfg, const std::string& out) {
	TdGraph g = generate(cfg);
	store(g, out);
	InstanceStats st = stats(g);
	std::cout << "generated " << st.node_count << " nodes, " << st.edge_count << " edges, "
	          << 100.0 * st.td_edge_fraction << "% time-dependent, "
	          << st.avg_breakpoints_per_td_edge << " breakpoints per td-edge\n";
	std::cout << "written to " << out << "\n";
	return 0;
}

int cmd_stats(const std::string& instance) {
	TdGraph g = load(instance);
	InstanceStats st = stats(g);
	std::vector<NodeId> scc = largest_scc(g);
	std::cout << "nodes: " << st.node_count << "\n";
	std::cout << "directed edges: " << st.edge_count << "\n";
	std::cout << "td-edges: " << 100.0 * st.td_edge_fraction << "%\n";
	std::cout << "breakpoints per td-edge: " << st.avg_breakpoints_per_td_edge << "\n";
	std::cout << "largest strongly connected component: " << scc.size() << " nodes\n";
	return 0;
}

int cmd_preprocess(const SessionFlags& flags) {
	Session s = open_session(flags);
	for (std::size_t i = 0; i < s.idx.windows.size(); ++i) {
		const auto& ch = *s.idx.window_ch[i];
		std::cout << "window " << fmt_clock(s.idx.windows[i].begin) << "-"
		          << fmt_clock(s.idx.windows[i].end) << ": " << ch.pool.size() << " arcs ("
		          << ch.pool.size() - s.graph.edge_count() << " shortcuts)\n";
	}
	std::cout << "freeflow: " << s.idx.freeflow_ch->pool.size() << " arcs\n";
	if (!flags.cache_dir.empty())
		std::cout << "hierarchies cached in " << flags.cache_dir << "\n";
	return 0;
}

struct QueryFlags {
	std::uint64_t s = 0, t = 0;
	double tau_s = 0.0;
	std::string algo = "tds";
	double stretch = 1.2;
	bool check = false;
	bool mark_freeflow = false;
};

int cmd_query(const SessionFlags& flags, const QueryFlags& qf) {
	Session session = open_session(flags);
	require_node(session.graph, qf.s, "source");
	require_node(session.graph, qf.t, "target");
	if (qf.tau_s < 0 || qf.tau_s >= 86400)
		throw std::runtime_error("tau must be in [0, 86400) seconds");
	EaQuery q{static_cast<NodeId>(qf.s), static_cast<NodeId>(qf.t), seconds(qf.tau_s)};

	EngineContext ctx(session.idx);
	TdsOptions opts{qf.mark_freeflow};
	std::optional<EngineResult> r;
	double t0 = now_s();
	if (qf.algo == "exact") {
		TdSearch search;
		if (auto e = search.run(session.graph, q))
			r = EngineResult{e->arrival, std::move(e->path), 0};
	} else if (qf.algo == "freeflow") {
		r = query_freeflow(session.idx, ctx, q);
	} else if (qf.algo == "tds") {
		r = query_tds(session.idx, ctx, q, opts);
	} else if (qf.algo == "tds-a") {
		r = query_tds_a(session.idx, ctx, q, AltConfig{qf.stretch}, opts);
	} else {
		throw std::runtime_error("unknown algorithm '" + qf.algo + "'");
	}
	double elapsed = now_s() - t0;

	if (!r) {
		std::cout << "unreachable\n";
		return 0;
	}
	std::cout << "algorithm: " << qf.algo << "\n";
	std::cout << "departure: " << fmt_clock(q.tau) << "\n";
	std::cout << "arrival: " << fmt_clock(r->arrival) << " (travel "
	          << to_seconds(r->arrival - q.tau) << " s)\n";
	std::cout << "query time: " << elapsed * 1000.0 << " ms\n";
	if (r->marked_edges > 0)
		std::cout << "marked edges: " << r->marked_edges << "\n";
	std::cout << "path (" << r->path.size() << " edges):";
	for (EdgeId e : r->path)
		std::cout << ' ' << e;
	std::cout << "\n";

	if (qf.check && qf.algo != "exact") {
		TdSearch search;
		auto exact = search.run(session.graph, q);
		if (!exact) {
			std::cerr << "check failed: oracle reports unreachable\n";
			return 1;
		}
		DTime abs = r->arrival - exact->arrival;
		if (abs < 0) {
			std::cerr << "check failed: result undercuts the exact oracle by " << to_seconds(-abs)
			          << " s\n";
			return 1;
		}
		DTime travel = exact->arrival - q.tau;
		double rel = travel > 0 ? static_cast<double>(abs) / static_cast<double>(travel) : 0.0;
		std::cout << "exact arrival: " << fmt_clock(exact->arrival) << "\n";
		std::cout << "absolute error: " << to_seconds(abs) << " s, relative error: " << rel << "\n";
	}
	return 0;
}

struct ProfileFlags {
	std::uint64_t s = 0, t = 0;
	std::uint64_t rate_s = 600;
	bool mark_freeflow = false;
};

int cmd_profile(const SessionFlags& flags, const ProfileFlags& pf) {
	Session session = open_session(flags);
	require_node(session.graph, pf.s, "source");
	require_node(session.graph, pf.t, "target");
	if (pf.rate_s == 0 || 86400 % pf.rate_s != 0)
		throw std::runtime_error("rate must divide 86400 seconds");
	DTime rate = static_cast<DTime>(pf.rate_s) * 10;

	EngineContext ctx(session.idx);
	double t0 = now_s();
	auto p = query_profile(session.idx, ctx, static_cast<NodeId>(pf.s), static_cast<NodeId>(pf.t),
	                       rate, TdsOptions{pf.mark_freeflow});
	double elapsed = now_s() - t0;
	if (!p) {
		std::cout << "unreachable\n";
		return 0;
	}
	for (std::size_t i = 0; i < p->samples.size(); ++i) {
		DTime dep = static_cast<DTime>(i) * rate;
		std::cout << fmt_clock(dep) << " -> " << fmt_clock(p->samples[i]) << " (travel "
		          << to_seconds(p->samples[i] - dep) << " s)\n";
	}
	SlopeBounds b = profile_slope_bounds(*p);
	std::cout << "samples: " << p->samples.size() << ", marked edges: " << p->marked_edges
	          << ", query time: " << elapsed * 1000.0 << " ms\n";
	std::cout << "distinct paths: " << count_distinct_paths(*p) << "\n";
	std::cout << "profile slopes: lambda_max " << b.lambda_max << ", lambda_min " << b.lambda_min
	          << "\n";
	std::cout << "interpolation error bound (exact samples): " << to_seconds(error_bound(rate, b))
	          << " s\n";
	return 0;
}

struct BenchFlags {
	std::string algos = "freeflow,tds,tds-a";
	std::size_t queries = 10000;
	bool rank = false;
	std::size_t per_rank = 100;
	std::uint64_t seed = 1;
	double stretch = 1.2;
	bool timing = false;
	bool mark_freeflow = false;
	std::string out;
	std::string summary_out;
};

std::vector<Algo> parse_algos(const std::string& list) {
	std::vector<Algo> algos;
	std::size_t pos = 0;
	while (pos <= list.size()) {
		std::size_t comma = list.find(',', pos);
		std::string token = list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
		pos = comma == std::string::npos ? list.size() + 1 : comma + 1;
		if (token.empty())
			continue;
		auto a = parse_algo(token);
		if (!a)
			throw std::runtime_error("unknown algorithm '" + token + "'");
		algos.push_back(*a);
	}
	if (algos.empty())
		throw std::runtime_error("no algorithms selected");
	return algos;
}

int cmd_bench(const SessionFlags& flags, const BenchFlags& bf) {
	Session session = open_session(flags);
	BenchmarkConfig cfg;
	cfg.algorithms = parse_algos(bf.algos);
	cfg.alt.stretch = bf.stretch;
	cfg.tds_options.add_freeflow_path = bf.mark_freeflow;
	cfg.workers = flags.workers;
	cfg.measure_time = bf.timing;

	std::vector<EaQuery> queries;
	std::vector<std::uint32_t> ranks;
	if (bf.rank) {
		auto rq = gen_rank(session.graph, bf.per_rank, bf.seed);
		for (const RankQuery& r : rq) {
			queries.push_back(r.query);
			ranks.push_back(r.rank);
		}
		std::cout << "rank queries: " << queries.size() << " (" << bf.per_rank << " per rank)\n";
	} else {
		queries = gen_uniform(session.graph, bf.queries, bf.seed);
		std::cout << "uniform queries: " << queries.size() << "\n";
	}

	double t0 = now_s();
	BenchmarkOutput out = run_benchmark(session.idx, queries, cfg);
	std::cout << "benchmark finished in " << now_s() - t0 << " s";
	if (out.unreachable > 0)
		std::cout << " (" << out.unreachable << " unreachable queries excluded)";
	std::cout << "\n";
	std::cout << "exact oracle: mean " << out.mean_exact_time_us << " us/query\n";
	for (const ErrorSummary& s : out.summaries) {
		std::cout << algo_name(s.algo) << ": opt " << 100.0 * s.optimally_solved_fraction
		          << "%, mean rel " << s.mean_rel_error << ", q99.9 " << s.q999_rel_error
		          << ", max " << s.max_rel_error;
		if (bf.timing)
			std::cout << ", mean " << s.mean_time_us << " us, median " << s.median_time_us
			          << " us, speedup " << s.speedup;
		std::cout << "\n";
	}

	if (!bf.out.empty()) {
		write_records_csv(bf.out, out, cfg.algorithms, ranks);
		std::cout << "records written to " << bf.out << "\n";
	}
	if (!bf.summary_out.empty()) {
		write_summary_csv(bf.summary_out, out);
		std::cout << "summary written to " << bf.summary_out << "\n";
	}
	return 0;
}

struct ExhaustiveFlags {
	std::size_t node_stride = 100;
	std::uint64_t time_stride_s = 300;
	std::uint64_t budget = 50'000'000;
	std::string out;
};

int cmd_exhaustive(const SessionFlags& flags, const ExhaustiveFlags& ef) {
	Session session = open_session(flags);
	ExhaustiveConfig cfg;
	cfg.node_stride = ef.node_stride;
	cfg.time_stride = static_cast<DTime>(ef.time_stride_s) * 10;
	cfg.query_budget = ef.budget;

	double t0 = now_s();
	ExhaustiveOutput out = run_exhaustive(session.idx, cfg);
	double total = static_cast<double>(out.total);
	std::size_t outliers = out.outliers.size();
	std::cout << "exhaustive sweep finished in " << now_s() - t0 << " s\n";
	std::cout << "queries: " << out.total << "\n";
	std::cout << "optimal: " << out.optimal << " (" << 100.0 * out.optimal / total << "%)\n";
	std::cout << "quasi-optimal: " << out.quasi_optimal << " (" << 100.0 * out.quasi_optimal / total
	          << "%)\n";
	std::cout << "outliers: " << outliers << " (" << 100.0 * outliers / total << "%)\n";
	if (!ef.out.empty()) {
		write_outliers_csv(ef.out, out);
		std::cout << "outliers written to " << ef.out << "\n";
	}
	return 0;
}

}  // namespace

int main(int argc, char** argv) {
	CLI::App app{"time-dependent road-network routing engine and evaluation harness"};
	app.require_subcommand(1);

	// generate
	auto* gen_cmd = app.add_subcommand("generate", "generate a synthetic instance");
	GeneratorConfig gen_cfg;
	std::string gen_out;
	gen_cmd->add_option("--nodes", gen_cfg.node_count, "node count")->required();
	gen_cmd->add_option("--avg-degree", gen_cfg.avg_degree, "directed edges per node");
	gen_cmd->add_option("--td-fraction", gen_cfg.td_fraction, "share of time-dependent edges");
	gen_cmd->add_option("--breakpoints", gen_cfg.breakpoints_per_td_edge, "breakpoints per td-edge");
	gen_cmd->add_option("--peaks", gen_cfg.rush_hour_peaks, "rush hour peaks (1-3)");
	gen_cmd->add_option("--seed", gen_cfg.seed, "random seed");
	gen_cmd->add_flag("--uniform-td", gen_cfg.uniform_td_placement,
	                  "place td-edges uniformly instead of biased to fast edges");
	gen_cmd->add_flag("--quantize-speeds", gen_cfg.quantize_speeds, "round speeds to 5 km/h steps");
	gen_cmd->add_option("--out", gen_out, "output instance file")->required();

	// stats
	auto* stats_cmd = app.add_subcommand("stats", "print instance statistics");
	std::string stats_instance;
	stats_cmd->add_option("--instance", stats_instance, "instance file")->required();

	// preprocess
	auto* pre_cmd = app.add_subcommand("preprocess", "build (and optionally cache) the hierarchies");
	SessionFlags pre_flags;
	pre_flags.attach(pre_cmd);

	// query
	auto* query_cmd = app.add_subcommand("query", "answer one earliest-arrival query");
	SessionFlags query_flags;
	query_flags.attach(query_cmd);
	QueryFlags qf;
	query_cmd->add_option("--s", qf.s, "source node")->required();
	query_cmd->add_option("--t", qf.t, "target node")->required();
	query_cmd->add_option("--tau", qf.tau_s, "departure time in seconds since midnight")->required();
	query_cmd->add_option("--algo", qf.algo, "exact|freeflow|tds|tds-a");
	query_cmd->add_option("--stretch", qf.stretch, "alternative path stretch");
	query_cmd->add_flag("--check", qf.check, "compare against the exact oracle");
	query_cmd->add_flag("--mark-freeflow", qf.mark_freeflow, "also mark the freeflow path");

	// profile
	auto* profile_cmd = app.add_subcommand("profile", "sampled arrival-time profile for one pair");
	SessionFlags profile_flags;
	profile_flags.attach(profile_cmd);
	ProfileFlags pf;
	profile_cmd->add_option("--s", pf.s, "source node")->required();
	profile_cmd->add_option("--t", pf.t, "target node")->required();
	profile_cmd->add_option("--rate", pf.rate_s, "sample rate in seconds (divides 86400)");
	profile_cmd->add_flag("--mark-freeflow", pf.mark_freeflow, "also mark the freeflow path");

	// bench
	auto* bench_cmd = app.add_subcommand("bench", "run a query benchmark against the exact oracle");
	SessionFlags bench_flags;
	bench_flags.attach(bench_cmd);
	BenchFlags bf;
	bench_cmd->add_option("--algos,--algo", bf.algos, "comma list of freeflow,tds,tds-a");
	bench_cmd->add_option("--queries", bf.queries, "number of uniform queries");
	bench_cmd->add_flag("--rank", bf.rank, "Dijkstra-rank queries instead of uniform");
	bench_cmd->add_option("--per-rank", bf.per_rank, "queries per rank bucket");
	bench_cmd->add_option("--seed", bf.seed, "query seed");
	bench_cmd->add_option("--stretch", bf.stretch, "alternative path stretch");
	bench_cmd->add_flag("--timing", bf.timing,
	                    "record wall-clock times in the CSV (breaks byte-determinism)");
	bench_cmd->add_flag("--mark-freeflow", bf.mark_freeflow, "also mark the freeflow path");
	bench_cmd->add_option("--out", bf.out, "per-query records CSV");
	bench_cmd->add_option("--summary", bf.summary_out, "summary CSV");

	// exhaustive
	auto* ex_cmd = app.add_subcommand("exhaustive", "all-pairs sweep over a strided node subset");
	SessionFlags ex_flags;
	ex_flags.attach(ex_cmd);
	ExhaustiveFlags ef;
	ex_cmd->add_option("--node-stride", ef.node_stride, "take every n-th node");
	ex_cmd->add_option("--time-stride", ef.time_stride_s, "departure grid in seconds");
	ex_cmd->add_option("--budget", ef.budget, "refuse sweeps beyond this many queries");
	ex_cmd->add_option("--out", ef.out, "outlier records CSV");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		int code = app.exit(e);
		return code == 0 ? 0 : 2;
	}

	try {
		if (gen_cmd->parsed())
			return cmd_generate(gen_cfg, gen_out);
		if (stats_cmd->parsed())
			return cmd_stats(stats_instance);
		if (pre_cmd->parsed())
			return cmd_preprocess(pre_flags);
		if (query_cmd->parsed())
			return cmd_query(query_flags, qf);
		if (profile_cmd->parsed())
			return cmd_profile(profile_flags, pf);
		if (bench_cmd->parsed())
			return cmd_bench(bench_flags, bf);
		if (ex_cmd->parsed())
			return cmd_exhaustive(ex_flags, ef);
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << "\n";
		return 1;
	}
	return 0;
}
