#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tds/engine.h"
#include "tds/network.h"
#include "tds/tdsearch.h"

namespace tds {

// Largest strongly connected component, ascending node ids. Queries are
// sampled inside it so that source and target are always connected.
std::vector<NodeId> largest_scc(const TdGraph& g);

// n queries with source, target uniform over the largest SCC and departure
// uniform over the day. Deterministic per seed.
std::vector<EaQuery> gen_uniform(const TdGraph& g, std::size_t n, std::uint64_t seed);

struct RankQuery {
	EaQuery query;
	std::uint32_t rank;  // ceil(log2(position of t in s's distance order))
};

// Dijkstra-rank queries on the graph weighted by the whole-day average
// travel time: per source, one target per achievable rank, the node at
// position 2^rank of the distance order. per_rank sources are drawn.
std::vector<RankQuery> gen_rank(const TdGraph& g, std::size_t per_rank, std::uint64_t seed);

// Smallest x in values such that alpha * |values| elements are smaller than
// x; alpha = 0 gives the minimum. Falls back to the maximum when no element
// qualifies (possible for alpha close to 1 with duplicates).
double quantile(std::span<const double> values, double alpha);

enum class Algo { kFreeflow, kTds, kTdsA };

std::string_view algo_name(Algo a);
std::optional<Algo> parse_algo(std::string_view name);

struct ErrorRecord {
	std::uint64_t query_id;
	EaQuery query;
	DTime exact;        // unwrapped arrival of the optimum
	DTime approx;       // unwrapped arrival of the algorithm
	DTime abs_error;    // approx - exact, always >= 0
	double rel_error;   // abs_error / (exact - tau); 0 for zero travel time
	std::int64_t time_us;
};

struct ErrorSummary {
	Algo algo;
	std::size_t query_count = 0;
	double optimally_solved_fraction = 0.0;
	double mean_rel_error = 0.0;
	double q999_rel_error = 0.0;
	double max_rel_error = 0.0;
	double mean_time_us = 0.0;
	double median_time_us = 0.0;
	double speedup = 0.0;  // mean exact time / mean algorithm time
};

struct BenchmarkConfig {
	std::vector<Algo> algorithms;
	AltConfig alt{};
	TdsOptions tds_options{};
	unsigned workers = 1;
	// wall-clock fields are zeroed in records unless enabled, keeping CSV
	// output bit-identical across runs
	bool measure_time = false;
};

struct BenchmarkOutput {
	std::vector<std::vector<ErrorRecord>> records;  // one vector per algorithm
	std::vector<ErrorSummary> summaries;
	std::vector<std::int64_t> exact_time_us;  // per query, -1 for skipped
	double mean_exact_time_us = 0.0;
	std::size_t unreachable = 0;  // queries excluded for every algorithm
};

// Runs the exact oracle plus every selected algorithm on each query.
// Throws std::logic_error if any result undercuts the oracle.
BenchmarkOutput run_benchmark(const TdsIndex& idx, std::span<const EaQuery> queries,
                              const BenchmarkConfig& cfg);

enum class QueryClass { kOptimal, kQuasiOptimal, kOutlier };

// below 10 s absolute or below 0.5 % relative counts as quasi-optimal
QueryClass classify(DTime abs_error, double rel_error);

struct ExhaustiveConfig {
	std::size_t node_stride = 100;
	DTime time_stride = 3000;  // 5 min
	std::uint64_t query_budget = 50'000'000;
	TdsOptions tds_options{};
};

struct ExhaustiveRecord {
	NodeId s;
	NodeId t;
	DTime tau;
	DTime exact;
	DTime approx;
	DTime abs_error;
	double rel_error;
};

struct ExhaustiveOutput {
	std::size_t total = 0;
	std::size_t optimal = 0;
	std::size_t quasi_optimal = 0;
	std::vector<ExhaustiveRecord> outliers;  // ordered by (s, t, tau)
};

// TD-S versus the exact oracle over all pairs of a strided node subset and a
// strided departure grid. Only outliers are materialized. Throws if the
// query count would exceed the configured budget.
ExhaustiveOutput run_exhaustive(const TdsIndex& idx, const ExhaustiveConfig& cfg);

// CSV output, schema comment included; deterministic byte-for-byte for
// deterministic inputs. A non-empty `ranks` (indexed by query id) switches to
// the rank-records schema with a trailing rank column.
void write_records_csv(const std::filesystem::path& path, const BenchmarkOutput& out,
                       const std::vector<Algo>& algorithms,
                       std::span<const std::uint32_t> ranks = {});
void write_summary_csv(const std::filesystem::path& path, const BenchmarkOutput& out);
void write_outliers_csv(const std::filesystem::path& path, const ExhaustiveOutput& out);

}  // namespace tds
