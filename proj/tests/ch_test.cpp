#include "tds/ch.h"

#include <doctest.h>

#include <filesystem>
#include <set>

#include "tds/rng.h"
#include "test_util.h"

using namespace tds;

namespace {

ScalarGraph path_graph() {
	// a -> b -> c with weights 5 and 7
	ScalarGraph g;
	g.node_count = 3;
	g.edges = {{0, 1, 5, 0}, {1, 2, 7, 1}};
	return g;
}

std::int64_t path_weight(const ScalarGraph& g, const std::vector<EdgeId>& edges) {
	std::int64_t sum = 0;
	for (EdgeId e : edges)
		sum += g.edges[e].weight;
	return sum;
}

bool is_walk(const ScalarGraph& g, const std::vector<EdgeId>& edges, NodeId s, NodeId t) {
	NodeId at = s;
	for (EdgeId e : edges) {
		if (g.edges[e].tail != at)
			return false;
		at = g.edges[e].head;
	}
	return at == t;
}

}  // namespace

TEST_CASE("path graph query") {
	ChIndex ch = build(path_graph());
	ChQuery q;
	auto r = q.run(ch, 0, 2);
	REQUIRE(r.has_value());
	CHECK(r->distance == 12);
	CHECK(r->edges == std::vector<EdgeId>{0, 1});
	auto self = q.run(ch, 1, 1);
	REQUIRE(self.has_value());
	CHECK(self->distance == 0);
	CHECK(self->edges.empty());
	CHECK(!q.run(ch, 2, 0).has_value());
}

TEST_CASE("isolated node") {
	ScalarGraph g = path_graph();
	g.node_count = 4;  // node 3 has no edges
	ChIndex ch = build(g);
	ChQuery q;
	CHECK(!q.run(ch, 0, 3).has_value());
	CHECK(!q.run(ch, 3, 0).has_value());
	auto r = q.run(ch, 3, 3);
	REQUIRE(r.has_value());
	CHECK(r->distance == 0);
}

TEST_CASE("queries match the Dijkstra oracle on random graphs") {
	Rng rng(101);
	for (int round = 0; round < 40; ++round) {
		ScalarGraph g = test::random_scalar_graph(rng, 35);
		ChIndex ch = build(g);
		ChQuery q;
		for (NodeId s = 0; s < g.node_count; ++s) {
			auto oracle = test::dijkstra_distances(g, s);
			for (NodeId t = 0; t < g.node_count; ++t) {
				auto r = q.run(ch, s, t);
				if (oracle[t] == kInfWeight) {
					CHECK(!r.has_value());
				} else {
					REQUIRE(r.has_value());
					CHECK(r->distance == oracle[t]);
					CHECK(path_weight(g, r->edges) == r->distance);
					CHECK(is_walk(g, r->edges, s, t));
				}
			}
		}
	}
}

TEST_CASE("build handles parallel edges") {
	ScalarGraph g;
	g.node_count = 2;
	g.edges = {{0, 1, 9, 0}, {0, 1, 4, 1}, {0, 1, 11, 2}};
	ChIndex ch = build(g);
	ChQuery q;
	auto r = q.run(ch, 0, 1);
	REQUIRE(r.has_value());
	CHECK(r->distance == 4);
	CHECK(r->edges == std::vector<EdgeId>{1});
}

TEST_CASE("build is deterministic") {
	Rng rng(103);
	ScalarGraph g = test::random_scalar_graph(rng, 30);
	ChIndex a = build(g);
	ChIndex b = build(g);
	CHECK(a.rank == b.rank);
	CHECK(a.pool.size() == b.pool.size());
	CHECK(a.fwd_first == b.fwd_first);
	CHECK(a.bwd_first == b.bwd_first);
}

TEST_CASE("alternatives on a unique path equal the query path") {
	ChIndex ch = build(path_graph());
	ChQuery q;
	auto alt = q.run_alternatives(ch, 0, 2, {1.2});
	REQUIRE(alt.has_value());
	CHECK(*alt == std::vector<EdgeId>{0, 1});
}

TEST_CASE("alternatives mark both paths within the stretch") {
	// two disjoint 0 -> 3 routes: weight 10 (via 1) and weight 11 (via 2)
	ScalarGraph g;
	g.node_count = 4;
	g.edges = {{0, 1, 5, 0}, {1, 3, 5, 1}, {0, 2, 5, 2}, {2, 3, 6, 3}};
	ChIndex ch = build(g);
	ChQuery q;
	auto alt = q.run_alternatives(ch, 0, 3, {1.2});
	REQUIRE(alt.has_value());
	CHECK(*alt == std::vector<EdgeId>{0, 1, 2, 3});

	// with stretch 1.0 only the shortest survives
	auto tight = q.run_alternatives(ch, 0, 3, {1.0});
	REQUIRE(tight.has_value());
	CHECK(*tight == std::vector<EdgeId>{0, 1});
}

TEST_CASE("alternatives include the shortest path and grow with stretch") {
	Rng rng(107);
	for (int round = 0; round < 15; ++round) {
		ScalarGraph g = test::random_scalar_graph(rng, 30);
		ChIndex ch = build(g);
		ChQuery q;
		for (int i = 0; i < 30; ++i) {
			NodeId s = static_cast<NodeId>(rng.next_below(g.node_count));
			NodeId t = static_cast<NodeId>(rng.next_below(g.node_count));
			auto best = q.run(ch, s, t);
			auto narrow = q.run_alternatives(ch, s, t, {1.1});
			auto wide = q.run_alternatives(ch, s, t, {1.5});
			CHECK(best.has_value() == narrow.has_value());
			if (!best)
				continue;
			std::set<EdgeId> narrow_set(narrow->begin(), narrow->end());
			std::set<EdgeId> wide_set(wide->begin(), wide->end());
			for (EdgeId e : best->edges)
				CHECK(narrow_set.count(e) == 1);
			for (EdgeId e : *narrow)
				CHECK(wide_set.count(e) == 1);
		}
	}
}

TEST_CASE("index cache round trips and invalidates") {
	Rng rng(109);
	ScalarGraph g = test::random_scalar_graph(rng, 25);
	ChIndex ch = build(g);
	std::uint64_t hash = scalar_graph_hash(g);

	auto dir = std::filesystem::temp_directory_path() / "tds_tests";
	std::filesystem::create_directories(dir);
	auto file = dir / "cache_test.bin";
	save_cached(ch, hash, file);

	auto loaded = load_cached(hash, file);
	REQUIRE(loaded.has_value());
	ChQuery q;
	for (int i = 0; i < 20; ++i) {
		NodeId s = static_cast<NodeId>(rng.next_below(g.node_count));
		NodeId t = static_cast<NodeId>(rng.next_below(g.node_count));
		auto a = q.run(ch, s, t);
		auto b = q.run(*loaded, s, t);
		CHECK(a.has_value() == b.has_value());
		if (a && b) {
			CHECK(a->distance == b->distance);
			CHECK(a->edges == b->edges);
		}
	}

	CHECK(!load_cached(hash + 1, file).has_value());   // different graph
	CHECK(!load_cached(hash, dir / "missing.bin").has_value());

	// truncated file is rejected
	auto trunc = dir / "cache_trunc.bin";
	std::filesystem::copy_file(file, trunc, std::filesystem::copy_options::overwrite_existing);
	std::filesystem::resize_file(trunc, std::filesystem::file_size(trunc) / 2);
	CHECK(!load_cached(hash, trunc).has_value());
}

TEST_CASE("build rejects bad input") {
	ScalarGraph g;
	g.node_count = 2;
	g.edges = {{0, 1, 0, 0}};
	CHECK_THROWS_AS((void)build(g), std::invalid_argument);
	g.edges = {{0, 7, 5, 0}};
	CHECK_THROWS_AS((void)build(g), std::invalid_argument);
}
