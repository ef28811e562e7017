#include "tds/tdsearch.h"

#include <doctest.h>

#include "tds/rng.h"
#include "test_util.h"

using namespace tds;

TEST_CASE("single constant edge") {
	TdGraph g(2, {{0, 1, TravelTimeFunction::constant(1000)}});
	TdSearch search;
	auto r = search.run(g, {0, 1, 0});
	REQUIRE(r.has_value());
	CHECK(r->arrival == 1000);
	CHECK(r->path == std::vector<EdgeId>{0});
}

TEST_CASE("source equals target") {
	TdGraph g(2, {{0, 1, TravelTimeFunction::constant(1000)}});
	TdSearch search;
	auto r = search.run(g, {0, 0, 4321});
	REQUIRE(r.has_value());
	CHECK(r->arrival == 4321);
	CHECK(r->path.empty());
}

TEST_CASE("eval_path basics") {
	TdGraph g(3, {{0, 1, TravelTimeFunction::constant(1000)},
	              {1, 2, TravelTimeFunction::constant(2000)}});
	CHECK(eval_path(g, {}, 777) == 777);
	CHECK(eval_path(g, {0, 1}, 0) == 3000);
	CHECK_THROWS_AS((void)eval_path(g, {1, 0}, 0), std::invalid_argument);
}

TEST_CASE("eval_path matches an independent fold") {
	Rng rng(211);
	for (int round = 0; round < 20; ++round) {
		TdGraph g = test::random_small_graph(rng);
		TdSearch search;
		NodeId s = static_cast<NodeId>(rng.next_below(g.node_count()));
		NodeId t = static_cast<NodeId>(rng.next_below(g.node_count()));
		DTime tau = rng.next_in(0, kPeriod - 1);
		auto r = search.run(g, {s, t, tau});
		if (!r)
			continue;
		DTime at = tau;
		for (EdgeId e : r->path)
			at += eval(g.edge(e).ttf, wrap_time(at));
		CHECK(eval_path(g, r->path, tau) == at);
		CHECK(r->arrival == at);  // path consistency
	}
}

TEST_CASE("diamond fixture matches brute force at many departures") {
	TdGraph g = test::diamond_fixture();
	TdSearch search;
	for (int i = 0; i < 64; ++i) {
		DTime tau = static_cast<DTime>(i) * (kPeriod / 64);
		auto r = search.run(g, {0, 3, tau});
		auto oracle = test::brute_force_arrival(g, 0, 3, tau);
		REQUIRE(r.has_value());
		REQUIRE(oracle.has_value());
		CHECK(r->arrival == *oracle);
	}
	// off peak the top route wins, in the peak the bottom one
	CHECK(search.run(g, {0, 3, 0})->arrival == 6000);
	CHECK(search.run(g, {0, 3, 285000})->arrival == 285000 + 10000);
}

TEST_CASE("small random instances match path enumeration") {
	Rng rng(223);
	for (int round = 0; round < 50; ++round) {
		TdGraph g = test::random_small_graph(rng);
		TdSearch search;
		NodeId s = static_cast<NodeId>(rng.next_below(g.node_count()));
		NodeId t = static_cast<NodeId>(rng.next_below(g.node_count()));
		for (int i = 0; i < 24; ++i) {
			DTime tau = static_cast<DTime>(i) * (kPeriod / 24);
			auto r = search.run(g, {s, t, tau});
			auto oracle = test::brute_force_arrival(g, s, t, tau);
			CHECK(r.has_value() == oracle.has_value());
			if (r && oracle)
				CHECK(r->arrival == *oracle);
		}
	}
}

TEST_CASE("arrival is monotone in the departure time") {
	Rng rng(227);
	for (int round = 0; round < 20; ++round) {
		TdGraph g = test::random_small_graph(rng);
		TdSearch search;
		NodeId s = static_cast<NodeId>(rng.next_below(g.node_count()));
		NodeId t = static_cast<NodeId>(rng.next_below(g.node_count()));
		DTime prev = -1;
		bool reachable = true;
		for (int i = 0; i <= 48 && reachable; ++i) {
			DTime tau = static_cast<DTime>(i) * (kPeriod / 48);
			auto r = search.run(g, {s, t, std::min(tau, kPeriod - 1)});
			if (!r) {
				reachable = false;
				break;
			}
			CHECK(r->arrival >= prev);
			prev = r->arrival;
		}
	}
}

TEST_CASE("restricted search with every edge marked equals the full search") {
	Rng rng(229);
	GeneratorConfig cfg;
	cfg.node_count = 400;
	cfg.td_fraction = 0.3;
	cfg.seed = 3;
	TdGraph g = generate(cfg);
	EdgeMark marks(g.edge_count());
	marks.mark_all();
	TdSearch search;
	for (int i = 0; i < 500; ++i) {
		EaQuery q{static_cast<NodeId>(rng.next_below(g.node_count())),
		          static_cast<NodeId>(rng.next_below(g.node_count())), rng.next_in(0, kPeriod - 1)};
		auto full = search.run(g, q);
		auto restricted = search.run_restricted(g, marks, q);
		CHECK(full.has_value() == restricted.has_value());
		if (full && restricted) {
			CHECK(full->arrival == restricted->arrival);
			CHECK(full->path == restricted->path);
		}
	}
}

TEST_CASE("restricted search dominates the full search") {
	Rng rng(233);
	for (int round = 0; round < 20; ++round) {
		TdGraph g = test::random_small_graph(rng);
		EdgeMark marks(g.edge_count());
		TdSearch search;
		for (EdgeId e = 0; e < g.edge_count(); ++e)
			if (rng.next_below(2) == 0)
				marks.mark(e);
		for (int i = 0; i < 10; ++i) {
			EaQuery q{static_cast<NodeId>(rng.next_below(g.node_count())),
			          static_cast<NodeId>(rng.next_below(g.node_count())),
			          rng.next_in(0, kPeriod - 1)};
			auto full = search.run(g, q);
			auto restricted = search.run_restricted(g, marks, q);
			if (restricted) {
				REQUIRE(full.has_value());
				CHECK(restricted->arrival >= full->arrival);
			}
		}
	}
}

TEST_CASE("restricted to one path evaluates that path") {
	TdGraph g = test::diamond_fixture();
	EdgeMark marks(g.edge_count());
	TdSearch search;
	// only the bottom route 0 -> 2 -> 3
	EdgeId bottom1 = kInvalidEdge, bottom2 = kInvalidEdge;
	for (EdgeId e = 0; e < g.edge_count(); ++e) {
		if (g.edge(e).tail == 0 && g.edge(e).head == 2)
			bottom1 = e;
		if (g.edge(e).tail == 2 && g.edge(e).head == 3)
			bottom2 = e;
	}
	marks.mark(bottom1);
	marks.mark(bottom2);
	auto r = search.run_restricted(g, marks, {0, 3, 0});
	REQUIRE(r.has_value());
	CHECK(r->arrival == eval_path(g, {bottom1, bottom2}, 0));
	CHECK(r->arrival == 10000);

	marks.clear();
	CHECK(!search.run_restricted(g, marks, {0, 3, 0}).has_value());
}

TEST_CASE("run_all matches single-target searches") {
	Rng rng(239);
	TdGraph g = test::random_small_graph(rng);
	TdSearch search;
	std::vector<DTime> all;
	DTime tau = 120000;
	NodeId s = 0;
	search.run_all(g, s, tau, all);
	for (NodeId t = 0; t < g.node_count(); ++t) {
		auto r = search.run(g, {s, t, tau});
		if (r)
			CHECK(all[t] == r->arrival);
		else
			CHECK(all[t] == TdSearch::kUnreachableTime);
	}
}

TEST_CASE("paths crossing midnight stay consistent") {
	// one slow edge departing shortly before midnight
	TdGraph g(3, {{0, 1, TravelTimeFunction::constant(36000)},  // 1 h
	              {1, 2, TravelTimeFunction({{0, 5000}, {432000, 7000}})}});
	TdSearch search;
	DTime tau = kPeriod - 18000;  // 23:30
	auto r = search.run(g, {0, 2, tau});
	REQUIRE(r.has_value());
	CHECK(r->arrival > kPeriod);  // unwrapped
	CHECK(r->arrival == eval_path(g, r->path, tau));
	// second hop departs at 0:30 next day, evaluated with the wrapped clock
	DTime hop = tau + 36000;
	CHECK(r->arrival == hop + eval(g.edge(1).ttf, wrap_time(hop)));
}
