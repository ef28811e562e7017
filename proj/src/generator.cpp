#include <algorithm>
#include <cmath>
#include <numeric>

#include "tds/network.h"
#include "tds/rng.h"

namespace tds {

namespace {

struct RawEdge {
	NodeId tail;
	NodeId head;
	double dist_km;
	int category;  // 0 = grid, 1 = diagonal, 2 = shortcut
};

double pick_speed(Rng& rng, double lo, double hi, bool quantize) {
	double s = lo + (hi - lo) * rng.next_unit();
	if (quantize)
		s = std::max(5.0, 5.0 * std::round(s / 5.0));
	return s;
}

DTime base_travel(double dist_km, double speed_kmh) {
	return std::max<DTime>(10, static_cast<DTime>(std::llround(dist_km / speed_kmh * 36000.0)));
}

// Triangle congestion bump, 1 at the center, 0 outside [center - width, center + width].
double bump(DTime t, DTime center, DTime width) {
	double x = std::abs(static_cast<double>(t - center)) / static_cast<double>(width);
	return x >= 1.0 ? 0.0 : 1.0 - x;
}

struct Peak {
	DTime center;
	DTime width;
	double amplitude;
};

TravelTimeFunction make_td_function(Rng& rng, DTime base, std::size_t breakpoints,
                                    std::size_t peak_count) {
	// Morning, evening, midday rush hours; centers jittered per edge. All peak
	// windows stay inside (0:00, 23:00) so the anchors at both ends sit at the
	// freeflow value and the wrap segment is flat.
	static constexpr DTime kPeakCenters[3] = {288000, 630000, 450000};  // 8:00, 17:30, 12:30
	std::vector<Peak> peaks;
	for (std::size_t p = 0; p < peak_count; ++p) {
		DTime center = kPeakCenters[p] + rng.next_in(-18000, 18000);
		DTime width = rng.next_in(46800, 79200);  // 1.3 h .. 2.2 h ramps
		// Slope of a ramp is amplitude*base/width; keep it clearly above -1 so
		// that integer rounding cannot push a segment past the FIFO limit.
		double amplitude = 0.3 + 0.9 * rng.next_unit();
		amplitude = std::min(amplitude, 0.8 * static_cast<double>(width) / static_cast<double>(base));
		peaks.push_back({center, width, amplitude});
	}

	std::vector<DTime> times;
	times.push_back(0);
	times.push_back(828000);  // 23:00 anchor, past every peak window
	std::size_t inner = breakpoints - 2;
	for (std::size_t i = 0; i < inner; ++i) {
		const Peak& pk = peaks[i % peaks.size()];
		times.push_back(pk.center + rng.next_in(-pk.width, pk.width));
	}
	std::sort(times.begin(), times.end());
	for (std::size_t i = 1; i < times.size(); ++i)  // nudge duplicates apart
		if (times[i] <= times[i - 1])
			times[i] = times[i - 1] + 10;

	std::vector<BreakPoint> pts;
	pts.reserve(times.size());
	for (DTime t : times) {
		double factor = 1.0;
		for (const Peak& pk : peaks)
			factor += pk.amplitude * bump(t, pk.center, pk.width);
		pts.push_back({t, std::max<DTime>(1, std::llround(static_cast<double>(base) * factor))});
	}
	// FIFO clamp: lift any descent steeper than -1 (can only be triggered by
	// rounding or overlapping peak windows)
	for (std::size_t i = 1; i < pts.size(); ++i)
		pts[i].travel = std::max(pts[i].travel, pts[i - 1].travel - (pts[i].at - pts[i - 1].at));
	return TravelTimeFunction(std::move(pts));
}

}  // namespace

TdGraph generate(const GeneratorConfig& cfg) {
	if (cfg.node_count < 2)
		throw std::invalid_argument("generate: node_count must be >= 2");
	if (cfg.td_fraction < 0.0 || cfg.td_fraction > 1.0)
		throw std::invalid_argument("generate: td_fraction must be in [0, 1]");
	if (cfg.rush_hour_peaks < 1 || cfg.rush_hour_peaks > 3)
		throw std::invalid_argument("generate: rush_hour_peaks must be in [1, 3]");
	if (cfg.breakpoints_per_td_edge < 4)
		throw std::invalid_argument("generate: breakpoints_per_td_edge must be >= 4");
	if (cfg.avg_degree < 0.0)
		throw std::invalid_argument("generate: avg_degree must be >= 0");

	const std::size_t n = cfg.node_count;
	const std::size_t side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));

	Rng topo_rng(derive_seed(cfg.seed, 0));
	std::vector<RawEdge> raw;

	// mandatory grid skeleton, both directions: keeps the instance strongly connected
	for (NodeId v = 0; v < n; ++v) {
		if (v % side != side - 1 && v + 1 < n) {
			raw.push_back({v, v + 1, 1.0, 0});
			raw.push_back({v + 1, v, 1.0, 0});
		}
		if (v + side < n) {
			raw.push_back({v, static_cast<NodeId>(v + side), 1.0, 0});
			raw.push_back({static_cast<NodeId>(v + side), v, 1.0, 0});
		}
	}

	const std::size_t target_m =
	    std::max(raw.size(), static_cast<std::size_t>(std::llround(cfg.avg_degree * static_cast<double>(n))));
	std::size_t extra = target_m - raw.size();
	std::size_t diagonal_budget = extra * 7 / 10 / 2;  // diagonals come in pairs
	std::size_t shortcut_budget = extra - 2 * diagonal_budget;

	for (std::size_t i = 0; i < diagonal_budget; ++i) {
		NodeId v = static_cast<NodeId>(topo_rng.next_below(n));
		NodeId w = static_cast<NodeId>(v + side + 1);
		if (v % side == side - 1 || w >= n)
			continue;
		raw.push_back({v, w, 1.4142135623730951, 1});
		raw.push_back({w, v, 1.4142135623730951, 1});
	}

	// motorway layer: straight fast corridors along grid rows and columns
	// whose segments hop several cells at once; linear corridors keep the
	// road-like structure that hierarchy techniques thrive on
	std::size_t corridor_edges = 0;
	// attempts are bounded: tiny grids may not fit a single corridor
	for (std::size_t attempt = 0; corridor_edges < shortcut_budget && attempt < shortcut_budget + 64;
	     ++attempt) {
		bool horizontal = topo_rng.next_below(2) == 0;
		std::size_t hop = 3 + topo_rng.next_below(4);
		std::size_t lane = topo_rng.next_below(side);
		std::size_t length = side / 3 + topo_rng.next_below(std::max<std::size_t>(1, side / 2));
		std::size_t start = topo_rng.next_below(side);
		NodeId prev = kInvalidNode;
		for (std::size_t off = 0; off <= length; off += hop) {
			std::size_t x = horizontal ? start + off : lane;
			std::size_t y = horizontal ? lane : start + off;
			if (x >= side || y >= side)
				break;
			std::size_t id = y * side + x;
			if (id >= n)
				break;
			NodeId cur = static_cast<NodeId>(id);
			if (prev != kInvalidNode) {
				raw.push_back({prev, cur, static_cast<double>(hop), 2});
				raw.push_back({cur, prev, static_cast<double>(hop), 2});
				corridor_edges += 2;
			}
			prev = cur;
		}
	}

	Rng speed_rng(derive_seed(cfg.seed, 1));
	std::vector<DTime> base(raw.size());
	for (std::size_t i = 0; i < raw.size(); ++i) {
		double speed;
		switch (raw[i].category) {
			case 0: speed = pick_speed(speed_rng, 30.0, 70.0, cfg.quantize_speeds); break;
			case 1: speed = pick_speed(speed_rng, 50.0, 90.0, cfg.quantize_speeds); break;
			default: speed = pick_speed(speed_rng, 90.0, 130.0, cfg.quantize_speeds); break;
		}
		base[i] = base_travel(raw[i].dist_km, speed);
	}

	// choose which edges become time-dependent
	Rng td_rng(derive_seed(cfg.seed, 2));
	std::vector<std::size_t> order(raw.size());
	std::iota(order.begin(), order.end(), 0);
	if (cfg.uniform_td_placement) {
		for (std::size_t i = order.size(); i > 1; --i)
			std::swap(order[i - 1], order[td_rng.next_below(i)]);
	} else {
		// congestion concentrates on the fast, long edges: shortcuts first,
		// then diagonals, then grid, shuffled within each category
		std::stable_sort(order.begin(), order.end(),
		                 [&](std::size_t a, std::size_t b) { return raw[a].category > raw[b].category; });
		std::size_t lo = 0;
		for (int cat = 2; cat >= 0; --cat) {
			std::size_t hi = lo;
			while (hi < order.size() && raw[order[hi]].category == cat)
				++hi;
			for (std::size_t i = hi - lo; i > 1; --i)
				std::swap(order[lo + i - 1], order[lo + td_rng.next_below(i)]);
			lo = hi;
		}
	}

	std::size_t td_target = static_cast<std::size_t>(std::llround(cfg.td_fraction * static_cast<double>(raw.size())));
	std::vector<bool> is_td(raw.size(), false);
	std::size_t assigned = 0;
	for (std::size_t pass = 0; pass < 2 && assigned < td_target; ++pass) {
		for (std::size_t idx : order) {
			if (assigned >= td_target)
				break;
			if (is_td[idx])
				continue;
			// very short edges make for degenerate peaks; take them only if
			// nothing else is left (second pass)
			if (pass == 0 && base[idx] < 100)
				continue;
			is_td[idx] = true;
			++assigned;
		}
	}

	Rng ttf_rng(derive_seed(cfg.seed, 3));
	std::vector<TdEdge> edges;
	edges.reserve(raw.size());
	for (std::size_t i = 0; i < raw.size(); ++i) {
		TravelTimeFunction f;
		if (is_td[i]) {
			std::size_t k = cfg.breakpoints_per_td_edge;
			k = std::max<std::size_t>(4, k + static_cast<std::size_t>(ttf_rng.next_in(0, 4)) - 2);
			f = make_td_function(ttf_rng, base[i], k, cfg.rush_hour_peaks);
		} else {
			f = TravelTimeFunction::constant(base[i]);
		}
		edges.push_back({raw[i].tail, raw[i].head, std::move(f)});
	}
	return TdGraph(n, std::move(edges));
}

}  // namespace tds
