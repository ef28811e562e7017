#include "tds/network.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace tds {

TdGraph::TdGraph(std::size_t node_count, std::vector<TdEdge> edges) {
	for (std::size_t i = 0; i < edges.size(); ++i) {
		const TdEdge& e = edges[i];
		if (e.tail >= node_count || e.head >= node_count)
			throw std::invalid_argument("edge " + std::to_string(i) + ": node id out of range");
		if (e.tail == e.head)
			throw std::invalid_argument("edge " + std::to_string(i) + ": self-loop rejected");
		auto v = validate_fifo(e.ttf);
		if (!v.ok)
			throw std::invalid_argument("edge " + std::to_string(i) + ": travel-time function violates FIFO at segment " +
			                            std::to_string(v.segment));
	}
	std::stable_sort(edges.begin(), edges.end(),
	                 [](const TdEdge& a, const TdEdge& b) { return a.tail < b.tail; });
	first_out_.assign(node_count + 1, 0);
	for (const TdEdge& e : edges)
		++first_out_[e.tail + 1];
	for (std::size_t v = 0; v < node_count; ++v)
		first_out_[v + 1] += first_out_[v];
	edges_ = std::move(edges);
}

namespace {

struct LineTokenizer {
	const std::string& line;
	std::size_t pos = 0;
	std::size_t line_no;

	[[noreturn]] void fail(const std::string& what) const {
		throw ParseError("line " + std::to_string(line_no) + ", offset " + std::to_string(pos) + ": " + what);
	}

	bool skip_space() {
		while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t'))
			++pos;
		return pos < line.size() && line[pos] != '#';
	}

	std::int64_t next_int(const char* what) {
		if (!skip_space())
			fail(std::string("expected ") + what);
		std::int64_t value = 0;
		auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + line.size(), value);
		if (ec != std::errc())
			fail(std::string("expected ") + what);
		pos = static_cast<std::size_t>(ptr - line.data());
		return value;
	}

	std::string next_word() {
		if (!skip_space())
			fail("expected token");
		std::size_t start = pos;
		while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t')
			++pos;
		return line.substr(start, pos - start);
	}

	void expect_end() {
		if (skip_space())
			fail("trailing tokens");
	}
};

bool blank_or_comment(const std::string& line) {
	for (char c : line) {
		if (c == '#')
			return true;
		if (c != ' ' && c != '\t' && c != '\r')
			return false;
	}
	return true;
}

}  // namespace

TdGraph load(const std::filesystem::path& path) {
	std::ifstream in(path);
	if (!in)
		throw ParseError("cannot open " + path.string());

	std::string line;
	std::size_t line_no = 0;
	auto next_content_line = [&]() -> bool {
		while (std::getline(in, line)) {
			++line_no;
			if (!line.empty() && line.back() == '\r')
				line.pop_back();
			if (!blank_or_comment(line))
				return true;
		}
		return false;
	};

	if (!next_content_line())
		throw ParseError("missing header");
	LineTokenizer header{line, 0, line_no};
	if (header.next_word() != "tdgraph" || header.next_word() != "v1")
		header.fail("expected header 'tdgraph v1 <n> <m>'");
	std::int64_t n = header.next_int("node count");
	std::int64_t m = header.next_int("edge count");
	header.expect_end();
	if (n < 0 || m < 0)
		throw ParseError("line " + std::to_string(line_no) + ": negative count");

	std::vector<TdEdge> edges;
	edges.reserve(static_cast<std::size_t>(m));
	for (std::int64_t i = 0; i < m; ++i) {
		if (!next_content_line())
			throw ParseError("unexpected end of file, expected " + std::to_string(m) + " edges, got " +
			                 std::to_string(i));
		LineTokenizer tok{line, 0, line_no};
		std::int64_t tail = tok.next_int("tail");
		std::int64_t head = tok.next_int("head");
		std::int64_t k = tok.next_int("breakpoint count");
		if (tail < 0 || tail >= n || head < 0 || head >= n)
			tok.fail("node id out of range");
		if (k < 1)
			tok.fail("breakpoint count must be >= 1");
		std::vector<BreakPoint> pts;
		pts.reserve(static_cast<std::size_t>(k));
		for (std::int64_t j = 0; j < k; ++j) {
			DTime at = tok.next_int("breakpoint time");
			DTime travel = tok.next_int("breakpoint travel");
			if (at < 0 || at >= kPeriod)
				tok.fail("breakpoint time outside [0, 864000)");
			if (!pts.empty() && at <= pts.back().at)
				tok.fail("breakpoint times must be strictly increasing");
			if (travel <= 0)
				tok.fail("travel must be positive");
			pts.push_back({at, travel});
		}
		tok.expect_end();
		edges.push_back({static_cast<NodeId>(tail), static_cast<NodeId>(head),
		                 TravelTimeFunction(std::move(pts))});
	}
	if (next_content_line())
		throw ParseError("line " + std::to_string(line_no) + ": trailing content after " +
		                 std::to_string(m) + " edges");

	try {
		return TdGraph(static_cast<std::size_t>(n), std::move(edges));
	} catch (const std::invalid_argument& e) {
		throw ParseError(path.string() + ": " + e.what());
	}
}

void store(const TdGraph& g, const std::filesystem::path& path) {
	std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
	if (!out)
		throw std::runtime_error("cannot open " + path.string() + " for writing");
	out << "tdgraph v1 " << g.node_count() << ' ' << g.edge_count() << '\n';
	for (const TdEdge& e : g.edges()) {
		out << e.tail << ' ' << e.head << ' ' << e.ttf.size();
		for (const BreakPoint& p : e.ttf.points())
			out << ' ' << p.at << ' ' << p.travel;
		out << '\n';
	}
	if (!out)
		throw std::runtime_error("write to " + path.string() + " failed");
}

InstanceStats stats(const TdGraph& g) {
	InstanceStats s;
	s.node_count = g.node_count();
	s.edge_count = g.edge_count();
	std::size_t td_edges = 0;
	std::size_t td_points = 0;
	for (const TdEdge& e : g.edges()) {
		if (e.ttf.size() >= 2) {
			++td_edges;
			td_points += e.ttf.size();
		}
	}
	if (s.edge_count > 0)
		s.td_edge_fraction = static_cast<double>(td_edges) / static_cast<double>(s.edge_count);
	if (td_edges > 0)
		s.avg_breakpoints_per_td_edge = static_cast<double>(td_points) / static_cast<double>(td_edges);
	return s;
}

}  // namespace tds
