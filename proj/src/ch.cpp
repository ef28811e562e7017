#include "tds/ch.h"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <queue>

namespace tds {

namespace {

constexpr std::uint32_t kNoArc = static_cast<std::uint32_t>(-1);
// witness pop budgets: generous when contracting (missed witnesses only cost
// redundant shortcuts, never correctness), tight when estimating priorities
constexpr int kContractPopLimit = 240;
constexpr int kSimulatePopLimit = 40;

using HeapEntry = std::pair<std::int64_t, NodeId>;  // (key, node), ties by node id
using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>>;

// Pop-limited Dijkstra on the not-yet-contracted subgraph, used during
// contraction to decide which shortcuts are needed. One run from an
// in-neighbor answers every out-neighbor at once.
class WitnessSearch {
public:
	explicit WitnessSearch(std::size_t n) : dist_(n, kInfWeight), stamp_(n, 0) {}

	// distances from u in the active graph avoiding `excluded`, capped at
	// `limit` and `pop_limit`; read results with distance_to()
	void run(const std::vector<std::vector<std::uint32_t>>& out_arcs,
	         const std::vector<ChIndex::PoolArc>& pool, const std::vector<bool>& contracted,
	         NodeId u, NodeId excluded, std::int64_t limit, int pop_limit) {
		++generation_;
		heap_.clear();
		dist_at(u) = 0;
		heap_.push_back({0, u});
		int pops = 0;
		while (!heap_.empty() && pops < pop_limit) {
			std::pop_heap(heap_.begin(), heap_.end(), std::greater<>());
			auto [d, v] = heap_.back();
			heap_.pop_back();
			if (d > dist_at(v))
				continue;
			if (d > limit)
				break;
			++pops;
			for (std::uint32_t arc_id : out_arcs[v]) {
				const auto& a = pool[arc_id];
				if (a.to == excluded || contracted[a.to])
					continue;
				std::int64_t nd = d + a.weight;
				if (nd < dist_at(a.to)) {
					dist_at(a.to) = nd;
					heap_.push_back({nd, a.to});
					std::push_heap(heap_.begin(), heap_.end(), std::greater<>());
				}
			}
		}
	}

	std::int64_t distance_to(NodeId v) {
		return stamp_[v] == generation_ ? dist_[v] : kInfWeight;
	}

private:
	std::int64_t& dist_at(NodeId v) {
		if (stamp_[v] != generation_) {
			stamp_[v] = generation_;
			dist_[v] = kInfWeight;
		}
		return dist_[v];
	}

	std::vector<std::int64_t> dist_;
	std::vector<std::uint32_t> stamp_;
	std::uint32_t generation_ = 0;
	std::vector<HeapEntry> heap_;
};

class Builder {
public:
	explicit Builder(const ScalarGraph& g)
	    : n_(g.node_count),
	      out_(n_),
	      in_(n_),
	      contracted_(n_, false),
	      contracted_neighbors_(n_, 0),
	      target_cand_(n_, 0),
	      target_arc_(n_, kNoArc),
	      target_stamp_(n_, 0),
	      witness_(n_) {
		for (const ScalarEdge& e : g.edges) {
			assert(e.weight > 0);
			std::uint32_t id = static_cast<std::uint32_t>(pool_.size());
			pool_.push_back({e.tail, e.head, e.weight, e.orig});
			out_[e.tail].push_back(id);
			in_[e.head].push_back(id);
		}
	}

	ChIndex run() {
		std::priority_queue<std::pair<double, NodeId>, std::vector<std::pair<double, NodeId>>,
		                    std::greater<>>
		    queue;
		for (NodeId v = 0; v < n_; ++v)
			queue.push({priority(v), v});

		ChIndex ch;
		ch.rank.assign(n_, 0);
		std::uint32_t next_rank = 0;
		while (!queue.empty()) {
			auto [p, v] = queue.top();
			queue.pop();
			if (contracted_[v])
				continue;
			double current = priority(v);
			if (!queue.empty() && current > queue.top().first) {
				queue.push({current, v});
				continue;
			}
			contract(v);
			ch.rank[v] = next_rank++;
		}

		ch.pool = std::move(pool_);
		finish_search_graphs(ch);
		return ch;
	}

private:
	// shortcuts needed minus removable arcs, plus a term that spreads the
	// contraction across the graph
	double priority(NodeId v) {
		int shortcuts = process_node</*add=*/false>(v);
		int degree = static_cast<int>(in_[v].size() + out_[v].size());
		return static_cast<double>(shortcuts - degree) + 2.0 * contracted_neighbors_[v];
	}

	void contract(NodeId v) {
		contracted_[v] = true;
		process_node</*add=*/true>(v);
		// drop v's arcs from the neighbors' active lists
		for (std::uint32_t a : in_[v]) {
			NodeId u = pool_[a].from;
			if (u == v)
				continue;
			std::erase(out_[u], a);
			++contracted_neighbors_[u];
		}
		for (std::uint32_t a : out_[v]) {
			NodeId w = pool_[a].to;
			if (w == v)
				continue;
			std::erase(in_[w], a);
			++contracted_neighbors_[w];
		}
	}

	// One witness search per distinct in-neighbor decides all of v's
	// (in, out) pairs. Active adjacency lists shrink as nodes contract, so
	// everything seen here is alive.
	template <bool add>
	int process_node(NodeId v) {
		// group parallel out-arcs per target, keeping the cheapest
		++target_generation_;
		targets_.clear();
		std::int64_t max_cand_base = 0;
		for (std::uint32_t oa : out_[v]) {
			NodeId w = pool_[oa].to;
			if (target_stamp_[w] != target_generation_ || pool_[oa].weight < target_cand_[w]) {
				if (target_stamp_[w] != target_generation_)
					targets_.push_back(w);
				target_stamp_[w] = target_generation_;
				target_cand_[w] = pool_[oa].weight;
				target_arc_[w] = oa;
			}
		}
		for (NodeId w : targets_)
			max_cand_base = std::max(max_cand_base, target_cand_[w]);

		// group parallel in-arcs per source likewise
		sources_.clear();
		for (std::uint32_t ia : in_[v]) {
			NodeId u = pool_[ia].from;
			bool seen = false;
			for (auto& [su, sa] : sources_) {
				if (su == u) {
					seen = true;
					if (pool_[ia].weight < pool_[sa].weight)
						sa = ia;
					break;
				}
			}
			if (!seen)
				sources_.push_back({u, ia});
		}

		int needed = 0;
		for (auto [u, ia] : sources_) {
			if (targets_.empty() || (targets_.size() == 1 && targets_[0] == u))
				continue;
			const std::int64_t w_in = pool_[ia].weight;
			witness_.run(out_, pool_, contracted_, u, v, w_in + max_cand_base,
			             add ? kContractPopLimit : kSimulatePopLimit);
			for (NodeId w : targets_) {
				if (w == u)
					continue;
				const std::int64_t cand = w_in + target_cand_[w];
				if (witness_.distance_to(w) <= cand)
					continue;
				++needed;
				if constexpr (add)
					add_shortcut(u, w, cand, ia, target_arc_[w]);
			}
		}
		return needed;
	}

	void add_shortcut(NodeId u, NodeId w, std::int64_t weight, std::uint32_t child_a,
	                  std::uint32_t child_b) {
		// an active parallel arc can be updated in place: it cannot be a child
		// of any shortcut yet, children become inactive at creation time
		std::uint32_t best = kNoArc;
		for (std::uint32_t a : out_[u])
			if (pool_[a].to == w && (best == kNoArc || pool_[a].weight < pool_[best].weight))
				best = a;
		if (best != kNoArc) {
			if (pool_[best].weight <= weight)
				return;
			pool_[best].weight = weight;
			pool_[best].orig = kInvalidEdge;
			pool_[best].child_a = child_a;
			pool_[best].child_b = child_b;
			return;
		}
		std::uint32_t id = static_cast<std::uint32_t>(pool_.size());
		pool_.push_back({u, w, weight, kInvalidEdge, child_a, child_b});
		out_[u].push_back(id);
		in_[w].push_back(id);
	}

	void finish_search_graphs(ChIndex& ch) const {
		ch.fwd_first.assign(n_ + 1, 0);
		ch.bwd_first.assign(n_ + 1, 0);
		for (const auto& a : ch.pool) {
			if (ch.rank[a.to] > ch.rank[a.from])
				++ch.fwd_first[a.from + 1];
			else
				++ch.bwd_first[a.to + 1];
		}
		for (NodeId v = 0; v < n_; ++v) {
			ch.fwd_first[v + 1] += ch.fwd_first[v];
			ch.bwd_first[v + 1] += ch.bwd_first[v];
		}
		ch.fwd_arcs.resize(ch.fwd_first[n_]);
		ch.bwd_arcs.resize(ch.bwd_first[n_]);
		std::vector<std::uint32_t> f = ch.fwd_first, b = ch.bwd_first;
		for (std::uint32_t id = 0; id < ch.pool.size(); ++id) {
			const auto& a = ch.pool[id];
			if (ch.rank[a.to] > ch.rank[a.from])
				ch.fwd_arcs[f[a.from]++] = {a.to, a.weight, id};
			else
				ch.bwd_arcs[b[a.to]++] = {a.from, a.weight, id};
		}
	}

	const std::size_t n_;
	std::vector<ChIndex::PoolArc> pool_;
	std::vector<std::vector<std::uint32_t>> out_, in_;  // active arcs only
	std::vector<bool> contracted_;
	std::vector<std::uint32_t> contracted_neighbors_;
	// per-call scratch for process_node
	std::vector<NodeId> targets_;
	std::vector<std::pair<NodeId, std::uint32_t>> sources_;
	std::vector<std::int64_t> target_cand_;
	std::vector<std::uint32_t> target_arc_;
	std::vector<std::uint32_t> target_stamp_;
	std::uint32_t target_generation_ = 0;
	WitnessSearch witness_;
};

}  // namespace

ChIndex build(const ScalarGraph& g) {
	for (const ScalarEdge& e : g.edges) {
		if (e.weight <= 0)
			throw std::invalid_argument("ch::build: weights must be positive");
		if (e.tail >= g.node_count || e.head >= g.node_count)
			throw std::invalid_argument("ch::build: node id out of range");
	}
	Builder builder(g);
	ChIndex ch = builder.run();
	ch.orig_edge_count = 0;
	for (const ScalarEdge& e : g.edges)
		ch.orig_edge_count = std::max<std::size_t>(ch.orig_edge_count, e.orig + 1);
	return ch;
}

void ChQuery::prepare(const ChIndex& ch) {
	std::size_t n = ch.node_count();
	if (fwd_.dist.size() < n) {
		for (Side* s : {&fwd_, &bwd_}) {
			s->dist.assign(n, kInfWeight);
			s->parent_arc.assign(n, kNoArc);
			s->stamp.assign(n, 0);
		}
		generation_ = 0;
	}
	if (edge_stamp_.size() < ch.orig_edge_count)
		edge_stamp_.assign(ch.orig_edge_count, 0);
	pool_size_ = ch.pool.size();
	++generation_;
	fwd_.settled.clear();
	bwd_.settled.clear();
}

std::int64_t ChQuery::search(const ChIndex& ch, NodeId s, NodeId t, double stretch) {
	auto label = [&](Side& side, NodeId v) -> std::int64_t& {
		if (side.stamp[v] != generation_) {
			side.stamp[v] = generation_;
			side.dist[v] = kInfWeight;
			side.parent_arc[v] = kNoArc;
		}
		return side.dist[v];
	};

	MinHeap fq, bq;
	label(fwd_, s) = 0;
	label(bwd_, t) = 0;
	fq.push({0, s});
	bq.push({0, t});
	std::int64_t best = kInfWeight;

	// both directions run until their keys pass stretch * best, so every
	// meeting node within the stretch radius ends up settled on both sides
	auto threshold = [&]() -> std::int64_t {
		if (best == kInfWeight)
			return kInfWeight;
		return static_cast<std::int64_t>(stretch * static_cast<double>(best)) + 1;
	};

	auto step = [&](Side& side, Side& other, MinHeap& heap,
	                const std::vector<std::uint32_t>& first,
	                const std::vector<ChIndex::SearchArc>& arcs) {
		while (!heap.empty()) {
			auto [d, v] = heap.top();
			if (d > threshold())
				return false;
			heap.pop();
			if (d > label(side, v))
				continue;
			side.settled.push_back(v);
			if (other.stamp[v] == generation_ && other.dist[v] != kInfWeight)
				best = std::min(best, d + other.dist[v]);
			for (std::uint32_t i = first[v]; i < first[v + 1]; ++i) {
				const auto& a = arcs[i];
				std::int64_t nd = d + a.weight;
				if (nd < label(side, a.node)) {
					side.dist[a.node] = nd;
					side.parent_arc[a.node] = a.pool_id;
					heap.push({nd, a.node});
				}
			}
			return true;
		}
		return false;
	};

	bool fwd_active = true, bwd_active = true;
	while (fwd_active || bwd_active) {
		if (fwd_active)
			fwd_active = step(fwd_, bwd_, fq, ch.fwd_first, ch.fwd_arcs);
		if (bwd_active)
			bwd_active = step(bwd_, fwd_, bq, ch.bwd_first, ch.bwd_arcs);
	}
	return best;
}

void ChQuery::unpack_arc(const ChIndex& ch, std::uint32_t pool_id, std::vector<EdgeId>& out) {
	const auto& a = ch.pool[pool_id];
	if (a.orig != kInvalidEdge) {
		out.push_back(a.orig);
		return;
	}
	unpack_arc(ch, a.child_a, out);
	unpack_arc(ch, a.child_b, out);
}

void ChQuery::collect_via_path(const ChIndex& ch, NodeId meet, std::vector<EdgeId>& out) {
	std::vector<std::uint32_t> up;
	for (NodeId v = meet; fwd_.parent_arc[v] != kNoArc; v = ch.pool[fwd_.parent_arc[v]].from)
		up.push_back(fwd_.parent_arc[v]);
	for (auto it = up.rbegin(); it != up.rend(); ++it)
		unpack_arc(ch, *it, out);
	for (NodeId v = meet; bwd_.parent_arc[v] != kNoArc; v = ch.pool[bwd_.parent_arc[v]].to)
		unpack_arc(ch, bwd_.parent_arc[v], out);
}

std::optional<ChPath> ChQuery::run(const ChIndex& ch, NodeId s, NodeId t) {
	if (s == t)
		return ChPath{0, {}};
	prepare(ch);
	std::int64_t best = search(ch, s, t, 1.0);
	if (best == kInfWeight)
		return std::nullopt;
	NodeId meet = kInvalidNode;
	for (NodeId v : fwd_.settled)
		if (bwd_.stamp[v] == generation_ && fwd_.dist[v] + bwd_.dist[v] == best &&
		    (meet == kInvalidNode || v < meet))
			meet = v;
	assert(meet != kInvalidNode);
	ChPath result;
	result.distance = best;
	collect_via_path(ch, meet, result.edges);
	return result;
}

std::optional<std::vector<EdgeId>> ChQuery::run_alternatives(const ChIndex& ch, NodeId s, NodeId t,
                                                             const AltConfig& cfg) {
	if (s == t)
		return std::vector<EdgeId>{};
	prepare(ch);
	std::int64_t best = search(ch, s, t, cfg.stretch);
	if (best == kInfWeight)
		return std::nullopt;
	// distances are integers; the epsilon keeps "at most stretch times" exact
	// when stretch * best lands on an integer boundary
	const long double radius =
	    static_cast<long double>(cfg.stretch) * static_cast<long double>(best) + 1e-6L;

	std::vector<EdgeId> out;
	std::vector<EdgeId> path;
	for (NodeId v : fwd_.settled) {
		if (bwd_.stamp[v] != generation_ || bwd_.dist[v] == kInfWeight)
			continue;
		if (static_cast<long double>(fwd_.dist[v] + bwd_.dist[v]) > radius)
			continue;
		path.clear();
		collect_via_path(ch, v, path);
		for (EdgeId e : path) {
			if (edge_stamp_[e] != generation_) {
				edge_stamp_[e] = generation_;
				out.push_back(e);
			}
		}
	}
	std::sort(out.begin(), out.end());
	return out;
}

std::uint64_t scalar_graph_hash(const ScalarGraph& g) {
	std::uint64_t h = 0xcbf29ce484222325ull;
	auto mix = [&](std::uint64_t v) {
		h ^= v;
		h *= 0x100000001b3ull;
	};
	mix(g.node_count);
	mix(g.edges.size());
	for (const ScalarEdge& e : g.edges) {
		mix(e.tail);
		mix(e.head);
		mix(static_cast<std::uint64_t>(e.weight));
		mix(e.orig);
	}
	return h;
}

namespace {

constexpr char kCacheMagic[8] = {'T', 'D', 'S', 'C', 'H', '0', '1', '\n'};

template <class T>
void write_vec(std::ofstream& out, const std::vector<T>& v) {
	std::uint64_t size = v.size();
	out.write(reinterpret_cast<const char*>(&size), sizeof size);
	out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(size * sizeof(T)));
}

template <class T>
bool read_vec(std::ifstream& in, std::vector<T>& v) {
	std::uint64_t size = 0;
	in.read(reinterpret_cast<char*>(&size), sizeof size);
	if (!in || size > (1ull << 32))
		return false;
	v.resize(size);
	in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(size * sizeof(T)));
	return static_cast<bool>(in);
}

}  // namespace

void save_cached(const ChIndex& ch, std::uint64_t graph_hash, const std::filesystem::path& path) {
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw std::runtime_error("cannot open cache file " + path.string() + " for writing");
	out.write(kCacheMagic, sizeof kCacheMagic);
	out.write(reinterpret_cast<const char*>(&graph_hash), sizeof graph_hash);
	std::uint64_t counts[2] = {ch.node_count(), ch.orig_edge_count};
	out.write(reinterpret_cast<const char*>(counts), sizeof counts);
	write_vec(out, ch.rank);
	write_vec(out, ch.pool);
	write_vec(out, ch.fwd_first);
	write_vec(out, ch.bwd_first);
	write_vec(out, ch.fwd_arcs);
	write_vec(out, ch.bwd_arcs);
	if (!out)
		throw std::runtime_error("write to cache file " + path.string() + " failed");
}

std::optional<ChIndex> load_cached(std::uint64_t graph_hash, const std::filesystem::path& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in)
		return std::nullopt;
	char magic[8];
	std::uint64_t stored_hash = 0;
	std::uint64_t counts[2] = {0, 0};
	in.read(magic, sizeof magic);
	in.read(reinterpret_cast<char*>(&stored_hash), sizeof stored_hash);
	in.read(reinterpret_cast<char*>(counts), sizeof counts);
	if (!in || !std::equal(magic, magic + 8, kCacheMagic) || stored_hash != graph_hash)
		return std::nullopt;
	ChIndex ch;
	ch.orig_edge_count = counts[1];
	if (!read_vec(in, ch.rank) || !read_vec(in, ch.pool) || !read_vec(in, ch.fwd_first) ||
	    !read_vec(in, ch.bwd_first) || !read_vec(in, ch.fwd_arcs) || !read_vec(in, ch.bwd_arcs))
		return std::nullopt;
	if (ch.rank.size() != counts[0])
		return std::nullopt;
	return ch;
}

}  // namespace tds
