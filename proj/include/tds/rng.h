#pragma once

#include <cstdint>

namespace tds {

// Deterministic, platform-independent RNG. std::mt19937 would be seed-stable
// too, but the stdlib distributions are implementation-defined, so bounded
// draws are done by hand here.
struct Rng {
	std::uint64_t state;

	explicit Rng(std::uint64_t seed) : state(seed) {}

	std::uint64_t next() {
		// splitmix64
		std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
		z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
		z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
		return z ^ (z >> 31);
	}

	// uniform in [0, bound), bound > 0; rejection sampling keeps it unbiased
	std::uint64_t next_below(std::uint64_t bound) {
		std::uint64_t threshold = -bound % bound;
		for (;;) {
			std::uint64_t r = next();
			if (r >= threshold)
				return r % bound;
		}
	}

	std::int64_t next_in(std::int64_t lo, std::int64_t hi) {  // inclusive range
		return lo + static_cast<std::int64_t>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
	}

	double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Derives an independent stream from a master seed, so that one --seed flag
// drives every random decision reproducibly.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
	Rng r(master ^ (0x517cc1b727220a95ull * (stream + 1)));
	r.next();
	return r.next();
}

}  // namespace tds
