#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tds {

// All times and durations are integer deciseconds. Fixed point keeps FIFO
// checks and search results exact; floats appear only in derived statistics.
using DTime = std::int64_t;

constexpr DTime kPeriod = 864000;  // one day

constexpr DTime seconds(double s) { return static_cast<DTime>(s * 10.0 + (s >= 0 ? 0.5 : -0.5)); }
constexpr double to_seconds(DTime t) { return static_cast<double>(t) / 10.0; }

// Wraps an unbounded time onto [0, kPeriod).
constexpr DTime wrap_time(DTime t) {
	DTime r = t % kPeriod;
	return r < 0 ? r + kPeriod : r;
}

struct BreakPoint {
	DTime at;      // departure time in [0, kPeriod)
	DTime travel;  // > 0

	friend bool operator==(const BreakPoint&, const BreakPoint&) = default;
};

struct SlopeBounds {
	double lambda_max = 0.0;  // max segment slope, clamped below at 0
	double lambda_min = 0.0;  // -(min segment slope), clamped below at 0
};

// Half-open daily interval [begin, end); never wraps midnight.
struct TimeWindow {
	DTime begin;
	DTime end;

	bool valid() const { return 0 <= begin && begin < end && end <= kPeriod; }
	friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

// Periodic piecewise-linear travel-time function. A single point denotes a
// constant function. Between the last point and the first point shifted by
// one period the function continues linearly (the wrap segment).
class TravelTimeFunction {
public:
	TravelTimeFunction() = default;
	explicit TravelTimeFunction(std::vector<BreakPoint> points) : points_(std::move(points)) {}
	static TravelTimeFunction constant(DTime travel) { return TravelTimeFunction({{0, travel}}); }

	std::span<const BreakPoint> points() const { return points_; }
	std::size_t size() const { return points_.size(); }
	bool is_constant() const { return points_.size() == 1; }

	friend bool operator==(const TravelTimeFunction&, const TravelTimeFunction&) = default;

private:
	std::vector<BreakPoint> points_;
};

struct ValidationResult {
	bool ok = true;
	std::size_t segment = 0;  // first violating segment when !ok
};

// Checks points are well formed (sorted, positive travel) and that every
// segment, including the wrap segment, has slope >= -1. In integer
// deciseconds the check "arrival at segment end >= arrival at segment start"
// is exact, so the nominal 1e-9 slope tolerance can never be the deciding
// factor.
ValidationResult validate_fifo(const TravelTimeFunction& f);

// Linear interpolation at wrap_time(t); O(log n) via binary search.
DTime eval(const TravelTimeFunction& f, DTime t);

// Minimum travel time over the day; for piecewise-linear functions the
// minimum is attained at a breakpoint.
DTime freeflow(const TravelTimeFunction& f);

// Time average of f over the window, computed exactly from trapezoid areas
// of the clipped segments. Returned in deciseconds as a double.
double average_over_window(const TravelTimeFunction& f, const TimeWindow& w);

// Slope extrema over one period of a piecewise-linear curve given by
// (at, value) pairs, wrap segment included. Also used on profile travel-time
// curves, which may carry value 0, so no positivity is required here.
SlopeBounds slope_bounds(std::span<const BreakPoint> points);
SlopeBounds slope_bounds(const TravelTimeFunction& f);

}  // namespace tds
