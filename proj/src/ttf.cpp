#include "tds/ttf.h"

#include <algorithm>
#include <cassert>

namespace tds {

ValidationResult validate_fifo(const TravelTimeFunction& f) {
	auto pts = f.points();
	if (pts.empty())
		return {false, 0};
	for (std::size_t i = 0; i < pts.size(); ++i) {
		if (pts[i].travel <= 0)
			return {false, i};
		if (i > 0 && pts[i].at <= pts[i - 1].at)
			return {false, i - 1};
	}
	if (pts.front().at < 0 || pts.back().at >= kPeriod)
		return {false, 0};
	// slope >= -1  <=>  arrival is non-decreasing along the segment
	for (std::size_t i = 0; i + 1 < pts.size(); ++i)
		if (pts[i + 1].at + pts[i + 1].travel < pts[i].at + pts[i].travel)
			return {false, i};
	if (pts.size() > 1) {
		// wrap segment: last point to first point shifted by one period
		if (pts.front().at + kPeriod + pts.front().travel < pts.back().at + pts.back().travel)
			return {false, pts.size() - 1};
	}
	return {};
}

namespace {

// Exact round-half-up of num/den with num >= 0, den > 0.
DTime div_round(DTime num, DTime den) {
	return (2 * num + den) / (2 * den);
}

// Interpolated travel at time t on the segment (t0,w0)-(t1,w1), t0 <= t <= t1.
DTime interpolate_segment(DTime t0, DTime w0, DTime t1, DTime w1, DTime t) {
	if (t1 == t0)
		return w0;
	return div_round(w0 * (t1 - t0) + (w1 - w0) * (t - t0), t1 - t0);
}

double exact_at(DTime t0, DTime w0, DTime t1, DTime w1, DTime t) {
	if (t1 == t0)
		return static_cast<double>(w0);
	return static_cast<double>(w0) +
	       static_cast<double>(w1 - w0) * static_cast<double>(t - t0) / static_cast<double>(t1 - t0);
}

}  // namespace

DTime eval(const TravelTimeFunction& f, DTime t) {
	auto pts = f.points();
	assert(!pts.empty());
	if (pts.size() == 1)
		return pts[0].travel;
	t = wrap_time(t);
	// first point strictly after t
	auto it = std::upper_bound(pts.begin(), pts.end(), t,
	                           [](DTime v, const BreakPoint& p) { return v < p.at; });
	if (it == pts.begin() || it == pts.end()) {
		// wrap segment, seen either from before the first point or after the last
		const BreakPoint& a = pts.back();
		const BreakPoint& b = pts.front();
		DTime tt = (it == pts.begin()) ? t + kPeriod : t;
		return interpolate_segment(a.at, a.travel, b.at + kPeriod, b.travel, tt);
	}
	const BreakPoint& a = *(it - 1);
	const BreakPoint& b = *it;
	return interpolate_segment(a.at, a.travel, b.at, b.travel, t);
}

DTime freeflow(const TravelTimeFunction& f) {
	auto pts = f.points();
	assert(!pts.empty());
	DTime m = pts[0].travel;
	for (const auto& p : pts)
		m = std::min(m, p.travel);
	return m;
}

double average_over_window(const TravelTimeFunction& f, const TimeWindow& w) {
	assert(w.valid());
	auto pts = f.points();
	assert(!pts.empty());
	if (pts.size() == 1)
		return static_cast<double>(pts[0].travel);

	double area = 0.0;
	// walk the closed chain of segments covering [0, kPeriod), clipping each
	// to the window; segment i runs from pts[i] to pts[i+1] (cyclically)
	for (std::size_t i = 0; i < pts.size(); ++i) {
		DTime t0 = pts[i].at;
		DTime w0 = pts[i].travel;
		DTime t1, w1;
		if (i + 1 < pts.size()) {
			t1 = pts[i + 1].at;
			w1 = pts[i + 1].travel;
		} else {
			t1 = pts[0].at + kPeriod;
			w1 = pts[0].travel;
		}
		// the wrap segment may cover both [t0, kPeriod) and, shifted, [0, first at)
		for (DTime shift : {DTime{0}, -kPeriod}) {
			DTime c = std::max(t0 + shift, w.begin);
			DTime d = std::min(t1 + shift, w.end);
			if (c >= d)
				continue;
			double fc = exact_at(t0 + shift, w0, t1 + shift, w1, c);
			double fd = exact_at(t0 + shift, w0, t1 + shift, w1, d);
			area += 0.5 * (fc + fd) * static_cast<double>(d - c);
		}
	}
	return area / static_cast<double>(w.end - w.begin);
}

SlopeBounds slope_bounds(std::span<const BreakPoint> points) {
	SlopeBounds b;
	if (points.size() < 2)
		return b;
	auto account = [&](DTime dt, DTime dw) {
		double s = static_cast<double>(dw) / static_cast<double>(dt);
		b.lambda_max = std::max(b.lambda_max, s);
		b.lambda_min = std::max(b.lambda_min, -s);
	};
	for (std::size_t i = 0; i + 1 < points.size(); ++i)
		account(points[i + 1].at - points[i].at, points[i + 1].travel - points[i].travel);
	account(points.front().at + kPeriod - points.back().at,
	        points.front().travel - points.back().travel);
	return b;
}

SlopeBounds slope_bounds(const TravelTimeFunction& f) {
	return slope_bounds(f.points());
}

}  // namespace tds
