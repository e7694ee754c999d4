#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "sentigan/data/dataset.hpp"
#include "sentigan/numkernel/random.hpp"

namespace sentigan {

/// Builds open/high/low/adj_close/volume around a close path on
/// consecutive weekdays starting at `start`.
inline Series series_from_close(const std::string &symbol, const Vector &close, Rng &rng,
								Date start = Date(std::chrono::year{2021} / 1 / 4)) {
	Series s{symbol, {}};
	Date d = start;
	double prev = close.empty() ? 0.0 : close.front();
	for (double c : close) {
		while (is_weekend(d))
			d += std::chrono::days(1);
		const double scale = std::max(std::abs(c), 1.0);
		const double open = prev + 0.002 * scale * rng.uniform(-1.0, 1.0);
		const double high = std::max(open, c) + 0.003 * scale * rng.uniform();
		const double low = std::min(open, c) - 0.003 * scale * rng.uniform();
		const double volume = std::floor(1e6 * (1.0 + 0.2 * rng.uniform(-1.0, 1.0)));
		s.bars.push_back({d, open, high, low, c, c, volume});
		prev = c;
		d += std::chrono::days(1);
	}
	return s;
}

struct JumpAssetParams {
	std::size_t days = 500;
	double level = 100.0;
	double phi = 0.9;
	double sigma = 1.0;
	double jump = 3.0;         // in units of sigma
	double threshold = 0.5;    // sentiment above this triggers a jump
};

/// AR(1) close around `level` with a +jump*sigma move on day t+1 whenever
/// s_t > threshold; s_t is uniform on [-1, 1] and independent of prices.
inline AlignedDataset sentiment_jump_asset(std::uint64_t seed, const JumpAssetParams &p = {}) {
	Rng rng(seed);
	Vector sentiment(p.days), close(p.days);
	for (double &s : sentiment)
		s = rng.uniform(-1.0, 1.0);
	double y = 0.0;
	for (std::size_t t = 0; t < p.days; ++t) {
		if (t > 0)
			y = p.phi * y + p.sigma * rng.normal() + (sentiment[t - 1] > p.threshold ? p.jump * p.sigma : 0.0);
		close[t] = p.level + y;
	}
	const Series s = series_from_close("JUMP", close, rng);
	std::vector<sentiment::DailySentiment> daily;
	for (std::size_t t = 0; t < p.days; ++t)
		daily.push_back({s.bars[t].date, sentiment[t], 1});
	return align(s, daily);
}

/// Noiseless level + slope*t + amplitude*sin(2*pi*t/period) with zero sentiment.
inline AlignedDataset trend_sine_asset(std::size_t days, double level, double slope, double amplitude, double period) {
	Vector close(days);
	for (std::size_t t = 0; t < days; ++t) {
		const double tt = static_cast<double>(t);
		close[t] = level + slope * tt + amplitude * std::sin(2.0 * std::numbers::pi * tt / period);
	}
	Series s{"TREND", {}};
	Date d(std::chrono::year{2021} / 1 / 4);
	for (double c : close) {
		while (is_weekend(d))
			d += std::chrono::days(1);
		s.bars.push_back({d, c, c * 1.01, c * 0.99, c, c, 1e6});
		d += std::chrono::days(1);
	}
	return align(s, {});
}

} // namespace sentigan
