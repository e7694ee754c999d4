#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "sentigan/errors.hpp"
#include "sentigan/numkernel/matrix.hpp"

namespace sentigan {

inline constexpr double kAdfCriticalValue = -2.86; // 5%, constant, no trend

struct AdfResult {
	double statistic = 0.0;
	std::size_t lag = 0;
	std::size_t observations = 0;
	bool is_stationary = false;
	std::string diagnostic; // non-empty when the regression is degenerate
};

inline std::size_t adf_default_lag(std::size_t n) {
	return static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(n)) + 1e-9));
}

inline Vector difference(const Vector &y, std::size_t times = 1) {
	Vector out = y;
	for (std::size_t k = 0; k < times; ++k) {
		if (out.empty())
			break;
		Vector next(out.size() - 1);
		for (std::size_t i = 1; i < out.size(); ++i)
			next[i - 1] = out[i] - out[i - 1];
		out = std::move(next);
	}
	return out;
}

/// Dickey-Fuller t-statistic on beta in
///   dy_t = a + beta * y_{t-1} + sum_{i=1..lag} g_i * dy_{t-i} + e_t.
inline AdfResult adf_test(const Vector &y, std::size_t lag) {
	if (y.size() <= lag + 10)
		throw DataError("ADF test needs more than lag + 10 = " + std::to_string(lag + 10) + " observations, have " +
						std::to_string(y.size()));
	if (!all_finite(y))
		throw DataError("ADF test input contains non-finite values");
	AdfResult r;
	r.lag = lag;
	const Vector dy = difference(y);
	const std::size_t k = 2 + lag;
	const std::size_t n = dy.size() - lag;
	r.observations = n;

	double mean = 0.0;
	for (double v : y)
		mean += v;
	mean /= static_cast<double>(y.size());
	double var = 0.0;
	for (double v : y)
		var += (v - mean) * (v - mean);
	if (var <= 1e-24 * static_cast<double>(y.size()) * std::max(1.0, mean * mean)) {
		r.diagnostic = "zero variance";
		return r;
	}

	Matrix xtx(k, k);
	Vector xty(k, 0.0);
	Vector row(k);
	auto fill_row = [&](std::size_t t) { // t indexes dy
		row[0] = 1.0;
		row[1] = y[t];
		for (std::size_t i = 1; i <= lag; ++i)
			row[1 + i] = dy[t - i];
	};
	for (std::size_t t = lag; t < dy.size(); ++t) {
		fill_row(t);
		for (std::size_t a = 0; a < k; ++a) {
			xty[a] += row[a] * dy[t];
			for (std::size_t b = 0; b < k; ++b)
				xtx(a, b) += row[a] * row[b];
		}
	}
	Matrix inv;
	if (!invert(xtx, inv)) {
		r.diagnostic = "singular regression";
		return r;
	}
	const Vector beta = matvec(inv, xty);
	double rss = 0.0;
	for (std::size_t t = lag; t < dy.size(); ++t) {
		fill_row(t);
		double fit = 0.0;
		for (std::size_t a = 0; a < k; ++a)
			fit += row[a] * beta[a];
		rss += (dy[t] - fit) * (dy[t] - fit);
	}
	const double s2 = rss / static_cast<double>(n - k);
	const double se = std::sqrt(s2 * inv(1, 1));
	if (!(se > 0.0) || !std::isfinite(se)) {
		r.diagnostic = "zero residual variance";
		r.statistic = beta[1] < 0.0 ? -std::numeric_limits<double>::infinity() : 0.0;
		r.is_stationary = beta[1] < 0.0;
		return r;
	}
	r.statistic = beta[1] / se;
	r.is_stationary = r.statistic < kAdfCriticalValue;
	return r;
}

inline AdfResult adf_test(const Vector &y) { return adf_test(y, adf_default_lag(y.size())); }

} // namespace sentigan
