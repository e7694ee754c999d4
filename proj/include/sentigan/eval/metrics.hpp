#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "sentigan/errors.hpp"

namespace sentigan {

struct Metrics {
	double mae = 0.0;
	double mse = 0.0;
	double rmse = 0.0;
	std::optional<double> mape; // fraction; empty when some actual is 0
	std::size_t count = 0;

	bool mape_omitted() const { return !mape.has_value(); }
	friend bool operator==(const Metrics &, const Metrics &) = default;
};

inline Metrics compute_metrics(std::span<const double> predicted, std::span<const double> actual) {
	if (predicted.size() != actual.size())
		throw DimensionError("metrics: predicted/actual length", actual.size(), predicted.size());
	if (actual.empty())
		throw DataError("metrics need at least one prediction");
	Metrics m;
	m.count = actual.size();
	double abs_sum = 0.0, sq_sum = 0.0, pct_sum = 0.0;
	bool zero_actual = false;
	for (std::size_t i = 0; i < actual.size(); ++i) {
		const double e = predicted[i] - actual[i];
		if (!std::isfinite(e))
			throw DataError("metrics: non-finite value at row " + std::to_string(i));
		abs_sum += std::abs(e);
		sq_sum += e * e;
		if (actual[i] == 0.0)
			zero_actual = true;
		else
			pct_sum += std::abs(e / actual[i]);
	}
	const double n = static_cast<double>(actual.size());
	m.mae = abs_sum / n;
	m.mse = sq_sum / n;
	m.rmse = std::sqrt(m.mse);
	if (!zero_actual)
		m.mape = pct_sum / n;
	return m;
}

} // namespace sentigan
