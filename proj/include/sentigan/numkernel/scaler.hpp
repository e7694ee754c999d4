#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>

#include "sentigan/errors.hpp"
#include "sentigan/numkernel/matrix.hpp"

namespace sentigan {

enum class ScaleMode {
	minmax_unit,   // [min, max] -> [0, 1]
	minmax_signed, // [min, max] -> [-1, 1]
};

inline std::string_view to_string(ScaleMode m) { return m == ScaleMode::minmax_unit ? "minmax_unit" : "minmax_signed"; }

inline ScaleMode scale_mode_from_string(std::string_view s) {
	if (s == "minmax_unit") return ScaleMode::minmax_unit;
	if (s == "minmax_signed") return ScaleMode::minmax_signed;
	throw DataError("unknown scale mode '" + std::string(s) + "'");
}

/// Per-column min/max scaling. A constant column maps to the middle of the
/// target range and inverts back to its single observed value.
struct ScalerParams {
	ScaleMode mode = ScaleMode::minmax_unit;
	Vector min;
	Vector max;
	std::string fitted_on = "train";

	std::size_t features() const { return min.size(); }
	bool fitted() const { return !min.empty(); }

	double transform(std::size_t col, double v) const {
		const double lo = min[col], hi = max[col];
		const double unit = hi > lo ? (v - lo) / (hi - lo) : 0.5;
		return mode == ScaleMode::minmax_unit ? unit : 2.0 * unit - 1.0;
	}

	double inverse(std::size_t col, double s) const {
		const double lo = min[col], hi = max[col];
		if (!(hi > lo))
			return lo;
		const double unit = mode == ScaleMode::minmax_unit ? s : (s + 1.0) / 2.0;
		return lo + unit * (hi - lo);
	}

	friend bool operator==(const ScalerParams &, const ScalerParams &) = default;
};

inline ScalerParams scaler_fit(const Matrix &data, ScaleMode mode, std::string fitted_on = "train") {
	if (data.rows() == 0 || data.cols() == 0)
		throw DataError("scaler_fit on empty data");
	ScalerParams p;
	p.mode = mode;
	p.fitted_on = std::move(fitted_on);
	p.min.assign(data.cols(), 0.0);
	p.max.assign(data.cols(), 0.0);
	for (std::size_t c = 0; c < data.cols(); ++c) {
		double lo = data(0, c), hi = data(0, c);
		for (std::size_t r = 1; r < data.rows(); ++r) {
			lo = std::min(lo, data(r, c));
			hi = std::max(hi, data(r, c));
		}
		p.min[c] = lo;
		p.max[c] = hi;
	}
	return p;
}

inline Matrix scaler_transform(const ScalerParams &p, const Matrix &data) {
	if (data.cols() != p.features())
		throw DimensionError("scaler_transform column count", p.features(), data.cols());
	Matrix out(data.rows(), data.cols());
	for (std::size_t r = 0; r < data.rows(); ++r)
		for (std::size_t c = 0; c < data.cols(); ++c)
			out(r, c) = p.transform(c, data(r, c));
	return out;
}

inline Matrix scaler_inverse(const ScalerParams &p, const Matrix &data) {
	if (data.cols() != p.features())
		throw DimensionError("scaler_inverse column count", p.features(), data.cols());
	Matrix out(data.rows(), data.cols());
	for (std::size_t r = 0; r < data.rows(); ++r)
		for (std::size_t c = 0; c < data.cols(); ++c)
			out(r, c) = p.inverse(c, data(r, c));
	return out;
}

} // namespace sentigan
