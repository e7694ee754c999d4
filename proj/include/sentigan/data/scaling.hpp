#pragma once

#include <vector>

#include "sentigan/data/dataset.hpp"
#include "sentigan/numkernel/scaler.hpp"

namespace sentigan {

/// Fits the scaler on every row a set of windows touches: their histories
/// and their targets. Passing the train partition keeps test rows out.
inline ScalerParams fit_window_scaler(const std::vector<WindowSample> &windows, ScaleMode mode) {
	if (windows.empty())
		throw DataError("cannot fit a scaler on zero windows");
	Matrix rows(0, kFeatureCount);
	for (const auto &w : windows) {
		for (std::size_t r = 0; r < w.history.rows(); ++r)
			rows.append_row(w.history.row(r));
		rows.append_row(w.target);
	}
	return scaler_fit(rows, mode, "train");
}

inline Matrix scale_history(const ScalerParams &scaler, const WindowSample &w) {
	return scaler_transform(scaler, w.history);
}

inline Vector scale_row(const ScalerParams &scaler, std::span<const double> row) {
	if (row.size() != scaler.features())
		throw DimensionError("scale_row length", scaler.features(), row.size());
	Vector out(row.size());
	for (std::size_t c = 0; c < row.size(); ++c)
		out[c] = scaler.transform(c, row[c]);
	return out;
}

} // namespace sentigan
