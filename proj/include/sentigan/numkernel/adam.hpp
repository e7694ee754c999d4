#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sentigan/errors.hpp"

namespace sentigan {

struct AdamState {
	double learning_rate = 0.001;
	double beta1 = 0.9;
	double beta2 = 0.999;
	double epsilon = 1e-8;
	std::uint64_t step_count = 0;
	std::vector<double> first_moment;
	std::vector<double> second_moment;

	AdamState() = default;
	explicit AdamState(double lr) : learning_rate(lr) {}
};

/// One bias-corrected Adam update over a list of parameter blocks.
///
/// Moment buffers are sized on first use and must match the total parameter
/// count afterwards. A non-finite gradient aborts the step before any
/// parameter is touched.
inline void adam_step(AdamState &state, std::span<const std::span<double>> params,
					  std::span<const std::span<const double>> grads) {
	if (params.size() != grads.size())
		throw DimensionError("adam_step gradient blocks", params.size(), grads.size());
	std::size_t total = 0;
	for (std::size_t b = 0; b < params.size(); ++b) {
		if (params[b].size() != grads[b].size())
			throw DimensionError("adam_step block " + std::to_string(b) + " size", params[b].size(), grads[b].size());
		for (std::size_t k = 0; k < grads[b].size(); ++k)
			if (!std::isfinite(grads[b][k]))
				throw TrainingError("non-finite gradient entry", total + k);
		total += params[b].size();
	}
	if (state.first_moment.empty() && state.step_count == 0) {
		state.first_moment.assign(total, 0.0);
		state.second_moment.assign(total, 0.0);
	}
	if (state.first_moment.size() != total || state.second_moment.size() != total)
		throw DimensionError("adam_step moment buffer", state.first_moment.size(), total);

	++state.step_count;
	const double t = static_cast<double>(state.step_count);
	const double c1 = 1.0 - std::pow(state.beta1, t);
	const double c2 = 1.0 - std::pow(state.beta2, t);
	std::size_t idx = 0;
	for (std::size_t b = 0; b < params.size(); ++b) {
		auto p = params[b];
		auto g = grads[b];
		for (std::size_t k = 0; k < p.size(); ++k, ++idx) {
			double &m = state.first_moment[idx];
			double &v = state.second_moment[idx];
			m = state.beta1 * m + (1.0 - state.beta1) * g[k];
			v = state.beta2 * v + (1.0 - state.beta2) * g[k] * g[k];
			const double mhat = m / c1;
			const double vhat = v / c2;
			p[k] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
		}
	}
}

inline void adam_step(AdamState &state, const std::vector<std::span<double>> &params,
					  const std::vector<std::span<const double>> &grads) {
	adam_step(state, std::span<const std::span<double>>(params), std::span<const std::span<const double>>(grads));
}

} // namespace sentigan
