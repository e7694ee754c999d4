#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sentigan/numkernel/dense.hpp"

namespace sentigan {

/// |a - n| / max(|a|, |n|, floor). The floor keeps gradients that are both
/// essentially zero from producing huge ratios.
inline double relative_error(double analytic, double numeric, double floor = 1e-7) {
	const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
	return std::abs(analytic - numeric) / denom;
}

/// Central differences of a scalar loss over every entry of `params`.
/// `loss` is re-evaluated after each perturbation; params are restored.
template <class Loss>
std::vector<double> numeric_gradient(Loss &&loss, const std::vector<std::span<double>> &params, double h = 1e-5) {
	std::vector<double> out;
	for (auto block : params) {
		for (double &p : block) {
			const double saved = p;
			p = saved + h;
			const double up = loss();
			p = saved - h;
			const double down = loss();
			p = saved;
			out.push_back((up - down) / (2.0 * h));
		}
	}
	return out;
}

inline std::vector<double> flatten(const std::vector<std::span<const double>> &blocks) {
	std::vector<double> out;
	for (auto b : blocks)
		out.insert(out.end(), b.begin(), b.end());
	return out;
}

struct GradCheckEntry {
	std::size_t layer = 0;
	std::size_t index = 0; // flat index within the layer, weights first then bias
	double analytic = 0.0;
	double numeric = 0.0;
	double rel_error = 0.0;
	bool flagged = false; // layer has saturated sigmoid units; excluded from pass/fail
};

struct GradCheckReport {
	std::vector<GradCheckEntry> entries;
	double max_rel_error = 0.0; // over unflagged entries
	std::size_t failures = 0;
	std::size_t flagged = 0;
	bool passed() const { return failures == 0; }
};

/// Compares backward() against central differences for the loss Σ(y - target)².
inline GradCheckReport finite_difference_check(Network net, std::span<const double> input,
											   std::span<const double> target, double tolerance,
											   double h = 1e-5) {
	if (target.size() != net.outputs())
		throw DimensionError("finite_difference_check target length", net.outputs(), target.size());
	auto loss = [&] {
		const Vector y = net.forward(input);
		double s = 0.0;
		for (std::size_t k = 0; k < y.size(); ++k)
			s += (y[k] - target[k]) * (y[k] - target[k]);
		return s;
	};

	Network::Cache cache;
	const Vector y = net.forward(input, cache);
	Vector dy(y.size());
	for (std::size_t k = 0; k < y.size(); ++k)
		dy[k] = 2.0 * (y[k] - target[k]);
	Gradients grads = net.zero_gradients();
	net.backward(cache, dy, grads);

	std::vector<bool> saturated(net.layers().size(), false);
	for (std::size_t i = 0; i < net.layers().size(); ++i) {
		if (net.layers()[i].activation != Activation::sigmoid)
			continue;
		for (double z : cache.preactivations[i])
			if (std::abs(z) > 30.0)
				saturated[i] = true;
	}

	const auto numeric = numeric_gradient(loss, net.parameters(), h);
	GradCheckReport report;
	std::size_t flat = 0;
	for (std::size_t i = 0; i < grads.layers.size(); ++i) {
		std::vector<double> analytic(grads.layers[i].weights.data().begin(), grads.layers[i].weights.data().end());
		analytic.insert(analytic.end(), grads.layers[i].bias.begin(), grads.layers[i].bias.end());
		for (std::size_t k = 0; k < analytic.size(); ++k, ++flat) {
			GradCheckEntry e{i, k, analytic[k], numeric[flat], relative_error(analytic[k], numeric[flat]),
							 saturated[i]};
			if (e.flagged) {
				++report.flagged;
			} else {
				report.max_rel_error = std::max(report.max_rel_error, e.rel_error);
				if (e.rel_error > tolerance)
					++report.failures;
			}
			report.entries.push_back(e);
		}
	}
	return report;
}

} // namespace sentigan
