#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sentigan/data/scaling.hpp"
#include "sentigan/eval/report.hpp"
#include "sentigan/numkernel/adam.hpp"
#include "sentigan/numkernel/dense.hpp"
#include "sentigan/numkernel/serialize.hpp"

namespace sentigan {

inline constexpr double kScaleTolerance = 1e-9;

struct GanArchitecture {
	std::vector<std::size_t> generator_hidden{128, 64};
	std::vector<std::size_t> discriminator_hidden{64, 32};
	std::size_t noise_dim = 0;
};

/// G(X_t, s_t): flattened scaled window and sentiment (and optional noise)
/// to a scaled next-day row in (-1, 1)^6.
struct Generator {
	Network net;
	ScalerParams scaler; // minmax_signed
	std::size_t window = 0;
	std::size_t noise_dim = 0;

	std::size_t condition_size() const { return window * kFeatureCount + 1; }
	friend bool operator==(const Generator &, const Generator &) = default;
};

/// D(x, X_t, s_t) in (0, 1).
struct Discriminator {
	Network net;
	std::size_t window = 0;

	std::size_t condition_size() const { return window * kFeatureCount + 1; }
	friend bool operator==(const Discriminator &, const Discriminator &) = default;
};

inline Generator make_generator(std::size_t window, const GanArchitecture &arch, Rng &rng) {
	if (window == 0)
		throw UsageError("generator window must be positive");
	std::vector<std::size_t> widths{window * kFeatureCount + 1 + arch.noise_dim};
	widths.insert(widths.end(), arch.generator_hidden.begin(), arch.generator_hidden.end());
	widths.push_back(kFeatureCount);
	Generator g;
	g.net = Network::make(widths, Activation::relu, Activation::tanh, rng);
	g.window = window;
	g.noise_dim = arch.noise_dim;
	return g;
}

inline Discriminator make_discriminator(std::size_t window, const GanArchitecture &arch, Rng &rng) {
	if (window == 0)
		throw UsageError("discriminator window must be positive");
	std::vector<std::size_t> widths{kFeatureCount + window * kFeatureCount + 1};
	widths.insert(widths.end(), arch.discriminator_hidden.begin(), arch.discriminator_hidden.end());
	widths.push_back(1);
	Discriminator d;
	d.net = Network::make(widths, Activation::leaky_relu, Activation::sigmoid, rng);
	d.window = window;
	return d;
}

/// Flattened scaled history followed by s_t.
inline Vector condition_vector(const Matrix &scaled_history, double sentiment) {
	Vector c(scaled_history.data().begin(), scaled_history.data().end());
	c.push_back(sentiment);
	return c;
}

inline void check_scale(std::span<const double> v, const char *what) {
	for (std::size_t k = 0; k < v.size(); ++k)
		if (!(std::abs(v[k]) <= 1.0 + kScaleTolerance))
			throw DataError(std::string(what) + " entry " + std::to_string(k) + " = " + std::to_string(v[k]) +
							" is outside [-1, 1]");
}

inline Vector generator_input(const Generator &g, std::span<const double> condition, std::span<const double> noise) {
	if (condition.size() != g.condition_size())
		throw DimensionError("generator condition length", g.condition_size(), condition.size());
	if (noise.size() != g.noise_dim)
		throw DimensionError("generator noise length", g.noise_dim, noise.size());
	check_scale(condition, "generator input");
	Vector in(condition.begin(), condition.end());
	in.insert(in.end(), noise.begin(), noise.end());
	return in;
}

inline Vector generator_forward(const Generator &g, std::span<const double> condition,
								std::span<const double> noise = {}) {
	return g.net.forward(generator_input(g, condition, noise));
}

inline Vector discriminator_input(const Discriminator &d, std::span<const double> candidate,
								  std::span<const double> condition) {
	if (candidate.size() != kFeatureCount)
		throw DimensionError("discriminator candidate length", kFeatureCount, candidate.size());
	if (condition.size() != d.condition_size())
		throw DimensionError("discriminator condition length", d.condition_size(), condition.size());
	Vector in(candidate.begin(), candidate.end());
	in.insert(in.end(), condition.begin(), condition.end());
	return in;
}

inline double discriminator_forward(const Discriminator &d, std::span<const double> candidate,
									std::span<const double> condition) {
	return d.net.forward(discriminator_input(d, candidate, condition))[0];
}

/// Scaled training pair: condition (window and sentiment) and the real next row.
struct GanSample {
	Vector condition;
	Vector real;
};

inline GanSample make_gan_sample(const ScalerParams &scaler, const WindowSample &w) {
	return {condition_vector(scale_history(scaler, w), w.sentiment), scale_row(scaler, w.target)};
}

/// -log D(real) - log(1 - D(fake)) on logits.
inline double discriminator_loss(double real_logit, double fake_logit) {
	return softplus(-real_logit) + softplus(fake_logit);
}

/// Non-saturating generator loss -log D(fake) on the logit.
inline double generator_loss(double fake_logit) { return softplus(-fake_logit); }

struct GeneratorPass {
	std::vector<Network::Cache> caches;
	std::vector<Vector> fakes;
	std::vector<Vector> noise;
};

inline GeneratorPass run_generator(const Generator &g, const std::vector<GanSample> &batch, Rng *noise_rng) {
	GeneratorPass pass;
	pass.caches.resize(batch.size());
	for (std::size_t k = 0; k < batch.size(); ++k) {
		Vector z(g.noise_dim, 0.0);
		if (noise_rng)
			for (double &v : z)
				v = noise_rng->uniform(-1.0, 1.0);
		pass.fakes.push_back(g.net.forward(generator_input(g, batch[k].condition, z), pass.caches[k]));
		pass.noise.push_back(std::move(z));
	}
	return pass;
}

/// Batch-mean discriminator loss; accumulates its gradient into `grads` when given.
inline double discriminator_loss_grad(const Discriminator &d, const std::vector<GanSample> &batch,
									  const std::vector<Vector> &fakes, Gradients *grads) {
	const double inv = 1.0 / static_cast<double>(batch.size());
	double loss = 0.0;
	Network::Cache cache;
	for (std::size_t k = 0; k < batch.size(); ++k) {
		d.net.forward(discriminator_input(d, batch[k].real, batch[k].condition), cache);
		const double real_logit = cache.preactivations.back()[0];
		if (grads) {
			const double dz = (sigmoid(real_logit) - 1.0) * inv;
			d.net.backward_preactivation(cache, std::span<const double>(&dz, 1), *grads);
		}
		d.net.forward(discriminator_input(d, fakes[k], batch[k].condition), cache);
		const double fake_logit = cache.preactivations.back()[0];
		if (grads) {
			const double dz = sigmoid(fake_logit) * inv;
			d.net.backward_preactivation(cache, std::span<const double>(&dz, 1), *grads);
		}
		loss += discriminator_loss(real_logit, fake_logit);
	}
	return loss * inv;
}

/// Batch-mean generator loss (adversarial plus optional L2 to the real row);
/// accumulates the generator gradient into `grads` when given.
inline double generator_loss_grad(const Generator &g, const Discriminator &d, const std::vector<GanSample> &batch,
								  const GeneratorPass &pass, double l2_weight, Gradients *grads) {
	const double inv = 1.0 / static_cast<double>(batch.size());
	double loss = 0.0;
	Network::Cache dcache;
	Gradients scratch = d.net.zero_gradients();
	for (std::size_t k = 0; k < batch.size(); ++k) {
		d.net.forward(discriminator_input(d, pass.fakes[k], batch[k].condition), dcache);
		const double logit = dcache.preactivations.back()[0];
		loss += generator_loss(logit);
		Vector dfake(kFeatureCount, 0.0);
		if (grads) {
			const double dz = (sigmoid(logit) - 1.0) * inv;
			const Vector din = d.net.backward_preactivation(dcache, std::span<const double>(&dz, 1), scratch);
			std::copy(din.begin(), din.begin() + static_cast<std::ptrdiff_t>(kFeatureCount), dfake.begin());
		}
		if (l2_weight != 0.0) {
			for (std::size_t c = 0; c < kFeatureCount; ++c) {
				const double e = pass.fakes[k][c] - batch[k].real[c];
				loss += l2_weight * e * e / static_cast<double>(kFeatureCount);
				dfake[c] += l2_weight * 2.0 * e / static_cast<double>(kFeatureCount) * inv;
			}
		}
		if (grads)
			g.net.backward(pass.caches[k], dfake, *grads);
	}
	return loss * inv;
}

struct GanOptimizers {
	AdamState generator;
	AdamState discriminator;
};

struct GanStepLosses {
	double d_loss = 0.0;
	double g_loss = 0.0;
};

struct GanSchedule {
	double learning_rate = 0.0002;
	std::size_t batch_size = 5;
	std::size_t epochs = 300;
	std::size_t d_steps = 1;
	double l2_weight = 0.0;
	double generator_average = 0.0; // EMA decay for returned G weights; 0 keeps the last iterate

	void validate() const {
		if (!(learning_rate >= 0.0))
			throw UsageError("GAN learning rate must be non-negative");
		if (batch_size == 0)
			throw UsageError("GAN batch size must be at least 1");
		if (d_steps == 0)
			throw UsageError("GAN d_steps must be at least 1");
		if (!(l2_weight >= 0.0))
			throw UsageError("GAN L2 weight must be non-negative");
		if (!(generator_average >= 0.0 && generator_average < 1.0))
			throw UsageError("GAN generator averaging decay must be in [0, 1)");
	}
};

/// d_steps discriminator updates then one non-saturating generator update.
/// The generator pass is computed once; D updates do not touch G, so its
/// cache stays valid for the G step.
inline GanStepLosses gan_train_step(Generator &g, Discriminator &d, const std::vector<GanSample> &batch,
									GanOptimizers &opt, const GanSchedule &schedule, Rng &rng,
									std::size_t step_index = 0) {
	if (batch.empty())
		throw DataError("GAN train step on an empty batch");
	const GeneratorPass pass = run_generator(g, batch, g.noise_dim ? &rng : nullptr);
	GanStepLosses losses;
	for (std::size_t s = 0; s < schedule.d_steps; ++s) {
		Gradients dg = d.net.zero_gradients();
		losses.d_loss = discriminator_loss_grad(d, batch, pass.fakes, &dg);
		if (!std::isfinite(losses.d_loss))
			throw TrainingError("GAN discriminator loss is not finite", step_index);
		try {
			adam_step(opt.discriminator, d.net.parameters(), dg.views());
		} catch (const TrainingError &) {
			throw TrainingError("GAN discriminator gradient is not finite", step_index);
		}
	}
	Gradients gg = g.net.zero_gradients();
	losses.g_loss = generator_loss_grad(g, d, batch, pass, schedule.l2_weight, &gg);
	if (!std::isfinite(losses.g_loss))
		throw TrainingError("GAN generator loss is not finite", step_index);
	try {
		adam_step(opt.generator, g.net.parameters(), gg.views());
	} catch (const TrainingError &) {
		throw TrainingError("GAN generator gradient is not finite", step_index);
	}
	return losses;
}

struct GanLogEntry {
	std::size_t step = 0;
	double d_loss = 0.0;
	double g_loss = 0.0;

	friend bool operator==(const GanLogEntry &, const GanLogEntry &) = default;
};

struct GanTrainResult {
	Generator generator;
	Discriminator discriminator;
	GanOptimizers optimizers;
	std::vector<GanLogEntry> log;
	Generator last_generator; // final iterate; equals `generator` unless averaging is on
};

/// Fixed-epoch adversarial training on the train partition. Batches are
/// contiguous chronological blocks; only the order of blocks is shuffled.
inline GanTrainResult train_gan(const std::vector<WindowSample> &train, std::size_t window,
								const GanSchedule &schedule, std::uint64_t seed, const GanArchitecture &arch = {}) {
	schedule.validate();
	if (train.empty())
		throw DataError("GAN training needs at least one window");
	for (const auto &w : train)
		if (w.history.rows() != window)
			throw DimensionError("GAN training window length", window, w.history.rows());
	Rng rng(seed);
	GanTrainResult r;
	r.generator = make_generator(window, arch, rng);
	r.discriminator = make_discriminator(window, arch, rng);
	r.generator.scaler = fit_window_scaler(train, ScaleMode::minmax_signed);
	r.optimizers.generator = AdamState(schedule.learning_rate);
	r.optimizers.discriminator = AdamState(schedule.learning_rate);

	std::vector<GanSample> samples;
	samples.reserve(train.size());
	for (const auto &w : train) {
		if (std::abs(w.sentiment) > 1.0 + kScaleTolerance)
			throw DataError("window sentiment " + std::to_string(w.sentiment) + " is outside [-1, 1]");
		samples.push_back(make_gan_sample(r.generator.scaler, w));
	}
	std::vector<std::size_t> blocks((samples.size() + schedule.batch_size - 1) / schedule.batch_size);
	Generator average = r.generator;
	const double decay = schedule.generator_average;
	std::vector<GanSample> batch;
	std::size_t step = 0;
	for (std::size_t epoch = 0; epoch < schedule.epochs; ++epoch) {
		std::iota(blocks.begin(), blocks.end(), std::size_t{0});
		rng.shuffle(blocks.begin(), blocks.end());
		for (std::size_t b : blocks) {
			const std::size_t begin = b * schedule.batch_size;
			const std::size_t end = std::min(samples.size(), begin + schedule.batch_size);
			batch.assign(samples.begin() + static_cast<std::ptrdiff_t>(begin),
						 samples.begin() + static_cast<std::ptrdiff_t>(end));
			++step;
			const auto losses =
				gan_train_step(r.generator, r.discriminator, batch, r.optimizers, schedule, rng, step);
			r.log.push_back({step, losses.d_loss, losses.g_loss});
			if (decay > 0.0) {
				auto avg = average.net.parameters();
				const auto cur = std::as_const(r.generator.net).parameters();
				for (std::size_t i = 0; i < avg.size(); ++i)
					for (std::size_t k = 0; k < avg[i].size(); ++k)
						avg[i][k] = decay * avg[i][k] + (1.0 - decay) * cur[i][k];
			}
		}
	}
	r.last_generator = r.generator;
	if (decay > 0.0)
		r.generator.net = std::move(average.net);
	return r;
}

struct HoldoutOptions {
	bool autoregressive = false; // feed predictions back as history
	std::size_t holdout = kHoldoutLength;
};

struct HoldoutDiagnostics {
	std::size_t clamped_inputs = 0; // scaled history entries outside [-1, 1]
};

/// Close predictions for the final `holdout` rows. Each prediction sees the
/// L rows before its target day and the sentiment of the last of them.
inline std::vector<ForecastRow> forecast_holdout(const Generator &g, const AlignedDataset &ds,
												 const HoldoutOptions &opt = {},
												 HoldoutDiagnostics *diagnostics = nullptr) {
	if (!g.scaler.fitted())
		throw StateError("generator scaler is not fitted");
	const std::size_t L = g.window;
	if (ds.size() < opt.holdout + L)
		throw DataError("holdout forecast needs " + std::to_string(opt.holdout + L) + " rows (L history before the first " +
						"holdout day), have " + std::to_string(ds.size()));
	Matrix features = ds.features;
	HoldoutDiagnostics diag;
	std::vector<ForecastRow> rows;
	const Vector zero_noise(g.noise_dim, 0.0);
	for (std::size_t target = ds.size() - opt.holdout; target < ds.size(); ++target) {
		const std::size_t t = target - 1;
		Matrix scaled = scaler_transform(g.scaler, features.slice_rows(target - L, target));
		for (double &v : scaled.data()) {
			if (std::abs(v) > 1.0) {
				v = std::clamp(v, -1.0, 1.0);
				++diag.clamped_inputs;
			}
		}
		const double s = std::clamp(ds.sentiment[t], -1.0, 1.0);
		const Vector out = generator_forward(g, condition_vector(scaled, s), zero_noise);
		Vector unscaled(kFeatureCount);
		for (std::size_t c = 0; c < kFeatureCount; ++c)
			unscaled[c] = g.scaler.inverse(c, out[c]);
		rows.push_back({ds.dates[target], unscaled[kCloseColumn], ds.features(target, kCloseColumn), ds.dates[t]});
		if (opt.autoregressive)
			std::copy(unscaled.begin(), unscaled.end(), features.row(target).begin());
	}
	if (diagnostics)
		*diagnostics = diag;
	return rows;
}

inline void write_gan_log(std::ostream &out, const std::vector<GanLogEntry> &log) {
	out << "step,d_loss,g_loss\n";
	for (const auto &e : log)
		out << e.step << ',' << format_number(e.d_loss) << ',' << format_number(e.g_loss) << '\n';
}

inline nlohmann::json generator_to_json(const Generator &g) {
	return {{"type", "generator"},
			{"window", g.window},
			{"noise_dim", g.noise_dim},
			{"network", network_to_json(g.net)},
			{"scaler", scaler_to_json(g.scaler)}};
}

inline Generator generator_from_json(const nlohmann::json &j) {
	Generator g;
	g.window = j.at("window").get<std::size_t>();
	g.noise_dim = j.value("noise_dim", std::size_t{0});
	g.net = network_from_json(j.at("network"));
	g.scaler = scaler_from_json(j.at("scaler"));
	if (g.net.inputs() != g.condition_size() + g.noise_dim)
		throw DimensionError("generator JSON input width", g.condition_size() + g.noise_dim, g.net.inputs());
	if (g.net.outputs() != kFeatureCount)
		throw DimensionError("generator JSON output width", kFeatureCount, g.net.outputs());
	return g;
}

inline nlohmann::json discriminator_to_json(const Discriminator &d) {
	return {{"type", "discriminator"}, {"window", d.window}, {"network", network_to_json(d.net)}};
}

inline Discriminator discriminator_from_json(const nlohmann::json &j) {
	Discriminator d;
	d.window = j.at("window").get<std::size_t>();
	d.net = network_from_json(j.at("network"));
	if (d.net.inputs() != kFeatureCount + d.condition_size())
		throw DimensionError("discriminator JSON input width", kFeatureCount + d.condition_size(), d.net.inputs());
	return d;
}

} // namespace sentigan
