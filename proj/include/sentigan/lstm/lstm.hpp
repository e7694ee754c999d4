#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentigan/data/scaling.hpp"
#include "sentigan/numkernel/adam.hpp"
#include "sentigan/numkernel/dense.hpp"
#include "sentigan/numkernel/serialize.hpp"

namespace sentigan {

/// Single-layer LSTM with a linear head on the final hidden state.
///
/// The four gates are stacked row-wise in the order input, forget, output,
/// candidate, so rows [k*H, (k+1)*H) of `w`, `u` and `b` belong to gate k.
struct LstmModel {
	std::size_t input_size = 0;
	std::size_t hidden_size = 0;
	Matrix w; // 4H x I
	Matrix u; // 4H x H
	Vector b; // 4H
	DenseLayer head; // 1 x H, identity
	ScalerParams scaler;

	std::vector<std::span<double>> parameters() {
		return {w.data(), u.data(), b, head.weights.data(), head.bias};
	}
	std::vector<std::span<const double>> parameters() const {
		return {w.data(), u.data(), b, head.weights.data(), head.bias};
	}

	friend bool operator==(const LstmModel &, const LstmModel &) = default;
};

enum LstmGate : std::size_t { gate_input = 0, gate_forget = 1, gate_output = 2, gate_candidate = 3 };

/// PyTorch-style uniform(-1/sqrt(H), 1/sqrt(H)) for the cell, forget bias 1,
/// Glorot head.
inline LstmModel make_lstm(std::size_t input_size, std::size_t hidden_size, Rng &rng) {
	if (input_size == 0 || hidden_size == 0)
		throw UsageError("LSTM sizes must be positive");
	LstmModel m;
	m.input_size = input_size;
	m.hidden_size = hidden_size;
	const double k = 1.0 / std::sqrt(static_cast<double>(hidden_size));
	m.w = Matrix(4 * hidden_size, input_size);
	m.u = Matrix(4 * hidden_size, hidden_size);
	m.b.assign(4 * hidden_size, 0.0);
	for (double &v : m.w.data())
		v = rng.uniform(-k, k);
	for (double &v : m.u.data())
		v = rng.uniform(-k, k);
	for (std::size_t j = 0; j < hidden_size; ++j)
		m.b[gate_forget * hidden_size + j] = 1.0;
	m.head = make_dense(hidden_size, 1, Activation::identity, rng);
	return m;
}

struct LstmState {
	Vector h;
	Vector c;
};

struct LstmStepCache {
	Vector x;
	Vector h_prev;
	Vector c_prev;
	Vector gates; // 4H, post-activation
	Vector c;
	Vector tanh_c;
};

inline LstmState lstm_zero_state(const LstmModel &m) { return {Vector(m.hidden_size, 0.0), Vector(m.hidden_size, 0.0)}; }

inline LstmState lstm_cell_forward(const LstmModel &m, std::span<const double> x, const LstmState &s,
								   LstmStepCache *cache = nullptr) {
	const std::size_t H = m.hidden_size;
	if (x.size() != m.input_size)
		throw DimensionError("lstm_cell_forward input length", m.input_size, x.size());
	if (s.h.size() != H || s.c.size() != H)
		throw DimensionError("lstm_cell_forward state length", H, s.h.size() != H ? s.h.size() : s.c.size());
	Vector z = m.b;
	for (std::size_t r = 0; r < 4 * H; ++r) {
		const double *wr = m.w.row(r).data();
		const double *ur = m.u.row(r).data();
		double acc = 0.0;
		for (std::size_t c = 0; c < m.input_size; ++c)
			acc += wr[c] * x[c];
		for (std::size_t c = 0; c < H; ++c)
			acc += ur[c] * s.h[c];
		z[r] += acc;
	}
	for (std::size_t r = 0; r < 3 * H; ++r)
		z[r] = sigmoid(z[r]);
	for (std::size_t r = 3 * H; r < 4 * H; ++r)
		z[r] = std::tanh(z[r]);
	LstmState next{Vector(H), Vector(H)};
	Vector tc(H);
	for (std::size_t j = 0; j < H; ++j) {
		next.c[j] = z[H + j] * s.c[j] + z[j] * z[3 * H + j];
		tc[j] = std::tanh(next.c[j]);
		next.h[j] = z[2 * H + j] * tc[j];
	}
	if (cache) {
		cache->x.assign(x.begin(), x.end());
		cache->h_prev = s.h;
		cache->c_prev = s.c;
		cache->gates = std::move(z);
		cache->c = next.c;
		cache->tanh_c = std::move(tc);
	}
	return next;
}

struct LstmSequenceCache {
	std::vector<LstmStepCache> steps;
	Vector h_last;
};

/// Runs the rows of an already scaled sequence from a zero state and
/// applies the head to the final hidden state.
inline double lstm_forward(const LstmModel &m, const Matrix &seq, LstmSequenceCache *cache = nullptr) {
	if (seq.rows() == 0)
		throw DataError("LSTM input sequence is empty");
	LstmState s = lstm_zero_state(m);
	if (cache)
		cache->steps.resize(seq.rows());
	for (std::size_t t = 0; t < seq.rows(); ++t)
		s = lstm_cell_forward(m, seq.row(t), s, cache ? &cache->steps[t] : nullptr);
	if (cache)
		cache->h_last = s.h;
	return dense_forward(m.head, s.h)[0];
}

/// Gradient buffers laid out like LstmModel::parameters().
struct LstmGradients {
	Matrix w, u, head_w;
	Vector b, head_b;

	explicit LstmGradients(const LstmModel &m)
		: w(m.w.rows(), m.w.cols()), u(m.u.rows(), m.u.cols()), head_w(1, m.hidden_size), b(m.b.size(), 0.0),
		  head_b(1, 0.0) {}

	void zero() {
		w.fill(0.0);
		u.fill(0.0);
		head_w.fill(0.0);
		std::fill(b.begin(), b.end(), 0.0);
		std::fill(head_b.begin(), head_b.end(), 0.0);
	}
	std::vector<std::span<const double>> views() const { return {w.data(), u.data(), b, head_w.data(), head_b}; }
};

/// Backpropagation through time from d(loss)/d(output). Accumulates into
/// `grads` and returns d(loss)/d(input rows).
inline Matrix lstm_backward(const LstmModel &m, const LstmSequenceCache &cache, double dout, LstmGradients &grads) {
	if (cache.steps.empty() || cache.h_last.size() != m.hidden_size)
		throw StateError("lstm_backward without a matching forward cache");
	const std::size_t H = m.hidden_size, I = m.input_size;
	for (std::size_t j = 0; j < H; ++j)
		grads.head_w(0, j) += dout * cache.h_last[j];
	grads.head_b[0] += dout;
	Vector dh(H), dc(H, 0.0), dz(4 * H);
	for (std::size_t j = 0; j < H; ++j)
		dh[j] = dout * m.head.weights(0, j);
	Matrix dx(cache.steps.size(), I);
	for (std::size_t t = cache.steps.size(); t-- > 0;) {
		const LstmStepCache &s = cache.steps[t];
		const double *g = s.gates.data();
		for (std::size_t j = 0; j < H; ++j) {
			const double i = g[j], f = g[H + j], o = g[2 * H + j], cand = g[3 * H + j];
			const double tc = s.tanh_c[j];
			const double dcj = dc[j] + dh[j] * o * (1.0 - tc * tc);
			dz[j] = dcj * cand * i * (1.0 - i);
			dz[H + j] = dcj * s.c_prev[j] * f * (1.0 - f);
			dz[2 * H + j] = dh[j] * tc * o * (1.0 - o);
			dz[3 * H + j] = dcj * i * (1.0 - cand * cand);
			dc[j] = dcj * f;
		}
		std::fill(dh.begin(), dh.end(), 0.0);
		auto dxt = dx.row(t);
		for (std::size_t r = 0; r < 4 * H; ++r) {
			const double d = dz[r];
			if (d == 0.0)
				continue;
			grads.b[r] += d;
			double *gw = grads.w.row(r).data();
			double *gu = grads.u.row(r).data();
			const double *wr = m.w.row(r).data();
			const double *ur = m.u.row(r).data();
			for (std::size_t c = 0; c < I; ++c) {
				gw[c] += d * s.x[c];
				dxt[c] += d * wr[c];
			}
			for (std::size_t c = 0; c < H; ++c) {
				gu[c] += d * s.h_prev[c];
				dh[c] += d * ur[c];
			}
		}
	}
	return dx;
}

/// Close forecast in price units for one window.
inline double lstm_predict(const LstmModel &m, const WindowSample &w) {
	if (!m.scaler.fitted())
		throw StateError("LSTM scaler is not fitted");
	const double y = lstm_forward(m, scale_history(m.scaler, w));
	return m.scaler.inverse(kCloseColumn, y);
}

struct TrainSchedule {
	double learning_rate = 0.001;
	std::size_t batch_size = 32;
	std::size_t max_epochs = 200;
	std::size_t early_stop_patience = 10;
	double plateau_factor = 0.5;
	std::size_t plateau_patience = 5;
	double validation_fraction = 0.15;

	void validate() const {
		if (!(learning_rate > 0.0))
			throw UsageError("learning rate must be positive");
		if (batch_size == 0)
			throw UsageError("batch size must be positive");
		if (!(plateau_factor > 0.0 && plateau_factor < 1.0))
			throw UsageError("plateau factor must lie in (0, 1)");
		if (early_stop_patience == 0 || plateau_patience == 0)
			throw UsageError("patience values must be at least 1");
		if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
			throw UsageError("validation fraction must lie in (0, 1)");
	}
};

struct LstmEpochLog {
	std::size_t epoch = 0;
	double train_loss = 0.0;
	double val_loss = 0.0;
	double lr = 0.0;          // rate used during this epoch
	bool lr_reduced = false;  // plateau event at the end of this epoch
	bool improved = false;

	friend bool operator==(const LstmEpochLog &, const LstmEpochLog &) = default;
};

struct LstmTrainResult {
	LstmModel model; // best-validation weights
	std::vector<LstmEpochLog> log;
	std::size_t best_epoch = 0; // 0 when no epoch ran
	double best_val_loss = std::numeric_limits<double>::infinity();
	bool stopped_early = false;
};

inline double lstm_mse(const LstmModel &m, const std::vector<Matrix> &x, const Vector &y, std::size_t begin,
					   std::size_t end) {
	double s = 0.0;
	for (std::size_t k = begin; k < end; ++k) {
		const double e = lstm_forward(m, x[k]) - y[k];
		s += e * e;
	}
	return s / static_cast<double>(end - begin);
}

/// Supervised training on the scaled close of each window's target. The
/// last validation_fraction of `train` (chronologically) drives early
/// stopping and the plateau schedule; batches are taken in order.
inline LstmTrainResult train_lstm(const std::vector<WindowSample> &train, const TrainSchedule &schedule,
								  std::uint64_t seed, std::size_t hidden_size = 32) {
	schedule.validate();
	if (train.size() < 2 * schedule.batch_size)
		throw DataError("LSTM training needs at least " + std::to_string(2 * schedule.batch_size) +
						" windows, have " + std::to_string(train.size()));
	Rng rng(seed);
	LstmTrainResult result;
	result.model = make_lstm(kFeatureCount, hidden_size, rng);
	result.model.scaler = fit_window_scaler(train, ScaleMode::minmax_unit);
	if (schedule.max_epochs == 0)
		return result;

	std::vector<Matrix> x;
	Vector y;
	x.reserve(train.size());
	for (const auto &w : train) {
		x.push_back(scale_history(result.model.scaler, w));
		y.push_back(result.model.scaler.transform(kCloseColumn, w.target[kCloseColumn]));
	}
	const std::size_t n_val = std::max<std::size_t>(
		1, static_cast<std::size_t>(std::floor(schedule.validation_fraction * static_cast<double>(train.size()))));
	const std::size_t n_fit = train.size() - n_val;

	LstmModel model = result.model;
	AdamState adam(schedule.learning_rate);
	LstmGradients grads(model);
	LstmSequenceCache cache;
	std::size_t since_best = 0, since_plateau = 0;
	for (std::size_t epoch = 1; epoch <= schedule.max_epochs; ++epoch) {
		LstmEpochLog entry;
		entry.epoch = epoch;
		entry.lr = adam.learning_rate;
		double loss_sum = 0.0;
		for (std::size_t start = 0; start < n_fit; start += schedule.batch_size) {
			const std::size_t stop = std::min(n_fit, start + schedule.batch_size);
			const double inv = 1.0 / static_cast<double>(stop - start);
			grads.zero();
			for (std::size_t k = start; k < stop; ++k) {
				const double e = lstm_forward(model, x[k], &cache) - y[k];
				loss_sum += e * e;
				lstm_backward(model, cache, 2.0 * e * inv, grads);
			}
			try {
				adam_step(adam, model.parameters(), grads.views());
			} catch (const TrainingError &) {
				throw TrainingError("LSTM training diverged", epoch);
			}
		}
		entry.train_loss = loss_sum / static_cast<double>(n_fit);
		entry.val_loss = lstm_mse(model, x, y, n_fit, train.size());
		if (!std::isfinite(entry.train_loss) || !std::isfinite(entry.val_loss))
			throw TrainingError("LSTM training diverged", epoch);

		if (entry.val_loss < result.best_val_loss) {
			entry.improved = true;
			result.best_val_loss = entry.val_loss;
			result.best_epoch = epoch;
			result.model = model;
			since_best = 0;
			since_plateau = 0;
		} else {
			++since_best;
			if (++since_plateau >= schedule.plateau_patience) {
				adam.learning_rate *= schedule.plateau_factor;
				entry.lr_reduced = true;
				since_plateau = 0;
			}
		}
		result.log.push_back(entry);
		if (since_best >= schedule.early_stop_patience) {
			result.stopped_early = true;
			break;
		}
	}
	return result;
}

inline void write_lstm_log(std::ostream &out, const std::vector<LstmEpochLog> &log) {
	out << "epoch,train_loss,val_loss,lr\n";
	for (const auto &e : log)
		out << e.epoch << ',' << format_number(e.train_loss) << ',' << format_number(e.val_loss) << ','
			<< format_number(e.lr) << '\n';
}

inline nlohmann::json lstm_to_json(const LstmModel &m) {
	const std::size_t H = m.hidden_size;
	nlohmann::json gates = nlohmann::json::object();
	const char *names[] = {"input", "forget", "output", "candidate"};
	for (std::size_t k = 0; k < 4; ++k) {
		gates[names[k]] = {{"W", matrix_to_json(m.w.slice_rows(k * H, (k + 1) * H))},
						   {"U", matrix_to_json(m.u.slice_rows(k * H, (k + 1) * H))},
						   {"b", Vector(m.b.begin() + static_cast<std::ptrdiff_t>(k * H),
										m.b.begin() + static_cast<std::ptrdiff_t>((k + 1) * H))}};
	}
	return {{"type", "lstm"},
			{"input_size", m.input_size},
			{"hidden_size", H},
			{"gates", gates},
			{"head", layer_to_json(m.head)},
			{"scaler", scaler_to_json(m.scaler)}};
}

inline LstmModel lstm_from_json(const nlohmann::json &j) {
	LstmModel m;
	m.input_size = j.at("input_size").get<std::size_t>();
	m.hidden_size = j.at("hidden_size").get<std::size_t>();
	const std::size_t H = m.hidden_size;
	m.w = Matrix(0, m.input_size);
	m.u = Matrix(0, H);
	const char *names[] = {"input", "forget", "output", "candidate"};
	for (const char *name : names) {
		const auto &g = j.at("gates").at(name);
		const Matrix w = matrix_from_json(g.at("W")), u = matrix_from_json(g.at("U"));
		const Vector b = g.at("b").get<Vector>();
		if (w.rows() != H || w.cols() != m.input_size)
			throw DimensionError(std::string("LSTM JSON ") + name + " W", H * m.input_size, w.size());
		if (u.rows() != H || u.cols() != H)
			throw DimensionError(std::string("LSTM JSON ") + name + " U", H * H, u.size());
		if (b.size() != H)
			throw DimensionError(std::string("LSTM JSON ") + name + " b", H, b.size());
		for (std::size_t r = 0; r < H; ++r) {
			m.w.append_row(w.row(r));
			m.u.append_row(u.row(r));
		}
		m.b.insert(m.b.end(), b.begin(), b.end());
	}
	m.head = layer_from_json(j.at("head"));
	if (m.head.inputs() != H || m.head.outputs() != 1)
		throw DimensionError("LSTM JSON head inputs", H, m.head.inputs());
	m.scaler = scaler_from_json(j.at("scaler"));
	return m;
}

} // namespace sentigan
