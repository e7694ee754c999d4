#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentigan/errors.hpp"
#include "sentigan/numkernel/matrix.hpp"
#include "sentigan/numkernel/random.hpp"

namespace sentigan {

enum class Activation { identity, relu, leaky_relu, tanh, sigmoid };

inline constexpr double kLeakySlope = 0.01;

inline std::string_view to_string(Activation a) {
	switch (a) {
	case Activation::identity: return "identity";
	case Activation::relu: return "relu";
	case Activation::leaky_relu: return "leaky_relu";
	case Activation::tanh: return "tanh";
	case Activation::sigmoid: return "sigmoid";
	}
	return "identity";
}

inline Activation activation_from_string(std::string_view s) {
	if (s == "identity") return Activation::identity;
	if (s == "relu") return Activation::relu;
	if (s == "leaky_relu") return Activation::leaky_relu;
	if (s == "tanh") return Activation::tanh;
	if (s == "sigmoid") return Activation::sigmoid;
	throw DataError("unknown activation '" + std::string(s) + "'");
}

inline double sigmoid(double z) {
	if (z >= 0.0)
		return 1.0 / (1.0 + std::exp(-z));
	const double e = std::exp(z);
	return e / (1.0 + e);
}

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) {
	return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double activate(Activation a, double z) {
	switch (a) {
	case Activation::identity: return z;
	case Activation::relu: return z > 0.0 ? z : 0.0;
	case Activation::leaky_relu: return z > 0.0 ? z : kLeakySlope * z;
	case Activation::tanh: return std::tanh(z);
	case Activation::sigmoid: return sigmoid(z);
	}
	return z;
}

/// dy/dz given the pre-activation z and the activation output y.
inline double activation_derivative(Activation a, double z, double y) {
	switch (a) {
	case Activation::identity: return 1.0;
	case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
	case Activation::leaky_relu: return z > 0.0 ? 1.0 : kLeakySlope;
	case Activation::tanh: return 1.0 - y * y;
	case Activation::sigmoid: return y * (1.0 - y);
	}
	return 1.0;
}

struct DenseLayer {
	Matrix weights; // out x in
	Vector bias;    // out
	Activation activation = Activation::identity;

	DenseLayer() = default;
	DenseLayer(Matrix w, Vector b, Activation act) : weights(std::move(w)), bias(std::move(b)), activation(act) {
		if (bias.size() != weights.rows())
			throw DimensionError("DenseLayer bias length", weights.rows(), bias.size());
	}

	std::size_t inputs() const { return weights.cols(); }
	std::size_t outputs() const { return weights.rows(); }
	std::size_t parameter_count() const { return weights.size() + bias.size(); }

	friend bool operator==(const DenseLayer &, const DenseLayer &) = default;
};

/// Glorot-uniform for tanh/sigmoid/identity, He-normal for relu-family; biases start at zero.
inline DenseLayer make_dense(std::size_t in, std::size_t out, Activation act, Rng &rng) {
	Matrix w(out, in);
	if (act == Activation::relu || act == Activation::leaky_relu) {
		const double sd = std::sqrt(2.0 / static_cast<double>(in));
		for (double &v : w.data())
			v = rng.normal(0.0, sd);
	} else {
		const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
		for (double &v : w.data())
			v = rng.uniform(-limit, limit);
	}
	return DenseLayer(std::move(w), Vector(out, 0.0), act);
}

inline void dense_preactivation(const DenseLayer &layer, std::span<const double> input, std::span<double> z) {
	if (input.size() != layer.inputs())
		throw DimensionError("dense_forward input length", layer.inputs(), input.size());
	const std::size_t in = layer.inputs();
	for (std::size_t r = 0; r < layer.outputs(); ++r) {
		const double *w = layer.weights.row(r).data();
		double acc = layer.bias[r];
		for (std::size_t c = 0; c < in; ++c)
			acc += w[c] * input[c];
		z[r] = acc;
	}
}

inline Vector dense_forward(const DenseLayer &layer, std::span<const double> input) {
	Vector z(layer.outputs());
	dense_preactivation(layer, input, z);
	for (double &v : z)
		v = activate(layer.activation, v);
	return z;
}

struct LayerGradient {
	Matrix weights;
	Vector bias;
};

/// Parameter gradients for a Network, laid out like its layers.
struct Gradients {
	std::vector<LayerGradient> layers;

	void zero() {
		for (auto &l : layers) {
			l.weights.fill(0.0);
			std::fill(l.bias.begin(), l.bias.end(), 0.0);
		}
	}

	void scale(double s) {
		for (auto &l : layers) {
			for (double &v : l.weights.data())
				v *= s;
			for (double &v : l.bias)
				v *= s;
		}
	}

	std::vector<std::span<const double>> views() const {
		std::vector<std::span<const double>> out;
		for (const auto &l : layers) {
			out.emplace_back(l.weights.data());
			out.emplace_back(l.bias);
		}
		return out;
	}
};

/// Feed-forward stack of dense layers with a cached forward pass for
/// reverse-mode differentiation.
class Network {
public:
	struct Cache {
		std::vector<Vector> inputs;         // input to each layer
		std::vector<Vector> preactivations; // z per layer
		std::vector<Vector> outputs;        // activation(z) per layer
	};

	Network() = default;
	explicit Network(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
		for (std::size_t i = 1; i < layers_.size(); ++i)
			if (layers_[i].inputs() != layers_[i - 1].outputs())
				throw DimensionError("Network layer " + std::to_string(i) + " input width", layers_[i - 1].outputs(),
									 layers_[i].inputs());
	}

	/// widths = {in, h1, ..., out}; every hidden layer uses `hidden`, the last one `output`.
	static Network make(const std::vector<std::size_t> &widths, Activation hidden, Activation output, Rng &rng) {
		if (widths.size() < 2)
			throw UsageError("Network::make needs at least input and output widths");
		std::vector<DenseLayer> layers;
		for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
			const bool last = i + 2 == widths.size();
			layers.push_back(make_dense(widths[i], widths[i + 1], last ? output : hidden, rng));
		}
		return Network(std::move(layers));
	}

	const std::vector<DenseLayer> &layers() const { return layers_; }
	std::vector<DenseLayer> &layers() { return layers_; }
	std::size_t inputs() const { return layers_.empty() ? 0 : layers_.front().inputs(); }
	std::size_t outputs() const { return layers_.empty() ? 0 : layers_.back().outputs(); }

	std::size_t parameter_count() const {
		std::size_t n = 0;
		for (const auto &l : layers_)
			n += l.parameter_count();
		return n;
	}

	Vector forward(std::span<const double> input) const {
		Vector x(input.begin(), input.end());
		for (const auto &l : layers_)
			x = dense_forward(l, x);
		return x;
	}

	Vector forward(std::span<const double> input, Cache &cache) const {
		cache.inputs.resize(layers_.size());
		cache.preactivations.resize(layers_.size());
		cache.outputs.resize(layers_.size());
		std::span<const double> x = input;
		for (std::size_t i = 0; i < layers_.size(); ++i) {
			const auto &l = layers_[i];
			cache.inputs[i].assign(x.begin(), x.end());
			auto &z = cache.preactivations[i];
			z.resize(l.outputs());
			dense_preactivation(l, x, z);
			auto &y = cache.outputs[i];
			y.resize(z.size());
			for (std::size_t k = 0; k < z.size(); ++k)
				y[k] = activate(l.activation, z[k]);
			x = y;
		}
		return cache.outputs.empty() ? Vector(input.begin(), input.end()) : cache.outputs.back();
	}

	Gradients zero_gradients() const {
		Gradients g;
		for (const auto &l : layers_)
			g.layers.push_back({Matrix(l.outputs(), l.inputs()), Vector(l.outputs(), 0.0)});
		return g;
	}

	/// Accumulates ∂loss/∂θ into `grads` given ∂loss/∂output; returns ∂loss/∂input.
	Vector backward(const Cache &cache, std::span<const double> output_grad, Gradients &grads) const {
		check_cache(cache);
		const auto &last = layers_.back();
		if (output_grad.size() != last.outputs())
			throw DimensionError("backward loss gradient length", last.outputs(), output_grad.size());
		Vector dz(output_grad.size());
		const auto &z = cache.preactivations.back();
		const auto &y = cache.outputs.back();
		for (std::size_t k = 0; k < dz.size(); ++k)
			dz[k] = output_grad[k] * activation_derivative(last.activation, z[k], y[k]);
		return backward_preactivation(cache, dz, grads);
	}

	/// Same as backward, but starting from ∂loss/∂z of the final layer. Used for
	/// sigmoid outputs whose loss is expressed on logits.
	Vector backward_preactivation(const Cache &cache, std::span<const double> last_dz, Gradients &grads) const {
		check_cache(cache);
		if (grads.layers.size() != layers_.size())
			throw DimensionError("backward gradient buffer layers", layers_.size(), grads.layers.size());
		Vector dz(last_dz.begin(), last_dz.end());
		for (std::size_t i = layers_.size(); i-- > 0;) {
			const auto &l = layers_[i];
			auto &g = grads.layers[i];
			outer_add(g.weights, dz, cache.inputs[i]);
			for (std::size_t k = 0; k < dz.size(); ++k)
				g.bias[k] += dz[k];
			Vector dx(l.inputs(), 0.0);
			matvec_transposed_add(l.weights, dz, dx);
			if (i == 0)
				return dx;
			const auto &prev = layers_[i - 1];
			const auto &pz = cache.preactivations[i - 1];
			const auto &py = cache.outputs[i - 1];
			dz.resize(dx.size());
			for (std::size_t k = 0; k < dx.size(); ++k)
				dz[k] = dx[k] * activation_derivative(prev.activation, pz[k], py[k]);
		}
		return {};
	}

	std::vector<std::span<double>> parameters() {
		std::vector<std::span<double>> out;
		for (auto &l : layers_) {
			out.emplace_back(l.weights.data());
			out.emplace_back(l.bias);
		}
		return out;
	}

	std::vector<std::span<const double>> parameters() const {
		std::vector<std::span<const double>> out;
		for (const auto &l : layers_) {
			out.emplace_back(l.weights.data());
			out.emplace_back(l.bias);
		}
		return out;
	}

	friend bool operator==(const Network &, const Network &) = default;

private:
	void check_cache(const Cache &cache) const {
		if (layers_.empty())
			throw StateError("backward on an empty network");
		if (cache.inputs.size() != layers_.size() || cache.preactivations.size() != layers_.size())
			throw StateError("backward called without a matching forward cache");
		for (std::size_t i = 0; i < layers_.size(); ++i)
			if (cache.inputs[i].size() != layers_[i].inputs() ||
				cache.preactivations[i].size() != layers_[i].outputs())
				throw StateError("forward cache does not match layer " + std::to_string(i));
	}

	std::vector<DenseLayer> layers_;
};

} // namespace sentigan
