#pragma once

#include <json.hpp>

#include "sentigan/numkernel/adam.hpp"
#include "sentigan/numkernel/dense.hpp"
#include "sentigan/numkernel/scaler.hpp"

namespace sentigan {

inline nlohmann::json matrix_to_json(const Matrix &m) {
	return {{"rows", m.rows()},
			{"cols", m.cols()},
			{"data", std::vector<double>(m.data().begin(), m.data().end())}};
}

inline Matrix matrix_from_json(const nlohmann::json &j) {
	Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
	const auto data = j.at("data").get<std::vector<double>>();
	if (data.size() != m.size())
		throw DimensionError("matrix JSON data length", m.size(), data.size());
	std::copy(data.begin(), data.end(), m.data().begin());
	return m;
}

inline nlohmann::json layer_to_json(const DenseLayer &l) {
	return {{"activation", std::string(to_string(l.activation))},
			{"weights", matrix_to_json(l.weights)},
			{"bias", l.bias}};
}

inline DenseLayer layer_from_json(const nlohmann::json &j) {
	return DenseLayer(matrix_from_json(j.at("weights")), j.at("bias").get<Vector>(),
					  activation_from_string(j.at("activation").get<std::string>()));
}

inline nlohmann::json network_to_json(const Network &n) {
	auto layers = nlohmann::json::array();
	for (const auto &l : n.layers())
		layers.push_back(layer_to_json(l));
	return layers;
}

inline Network network_from_json(const nlohmann::json &j) {
	std::vector<DenseLayer> layers;
	for (const auto &l : j)
		layers.push_back(layer_from_json(l));
	return Network(std::move(layers));
}

inline nlohmann::json scaler_to_json(const ScalerParams &p) {
	return {{"mode", std::string(to_string(p.mode))}, {"min", p.min}, {"max", p.max}, {"fitted_on", p.fitted_on}};
}

inline ScalerParams scaler_from_json(const nlohmann::json &j) {
	ScalerParams p;
	p.mode = scale_mode_from_string(j.at("mode").get<std::string>());
	p.min = j.at("min").get<Vector>();
	p.max = j.at("max").get<Vector>();
	p.fitted_on = j.value("fitted_on", "train");
	if (p.min.size() != p.max.size())
		throw DimensionError("scaler JSON max length", p.min.size(), p.max.size());
	return p;
}

inline nlohmann::json adam_to_json(const AdamState &s) {
	return {{"learning_rate", s.learning_rate}, {"beta1", s.beta1},
			{"beta2", s.beta2},                 {"epsilon", s.epsilon},
			{"step_count", s.step_count},       {"first_moment", s.first_moment},
			{"second_moment", s.second_moment}};
}

inline AdamState adam_from_json(const nlohmann::json &j) {
	AdamState s;
	s.learning_rate = j.at("learning_rate").get<double>();
	s.beta1 = j.at("beta1").get<double>();
	s.beta2 = j.at("beta2").get<double>();
	s.epsilon = j.at("epsilon").get<double>();
	s.step_count = j.at("step_count").get<std::uint64_t>();
	s.first_moment = j.at("first_moment").get<std::vector<double>>();
	s.second_moment = j.at("second_moment").get<std::vector<double>>();
	return s;
}

} // namespace sentigan
