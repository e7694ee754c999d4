#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentigan/arima/arima.hpp"
#include "sentigan/data/dataset.hpp"
#include "sentigan/eval/report.hpp"
#include "sentigan/gan/gan.hpp"
#include "sentigan/lstm/lstm.hpp"

namespace sentigan {

namespace fs = std::filesystem;

struct AssetConfig {
	std::string symbol;
	fs::path prices;
	std::optional<fs::path> posts;
};

struct ArimaSettings {
	std::size_t p_max = 3;
	std::size_t q_max = 3;
	bool refit_each_step = false;
};

struct RunConfig {
	std::vector<AssetConfig> assets;
	fs::path lexicon;
	fs::path output_dir = "out";
	std::size_t window = 20;
	std::optional<std::uint64_t> seed;
	std::size_t workers = 0; // 0: one per hardware thread
	std::map<ModelKind, SplitPolicy> splits{{ModelKind::arima, default_split(ModelKind::arima)},
											{ModelKind::lstm, default_split(ModelKind::lstm)},
											{ModelKind::gan, default_split(ModelKind::gan)}};
	ArimaSettings arima;
	TrainSchedule lstm;
	std::size_t lstm_hidden = 32;
	GanSchedule gan;
	GanArchitecture gan_arch;

	const AssetConfig &asset(const std::string &symbol) const {
		for (const auto &a : assets)
			if (a.symbol == symbol)
				return a;
		throw UsageError("asset '" + symbol + "' is not in the config");
	}
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json &j, const std::string &where, std::set<std::string> allowed) {
	if (!j.is_object())
		throw UsageError("config: " + where + " must be an object");
	for (const auto &[key, value] : j.items())
		if (!allowed.count(key))
			throw UsageError("config: unknown key '" + key + "' in " + where);
}

template <class T>
void read_key(const nlohmann::json &j, const char *key, const std::string &where, T &out) {
	if (!j.contains(key))
		return;
	try {
		out = j.at(key).get<T>();
	} catch (const nlohmann::json::exception &) {
		throw UsageError("config: " + where + "." + key + " has the wrong type");
	}
}

inline fs::path resolve(const fs::path &base, const std::string &p) {
	const fs::path path(p);
	return path.is_absolute() ? path : (base / path).lexically_normal();
}

} // namespace detail

/// Parses a JSON config (comments allowed). Relative paths are taken
/// relative to `base_dir`.
inline RunConfig parse_config(const std::string &text, const fs::path &base_dir) {
	using detail::read_key;
	nlohmann::json j;
	try {
		j = nlohmann::json::parse(text, nullptr, true, true);
	} catch (const nlohmann::json::parse_error &e) {
		throw UsageError(std::string("config is not valid JSON: ") + e.what());
	}
	detail::reject_unknown_keys(j, "top level",
								{"seed", "output_dir", "lexicon", "window", "workers", "assets",
								 "splits", "arima", "lstm", "gan"});
	RunConfig c;
	if (j.contains("seed")) {
		std::uint64_t seed = 0;
		read_key(j, "seed", "top level", seed);
		c.seed = seed;
	}
	std::string path;
	if (j.contains("output_dir")) {
		read_key(j, "output_dir", "top level", path);
		c.output_dir = detail::resolve(base_dir, path);
	} else {
		c.output_dir = detail::resolve(base_dir, "out");
	}
	if (!j.contains("lexicon"))
		throw UsageError("config: 'lexicon' is required");
	read_key(j, "lexicon", "top level", path);
	c.lexicon = detail::resolve(base_dir, path);
	read_key(j, "window", "top level", c.window);
	if (c.window == 0)
		throw UsageError("config: window must be positive");
	read_key(j, "workers", "top level", c.workers);

	if (!j.contains("assets") || !j["assets"].is_array() || j["assets"].empty())
		throw UsageError("config: 'assets' must be a non-empty array");
	std::set<std::string> seen;
	for (const auto &a : j["assets"]) {
		detail::reject_unknown_keys(a, "assets[]", {"symbol", "prices", "posts"});
		AssetConfig ac;
		read_key(a, "symbol", "assets[]", ac.symbol);
		if (ac.symbol.empty() || ac.symbol.find_first_of("/\\. ") != std::string::npos)
			throw UsageError("config: asset symbol '" + ac.symbol + "' is empty or not file-name safe");
		if (!seen.insert(ac.symbol).second)
			throw UsageError("config: duplicate asset " + ac.symbol);
		if (!a.contains("prices"))
			throw UsageError("config: asset " + ac.symbol + " has no 'prices' path");
		read_key(a, "prices", ac.symbol, path);
		ac.prices = detail::resolve(base_dir, path);
		if (a.contains("posts")) {
			read_key(a, "posts", ac.symbol, path);
			ac.posts = detail::resolve(base_dir, path);
		}
		c.assets.push_back(std::move(ac));
	}

	if (j.contains("splits")) {
		detail::reject_unknown_keys(j["splits"], "splits", {"arima", "lstm", "gan"});
		for (const auto &[key, value] : j["splits"].items()) {
			if (!value.is_string())
				throw UsageError("config: splits." + key + " must be a string");
			c.splits[model_kind_from_string(key)] = split_policy_from_string(value.get<std::string>());
		}
	}
	if (j.contains("arima")) {
		const auto &a = j["arima"];
		detail::reject_unknown_keys(a, "arima", {"p_max", "q_max", "refit_each_step"});
		read_key(a, "p_max", "arima", c.arima.p_max);
		read_key(a, "q_max", "arima", c.arima.q_max);
		read_key(a, "refit_each_step", "arima", c.arima.refit_each_step);
	}
	if (j.contains("lstm")) {
		const auto &l = j["lstm"];
		detail::reject_unknown_keys(l, "lstm",
									{"hidden", "learning_rate", "batch_size", "max_epochs", "early_stop_patience",
									 "plateau_factor", "plateau_patience", "validation_fraction"});
		read_key(l, "hidden", "lstm", c.lstm_hidden);
		read_key(l, "learning_rate", "lstm", c.lstm.learning_rate);
		read_key(l, "batch_size", "lstm", c.lstm.batch_size);
		read_key(l, "max_epochs", "lstm", c.lstm.max_epochs);
		read_key(l, "early_stop_patience", "lstm", c.lstm.early_stop_patience);
		read_key(l, "plateau_factor", "lstm", c.lstm.plateau_factor);
		read_key(l, "plateau_patience", "lstm", c.lstm.plateau_patience);
		read_key(l, "validation_fraction", "lstm", c.lstm.validation_fraction);
		if (c.lstm_hidden == 0)
			throw UsageError("config: lstm.hidden must be positive");
	}
	if (j.contains("gan")) {
		const auto &g = j["gan"];
		detail::reject_unknown_keys(g, "gan",
									{"learning_rate", "batch_size", "epochs", "d_steps", "l2_weight", "generator_average",
									 "noise_dim", "generator_hidden", "discriminator_hidden"});
		read_key(g, "learning_rate", "gan", c.gan.learning_rate);
		read_key(g, "batch_size", "gan", c.gan.batch_size);
		read_key(g, "epochs", "gan", c.gan.epochs);
		read_key(g, "d_steps", "gan", c.gan.d_steps);
		read_key(g, "l2_weight", "gan", c.gan.l2_weight);
		read_key(g, "generator_average", "gan", c.gan.generator_average);
		read_key(g, "noise_dim", "gan", c.gan_arch.noise_dim);
		read_key(g, "generator_hidden", "gan", c.gan_arch.generator_hidden);
		read_key(g, "discriminator_hidden", "gan", c.gan_arch.discriminator_hidden);
	}
	c.lstm.validate();
	c.gan.validate();
	return c;
}

inline RunConfig load_config(const fs::path &file) {
	std::ifstream in(file);
	if (!in)
		throw UsageError("cannot open config " + file.string());
	std::stringstream text;
	text << in.rdbuf();
	return parse_config(text.str(), file.parent_path());
}

/// Checks referenced inputs exist and a seed is set. A missing post file
/// is not an error; ingest fills that asset's sentiment with zeros.
inline void validate_config(const RunConfig &c) {
	if (!c.seed)
		throw UsageError("config has no seed; set 'seed' or pass --seed");
	if (!fs::is_regular_file(c.lexicon))
		throw DataError("lexicon file not found: " + c.lexicon.string());
	for (const auto &a : c.assets)
		if (!fs::is_regular_file(a.prices))
			throw DataError("asset " + a.symbol + ": price file not found: " + a.prices.string());
}

} // namespace sentigan
