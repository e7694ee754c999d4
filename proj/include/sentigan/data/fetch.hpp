#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <httplib.h>

#include "sentigan/date.hpp"
#include "sentigan/errors.hpp"

namespace sentigan {

struct FetchRequest {
	std::string endpoint; // e.g. http://host:8080/history?symbol={symbol}&from={start}&to={end}
	std::string symbol;
	Date start;
	Date end;
};

struct FetchResult {
	std::string csv;
	bool from_cache = false;
	std::filesystem::path cache_file;
};

inline std::filesystem::path default_cache_dir() {
	if (const char *env = std::getenv("SENTIGAN_CACHE_DIR"); env && *env)
		return env;
	return "cache";
}

inline std::filesystem::path cache_path(const std::filesystem::path &root, const FetchRequest &req) {
	return root / req.symbol / (format_date(req.start) + "_" + format_date(req.end) + ".csv");
}

inline std::string expand_endpoint(std::string url, const FetchRequest &req) {
	auto replace = [&url](const std::string &key, const std::string &value) {
		for (auto pos = url.find(key); pos != std::string::npos; pos = url.find(key, pos + value.size()))
			url.replace(pos, key.size(), value);
	};
	replace("{symbol}", req.symbol);
	replace("{start}", format_date(req.start));
	replace("{end}", format_date(req.end));
	return url;
}

/// Downloads raw OHLCV CSV, serving repeated (symbol, range) requests from disk.
inline FetchResult fetch_ohlcv(const FetchRequest &req, const std::filesystem::path &cache_root = default_cache_dir()) {
	if (req.symbol.empty())
		throw UsageError("fetch: symbol is empty");
	FetchResult result;
	result.cache_file = cache_path(cache_root, req);
	if (std::filesystem::exists(result.cache_file)) {
		std::ifstream in(result.cache_file, std::ios::binary);
		std::ostringstream ss;
		ss << in.rdbuf();
		result.csv = ss.str();
		result.from_cache = true;
		return result;
	}

	const std::string url = expand_endpoint(req.endpoint, req);
	const auto scheme_end = url.find("://");
	if (scheme_end == std::string::npos)
		throw UsageError("fetch: endpoint '" + req.endpoint + "' has no scheme");
	const auto path_start = url.find('/', scheme_end + 3);
	const std::string origin = url.substr(0, path_start);
	const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

	httplib::Client client(origin);
	client.set_connection_timeout(10);
	client.set_read_timeout(30);
	client.set_follow_location(true);
	const auto res = client.Get(path);
	if (!res)
		throw FetchError("fetch " + url + ": " + httplib::to_string(res.error()), 0);
	if (res->status != 200)
		throw FetchError("fetch " + url + " failed", res->status);

	result.csv = res->body;
	std::filesystem::create_directories(result.cache_file.parent_path());
	const auto tmp = result.cache_file.string() + ".part";
	{
		std::ofstream out(tmp, std::ios::binary);
		out << result.csv;
		if (!out)
			throw Error("fetch: cannot write cache file " + tmp);
	}
	std::filesystem::rename(tmp, result.cache_file);
	return result;
}

} // namespace sentigan
