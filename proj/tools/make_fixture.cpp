// Writes the synthetic 7-asset fixture: prices, posts and a config.
// Prices react to the previous trading day's VADER-scored post mood, so the
// sentiment channel carries real signal. Usage: make_fixture <out_dir> <lexicon>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "sentigan/csv.hpp"
#include "sentigan/data/series.hpp"
#include "sentigan/numkernel/random.hpp"
#include "sentigan/sentiment/daily.hpp"
#include "sentigan/sentiment/lexicon.hpp"

namespace {

using namespace sentigan;
namespace fs = std::filesystem;

struct AssetSpec {
	const char *symbol;
	double level;
	double drift;      // daily log drift
	double volatility; // daily log sd
	bool posts;
};

constexpr std::array<AssetSpec, 7> kAssets{{
	{"ALFA", 150.0, 0.0006, 0.015, true},
	{"BRAV", 320.0, 0.0003, 0.018, true},
	{"CHAR", 45.0, -0.0002, 0.022, true},
	{"DELT", 210.0, 0.0008, 0.012, true},
	{"ECHO", 95.0, 0.0000, 0.020, true},
	{"FOXT", 600.0, 0.0010, 0.025, true},
	{"GOLF", 28.0, 0.0002, 0.017, false},
}};

constexpr std::size_t kTradingDays = 260;
constexpr double kJump = 0.03;

const std::vector<std::string> kPositive{
	"Great earnings from $SYM, really strong quarter!",
	"Love the new $SYM product. Amazing growth ahead",
	"$SYM beat expectations, excellent guidance and happy holders",
	"Bullish on $SYM, the outlook is fantastic",
	"So impressed with $SYM management, superb execution :)",
};
const std::vector<std::string> kNegative{
	"Terrible guidance from $SYM, awful quarter",
	"$SYM missed badly. Horrible losses, selling everything",
	"Worried about $SYM, the lawsuit news is really bad",
	"$SYM is a disaster, worst product launch ever",
	"Angry at $SYM management, this is a failure :(",
};
const std::vector<std::string> kNeutral{
	"Watching $SYM today",
	"$SYM volume looks normal this morning",
	"Anyone holding $SYM into the close?",
	"Reading the $SYM filing now",
	"$SYM trading sideways",
};

std::string expand(std::string text, const std::string &symbol) {
	const auto at = text.find("SYM");
	return at == std::string::npos ? text : text.replace(at, 3, symbol);
}

struct Post {
	std::string timestamp;
	std::string text;
};

std::vector<Post> make_posts(const AssetSpec &a, Date first, Date last, Rng &rng) {
	std::vector<Post> posts;
	for (Date d = first; d <= last; d += std::chrono::days(1)) {
		const double u = rng.uniform();
		const auto &mood = u < 0.2 ? kPositive : u < 0.4 ? kNegative : kNeutral;
		const std::size_t n = 1 + rng.below(4);
		for (std::size_t k = 0; k < n; ++k) {
			// one in five posts ignores the day's mood
			const auto &pool = rng.uniform() < 0.2 ? kNeutral : mood;
			char ts[32];
			std::snprintf(ts, sizeof ts, "%s %02zu:%02zu:00", format_date(d).c_str(),
						  static_cast<std::size_t>(9 + rng.below(8)), static_cast<std::size_t>(rng.below(60)));
			posts.push_back({ts, expand(pool[rng.below(pool.size())], a.symbol)});
		}
	}
	return posts;
}

Series make_prices(const AssetSpec &a, const std::vector<Date> &days, const std::vector<double> &sentiment, Rng &rng) {
	Series s{a.symbol, {}};
	double log_close = std::log(a.level);
	double prev_close = a.level;
	for (std::size_t t = 0; t < days.size(); ++t) {
		if (t > 0) {
			double jump = 0.0;
			if (sentiment[t - 1] > 0.5)
				jump = kJump;
			else if (sentiment[t - 1] < -0.5)
				jump = -kJump;
			log_close += a.drift + a.volatility * rng.normal() + jump;
		}
		const double close = std::round(std::exp(log_close) * 100.0) / 100.0;
		const double open = std::round((prev_close * (1.0 + 0.004 * rng.uniform(-1.0, 1.0))) * 100.0) / 100.0;
		const double high = std::round((std::max(open, close) * (1.0 + 0.006 * rng.uniform())) * 100.0) / 100.0;
		const double low = std::round((std::min(open, close) * (1.0 - 0.006 * rng.uniform())) * 100.0) / 100.0;
		const double volume = std::floor(2e6 * (1.0 + 0.3 * rng.uniform(-1.0, 1.0)));
		s.bars.push_back({days[t], open, high, low, close, close, volume});
		prev_close = close;
	}
	return s;
}

void write_prices(const fs::path &path, const Series &s) {
	std::ofstream out(path);
	out << "date,open,high,low,close,adj_close,volume\n";
	for (std::size_t i = 0; i < s.bars.size(); ++i) {
		const Bar &b = s.bars[i];
		std::array<std::string, kFeatureCount> cells;
		for (std::size_t k = 0; k < kFeatureCount; ++k)
			cells[k] = format_number(b.field(k));
		// a few gaps and a duplicate row so ingest has something to repair
		if (s.symbol == "DELT" && i == 40)
			cells[5] = "";
		if (s.symbol == "DELT" && i == 90)
			cells[3] = cells[4] = "null";
		out << format_date(b.date);
		for (const auto &c : cells)
			out << ',' << c;
		out << '\n';
		if (s.symbol == "ECHO" && i == 120) {
			out << format_date(b.date);
			for (const auto &c : cells)
				out << ',' << c;
			out << '\n';
		}
	}
}

} // namespace

int main(int argc, char **argv) {
	if (argc != 3) {
		std::cerr << "usage: make_fixture <out_dir> <lexicon>\n";
		return 64;
	}
	const fs::path dir = argv[1];
	fs::create_directories(dir);
	std::ifstream lex_in(argv[2]);
	if (!lex_in) {
		std::cerr << "cannot open lexicon " << argv[2] << '\n';
		return 2;
	}
	const auto lexicon = sentiment::load_lexicon(lex_in);

	std::vector<Date> days;
	for (Date d(std::chrono::year{2022} / 1 / 3); days.size() < kTradingDays; d += std::chrono::days(1))
		if (!is_weekend(d))
			days.push_back(d);

	std::ofstream config(dir / "config.json");
	config << "// Synthetic 7-asset fixture written by make_fixture.\n{\n"
		   << "\t\"seed\": 20240501,\n"
		   << "\t\"lexicon\": \"" << fs::relative(fs::absolute(argv[2]), fs::absolute(dir)).generic_string() << "\",\n"
		   << "\t\"output_dir\": \"out\",\n"
		   << "\t\"assets\": [\n";

	Rng rng(7);
	for (std::size_t i = 0; i < kAssets.size(); ++i) {
		const AssetSpec &a = kAssets[i];
		// posts run from two days before the first bar so the first day has
		// weekend spillover; they stop at the last trading day
		const auto posts = make_posts(a, days.front() - std::chrono::days(2), days.back(), rng);
		std::vector<sentiment::SentimentRecord> records;
		for (const auto &p : posts) {
			sentiment::SentimentRecord r;
			r.day = parse_date(p.timestamp.substr(0, 10));
			r.compound = sentiment::score_text(lexicon, p.text);
			records.push_back(r);
		}
		std::vector<double> daily(days.size(), 0.0);
		if (a.posts) {
			const auto agg = sentiment::aggregate_daily(records, days);
			for (std::size_t t = 0; t < days.size(); ++t)
				daily[t] = agg[t].compound;
		}
		const Series prices = make_prices(a, days, daily, rng);
		write_prices(dir / (std::string(a.symbol) + "_prices.csv"), prices);
		config << "\t\t{\"symbol\": \"" << a.symbol << "\", \"prices\": \"" << a.symbol << "_prices.csv\"";
		if (a.posts) {
			std::ofstream out(dir / (std::string(a.symbol) + "_posts.csv"));
			out << "timestamp,text\n";
			for (const auto &p : posts)
				out << p.timestamp << ',' << csv_escape(p.text) << '\n';
			config << ", \"posts\": \"" << a.symbol << "_posts.csv\"";
		}
		config << '}' << (i + 1 < kAssets.size() ? "," : "") << '\n';
	}
	config << "\t]\n}\n";
	return 0;
}
