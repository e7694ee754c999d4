#pragma once

#include <cctype>
#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "sentigan/errors.hpp"

namespace sentigan::sentiment {

inline constexpr double kBoosterIncrement = 0.293;
inline constexpr double kBoosterDecrement = -0.293;

inline std::string to_lower_ascii(std::string_view s) {
	std::string out(s);
	for (char &c : out)
		c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
	return out;
}

/// Word valences plus the degree-modifier and negation tables used by the
/// rule engine. Immutable after loading.
struct Lexicon {
	std::unordered_map<std::string, double> valence;
	std::unordered_map<std::string, double> boosters;
	std::unordered_set<std::string> negations;

	std::size_t malformed_lines = 0;
	std::size_t duplicate_tokens = 0;
	std::size_t skipped_uppercase = 0; // never reachable: lookups are lowercased

	bool has(const std::string &lower_token) const { return valence.contains(lower_token); }
	double at(const std::string &lower_token) const { return valence.at(lower_token); }
};

inline std::unordered_map<std::string, double> default_boosters() {
	const double up = kBoosterIncrement, down = kBoosterDecrement;
	return {
		{"absolutely", up}, {"amazingly", up}, {"awfully", up}, {"completely", up}, {"considerable", up},
		{"considerably", up}, {"decidedly", up}, {"deeply", up}, {"effing", up}, {"enormous", up},
		{"enormously", up}, {"entirely", up}, {"especially", up}, {"exceptional", up}, {"exceptionally", up},
		{"extreme", up}, {"extremely", up}, {"fabulously", up}, {"flipping", up}, {"flippin", up},
		{"frackin", up}, {"fracking", up}, {"fricking", up}, {"frickin", up}, {"frigging", up},
		{"friggin", up}, {"fully", up}, {"fuckin", up}, {"fucking", up}, {"fuggin", up},
		{"fugging", up}, {"greatly", up}, {"hella", up}, {"highly", up}, {"hugely", up},
		{"incredible", up}, {"incredibly", up}, {"intensely", up}, {"major", up}, {"majorly", up},
		{"more", up}, {"most", up}, {"particularly", up}, {"purely", up}, {"quite", up},
		{"really", up}, {"remarkably", up}, {"so", up}, {"substantially", up}, {"thoroughly", up},
		{"total", up}, {"totally", up}, {"tremendous", up}, {"tremendously", up}, {"uber", up},
		{"unbelievably", up}, {"unusually", up}, {"utter", up}, {"utterly", up}, {"very", up},
		{"almost", down}, {"barely", down}, {"hardly", down}, {"just enough", down}, {"kind of", down},
		{"kinda", down}, {"kindof", down}, {"kind-of", down}, {"less", down}, {"little", down},
		{"marginal", down}, {"marginally", down}, {"occasional", down}, {"occasionally", down}, {"partly", down},
		{"scarce", down}, {"scarcely", down}, {"slight", down}, {"slightly", down}, {"somewhat", down},
		{"sort of", down}, {"sorta", down}, {"sortof", down}, {"sort-of", down},
	};
}

inline std::unordered_set<std::string> default_negations() {
	return {"aint",     "arent",    "cannot",    "cant",     "couldnt",  "darent",   "didnt",    "doesnt",
			"ain't",    "aren't",   "can't",     "couldn't", "daren't",  "didn't",   "doesn't",  "dont",
			"hadnt",    "hasnt",    "havent",    "isnt",     "mightnt",  "mustnt",   "neither",  "don't",
			"hadn't",   "hasn't",   "haven't",   "isn't",    "mightn't", "mustn't",  "neednt",   "needn't",
			"never",    "none",     "nope",      "nor",      "not",      "nothing",  "nowhere",  "oughtnt",
			"shant",    "shouldnt", "uhuh",      "wasnt",    "werent",   "oughtn't", "shan't",   "shouldn't",
			"uh-uh",    "wasn't",   "weren't",   "without",  "wont",     "wouldnt",  "won't",    "wouldn't",
			"rarely",   "seldom",   "despite"};
}

/// Reads the tab-separated lexicon format `token<TAB>mean[<TAB>...]`.
/// Unparseable lines are counted, duplicates keep the last value.
inline Lexicon load_lexicon(std::istream &in) {
	if (!in)
		throw DataError("lexicon stream is not readable");
	Lexicon lex;
	lex.boosters = default_boosters();
	lex.negations = default_negations();
	std::string line;
	while (std::getline(in, line)) {
		const auto first = line.find_first_not_of(" \t\r\n");
		if (first == std::string::npos)
			continue;
		const auto last = line.find_last_not_of(" \t\r\n");
		const std::string trimmed = line.substr(first, last - first + 1);
		const auto tab = trimmed.find('\t');
		if (tab == std::string::npos || tab == 0) {
			++lex.malformed_lines;
			continue;
		}
		const std::string token = trimmed.substr(0, tab);
		const auto tab2 = trimmed.find('\t', tab + 1);
		const std::string measure = trimmed.substr(tab + 1, tab2 == std::string::npos ? std::string::npos : tab2 - tab - 1);
		double value = 0.0;
		try {
			std::size_t used = 0;
			value = std::stod(measure, &used);
			if (used != measure.size())
				throw std::invalid_argument(measure);
		} catch (const std::exception &) {
			++lex.malformed_lines;
			continue;
		}
		if (token != to_lower_ascii(token)) {
			++lex.skipped_uppercase;
			continue;
		}
		if (!lex.valence.insert_or_assign(token, value).second)
			++lex.duplicate_tokens;
	}
	if (lex.valence.empty())
		throw DataError("lexicon contains no usable entries");
	return lex;
}

} // namespace sentigan::sentiment
