#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sentigan/sentiment/lexicon.hpp"

namespace sentigan::sentiment {

inline constexpr double kCapsIncrement = 0.733;
inline constexpr double kNegationScalar = -0.74;
inline constexpr double kExclamationIncrement = 0.292;
inline constexpr std::size_t kMaxExclamations = 4;
inline constexpr double kNormalizationAlpha = 15.0;

/// s / sqrt(s² + alpha), clamped to [-1, 1].
inline double normalize_score(double s, double alpha = kNormalizationAlpha) {
	const double n = s / std::sqrt(s * s + alpha);
	return std::clamp(n, -1.0, 1.0);
}

namespace detail {

inline bool is_ascii_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

/// Python str.isupper(): at least one cased character and no lowercase ones.
inline bool is_upper(std::string_view w) {
	bool cased = false;
	for (char c : w) {
		const auto u = static_cast<unsigned char>(c);
		if (std::islower(u))
			return false;
		if (std::isupper(u))
			cased = true;
	}
	return cased;
}

inline std::vector<std::string> split_whitespace(std::string_view text) {
	std::vector<std::string> out;
	std::size_t i = 0;
	while (i < text.size()) {
		while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
			++i;
		const std::size_t start = i;
		while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])))
			++i;
		if (i > start)
			out.emplace_back(text.substr(start, i - start));
	}
	return out;
}

/// Strips surrounding punctuation unless that leaves two or fewer characters
/// (emoticons such as ":)" survive intact).
inline std::string strip_punct_if_word(const std::string &token) {
	std::size_t b = 0, e = token.size();
	while (b < e && is_ascii_punct(token[b]))
		++b;
	while (e > b && is_ascii_punct(token[e - 1]))
		--e;
	if (e - b <= 2)
		return token;
	return token.substr(b, e - b);
}

inline bool is_url(std::string_view t) {
	const std::string lower = to_lower_ascii(t.substr(0, std::min<std::size_t>(t.size(), 8)));
	return lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.");
}

inline bool is_handle(std::string_view t) { return t.size() > 1 && t[0] == '@'; }

inline bool is_cashtag(std::string_view t) {
	return t.size() > 1 && t[0] == '$' && std::isalpha(static_cast<unsigned char>(t[1]));
}

inline const std::unordered_map<std::string, double> &special_cases() {
	static const std::unordered_map<std::string, double> cases = {
		{"the shit", 3},      {"the bomb", 3},      {"bad ass", 1.5},       {"badass", 1.5},   {"bus stop", 0.0},
		{"yeah right", -2},   {"kiss of death", -1.5}, {"to die for", 3},   {"beating heart", 3.5}};
	return cases;
}

} // namespace detail

/// Drops URLs, @handles and $cashtags, keeping every other whitespace token
/// verbatim. This is the text the rule engine scores.
inline std::string strip_noise(std::string_view raw) {
	std::string out;
	for (const auto &tok : detail::split_whitespace(raw)) {
		if (detail::is_url(tok) || detail::is_handle(tok) || detail::is_cashtag(tok))
			continue;
		if (!out.empty())
			out += ' ';
		out += tok;
	}
	return out;
}

/// Normalised token view of a post: noise removed, words kept with their
/// case, runs of '!' / '?' kept as their own tokens, other punctuation dropped.
inline std::vector<std::string> clean_text(std::string_view raw) {
	std::vector<std::string> tokens;
	const std::string text = strip_noise(raw);
	auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
	std::size_t i = 0;
	while (i < text.size()) {
		const char c = text[i];
		if (is_word(c)) {
			std::size_t j = i + 1;
			while (j < text.size()) {
				if (is_word(text[j])) {
					++j;
				} else if ((text[j] == '\'' || text[j] == '-') && j + 1 < text.size() && is_word(text[j + 1])) {
					j += 2;
				} else {
					break;
				}
			}
			tokens.emplace_back(text.substr(i, j - i));
			i = j;
		} else if (c == '!' || c == '?') {
			std::size_t j = i + 1;
			while (j < text.size() && text[j] == c)
				++j;
			tokens.emplace_back(text.substr(i, j - i));
			i = j;
		} else {
			++i;
		}
	}
	return tokens;
}

/// Rule-based compound scorer following the published VADER rules:
/// lexicon valence, preceding boosters/dampeners (up to three words back with
/// decay), negation, ALL-CAPS emphasis, "but" reweighting, and '!'/'?'
/// amplification, normalised into [-1, 1]. Emoji descriptions and the
/// sentiment-laden idiom table are not applied.
class VaderScorer {
public:
	explicit VaderScorer(const Lexicon &lexicon) : lex_(lexicon) {}

	double compound(std::string_view text) {
		const std::string trimmed = trim(text);
		words_ = detail::split_whitespace(trimmed);
		for (auto &w : words_)
			w = detail::strip_punct_if_word(w);
		lower_.clear();
		for (const auto &w : words_)
			lower_.push_back(to_lower_ascii(w));
		cap_diff_ = cap_differential();

		std::vector<double> sentiments;
		for (std::size_t i = 0; i < words_.size(); ++i) {
			if (lex_.boosters.contains(lower_[i])) {
				sentiments.push_back(0.0);
				continue;
			}
			if (i + 1 < words_.size() && lower_[i] == "kind" && lower_[i + 1] == "of") {
				sentiments.push_back(0.0);
				continue;
			}
			sentiments.push_back(valence_at(i));
		}
		but_check(sentiments);
		if (sentiments.empty())
			return 0.0;

		double sum = 0.0;
		for (double s : sentiments)
			sum += s;
		const double punct = punctuation_emphasis(trimmed);
		if (sum > 0)
			sum += punct;
		else if (sum < 0)
			sum -= punct;
		return normalize_score(sum);
	}

private:
	static std::string trim(std::string_view s) {
		std::size_t b = 0, e = s.size();
		while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
			++b;
		while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
			--e;
		return std::string(s.substr(b, e - b));
	}

	bool cap_differential() const {
		std::size_t caps = 0;
		for (const auto &w : words_)
			if (detail::is_upper(w))
				++caps;
		const std::size_t diff = words_.size() - caps;
		return diff > 0 && diff < words_.size();
	}

	bool negated(const std::string &lower_word) const {
		return lex_.negations.contains(lower_word) || lower_word.find("n't") != std::string::npos;
	}

	double booster_scalar(std::size_t j, double valence) const {
		const auto it = lex_.boosters.find(lower_[j]);
		if (it == lex_.boosters.end())
			return 0.0;
		double scalar = it->second;
		if (valence < 0)
			scalar = -scalar;
		if (detail::is_upper(words_[j]) && cap_diff_)
			scalar += valence > 0 ? kCapsIncrement : -kCapsIncrement;
		return scalar;
	}

	double valence_at(std::size_t i) const {
		const std::string &item = lower_[i];
		if (!lex_.has(item))
			return 0.0;
		const double base = lex_.at(item);
		double valence = base;
		if (item == "no" && i + 1 != words_.size() && lex_.has(lower_[i + 1]))
			valence = 0.0;
		if ((i > 0 && lower_[i - 1] == "no") || (i > 1 && lower_[i - 2] == "no") ||
			(i > 2 && lower_[i - 3] == "no" && (lower_[i - 1] == "or" || lower_[i - 1] == "nor")))
			valence = base * kNegationScalar;
		if (detail::is_upper(words_[i]) && cap_diff_)
			valence += valence > 0 ? kCapsIncrement : -kCapsIncrement;

		for (std::size_t back = 0; back < 3; ++back) {
			if (i <= back || lex_.has(lower_[i - back - 1]))
				continue;
			double s = booster_scalar(i - back - 1, valence);
			if (back == 1 && s != 0)
				s *= 0.95;
			if (back == 2 && s != 0)
				s *= 0.9;
			valence += s;
			valence = negation_check(valence, back, i);
			if (back == 2)
				valence = special_idioms_check(valence, i);
		}
		return least_check(valence, i);
	}

	double negation_check(double valence, std::size_t back, std::size_t i) const {
		if (back == 0) {
			if (negated(lower_[i - 1]))
				valence *= kNegationScalar;
		} else if (back == 1) {
			if (lower_[i - 2] == "never" && (lower_[i - 1] == "so" || lower_[i - 1] == "this"))
				valence *= 1.25;
			else if (lower_[i - 2] == "without" && lower_[i - 1] == "doubt")
				;
			else if (negated(lower_[i - 2]))
				valence *= kNegationScalar;
		} else {
			if ((lower_[i - 3] == "never" && (lower_[i - 2] == "so" || lower_[i - 2] == "this")) ||
				(lower_[i - 1] == "so" || lower_[i - 1] == "this"))
				valence *= 1.25;
			else if (lower_[i - 3] == "without" && (lower_[i - 2] == "doubt" || lower_[i - 1] == "doubt"))
				;
			else if (negated(lower_[i - 3]))
				valence *= kNegationScalar;
		}
		return valence;
	}

	double special_idioms_check(double valence, std::size_t i) const {
		const auto &cases = detail::special_cases();
		const std::string one_zero = lower_[i - 1] + " " + lower_[i];
		const std::string two_one_zero = lower_[i - 2] + " " + lower_[i - 1] + " " + lower_[i];
		const std::string two_one = lower_[i - 2] + " " + lower_[i - 1];
		const std::string three_two_one = lower_[i - 3] + " " + lower_[i - 2] + " " + lower_[i - 1];
		const std::string three_two = lower_[i - 3] + " " + lower_[i - 2];
		for (const auto *seq : {&one_zero, &two_one_zero, &two_one, &three_two_one, &three_two}) {
			if (auto it = cases.find(*seq); it != cases.end()) {
				valence = it->second;
				break;
			}
		}
		if (lower_.size() - 1 > i) {
			if (auto it = cases.find(lower_[i] + " " + lower_[i + 1]); it != cases.end())
				valence = it->second;
		}
		if (lower_.size() - 1 > i + 1) {
			if (auto it = cases.find(lower_[i] + " " + lower_[i + 1] + " " + lower_[i + 2]); it != cases.end())
				valence = it->second;
		}
		for (const auto *gram : {&three_two_one, &three_two, &two_one})
			if (auto it = lex_.boosters.find(*gram); it != lex_.boosters.end())
				valence += it->second;
		return valence;
	}

	double least_check(double valence, std::size_t i) const {
		if (i > 1 && !lex_.has(lower_[i - 1]) && lower_[i - 1] == "least") {
			if (lower_[i - 2] != "at" && lower_[i - 2] != "very")
				valence *= kNegationScalar;
		} else if (i > 0 && !lex_.has(lower_[i - 1]) && lower_[i - 1] == "least") {
			valence *= kNegationScalar;
		}
		return valence;
	}

	/// Halves sentiment before the first "but" and boosts it by half after.
	/// Positions are resolved by first occurrence of each value, which is how
	/// the reference implementation behaves when values repeat.
	void but_check(std::vector<double> &sentiments) const {
		const auto it = std::find(lower_.begin(), lower_.end(), "but");
		if (it == lower_.end())
			return;
		const auto bi = static_cast<std::size_t>(it - lower_.begin());
		for (std::size_t k = 0; k < sentiments.size(); ++k) {
			const double value = sentiments[k];
			const auto si = static_cast<std::size_t>(
				std::find(sentiments.begin(), sentiments.end(), value) - sentiments.begin());
			if (si < bi)
				sentiments[si] = value * 0.5;
			else if (si > bi)
				sentiments[si] = value * 1.5;
		}
	}

	static double punctuation_emphasis(std::string_view text) {
		const auto bangs = static_cast<std::size_t>(std::count(text.begin(), text.end(), '!'));
		const auto questions = static_cast<std::size_t>(std::count(text.begin(), text.end(), '?'));
		double amp = static_cast<double>(std::min(bangs, kMaxExclamations)) * kExclamationIncrement;
		if (questions > 1)
			amp += questions <= 3 ? static_cast<double>(questions) * 0.18 : 0.96;
		return amp;
	}

	const Lexicon &lex_;
	std::vector<std::string> words_;
	std::vector<std::string> lower_;
	bool cap_diff_ = false;
};

/// Compound score in [-1, 1] of a raw post.
inline double score_text(const Lexicon &lexicon, std::string_view raw) {
	VaderScorer scorer(lexicon);
	return scorer.compound(strip_noise(raw));
}

} // namespace sentigan::sentiment
