#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "sentigan/errors.hpp"

namespace sentigan {

/// Minimal RFC 4180 reader: quoted fields may contain commas, doubled quotes
/// and newlines. CR before LF is dropped.
class CsvReader {
public:
	explicit CsvReader(std::istream &in) : in_(in) {}

	/// Reads the next record. Returns false at end of input. `line()` is the
	/// 1-based line on which the returned record started.
	bool next(std::vector<std::string> &fields) {
		fields.clear();
		int ch = in_.get();
		if (ch == EOF)
			return false;
		record_line_ = ++line_;
		std::string field;
		bool quoted = false;
		bool was_quoted = false;
		for (;; ch = in_.get()) {
			if (ch == EOF) {
				if (quoted)
					throw DataError("unterminated quoted field starting on line " + std::to_string(record_line_));
				break;
			}
			const char c = static_cast<char>(ch);
			if (quoted) {
				if (c == '"') {
					if (in_.peek() == '"') {
						in_.get();
						field.push_back('"');
					} else {
						quoted = false;
					}
				} else {
					if (c == '\n')
						++line_;
					field.push_back(c);
				}
				continue;
			}
			if (c == '"' && field.empty() && !was_quoted) {
				quoted = was_quoted = true;
			} else if (c == ',') {
				fields.push_back(std::move(field));
				field.clear();
				was_quoted = false;
			} else if (c == '\n') {
				break;
			} else if (c != '\r') {
				field.push_back(c);
			}
		}
		fields.push_back(std::move(field));
		return true;
	}

	std::size_t line() const { return record_line_; }

private:
	std::istream &in_;
	std::size_t line_ = 0;
	std::size_t record_line_ = 0;
};

/// Quotes a field when it contains a comma, quote or newline.
inline std::string csv_escape(const std::string &s) {
	if (s.find_first_of(",\"\n\r") == std::string::npos)
		return s;
	std::string out = "\"";
	for (char c : s) {
		if (c == '"')
			out += '"';
		out += c;
	}
	out += '"';
	return out;
}

} // namespace sentigan
