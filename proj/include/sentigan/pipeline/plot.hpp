#pragma once

#include <algorithm>
#include <cstdio>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "sentigan/csv.hpp"
#include "sentigan/eval/report.hpp"

namespace sentigan {

/// Paired data for a plot: date,actual,predicted with round-trip numbers.
inline std::string render_plot_csv(const ForecastReport &r) {
	std::ostringstream out;
	out << "date,actual,predicted\n";
	for (const auto &row : r.rows)
		out << format_date(row.date) << ',' << format_number(row.actual) << ',' << format_number(row.predicted) << '\n';
	return out.str();
}

struct PlotPoint {
	Date date;
	double actual = 0.0;
	double predicted = 0.0;
};

inline std::vector<PlotPoint> read_plot_csv(std::istream &in) {
	CsvReader reader(in);
	std::vector<std::string> f;
	if (!reader.next(f) || f.size() != 3 || f[0] != "date" || f[1] != "actual" || f[2] != "predicted")
		throw DataError("plot CSV header must be 'date,actual,predicted'");
	std::vector<PlotPoint> out;
	while (reader.next(f)) {
		if (f.size() == 1 && f[0].empty())
			continue;
		PlotPoint p;
		if (f.size() != 3 || !try_parse_date(f[0], p.date) || !parse_number(f[1], p.actual) ||
			!parse_number(f[2], p.predicted))
			throw DataError("plot CSV line " + std::to_string(reader.line()) + " is malformed");
		out.push_back(p);
	}
	return out;
}

namespace detail {

inline std::string num2(double v) {
	char buf[48];
	std::snprintf(buf, sizeof buf, "%.2f", v);
	return buf;
}

inline std::string xml_escape(const std::string &s) {
	std::string out;
	for (char c : s) {
		switch (c) {
		case '&': out += "&amp;"; break;
		case '<': out += "&lt;"; break;
		case '>': out += "&gt;"; break;
		case '"': out += "&quot;"; break;
		default: out += c;
		}
	}
	return out;
}

} // namespace detail

/// Standalone SVG with an actual and a predicted close polyline.
inline std::string render_plot_svg(const ForecastReport &r) {
	using detail::num2;
	if (r.rows.empty())
		throw DataError("cannot plot an empty report");
	constexpr double width = 800, height = 400, left = 70, right = 20, top = 40, bottom = 50;
	double lo = r.rows.front().actual, hi = lo;
	for (const auto &row : r.rows) {
		lo = std::min({lo, row.actual, row.predicted});
		hi = std::max({hi, row.actual, row.predicted});
	}
	if (hi - lo < 1e-12) {
		lo -= 1.0;
		hi += 1.0;
	}
	const double pad = 0.05 * (hi - lo);
	lo -= pad;
	hi += pad;
	const std::size_t n = r.rows.size();
	const auto x = [&](std::size_t i) {
		return n == 1 ? left + (width - left - right) / 2
					  : left + (width - left - right) * static_cast<double>(i) / static_cast<double>(n - 1);
	};
	const auto y = [&](double v) { return top + (height - top - bottom) * (hi - v) / (hi - lo); };
	const auto polyline = [&](bool actual, const char *color) {
		std::string pts;
		for (std::size_t i = 0; i < n; ++i) {
			if (i)
				pts += ' ';
			pts += num2(x(i)) + ',' + num2(y(actual ? r.rows[i].actual : r.rows[i].predicted));
		}
		return "<polyline class=\"" + std::string(actual ? "actual" : "predicted") + "\" fill=\"none\" stroke=\"" +
			   color + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
	};

	std::ostringstream out;
	out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" viewBox=\"0 0 800 400\">\n"
		<< "<rect width=\"800\" height=\"400\" fill=\"white\"/>\n"
		<< "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
		<< detail::xml_escape(r.symbol) << " " << to_string(r.model) << ": predicted vs actual close</text>\n"
		<< "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
		<< height - bottom << "\" stroke=\"black\"/>\n"
		<< "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
		<< "\" stroke=\"black\"/>\n"
		<< "<text x=\"" << left - 6 << "\" y=\"" << num2(y(hi - pad)) << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
		<< "font-size=\"11\">" << num2(hi - pad) << "</text>\n"
		<< "<text x=\"" << left - 6 << "\" y=\"" << num2(y(lo + pad)) << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
		<< "font-size=\"11\">" << num2(lo + pad) << "</text>\n"
		<< "<text x=\"" << left << "\" y=\"" << height - bottom + 18 << "\" font-family=\"sans-serif\" font-size=\"11\">"
		<< format_date(r.rows.front().date) << "</text>\n"
		<< "<text x=\"" << width - right << "\" y=\"" << height - bottom + 18
		<< "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << format_date(r.rows.back().date)
		<< "</text>\n"
		<< polyline(true, "#1f77b4") << polyline(false, "#d62728")
		<< "<text x=\"" << left + 10 << "\" y=\"" << height - 12
		<< "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#1f77b4\">actual</text>\n"
		<< "<text x=\"" << left + 70 << "\" y=\"" << height - 12
		<< "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#d62728\">predicted</text>\n"
		<< "</svg>\n";
	return out.str();
}

} // namespace sentigan
