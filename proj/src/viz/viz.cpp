// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <replaylab/viz/viz.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace replaylab::viz {

namespace {

    constexpr std::array<const char*, 10> kRunColors{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                     "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    constexpr std::array<const char*, 4> kDashes{"", "6,3", "2,2", "8,3,2,3"};

    std::array<int, 3> rgb(const char* hex) {
        std::array<int, 3> c{};
        for (int i = 0; i < 3; ++i) c[i] = std::stoi(std::string(hex + 1 + 2 * i, 2), nullptr, 16);
        return c;
    }

    std::string hex_color(const std::array<int, 3>& c) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
        return buf;
    }

    std::string escape(const std::string& s) {
        std::string out;
        for (char ch : s) {
            switch (ch) {
                case '&':
                    out += "&amp;";
                    break;
                case '<':
                    out += "&lt;";
                    break;
                case '>':
                    out += "&gt;";
                    break;
                case '"':
                    out += "&quot;";
                    break;
                default:
                    out += ch;
            }
        }
        return out;
    }

    std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return buf;
    }

    long double as_real(const Word& w) { return w.convert_to<long double>(); }

    std::pair<Word, Word> value_range(const OutputMatrix& m) {
        std::optional<Word> lo, hi;
        for (const auto& c : m.cells) {
            if (!c) continue;
            if (!lo || *c < *lo) lo = *c;
            if (!hi || *c > *hi) hi = *c;
        }
        return {lo.value_or(0), hi.value_or(0)};
    }

}  // namespace

std::string cell_color(const OutputMatrix& m, const Palette& p, const Word& value) {
    if (p.kind == Palette::Kind::kThreshold) return value > p.threshold ? kAboveColor : kBelowColor;
    const auto [lo, hi] = value_range(m);
    long double t = 0;
    if (hi > lo) t = as_real(value - lo) / as_real(hi - lo);
    t = std::clamp<long double>(t, 0, 1);
    const auto a = rgb(kLowColor), b = rgb(kHighColor);
    std::array<int, 3> c{};
    for (int i = 0; i < 3; ++i) c[i] = static_cast<int>(std::lround(a[i] + (b[i] - a[i]) * t));
    return hex_color(c);
}

std::string heatmap(const OutputMatrix& m, const HeatmapSpec& spec) {
    if (m.rows == 0 || m.cols == 0) throw std::invalid_argument("heat map of an empty matrix");
    const unsigned cell = spec.cell_px;
    const unsigned left = 70, top = 56;
    const unsigned width = left + cell * unsigned(m.cols) + 20;
    const unsigned height = top + cell * unsigned(m.rows) + 20;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 " << width
        << ' ' << height << "\">\n";
    out << "<defs><pattern id=\"absent\" patternUnits=\"userSpaceOnUse\" width=\"6\" height=\"6\">"
           "<rect width=\"6\" height=\"6\" fill=\"#ffffff\"/><path d=\"M0,6 L6,0\" stroke=\"#999999\" stroke-width=\"1\"/></pattern></defs>\n";
    out << "<text x=\"" << left << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">" << escape(spec.title.empty() ? m.name : spec.title)
        << "</text>\n";
    out << "<text x=\"" << left << "\" y=\"36\" font-family=\"sans-serif\" font-size=\"10\">" << escape(spec.col_label) << "</text>\n";
    out << "<text x=\"12\" y=\"" << top + 10 << "\" font-family=\"sans-serif\" font-size=\"10\">" << escape(spec.row_label) << "</text>\n";
    for (std::size_t c = 0; c < m.cols; ++c) {
        out << "<text x=\"" << left + cell * c + cell / 2 << "\" y=\"" << top - 6
            << "\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"middle\">" << c << "</text>\n";
    }
    const std::size_t label_every = m.rows > 40 ? 10 : (m.rows > 20 ? 5 : 1);
    for (std::size_t r = 0; r < m.rows; ++r) {
        if (r % label_every == 0) {
            out << "<text x=\"" << left - 4 << "\" y=\"" << top + cell * r + cell - 3
                << "\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"end\">" << r << "</text>\n";
        }
        for (std::size_t c = 0; c < m.cols; ++c) {
            const auto& v = m.at(r, c);
            out << "<rect data-row=\"" << r << "\" data-col=\"" << c << "\" x=\"" << left + cell * c << "\" y=\"" << top + cell * r
                << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"" << (v ? cell_color(m, spec.palette, *v) : "url(#absent)")
                << "\" stroke=\"#ffffff\" stroke-width=\"0.5\"><title>" << r << ',' << c << ": " << (v ? word_to_dec(*v) : "absent")
                << "</title></rect>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

SeriesPlotSpec balance_series(const OutputMatrix& m, std::string account) {
    SeriesPlotSpec s;
    s.account = std::move(account);
    s.baseline = value_range(m).first;
    for (std::size_t c = 0; c < m.cols; ++c) {
        std::vector<std::pair<std::size_t, Word>> pts;
        for (std::size_t r = 0; r < m.rows; ++r) {
            if (m.at(r, c)) pts.emplace_back(r, *m.at(r, c));
        }
        s.runs.push_back(std::move(pts));
    }
    return s;
}

std::string balance_plot(const std::vector<SeriesPlotSpec>& series, const std::string& title) {
    if (series.empty()) throw std::invalid_argument("balance plot without series");
    std::size_t max_x = 1;
    long double max_y = 0;
    std::size_t max_runs = 0;
    for (const auto& s : series) {
        max_runs = std::max(max_runs, s.runs.size());
        for (const auto& run : s.runs) {
            for (std::size_t i = 0; i < run.size(); ++i) {
                if (i > 0 && run[i].first <= run[i - 1].first) throw std::invalid_argument("series x values must increase");
                if (run[i].second < s.baseline) throw std::invalid_argument("balance below the plot baseline");
                max_x = std::max(max_x, run[i].first);
                max_y = std::max(max_y, as_real(run[i].second - s.baseline));
            }
        }
    }
    if (max_runs == 0) throw std::invalid_argument("balance plot without series");
    if (max_y <= 0) max_y = 1;
    const double left = 80, top = 40, plot_w = 560, plot_h = 280;
    const double legend_y = top + plot_h + 40;
    const double height = legend_y + 18.0 * double(std::max(max_runs, series.size())) + 10;
    auto px = [&](std::size_t x) { return left + plot_w * double(x) / double(max_x); };
    auto py = [&](const Word& v, const Word& base) { return top + plot_h - plot_h * double(as_real(v - base) / max_y); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(left + plot_w + 40) << "\" height=\"" << num(height) << "\">\n";
    out << "<text x=\"" << num(left) << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">" << escape(title) << "</text>\n";
    out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(left + plot_w) << "\" y2=\"" << num(top + plot_h)
        << "\" stroke=\"#000000\"/>\n";
    out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\"" << num(top + plot_h)
        << "\" stroke=\"#000000\"/>\n";
    out << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(top + plot_h + 28)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">transaction</text>\n";
    out << "<text x=\"14\" y=\"" << num(top + plot_h / 2) << "\" font-family=\"sans-serif\" font-size=\"10\">balance - baseline</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        for (std::size_t r = 0; r < s.runs.size(); ++r) {
            if (s.runs[r].empty()) continue;
            out << "<polyline data-account=\"" << escape(s.account) << "\" data-run=\"" << r << "\" fill=\"none\" stroke=\""
                << kRunColors[r % kRunColors.size()] << "\" stroke-width=\"1.5\"";
            if (*kDashes[k % kDashes.size()]) out << " stroke-dasharray=\"" << kDashes[k % kDashes.size()] << "\"";
            out << " points=\"";
            for (std::size_t i = 0; i < s.runs[r].size(); ++i) {
                out << (i ? " " : "") << num(px(s.runs[r][i].first)) << ',' << num(py(s.runs[r][i].second, s.baseline));
            }
            out << "\"/>\n";
        }
    }
    out << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"10\">\n";
    for (std::size_t r = 0; r < max_runs; ++r) {
        const double y = legend_y + 18.0 * double(r);
        out << "<line x1=\"" << num(left) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left + 24) << "\" y2=\"" << num(y) << "\" stroke=\""
            << kRunColors[r % kRunColors.size()] << "\" stroke-width=\"2\"/><text x=\"" << num(left + 30) << "\" y=\"" << num(y + 4)
            << "\">run " << r << "</text>\n";
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double y = legend_y + 18.0 * double(k);
        out << "<line x1=\"" << num(left + 200) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left + 224) << "\" y2=\"" << num(y)
            << "\" stroke=\"#000000\"";
        if (*kDashes[k % kDashes.size()]) out << " stroke-dasharray=\"" << kDashes[k % kDashes.size()] << "\"";
        out << "/><text x=\"" << num(left + 230) << "\" y=\"" << num(y + 4) << "\">" << escape(series[k].account) << " (baseline "
            << word_to_dec(series[k].baseline) << ")</text>\n";
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

std::string export_csv(const OutputMatrix& m) {
    std::ostringstream out;
    out << "step";
    for (std::size_t c = 0; c < m.cols; ++c) out << ',' << c;
    out << '\n';
    for (std::size_t r = 0; r < m.rows; ++r) {
        out << r;
        for (std::size_t c = 0; c < m.cols; ++c) {
            out << ',';
            if (m.at(r, c)) out << word_to_dec(*m.at(r, c));
        }
        out << '\n';
    }
    return out.str();
}

OutputMatrix parse_csv(const std::string& text, std::string name) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("step")) throw std::invalid_argument("matrix CSV lacks its header");
    const std::size_t cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    std::vector<std::vector<std::optional<Word>>> rows;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::string f;
        std::istringstream ls(line);
        while (std::getline(ls, f, ',')) fields.push_back(f);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        if (fields.size() != cols + 1 || fields[0] != std::to_string(rows.size())) {
            throw std::invalid_argument("matrix CSV row " + std::to_string(rows.size()) + " is malformed");
        }
        std::vector<std::optional<Word>> row;
        for (std::size_t c = 1; c <= cols; ++c) row.push_back(fields[c].empty() ? std::nullopt : std::optional<Word>(word_from_string(fields[c])));
        rows.push_back(std::move(row));
    }
    OutputMatrix m{std::move(name), rows.size(), cols};
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = rows[r][c];
    }
    return m;
}

}  // namespace replaylab::viz
