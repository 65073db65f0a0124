// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <replaylab/replayer/replay.hpp>

namespace replaylab::viz {

using replayer::OutputMatrix;

// Sequential palette endpoints: the matrix minimum maps to kLowColor, the maximum to kHighColor.
inline constexpr const char* kLowColor = "#f7fbff";
inline constexpr const char* kHighColor = "#08306b";
// Threshold palette: cells strictly above the threshold are green.
inline constexpr const char* kAboveColor = "#1a9850";
inline constexpr const char* kBelowColor = "#f0f0f0";

struct Palette {
    enum class Kind { kSequential, kThreshold };

    Kind kind{Kind::kSequential};
    Word threshold{0};

    static Palette sequential() { return {}; }
    static Palette threshold_at(const Word& t) { return {Kind::kThreshold, t}; }
};

struct HeatmapSpec {
    Palette palette;
    unsigned cell_px{14};
    std::string title;
    std::string row_label{"transaction"};
    std::string col_label{"run"};
};

//! Fill colour of `value` within matrix `m`, as "#rrggbb".
std::string cell_color(const OutputMatrix& m, const Palette& p, const Word& value);

//! SVG heat map: one rect per cell, hatched rects for absent cells. Throws on an empty matrix.
std::string heatmap(const OutputMatrix& m, const HeatmapSpec& spec);

struct SeriesPlotSpec {
    std::string account;  // legend label
    //! Balance is drawn in excess of this value.
    Word baseline{0};
    //! One series per run: (step index, value), x strictly increasing.
    std::vector<std::vector<std::pair<std::size_t, Word>>> runs;
};

//! Series for a "balance:<ref>" matrix; the baseline is the smallest observed balance.
SeriesPlotSpec balance_series(const OutputMatrix& m, std::string account);

//! SVG line plot: one polyline per run per account, coloured by run, with a legend.
std::string balance_plot(const std::vector<SeriesPlotSpec>& series, const std::string& title);

//! Header "step,<run indices...>", one row per step, absent cells blank.
std::string export_csv(const OutputMatrix& m);
OutputMatrix parse_csv(const std::string& text, std::string name);

}  // namespace replaylab::viz
