// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <regex>

#include <gtest/gtest.h>

#include <harness.hpp>
#include <replaylab/viz/viz.hpp>

using namespace replaylab;
using namespace replaylab::viz;
using replaylab::harness::fetch;
using replaylab::harness::record;

namespace {

// fill of every cell rect, keyed by (row, col)
std::map<std::pair<std::size_t, std::size_t>, std::string> fills(const std::string& svg) {
    std::map<std::pair<std::size_t, std::size_t>, std::string> out;
    static const std::regex re(R"re(<rect data-row="(\d+)" data-col="(\d+)"[^>]*fill="([^"]+)")re");
    for (std::sregex_iterator it(svg.begin(), svg.end(), re), end; it != end; ++it) {
        out[{std::stoul((*it)[1]), std::stoul((*it)[2])}] = (*it)[3];
    }
    return out;
}

std::vector<std::pair<double, double>> polyline(const std::string& svg, const std::string& account, std::size_t run) {
    const std::regex re("<polyline data-account=\"" + account + "\" data-run=\"" + std::to_string(run) + "\"[^>]*points=\"([^\"]+)\"");
    std::smatch m;
    if (!std::regex_search(svg, m, re)) return {};
    std::vector<std::pair<double, double>> pts;
    std::istringstream in(m[1].str());
    for (std::string p; in >> p;) {
        const auto comma = p.find(',');
        pts.emplace_back(std::stod(p.substr(0, comma)), std::stod(p.substr(comma + 1)));
    }
    return pts;
}

struct Minilotto {
    Minilotto() {
        const auto b = fetch(record("minilotto"), "lotto", 1000);
        plan = scriptgen::generate_plan(b, scriptgen::build_address_map(b, {}), {});
        replayer::RunConfig cfg;
        cfg.run_schedules[4] = replayer::Schedule::sequential(451, 500);
        runs = replayer::replay_all(plan, cfg);
        for (auto& m : replayer::collect_matrices(runs, plan)) matrices[m.name] = std::move(m);
    }
    scriptgen::TestPlan plan;
    std::vector<replayer::ReplayRun> runs;
    std::map<std::string, OutputMatrix> matrices;
};

const Minilotto& lotto() {
    static const Minilotto m;
    return m;
}

}  // namespace

TEST(heatmap, single_cell_min_colour) {
    OutputMatrix m{"x", 1, 1};
    m.at(0, 0) = Word{0};
    const auto f = fills(heatmap(m, {}));
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(f.begin()->second, kLowColor);
}

TEST(heatmap, sequential_endpoints_and_midpoint) {
    OutputMatrix m{"x", 3, 1};
    m.at(0, 0) = Word{10};
    m.at(1, 0) = Word{20};
    m.at(2, 0) = Word{30};
    const auto f = fills(heatmap(m, {}));
    EXPECT_EQ(f.at({0, 0}), kLowColor);
    EXPECT_EQ(f.at({2, 0}), kHighColor);
    // halfway between f7fbff and 08306b, rounded half away from zero
    EXPECT_EQ(f.at({1, 0}), "#8096b5");
}

TEST(heatmap, absent_cells_are_hatched) {
    OutputMatrix m{"x", 2, 2};
    m.at(0, 0) = Word{1};
    m.at(1, 1) = Word{2};
    const auto svg = heatmap(m, {});
    const auto f = fills(svg);
    EXPECT_EQ(f.at({0, 1}), "url(#absent)");
    EXPECT_EQ(f.at({1, 0}), "url(#absent)");
    EXPECT_NE(svg.find("<pattern id=\"absent\""), std::string::npos);
    EXPECT_THROW(heatmap(OutputMatrix{"e", 0, 0}, {}), std::invalid_argument);
}

TEST(heatmap, minilotto_rigged_run) {
    const auto& l = lotto();
    const auto& won = l.matrices.at("event:NewPlay.won");
    const auto wf = fills(heatmap(won, {}));
    for (std::size_t r = 0; r < won.rows; ++r) EXPECT_EQ(wf.at({r, 4}), kHighColor) << r;

    const auto& number = l.matrices.at("event:NewPlay.number");
    HeatmapSpec spec;
    spec.palette = Palette::threshold_at(900);
    const auto svg = heatmap(number, spec);
    const auto nf = fills(svg);
    for (std::size_t r = 0; r < number.rows; ++r) {
        for (std::size_t c = 0; c < number.cols; ++c) {
            EXPECT_EQ(nf.at({r, c}), *number.at(r, c) > 900 ? kAboveColor : kBelowColor);
        }
        EXPECT_EQ(nf.at({r, 4}), kAboveColor);
    }
    EXPECT_EQ(svg, heatmap(number, spec));
}

TEST(balance_plot, shapes) {
    SeriesPlotSpec flat{"flat", 5, {{{0, 7}, {1, 7}, {2, 7}}}};
    const auto svg = balance_plot({flat}, "flat");
    const auto pts = polyline(svg, "flat", 0);
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_EQ(pts[0].second, pts[2].second);
    EXPECT_NE(svg.find("run 0"), std::string::npos);
    EXPECT_THROW(balance_plot({}, "none"), std::invalid_argument);
    EXPECT_THROW(balance_plot({SeriesPlotSpec{"bad", 0, {{{2, 1}, {1, 1}}}}}, "bad"), std::invalid_argument);
}

TEST(balance_plot, minilotto_winner_and_loser) {
    const auto& l = lotto();
    const std::size_t winner = l.plan.txs[17].from;
    std::optional<std::size_t> loser;
    for (auto ref : replayer::tracked_accounts(l.plan)) {
        if (ref == scriptgen::kContractRef || ref == winner) continue;
        bool won = false;
        std::size_t plays = 0;
        for (std::size_t i = 0; i < l.plan.T(); ++i) {
            if (l.plan.txs[i].from != ref) continue;
            ++plays;
            won = won || *l.matrices.at("event:NewPlay.won").at(i, 0) == 1;
        }
        if (!won && plays > 1) loser = ref;
    }
    ASSERT_TRUE(loser);
    const auto w = balance_series(l.matrices.at("balance:" + std::to_string(winner)), "winner");
    const auto s = balance_series(l.matrices.at("balance:" + std::to_string(*loser)), "loser");
    const auto svg = balance_plot({w, s}, "players");
    const auto wp = polyline(svg, "winner", 0);
    ASSERT_EQ(wp.size(), 27u);
    EXPECT_LT(wp[17].second, wp[16].second);  // svg y grows downwards
    const auto lp = polyline(svg, "loser", 0);
    for (std::size_t i = 1; i < lp.size(); ++i) EXPECT_GE(lp[i].second, lp[i - 1].second);
    EXPECT_GT(lp.back().second, lp.front().second);
    EXPECT_EQ(svg, balance_plot({w, s}, "players"));
}

TEST(csv, layout_and_round_trip) {
    OutputMatrix m{"m", 2, 2};
    m.at(0, 0) = Word{1};
    m.at(0, 1) = Word{2};
    m.at(1, 0) = Word{3};
    m.at(1, 1) = Word{4};
    EXPECT_EQ(export_csv(m), "step,0,1\n0,1,2\n1,3,4\n");
    EXPECT_EQ(parse_csv(export_csv(m), "m"), m);

    m.at(0, 1).reset();
    m.at(1, 1).reset();
    EXPECT_EQ(export_csv(m), "step,0,1\n0,1,\n1,3,\n");
    EXPECT_EQ(parse_csv(export_csv(m), "m"), m);

    OutputMatrix big{"b", 1, 1};
    big.at(0, 0) = word_from_string("1000000000000000000000000000000000001");
    EXPECT_EQ(parse_csv(export_csv(big), "b"), big);

    const auto& gas = lotto().matrices.at("gas_used");
    const auto text = export_csv(gas);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 28);
    EXPECT_EQ(parse_csv(text, "gas_used"), gas);
    EXPECT_THROW(parse_csv("0,1\n", "x"), std::invalid_argument);
}
