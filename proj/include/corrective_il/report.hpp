// Copyright 2026 The Corrective IL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CORRECTIVE_IL_REPORT_HPP_
#define CORRECTIVE_IL_REPORT_HPP_

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corrective_il/errors.hpp"
#include "corrective_il/harness.hpp"

namespace corrective_il {

// Reads every runs/<plan>/<seed>/cell.json below `root`, sorted by path.
inline std::vector<CellSummary> LoadCells(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw ValidationError("run directory not found: " + root.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().filename() == "cell.json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<CellSummary> cells;
  for (const auto& f : files) {
    std::ifstream in(f);
    try {
      cells.push_back(CellFromJson(json::parse(in)));
    } catch (const json::exception& e) {
      throw ValidationError(f.string() + ": " + e.what());
    }
  }
  if (cells.empty()) throw ValidationError("no completed cells under " + root.string());
  return cells;
}

inline void WriteAggregateCsv(const fs::path& path, const Summary& s) {
  std::ofstream out(path);
  out << "# eval_seed=" << s.eval_seed << "\n"
      << "# plan: demo split label; iteration: checkpoint iteration;"
         " mean/sd: success ratio over seeds (sample sd); n_seeds\n"
      << "plan,iteration,mean,sd,n_seeds\n";
  char buf[64];
  for (const auto& [plan, st] : s.plans) {
    for (std::size_t i = 0; i < st.iterations.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.6f,%.6f", st.mean[i], st.sd[i]);
      out << plan << "," << st.iterations[i] << "," << buf << "," << st.n_seeds << "\n";
    }
  }
}

namespace report_detail {

inline constexpr double kPanelW = 420;
inline constexpr double kPanelH = 300;
inline constexpr double kMarginL = 55;
inline constexpr double kMarginB = 45;
inline constexpr double kMarginT = 30;

inline std::string Color(std::string_view plan) {
  if (plan == "30-O") return "#444444";
  if (plan.find("-C") != std::string_view::npos) return "#d62728";
  return "#1f77b4";
}

inline void Panel(std::ostringstream& svg, double x0, const std::string& title,
                  const Summary& s, const std::vector<std::string>& plans) {
  int max_it = 1;
  for (const auto& p : plans) {
    auto it = s.plans.find(p);
    if (it != s.plans.end() && !it->second.iterations.empty()) {
      max_it = std::max(max_it, it->second.iterations.back());
    }
  }
  const double w = kPanelW - kMarginL - 15;
  const double h = kPanelH - kMarginT - kMarginB;
  const double left = x0 + kMarginL;
  const double top = kMarginT;
  auto px = [&](double it) { return left + w * it / max_it; };
  auto py = [&](double v) { return top + h * (1.0 - v); };
  char buf[256];

  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"18\" font-size=\"14\" text-anchor=\"middle\">%s</text>\n",
                left + w / 2, title.c_str());
  svg << buf;
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                "stroke=\"#000\"/>\n",
                left, top, w, h);
  svg << buf;
  for (int k = 0; k <= 4; ++k) {
    const double v = k / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"end\">%.0f%%</text>\n",
                  left, py(v), left + w, py(v), left - 5, py(v) + 4, v * 100);
    svg << buf;
    const double it = max_it * k / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"middle\">%.0f</text>\n",
                  px(it), top + h + 15, it);
    svg << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"middle\">iteration</text>\n",
                left + w / 2, top + h + 35);
  svg << buf;

  int row = 0;
  for (const auto& p : plans) {
    auto it = s.plans.find(p);
    if (it == s.plans.end()) continue;
    const PlanStats& st = it->second;
    const std::string color = Color(p);
    const char* dash = p == "30-O" ? " stroke-dasharray=\"5,3\"" : "";
    std::string points;
    for (std::size_t i = 0; i < st.iterations.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(st.iterations[i]), py(st.mean[i]));
      points += buf;
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"" << dash
        << " points=\"" << points << "\"/>\n";
    for (std::size_t i = 0; i < st.iterations.size(); ++i) {
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n",
                    px(st.iterations[i]), py(st.mean[i]), color.c_str());
      svg << buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
                  "stroke-width=\"2\"%s/><text x=\"%.1f\" y=\"%.1f\" font-size=\"11\">%s "
                  "(n=%d)</text>\n",
                  left + w - 150, top + h - 50 + 15 * row, left + w - 130, top + h - 50 + 15 * row,
                  color.c_str(), dash, left + w - 125, top + h - 46 + 15 * row, p.c_str(),
                  st.n_seeds);
    svg << buf;
    ++row;
  }
}

}  // namespace report_detail

// Two panels of mean evaluation success vs iteration: plans with a high
// share of full-space demos on the left, low share on the right, 30-O on
// both.
inline std::string LearningCurveSvg(const Summary& s) {
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * report_detail::kPanelW
      << "\" height=\"" << report_detail::kPanelH << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  report_detail::Panel(svg, 0, "20 full-space demos", s, {"10-O+20-C", "10-O+20-R", "30-O"});
  report_detail::Panel(svg, report_detail::kPanelW, "10 full-space demos", s,
                       {"20-O+10-C", "20-O+10-R", "30-O"});
  svg << "</svg>\n";
  return svg.str();
}

struct ReportPaths {
  fs::path aggregate_csv;
  fs::path curves_svg;
  fs::path summary_json;
};

// Aggregates completed cells under `runs_root` into `out_dir`. Cells must
// share one evaluation set.
inline ReportPaths WriteReport(const fs::path& runs_root, const fs::path& out_dir,
                               const CompareConfig& cmp = {}) {
  const std::vector<CellSummary> cells = LoadCells(runs_root);
  const Summary summary = Compare(cells, cmp);
  fs::create_directories(out_dir);
  ReportPaths paths{out_dir / "aggregate.csv", out_dir / "learning_curves.svg",
                    out_dir / "report_summary.json"};
  WriteAggregateCsv(paths.aggregate_csv, summary);
  std::ofstream(paths.curves_svg) << LearningCurveSvg(summary);
  std::ofstream(paths.summary_json) << SummaryJson(summary).dump(2) << "\n";
  return paths;
}

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_REPORT_HPP_
