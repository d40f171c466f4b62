#include "fairaudit/study_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fairaudit/csv.hpp"
#include "fairaudit/error.hpp"
#include "json.hpp"

namespace fairaudit::sim {

using nlohmann::ordered_json;

void write_replications_csv(std::ostream& out, const SimulationSummary& s) {
  csv::write_row(out, {"rep", "scenario", "method", "metric", "estimate", "se",
                       "covered"});
  for (const ReplicationRow& r : s.rows) {
    csv::write_row(out, {std::to_string(r.rep), std::to_string(s.scenario),
                         std::string(to_string(r.method)),
                         std::string(to_string(r.metric)),
                         csv::format_double(r.estimate),
                         csv::format_double(r.se),
                         r.covered < 0 ? "NA" : std::to_string(r.covered)});
  }
}

namespace {

ordered_json number(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

}  // namespace

std::string summary_to_json(const SimulationSummary& s) {
  ordered_json j;
  j["scenario"] = s.scenario;
  j["replications"] = s.replications;
  j["seed"] = s.seed;
  ordered_json methods = ordered_json::array();
  for (StudyMethod m : s.methods) methods.push_back(to_string(m));
  j["methods"] = methods;

  ordered_json truth = ordered_json::object();
  for (Metric m : kAllMetrics) {
    const auto k = static_cast<std::size_t>(m);
    truth[std::string(to_string(m))] = {{"group0", number(s.truth.group0[k])},
                                        {"group1", number(s.truth.group1[k])},
                                        {"delta", number(s.truth.delta[k])},
                                        {"mc_se", number(s.truth.delta_se[k])}};
  }
  j["truth"] = truth;
  ordered_json coef = ordered_json::array();
  for (Eigen::Index i = 0; i < s.score_model.coef.size(); ++i) {
    coef.push_back(number(s.score_model.coef[i]));
  }
  j["score_model"] = coef;
  j["failed_replications"] = s.failed_replications;
  j["failures"] = s.failures;

  ordered_json cells = ordered_json::array();
  for (const CellSummary& c : s.cells) {
    cells.push_back({{"method", to_string(c.method)},
                     {"metric", to_string(c.metric)},
                     {"count", c.count},
                     {"mean_estimate", number(c.mean_estimate)},
                     {"truth", number(c.truth)},
                     {"bias", number(c.bias)},
                     {"mc_se", number(c.mc_se)},
                     {"empirical_sd", number(c.empirical_sd)},
                     {"mse", number(c.mse)},
                     {"re", number(c.re)},
                     {"coverage", number(c.coverage)},
                     {"mean_se", number(c.mean_se)}});
  }
  j["cells"] = cells;
  return j.dump(2) + "\n";
}

namespace {

constexpr std::array<const char*, 4> kPalette = {"#4c72b0", "#dd8452",
                                                 "#55a868", "#c44e52"};

std::string fmt(double v, int precision = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::string bar_chart(const SimulationSummary& s, const std::string& title,
                      const std::function<double(const CellSummary&)>& value,
                      std::optional<double> reference) {
  const double width = 760, height = 380;
  const double left = 60, right = 150, top = 40, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;

  double lo = 0.0, hi = 0.0;
  if (reference) hi = std::max(hi, *reference);
  for (const CellSummary& c : s.cells) {
    const double v = value(c);
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo <= 0.0) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  lo = lo < 0.0 ? lo - pad : lo;
  hi += pad;
  auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" font-family=\"sans-serif\" "
     << "font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
     << "font-size=\"15\">" << title << "</text>\n";

  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    const double y = y_of(v);
    os << "<line x1=\"" << left << "\" x2=\"" << left + plot_w << "\" y1=\""
       << fmt(y, 1) << "\" y2=\"" << fmt(y, 1)
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << fmt(y + 4, 1)
       << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
  }
  const double base = y_of(lo < 0.0 ? 0.0 : lo);
  os << "<line x1=\"" << left << "\" x2=\"" << left + plot_w << "\" y1=\""
     << fmt(base, 1) << "\" y2=\"" << fmt(base, 1)
     << "\" stroke=\"black\"/>\n";
  if (reference) {
    const double y = y_of(*reference);
    os << "<line x1=\"" << left << "\" x2=\"" << left + plot_w << "\" y1=\""
       << fmt(y, 1) << "\" y2=\"" << fmt(y, 1)
       << "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
  }

  const double group_w = plot_w / static_cast<double>(kAllMetrics.size());
  const double bar_w =
      0.8 * group_w / static_cast<double>(std::max<std::size_t>(1, s.methods.size()));
  for (std::size_t g = 0; g < kAllMetrics.size(); ++g) {
    const double gx = left + group_w * static_cast<double>(g);
    for (std::size_t k = 0; k < s.methods.size(); ++k) {
      const double v = value(s.cell(s.methods[k], kAllMetrics[g]));
      if (!std::isfinite(v)) continue;
      const double x = gx + 0.1 * group_w + bar_w * static_cast<double>(k);
      const double y = std::min(y_of(v), base);
      const double h = std::abs(y_of(v) - base);
      os << "<rect x=\"" << fmt(x, 1) << "\" y=\"" << fmt(y, 1)
         << "\" width=\"" << fmt(bar_w, 1) << "\" height=\"" << fmt(h, 1)
         << "\" fill=\"" << kPalette[k % kPalette.size()] << "\"><title>"
         << to_string(s.methods[k]) << " " << to_string(kAllMetrics[g]) << ": "
         << fmt(v, 4) << "</title></rect>\n";
    }
    os << "<text x=\"" << fmt(gx + group_w / 2, 1) << "\" y=\""
       << top + plot_h + 20 << "\" text-anchor=\"middle\">"
       << to_string(kAllMetrics[g]) << "</text>\n";
  }
  for (std::size_t k = 0; k < s.methods.size(); ++k) {
    const double y = top + 10 + 20 * static_cast<double>(k);
    os << "<rect x=\"" << width - right + 15 << "\" y=\"" << y - 10
       << "\" width=\"12\" height=\"12\" fill=\""
       << kPalette[k % kPalette.size()] << "\"/>\n";
    os << "<text x=\"" << width - right + 33 << "\" y=\"" << y << "\">"
       << to_string(s.methods[k]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

std::string bias_chart_svg(const SimulationSummary& s) {
  return bar_chart(s, "Scenario " + std::to_string(s.scenario) +
                          ": bias of the disparity estimate",
                   [](const CellSummary& c) { return c.bias; }, std::nullopt);
}

std::string re_chart_svg(const SimulationSummary& s) {
  return bar_chart(s, "Scenario " + std::to_string(s.scenario) +
                          ": relative efficiency (MSE supervised / MSE method)",
                   [](const CellSummary& c) { return c.re; }, 1.0);
}

void write_study_outputs(const std::string& dir, const SimulationSummary& s,
                         bool plots) {
  const std::filesystem::path root(dir);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw InputError("cannot create '" + dir + "': " + ec.message());
  std::ostringstream rows;
  write_replications_csv(rows, s);
  write_text(root / "replications.csv", rows.str());
  write_text(root / "summary.json", summary_to_json(s));
  if (plots) {
    write_text(root / "bias.svg", bias_chart_svg(s));
    write_text(root / "re.svg", re_chart_svg(s));
  }
}

}  // namespace fairaudit::sim
