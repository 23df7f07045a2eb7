#include "censorbias/plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "censorbias/errors.hpp"
#include "censorbias/estimate.hpp"
#include "censorbias/format.hpp"

namespace censorbias::plot {

std::string_view mechanism_color(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::time:
      return "red";
    case Mechanism::interim:
      return "blue";
    case Mechanism::case_:
      return "green";
  }
  return "gray";
}

std::string escape_xml(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

Svg::Svg(double width, double height) : width_(width), height_(height) {}

void Svg::add(std::string element) { elements_.push_back(std::move(element)); }

std::string Svg::render() const {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width_ << "\" height=\""
      << height_ << "\" viewBox=\"0 0 " << width_ << ' ' << height_
      << "\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& e : elements_) out << e << '\n';
  out << "</svg>\n";
  return out.str();
}

namespace {

std::string num(double v) { return format_fixed(v, 2); }

/// Data-to-pixel mapping inside a panel, with room for axes and title.
struct Axes {
  Panel panel;
  double x_min, x_max, y_min, y_max;
  bool log_y = false;
  double left = 52, right = 14, top = 30, bottom = 40;

  double px(double x) const {
    const double w = panel.width - left - right;
    return panel.x + left + (x - x_min) / (x_max - x_min) * w;
  }
  double py(double y) const {
    const double h = panel.height - top - bottom;
    double frac;
    if (log_y) {
      y = std::max(y, y_min);
      frac = (std::log10(y) - std::log10(y_min)) / (std::log10(y_max) - std::log10(y_min));
    } else {
      frac = (y - y_min) / (y_max - y_min);
    }
    return panel.y + top + (1.0 - frac) * h;
  }
  double plot_left() const { return panel.x + left; }
  double plot_right() const { return panel.x + panel.width - right; }
  double plot_top() const { return panel.y + top; }
  double plot_bottom() const { return panel.y + panel.height - bottom; }
};

std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = m * mag;
    if (span / step <= 6.0) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step)
    ticks.push_back(std::fabs(t) < step * 1e-9 ? 0.0 : t);
  return ticks;
}

std::string text(double x, double y, std::string_view content, std::string_view cls,
                 std::string_view anchor = "start", std::string_view fill = "black") {
  return "<text class=\"" + std::string(cls) + "\" x=\"" + num(x) + "\" y=\"" + num(y) +
         "\" text-anchor=\"" + std::string(anchor) + "\" fill=\"" + std::string(fill) + "\">" +
         escape_xml(content) + "</text>";
}

std::string line(double x1, double y1, double x2, double y2, std::string_view cls, std::string_view stroke,
                 double width = 1.0, std::string_view dash = {}) {
  std::string s = "<line class=\"" + std::string(cls) + "\" x1=\"" + num(x1) + "\" y1=\"" + num(y1) +
                  "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) + "\" stroke=\"" + std::string(stroke) +
                  "\" stroke-width=\"" + num(width) + "\"";
  if (!dash.empty()) s += " stroke-dasharray=\"" + std::string(dash) + "\"";
  return s + "/>";
}

void draw_frame(Svg& svg, const Axes& ax, std::string_view title, std::string_view x_label,
                std::string_view y_label) {
  std::ostringstream frame;
  frame << "<rect class=\"frame\" x=\"" << num(ax.plot_left()) << "\" y=\"" << num(ax.plot_top())
        << "\" width=\"" << num(ax.plot_right() - ax.plot_left()) << "\" height=\""
        << num(ax.plot_bottom() - ax.plot_top()) << "\" fill=\"none\" stroke=\"black\"/>";
  svg.add(frame.str());

  for (double t : nice_ticks(ax.x_min, ax.x_max)) {
    const double x = ax.px(t);
    svg.add(line(x, ax.plot_bottom(), x, ax.plot_bottom() + 4, "tick", "black"));
    svg.add(text(x, ax.plot_bottom() + 15, format_signif(t, 6), "tick-label", "middle"));
  }
  std::vector<double> y_ticks;
  if (ax.log_y) {
    for (double t = ax.y_min; t <= ax.y_max * 1.0000001; t *= 10) y_ticks.push_back(t);
  } else {
    y_ticks = nice_ticks(ax.y_min, ax.y_max);
  }
  for (double t : y_ticks) {
    const double y = ax.py(t);
    svg.add(line(ax.plot_left() - 4, y, ax.plot_left(), y, "tick", "black"));
    svg.add(text(ax.plot_left() - 6, y + 4, format_signif(t, 6), "tick-label", "end"));
  }
  const double cx = (ax.plot_left() + ax.plot_right()) / 2;
  svg.add(text(cx, ax.panel.y + 18, title, "title", "middle"));
  svg.add(text(cx, ax.panel.y + ax.panel.height - 8, x_label, "axis-label", "middle"));
  const double cy = (ax.plot_top() + ax.plot_bottom()) / 2;
  const double lx = ax.panel.x + 12;
  svg.add("<text class=\"axis-label\" x=\"" + num(lx) + "\" y=\"" + num(cy) +
          "\" text-anchor=\"middle\" transform=\"rotate(-90 " + num(lx) + ' ' + num(cy) + ")\">" +
          escape_xml(y_label) + "</text>");
}

void legend(Svg& svg, double x, double y, const std::vector<std::pair<std::string, std::string>>& entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double row = y + 14.0 * static_cast<double>(i);
    svg.add(line(x, row - 4, x + 18, row - 4, "legend-key", entries[i].second, 2.0));
    svg.add(text(x + 22, row, entries[i].first, "legend"));
  }
}

void km_series(Svg& svg, const Axes& ax, const KmSeries& series) {
  const KMCurve curve = km_fit(series.dataset);
  std::ostringstream path;
  path << "<path class=\"km-step\" fill=\"none\" stroke=\"" << series.color << "\" stroke-width=\""
       << num(series.line_width) << "\" d=\"M" << num(ax.px(0)) << ',' << num(ax.py(1.0));
  std::ostringstream marks;
  double previous = 1.0;
  for (const auto& step : curve.steps) {
    path << " H" << num(ax.px(step.time));
    if (step.survival != previous) path << " V" << num(ax.py(step.survival));
    previous = step.survival;
    if (step.censored > 0)
      marks << " M" << num(ax.px(step.time)) << ',' << num(ax.py(step.survival) - 4) << " v8";
  }
  path << "\"/>";
  svg.add(path.str());
  if (!marks.str().empty())
    svg.add("<path class=\"censor-marks\" fill=\"none\" stroke=\"" + series.color + "\" d=\"" +
            marks.str().substr(1) + "\"/>");
  if (curve.median) {
    const double x = ax.px(*curve.median);
    svg.add(line(x, ax.py(0.5), x, ax.plot_bottom(), "median-drop", series.color, 2.0, "2,3"));
  }
}

}  // namespace

void km_chart(Svg& svg, const Panel& panel, const std::vector<KmSeries>& series, const KmOptions& options) {
  if (series.empty()) throw DomainError("Kaplan-Meier chart without series");
  double max_time = options.max_time;
  if (max_time <= 0) {
    for (const auto& s : series)
      for (const auto& r : s.dataset.records) max_time = std::max(max_time, r.time);
    max_time = max_time > 0 ? max_time * 1.1 : 1.0;
  }
  Axes ax{panel, 0.0, max_time, options.log_y ? 1e-2 : 0.0, 1.0, options.log_y};
  draw_frame(svg, ax, options.title, "Time", "Proportion");
  for (double level : {0.25, 0.5, 0.75})
    svg.add(line(ax.plot_left(), ax.py(level), ax.plot_right(), ax.py(level), "grid", "gray", 0.5, "1,3"));
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& s : series) {
    if (s.dataset.empty()) throw DomainError("Kaplan-Meier chart of an empty dataset");
    km_series(svg, ax, s);
    if (!s.label.empty()) entries.emplace_back(s.label, s.color);
  }
  legend(svg, ax.plot_right() - 130, ax.plot_top() + 14, entries);
}

std::string trial_title(const SurvivalDataset& complete, const SurvivalDataset& censored,
                        std::string_view title) {
  std::string hr = "NA", p = "NA";
  try {
    const CoxFit fit = cox_two_group(complete, censored);
    hr = format_signif(fit.hr, 3);
    p = format_signif(fit.p_value, 3);
  } catch (const NonConvergenceError&) {
  }
  return std::string(title) + ",    hr: " + hr + "    p: " + p;
}

void trial_chart(Svg& svg, const Panel& panel, const SurvivalDataset& complete,
                 const SurvivalDataset& censored, std::string_view title, std::string_view color, bool log_y) {
  if (complete.empty() || censored.empty()) throw DomainError("trial chart of an empty dataset");
  const auto complete_events = complete.event_times();
  if (complete_events.empty()) throw DomainError("trial chart needs events in the complete dataset");
  const double last_event = *std::max_element(complete_events.begin(), complete_events.end());

  SurvivalDataset events{"events", {}};
  SurvivalDataset early_censored{"censored cases", {}};
  for (const auto& r : censored.records) {
    if (r.status == 1) {
      events.records.push_back(r);
    } else if (r.time < last_event) {
      SurvivalRecord as_event = r;
      as_event.status = 1;
      early_censored.records.push_back(as_event);
    }
  }

  std::vector<KmSeries> series;
  series.push_back({complete, std::string(kComplete), 2.0, "uncensored dataset"});
  series.push_back({censored, std::string(color), 1.5, "censored dataset"});
  if (!events.empty()) series.push_back({events, std::string(kEventSubset), 2.0, "events"});
  if (!early_censored.empty())
    series.push_back({early_censored, std::string(kCensoredSubset), 2.0, "censored cases"});

  double max_time = 0;
  for (const auto& r : complete.records) max_time = std::max(max_time, r.time);
  KmOptions options{trial_title(complete, censored, title), log_y, max_time > 0 ? max_time * 1.1 : 1.0};
  km_chart(svg, panel, series, options);
}

namespace {

void mechanism_legend(Svg& svg, double x, double y) {
  svg.add(text(x, y, "p-value  <0.05  >0.05", "legend"));
  const Mechanism all[] = {Mechanism::time, Mechanism::interim, Mechanism::case_};
  for (int i = 0; i < 3; ++i) {
    const double row = y + 14.0 * (i + 1);
    const std::string color(mechanism_color(all[i]));
    svg.add(text(x, row, std::string(to_string(all[i])) + " censoring", "legend"));
    svg.add("<circle class=\"legend-key\" cx=\"" + num(x + 70) + "\" cy=\"" + num(row - 4) +
            "\" r=\"3\" fill=\"" + color + "\" stroke=\"" + color + "\"/>");
    svg.add("<circle class=\"legend-key\" cx=\"" + num(x + 105) + "\" cy=\"" + num(row - 4) +
            "\" r=\"3\" fill=\"none\" stroke=\"" + color + "\"/>");
  }
}

std::string point(const Axes& ax, double x, double y, const TrialResult& row) {
  const std::string color(mechanism_color(row.mechanism));
  const bool significant = row.p_value && *row.p_value < 0.05;
  return "<circle class=\"point\" cx=\"" + num(ax.px(x)) + "\" cy=\"" + num(ax.py(y)) + "\" r=\"2.2\" fill=\"" +
         (significant ? color : std::string("none")) + "\" stroke=\"" + color + "\" stroke-width=\"0.7\"/>";
}

}  // namespace

void censor_scatter(Svg& svg, const Panel& panel, const ExperimentTable& table, std::string_view title) {
  if (table.rows.empty()) throw DomainError("scatter of an empty experiment table");
  double y_max = 1.2;
  for (const auto& r : table.rows)
    if (r.hr) y_max = std::max(y_max, *r.hr);
  Axes ax{panel, 0.0, 1.0, 0.0, y_max};
  draw_frame(svg, ax, title, "proportion of censoring", "hr");
  svg.add(line(ax.plot_left(), ax.py(1.0), ax.plot_right(), ax.py(1.0), "reference", "black"));
  for (const auto& r : table.rows)
    if (r.hr) svg.add(point(ax, r.p_censored, *r.hr, r));

  const LinearFit fit = case_censoring_correlation(table);
  svg.add(line(ax.px(0.0), ax.py(fit.intercept), ax.px(1.0), ax.py(fit.intercept + fit.slope), "regression",
               "black", 1.2));
  mechanism_legend(svg, ax.plot_left() + 8, ax.plot_bottom() - 62);
  svg.add(text(ax.plot_right() - 8, ax.plot_bottom() - 8, "r = " + format_signif(fit.pearson_r, 3), "legend",
               "end"));
}

RocResult bias_scatter(Svg& svg, const Panel& panel, const ExperimentTable& table, std::string_view index,
                       std::string_view title) {
  const auto values = column(table, index);
  const auto labels = significance_labels(table);
  const RocResult roc = youden_analysis(std::span<const std::optional<double>>(values), labels);

  double x_max = 0.0, y_max = 1.6;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (values[i] && table.rows[i].hr) {
      x_max = std::max(x_max, *values[i]);
      y_max = std::max(y_max, *table.rows[i].hr);
    }
  }
  Axes ax{panel, 0.0, x_max > 0 ? x_max * 1.05 : 1.0, 0.0, y_max};
  draw_frame(svg, ax, title, index, "hr");
  svg.add(line(ax.plot_left(), ax.py(1.0), ax.plot_right(), ax.py(1.0), "reference", "black"));
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    if (values[i] && table.rows[i].hr) svg.add(point(ax, *values[i], *table.rows[i].hr, table.rows[i]));
  svg.add(line(ax.px(roc.cutoff), ax.plot_top(), ax.px(roc.cutoff), ax.plot_bottom(), "cutoff", "black", 1.2));

  mechanism_legend(svg, ax.plot_left() + 8, ax.plot_top() + 14);
  const double rx = ax.plot_right() - 8;
  svg.add(text(rx, ax.plot_top() + 14, "Area under ROC", "roc", "end"));
  svg.add(text(rx, ax.plot_top() + 28,
               format_signif(roc.auc, 3) + " (" + format_signif(roc.auc_ci_low, 3) + ", " +
                   format_signif(roc.auc_ci_high, 3) + ")",
               "roc", "end"));
  const std::pair<const char*, double> params[] = {{"Cutoff", roc.cutoff},
                                                   {"Sensit", roc.sensitivity},
                                                   {"Specif", roc.specificity},
                                                   {"posPV", roc.ppv},
                                                   {"negPV", roc.npv}};
  double y = ax.plot_bottom() - 8 - 14.0 * 4;
  for (const auto& [name, value] : params) {
    svg.add(text(ax.plot_left() + 8, y, std::string(name) + ": " + format_signif(value, 3), "roc-param"));
    y += 14.0;
  }
  return roc;
}

}  // namespace censorbias::plot
