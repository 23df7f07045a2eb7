#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "censorbias/dataset.hpp"
#include "censorbias/experiment.hpp"
#include "censorbias/rocstat.hpp"

namespace censorbias::plot {

/// Series colors shared by every figure.
inline constexpr std::string_view kComplete = "black";
inline constexpr std::string_view kEventSubset = "darkorange";
inline constexpr std::string_view kCensoredSubset = "purple";
std::string_view mechanism_color(Mechanism mechanism);

/// A rectangle of an SVG document that one chart draws into.
struct Panel {
  double x = 0;
  double y = 0;
  double width = 480;
  double height = 360;
};

/// Accumulates SVG elements; render() yields a self-contained SVG 1.1 document.
class Svg {
 public:
  Svg(double width, double height);

  void add(std::string element);
  std::string render() const;
  double width() const { return width_; }
  double height() const { return height_; }

 private:
  double width_;
  double height_;
  std::vector<std::string> elements_;
};

std::string escape_xml(std::string_view text);

struct KmSeries {
  SurvivalDataset dataset;
  std::string color;
  double line_width = 1.5;
  std::string label;
};

struct KmOptions {
  std::string title;
  bool log_y = false;
  /// Upper end of the time axis; 0 derives it from the data (max time * 1.1).
  double max_time = 0;
};

/// Kaplan-Meier step curves with censor ticks and a dotted drop-line at each median.
void km_chart(Svg& svg, const Panel& panel, const std::vector<KmSeries>& series,
              const KmOptions& options);

/// Complete follow-up (black) vs censored dataset (mechanism color), plus the censored
/// dataset's events (orange) and in-interval censored cases as events (purple).
/// The title carries hr and p of the censored-vs-complete Cox fit at 3 significant digits.
void trial_chart(Svg& svg, const Panel& panel, const SurvivalDataset& complete,
                 const SurvivalDataset& censored, std::string_view title, std::string_view color,
                 bool log_y = false);

/// Title used by trial_chart: "<title>,    hr: <hr>    p: <p>".
std::string trial_title(const SurvivalDataset& complete, const SurvivalDataset& censored,
                        std::string_view title);

/// hr against p_censored, solid dots for p < 0.05, case-mechanism regression line, r in legend.
void censor_scatter(Svg& svg, const Panel& panel, const ExperimentTable& table,
                    std::string_view title);

/// hr against a bias index with the Youden cutoff line and ROC annotations.
/// Returns the ROC summary it annotated.
RocResult bias_scatter(Svg& svg, const Panel& panel, const ExperimentTable& table,
                       std::string_view index, std::string_view title);

}  // namespace censorbias::plot
