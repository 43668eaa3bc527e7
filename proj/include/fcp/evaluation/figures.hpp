#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fcp/evaluation/evaluation.hpp"

namespace fcp::evaluation {

struct Bar {
  std::string label;
  double value = 0.0;
  double error = 0.0;
};

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

// Minimal standalone SVG charts. Every plotted value is also written as a
// data-value attribute (and error bars as data-error) formatted with
// format_value, so charts can be checked against their CSV.
std::string bar_chart_svg(const std::string& title, const std::string& y_label,
                          const std::vector<Bar>& bars);
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series);
std::string heatmap_svg(const std::string& title, const std::vector<std::string>& labels,
                        const std::vector<std::vector<double>>& values);

std::string format_value(double v);

// Behavior statistics of one player in one episode, tagged with the method
// that controlled that seat.
struct TaggedBehavior {
  std::string method;
  std::string layout;
  double movement_fraction = 0.0;
  std::optional<double> pot_preference_diff;
};

// Adds one entry per seat of the log; seat_methods names each seat.
void tag_behavior(const env::EpisodeLog& log, const std::array<std::string, 2>& seat_methods,
                  std::vector<TaggedBehavior>& out);

struct BehaviorRow {
  std::string method;
  std::string layout;
  int samples = 0;
  double movement_mean = 0.0;
  std::optional<double> pot_diff_mean;  // absent when no applicable samples
};

// One row per (method, layout) pair over the methods and layouts present,
// sorted by method then layout.
std::vector<BehaviorRow> behavior_rows(const std::vector<TaggedBehavior>& samples);
std::string behavior_csv(const std::vector<BehaviorRow>& rows);

}  // namespace fcp::evaluation
