#include "fcp/evaluation/figures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace fcp::evaluation {

namespace {

constexpr double kWidth = 640, kHeight = 400, kLeft = 60, kRight = 20, kTop = 40, kBottom = 70;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(const std::string& title) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n";
  return out.str();
}

double nice_max(double v) {
  if (v <= 0) return 1.0;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * p >= v) return m * p;
  }
  return 10 * p;
}

void axes(std::ostringstream& out, double y_max, const std::string& y_label) {
  const double plot_h = kHeight - kTop - kBottom;
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight
      << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = y_max * i / 4;
    const double y = kHeight - kBottom - plot_h * i / 4;
    out << "<text x=\"" << kLeft - 5 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
        << format_value(v) << "</text>\n";
  }
  out << "<text x=\"15\" y=\"" << kTop + plot_h / 2 << "\" transform=\"rotate(-90 15 "
      << kTop + plot_h / 2 << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
}

}  // namespace

std::string format_value(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

std::string bar_chart_svg(const std::string& title, const std::string& y_label,
                          const std::vector<Bar>& bars) {
  std::ostringstream out;
  out << header(title);
  double top = 0.0;
  for (const auto& b : bars) top = std::max(top, b.value + b.error);
  const double y_max = nice_max(top);
  axes(out, y_max, y_label);
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  const double slot = bars.empty() ? plot_w : plot_w / bars.size();
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    const double h = plot_h * std::max(0.0, b.value) / y_max;
    const double x = kLeft + slot * i + slot * 0.15;
    const double w = slot * 0.7;
    const double y = kHeight - kBottom - h;
    out << "<rect class=\"bar\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\""
        << h << "\" fill=\"#4c78a8\" data-label=\"" << escape(b.label) << "\" data-value=\""
        << format_value(b.value) << "\" data-error=\"" << format_value(b.error) << "\"/>\n";
    const double cx = x + w / 2;
    const double lo = kHeight - kBottom - plot_h * std::max(0.0, b.value - b.error) / y_max;
    const double hi = kHeight - kBottom - plot_h * (b.value + b.error) / y_max;
    out << "<line x1=\"" << cx << "\" y1=\"" << lo << "\" x2=\"" << cx << "\" y2=\"" << hi
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << cx << "\" y=\"" << kHeight - kBottom + 15
        << "\" text-anchor=\"middle\">" << escape(b.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series) {
  static const char* kColors[] = {"#4c78a8", "#f58518", "#54a24b", "#e45756",
                                  "#72b7b2", "#b279a2", "#ff9da6", "#9d755d"};
  std::ostringstream out;
  out << header(title);
  double x_max = 0.0, y_top = 0.0;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x_max = std::max(x_max, x);
      y_top = std::max(y_top, y);
    }
  }
  const double y_max = nice_max(y_top);
  if (x_max <= 0) x_max = 1.0;
  axes(out, y_max, y_label);
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 20
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kColors[i % 8];
    out << "<polyline class=\"series\" data-name=\"" << escape(s.name) << "\" fill=\"none\" stroke=\""
        << color << "\" points=\"";
    for (const auto& [x, y] : s.points) {
      out << kLeft + plot_w * x / x_max << ',' << kHeight - kBottom - plot_h * y / y_max << ' ';
    }
    out << "\"/>\n";
    for (const auto& [x, y] : s.points) {
      out << "<circle r=\"2\" fill=\"" << color << "\" cx=\"" << kLeft + plot_w * x / x_max
          << "\" cy=\"" << kHeight - kBottom - plot_h * y / y_max << "\" data-x=\"" << format_value(x)
          << "\" data-value=\"" << format_value(y) << "\"/>\n";
    }
    out << "<text x=\"" << kWidth - kRight - 5 << "\" y=\"" << kTop + 14 * (i + 1)
        << "\" text-anchor=\"end\" fill=\"" << color << "\">" << escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string heatmap_svg(const std::string& title, const std::vector<std::string>& labels,
                        const std::vector<std::vector<double>>& values) {
  std::ostringstream out;
  out << header(title);
  const double n = std::max<std::size_t>(1, labels.size());
  const double side = std::min(kWidth - 2 * kLeft, kHeight - kTop - kBottom) / n;
  const double x0 = kLeft + 40, y0 = kTop + 10;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    out << "<text x=\"" << x0 - 5 << "\" y=\"" << y0 + side * (r + 0.5) + 4
        << "\" text-anchor=\"end\">" << escape(labels[r]) << "</text>\n";
    out << "<text x=\"" << x0 + side * (r + 0.5) << "\" y=\"" << y0 + side * n + 15
        << "\" text-anchor=\"middle\">" << escape(labels[r]) << "</text>\n";
    for (std::size_t c = 0; c < labels.size(); ++c) {
      const double v = values[r][c];
      const double t = std::clamp(v / 2.0, -1.0, 1.0);
      const int red = t < 0 ? 255 : static_cast<int>(255 * (1 - t));
      const int blue = t > 0 ? 255 : static_cast<int>(255 * (1 + t));
      const int green = static_cast<int>(255 * (1 - std::abs(t)));
      out << "<rect class=\"cell\" x=\"" << x0 + side * c << "\" y=\"" << y0 + side * r
          << "\" width=\"" << side << "\" height=\"" << side << "\" fill=\"rgb(" << red << ','
          << green << ',' << blue << ")\" data-row=\"" << escape(labels[r]) << "\" data-col=\""
          << escape(labels[c]) << "\" data-value=\"" << format_value(v) << "\"/>\n";
      out << "<text x=\"" << x0 + side * (c + 0.5) << "\" y=\"" << y0 + side * (r + 0.5) + 4
          << "\" text-anchor=\"middle\">" << format_value(std::round(v * 100) / 100) << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

void tag_behavior(const env::EpisodeLog& log, const std::array<std::string, 2>& seat_methods,
                  std::vector<TaggedBehavior>& out) {
  const auto stats = behavior_stats(log);
  for (int p = 0; p < 2; ++p) {
    out.push_back({seat_methods[p], log.header.layout, stats.movement_fraction[p],
                   stats.pot_preference_diff[p]});
  }
}

std::vector<BehaviorRow> behavior_rows(const std::vector<TaggedBehavior>& samples) {
  std::set<std::string> methods, layouts;
  for (const auto& s : samples) {
    methods.insert(s.method);
    layouts.insert(s.layout);
  }
  std::vector<BehaviorRow> rows;
  for (const auto& m : methods) {
    for (const auto& l : layouts) {
      BehaviorRow row{m, l, 0, 0.0, std::nullopt};
      double move = 0.0, pot = 0.0;
      int pot_n = 0;
      for (const auto& s : samples) {
        if (s.method != m || s.layout != l) continue;
        ++row.samples;
        move += s.movement_fraction;
        if (s.pot_preference_diff) {
          pot += *s.pot_preference_diff;
          ++pot_n;
        }
      }
      if (row.samples > 0) row.movement_mean = move / row.samples;
      if (pot_n > 0) row.pot_diff_mean = pot / pot_n;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string behavior_csv(const std::vector<BehaviorRow>& rows) {
  std::ostringstream out;
  out << "method,layout,samples,movement_fraction,pot_preference_diff\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.layout << ',' << r.samples << ',' << format_value(r.movement_mean)
        << ',' << (r.pot_diff_mean ? format_value(*r.pot_diff_mean) : "NA") << '\n';
  }
  return out.str();
}

}  // namespace fcp::evaluation
