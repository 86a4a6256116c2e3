#include "hemobnn/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "hemobnn/errors.hpp"

namespace hemobnn::svg {
namespace {

constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;
constexpr int kTicks = 5;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  return s == "-0.00" ? "0.00" : s;
}

std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
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

struct Range {
  double lo, hi;
};

Range pad_range(double lo, double hi) {
  if (!(lo < hi)) {
    const double d = std::abs(lo) > 0 ? 0.5 * std::abs(lo) : 0.5;
    return {lo - d, hi + d};
  }
  return {lo, hi};
}

class Frame {
 public:
  Frame(const PlotSpec& spec, Range x, Range y) : spec_(spec), x_(x), y_(y) {}

  double px(double v) const {
    return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (spec_.width - kLeft - kRight);
  }
  double py(double v) const {
    return spec_.height - kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (spec_.height - kTop - kBottom);
  }

  void open(std::ostringstream& os) const {
    const double w = spec_.width, h = spec_.height;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
       << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << num(w) << "\" height=\"" << num(h) << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(spec_.title) << "</text>\n";
    const double x0 = kLeft, x1 = w - kRight, y0 = h - kBottom, y1 = kTop;
    os << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
    os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y0) << "\"/>\n";
    os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y1) << "\"/>\n";
    os << "</g>\n<g class=\"ticks\">\n";
    for (int i = 0; i <= kTicks; ++i) {
      const double xv = x_.lo + (x_.hi - x_.lo) * i / kTicks;
      const double yv = y_.lo + (y_.hi - y_.lo) * i / kTicks;
      os << "<line x1=\"" << num(px(xv)) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(px(xv)) << "\" y2=\""
         << num(y0 + 5) << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(y0 + 18) << "\" text-anchor=\"middle\">"
         << tick_label(xv) << "</text>\n";
      os << "<line x1=\"" << num(x0 - 5) << "\" y1=\"" << num(py(yv)) << "\" x2=\"" << num(x0) << "\" y2=\""
         << num(py(yv)) << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">"
         << tick_label(yv) << "</text>\n";
    }
    os << "</g>\n";
    os << "<text class=\"x-label\" x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(h - 12)
       << "\" text-anchor=\"middle\">" << escape(spec_.x_label) << "</text>\n";
    os << "<text class=\"y-label\" x=\"16\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << num((y0 + y1) / 2) << ")\">" << escape(spec_.y_label) << "</text>\n";
  }

  void legend(std::ostringstream& os, const std::vector<std::pair<std::string, std::string>>& entries) const {
    double y = kTop + 8;
    const double x = spec_.width - kRight - 150;
    for (const auto& [name, color] : entries) {
      os << "<line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x + 20) << "\" y2=\"" << num(y)
         << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << num(x + 26) << "\" y=\"" << num(y + 4) << "\">" << escape(name) << "</text>\n";
      y += 16;
    }
  }

 private:
  const PlotSpec& spec_;
  Range x_, y_;
};

Range data_range(const std::vector<Series>& series, bool use_x) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series)
    for (double v : use_x ? s.x : s.y)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  return pad_range(lo, hi);
}

}  // namespace

const std::string& palette(std::size_t i) {
  static const std::array<std::string, 6> colors = {"#1f77b4", "#d62728", "#2ca02c",
                                                    "#ff7f0e", "#9467bd", "#7f7f7f"};
  return colors[i % colors.size()];
}

std::string line_plot(const PlotSpec& spec, const std::vector<Series>& series) {
  for (const auto& s : series)
    if (s.x.size() != s.y.size())
      fail(ErrorCode::kDimensionMismatch, "series '" + s.name + "' has mismatched x/y lengths");
  const Range xr = spec.x_min < spec.x_max ? Range{spec.x_min, spec.x_max} : data_range(series, true);
  const Range yr = spec.y_min < spec.y_max ? Range{spec.y_min, spec.y_max} : data_range(series, false);
  Frame frame(spec, xr, yr);
  std::ostringstream os;
  frame.open(os);
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& s : series) {
    os << "<polyline class=\"series\" data-name=\"" << escape(s.name) << "\" fill=\"none\" stroke=\"" << s.color
       << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (i) os << ' ';
      os << num(frame.px(s.x[i])) << ',' << num(frame.py(s.y[i]));
    }
    os << "\"/>\n";
    entries.emplace_back(s.name, s.color);
  }
  frame.legend(os, entries);
  os << "</svg>\n";
  return os.str();
}

std::string histogram(const PlotSpec& spec, const std::vector<HistogramSeries>& series, std::size_t n_bins) {
  if (n_bins == 0) fail(ErrorCode::kInvalidArgument, "histogram needs at least one bin");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series)
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  const Range xr = pad_range(lo, hi);
  const double width = (xr.hi - xr.lo) / static_cast<double>(n_bins);

  std::vector<std::vector<double>> counts;
  double peak = 0.0;
  for (const auto& s : series) {
    std::vector<double> c(n_bins, 0.0);
    for (double v : s.values) {
      auto b = static_cast<std::size_t>((v - xr.lo) / width);
      c[std::min(b, n_bins - 1)] += 1.0;
    }
    peak = std::max(peak, *std::max_element(c.begin(), c.end()));
    counts.push_back(std::move(c));
  }
  Frame frame(spec, xr, {0.0, peak > 0 ? peak * 1.1 : 1.0});
  std::ostringstream os;
  frame.open(os);
  std::vector<std::pair<std::string, std::string>> entries;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    os << "<polyline class=\"histogram\" data-name=\"" << escape(s.name) << "\" fill=\"" << s.color
       << "\" fill-opacity=\"0.25\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    os << num(frame.px(xr.lo)) << ',' << num(frame.py(0.0));
    for (std::size_t b = 0; b < n_bins; ++b) {
      const double x0 = xr.lo + width * static_cast<double>(b);
      const double x1 = b + 1 == n_bins ? xr.hi : x0 + width;
      os << ' ' << num(frame.px(x0)) << ',' << num(frame.py(counts[k][b]));
      os << ' ' << num(frame.px(x1)) << ',' << num(frame.py(counts[k][b]));
    }
    os << ' ' << num(frame.px(xr.hi)) << ',' << num(frame.py(0.0)) << "\"/>\n";
    entries.emplace_back(s.name, s.color);
  }
  frame.legend(os, entries);
  os << "</svg>\n";
  return os.str();
}

std::string elbo_plot(const std::vector<double>& trace) {
  Series s{"ELBO", {}, trace, palette(0)};
  for (std::size_t i = 0; i < trace.size(); ++i) s.x.push_back(static_cast<double>(i + 1));
  return line_plot({"ELBO over iterations", "iteration", "ELBO"}, {s});
}

std::string roc_plot(const std::vector<double>& fpr, const std::vector<double>& tpr, double auc) {
  char name[64];
  std::snprintf(name, sizeof name, "BNN (AUC %.3f)", auc);
  Series model{name, fpr, tpr, palette(0)};
  Series diagonal{"No-skill (AUC 0.5)", {0.0, 1.0}, {0.0, 1.0}, palette(5), true};
  PlotSpec spec{"ROC curve", "false positive rate", "true positive rate", 480.0, 480.0, 0.0, 1.0, 0.0, 1.0};
  return line_plot(spec, {model, diagonal});
}

std::string trace_histogram(std::size_t weight_index, const std::vector<HistogramSeries>& series,
                            std::size_t n_bins) {
  PlotSpec spec{"Posterior samples of weight " + std::to_string(weight_index), "weight value", "count"};
  return histogram(spec, series, n_bins);
}

}  // namespace hemobnn::svg
