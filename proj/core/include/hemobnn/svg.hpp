#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hemobnn::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  double width = 640.0;
  double height = 420.0;
  // Fixed axis ranges; when lo >= hi the range comes from the data.
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
};

// Polyline chart with axes, 5 ticks per axis and a legend. Coordinates are
// printed with fixed precision so identical inputs give identical bytes.
std::string line_plot(const PlotSpec& spec, const std::vector<Series>& series);

struct HistogramSeries {
  std::string name;
  std::vector<double> values;
  std::string color = "#1f77b4";
};

// Overlaid step histograms on shared bins spanning all values.
std::string histogram(const PlotSpec& spec, const std::vector<HistogramSeries>& series,
                      std::size_t n_bins = 30);

// The three diagnostic figures written by the command-line tool.
std::string elbo_plot(const std::vector<double>& trace);
// Model ROC against the no-skill diagonal.
std::string roc_plot(const std::vector<double>& fpr, const std::vector<double>& tpr, double auc);
std::string trace_histogram(std::size_t weight_index, const std::vector<HistogramSeries>& series,
                            std::size_t n_bins);

// Default colour cycle.
const std::string& palette(std::size_t i);

}  // namespace hemobnn::svg
