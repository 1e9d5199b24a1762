#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uwb/types.hpp"

namespace uwb {

/// %.{digits}g formatting; 17 digits round-trips a double, 18 our Seconds.
std::string format_sig(long double value, int digits = 17);
std::string format_sig(double value, int digits = 17);

/// Metadata written as leading `# key: value` lines of every output file.
struct OutputHeader {
  std::string tool = "dtdoa";
  std::string version = UWB_DTDOA_VERSION;
  std::string command;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::vector<std::pair<std::string, std::string>> config;

  OutputHeader& set(std::string key, std::string value);
  OutputHeader& set(std::string key, double value);
  void write(std::ostream& out, std::string_view comment = "#") const;
};

/// Writes `content` to path, creating parent directories. Throws Io.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Histogram over [lo, hi] with `bins` equal-width bins; lo == hi yields a
/// single zero-width bin holding every sample.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};
Histogram make_histogram(std::span<const double> samples, std::size_t bins);

// Self-contained SVG documents.
namespace svg {

struct BarSeries {
  std::string name;
  std::vector<double> values;
};

std::string bar_chart(std::string_view title, std::span<const std::string> categories,
                      std::span<const BarSeries> series, std::string_view y_label);

struct HistogramPanel {
  std::string title;
  Histogram histogram;
  double reference_sigma = 0.0;  // draws a normal density overlay when > 0
  std::size_t sample_count = 0;
};

std::string histograms(std::string_view title, std::span<const HistogramPanel> panels);

struct Heatmap {
  double x0 = 0, y0 = 0, dx = 1, dy = 1;
  std::size_t nx = 0, ny = 0;
  std::vector<double> values;  // row-major (y outer); NaN cells drawn grey
};

std::string heatmap(std::string_view title, const Heatmap& map, std::span<const Point> markers);

std::string track(std::string_view title, std::span<const Point> planned,
                  std::span<const Point> fixes, std::span<const Point> anchors);

}  // namespace svg

}  // namespace uwb
