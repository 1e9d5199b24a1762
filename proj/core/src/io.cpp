#include "uwb/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "uwb/error.hpp"

namespace uwb {

std::string format_sig(long double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*Lg", digits, value);
  return buf;
}

std::string format_sig(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

OutputHeader& OutputHeader::set(std::string key, std::string value) {
  config.emplace_back(std::move(key), std::move(value));
  return *this;
}

OutputHeader& OutputHeader::set(std::string key, double value) {
  return set(std::move(key), format_sig(value));
}

void OutputHeader::write(std::ostream& out, std::string_view comment) const {
  out << comment << " tool: " << tool << '\n';
  out << comment << " version: " << version << '\n';
  if (!command.empty()) out << comment << " command: " << command << '\n';
  if (has_seed) out << comment << " seed: " << seed << '\n';
  for (const auto& [k, v] : config) out << comment << ' ' << k << ": " << v << '\n';
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

Histogram make_histogram(std::span<const double> samples, std::size_t bins) {
  Histogram h;
  if (samples.empty() || bins == 0) return h;
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (lo == hi) {
    h.edges = {lo, hi};
    h.counts = {samples.size()};
    return h;
  }
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) {
    h.edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
  }
  h.counts.assign(bins, 0);
  for (double s : samples) {
    auto k = static_cast<std::size_t>((s - lo) / (hi - lo) * static_cast<double>(bins));
    h.counts[std::min(k, bins - 1)]++;
  }
  return h;
}

namespace svg {
namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 420;
constexpr double kMargin = 60;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

std::string num(double v) { return format_sig(v, 6); }

std::string escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

void open(std::ostringstream& os, double w, double h, std::string_view title) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\" font-family=\"sans-serif\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << num(w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
     << escape(title) << "</text>\n";
}

struct Frame {
  double x0, y0, w, h;           // plot area in pixels
  double xmin, xmax, ymin, ymax; // data bounds
  [[nodiscard]] double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
  [[nodiscard]] double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

void axes(std::ostringstream& os, const Frame& f) {
  os << "<rect x=\"" << num(f.x0) << "\" y=\"" << num(f.y0) << "\" width=\"" << num(f.w)
     << "\" height=\"" << num(f.h) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = f.ymin + (f.ymax - f.ymin) * k / 4.0;
    const double x = f.xmin + (f.xmax - f.xmin) * k / 4.0;
    os << "<text x=\"" << num(f.x0 - 6) << "\" y=\"" << num(f.py(y) + 4)
       << "\" text-anchor=\"end\" font-size=\"10\">" << num(y) << "</text>\n";
    os << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(f.y0 + f.h + 14)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << num(x) << "</text>\n";
  }
}

Frame fit_points(std::span<const Point> a, std::span<const Point> b, std::span<const Point> c) {
  double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
  double xmax = -xmin, ymax = -xmin;
  for (auto pts : {a, b, c}) {
    for (const Point& p : pts) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  if (!(xmax > xmin)) { xmin -= 1; xmax += 1; }
  if (!(ymax > ymin)) { ymin -= 1; ymax += 1; }
  const double pad = 0.05 * std::max(xmax - xmin, ymax - ymin);
  return {kMargin, kMargin, kWidth - 2 * kMargin, kHeight - 2 * kMargin,
          xmin - pad, xmax + pad, ymin - pad, ymax + pad};
}

}  // namespace

std::string bar_chart(std::string_view title, std::span<const std::string> categories,
                      std::span<const BarSeries> series, std::string_view y_label) {
  std::ostringstream os;
  open(os, kWidth, kHeight, title);
  double ymax = 0;
  for (const BarSeries& s : series) {
    for (double v : s.values) {
      if (std::isfinite(v)) ymax = std::max(ymax, v);
    }
  }
  if (!(ymax > 0)) ymax = 1;
  const Frame f{kMargin, kMargin, kWidth - 2 * kMargin, kHeight - 2 * kMargin, 0,
                static_cast<double>(std::max<std::size_t>(categories.size(), 1)), 0, ymax * 1.1};
  os << "<rect x=\"" << num(f.x0) << "\" y=\"" << num(f.y0) << "\" width=\"" << num(f.w)
     << "\" height=\"" << num(f.h) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = f.ymax * k / 4.0;
    os << "<text x=\"" << num(f.x0 - 6) << "\" y=\"" << num(f.py(y) + 4)
       << "\" text-anchor=\"end\" font-size=\"10\">" << num(y) << "</text>\n";
  }
  os << "<text x=\"16\" y=\"" << num(f.y0 + f.h / 2) << "\" font-size=\"11\" transform=\"rotate(-90 16 "
     << num(f.y0 + f.h / 2) << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
  const double group_w = f.w / f.xmax;
  const double bar_w = group_w * 0.8 / static_cast<double>(std::max<std::size_t>(series.size(), 1));
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = f.x0 + group_w * static_cast<double>(c) + group_w * 0.1;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double v = c < series[s].values.size() ? series[s].values[c] : 0.0;
      if (!std::isfinite(v)) continue;
      const double top = f.py(v);
      os << "<rect x=\"" << num(gx + bar_w * static_cast<double>(s)) << "\" y=\"" << num(top)
         << "\" width=\"" << num(bar_w) << "\" height=\"" << num(f.y0 + f.h - top) << "\" fill=\""
         << kPalette[s % 6] << "\"/>\n";
    }
    os << "<text x=\"" << num(gx + group_w * 0.4) << "\" y=\"" << num(f.y0 + f.h + 14)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << escape(categories[c]) << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double ly = 40 + 14 * static_cast<double>(s);
    os << "<rect x=\"" << num(kWidth - 150) << "\" y=\"" << num(ly - 9) << "\" width=\"10\" height=\"10\" fill=\""
       << kPalette[s % 6] << "\"/><text x=\"" << num(kWidth - 135) << "\" y=\"" << num(ly)
       << "\" font-size=\"11\">" << escape(series[s].name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string histograms(std::string_view title, std::span<const HistogramPanel> panels) {
  const double panel_w = 420;
  const double w = panel_w * static_cast<double>(std::max<std::size_t>(panels.size(), 1));
  std::ostringstream os;
  open(os, w, kHeight, title);
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const HistogramPanel& panel = panels[p];
    const Histogram& h = panel.histogram;
    const double ox = panel_w * static_cast<double>(p);
    os << "<text x=\"" << num(ox + panel_w / 2) << "\" y=\"46\" text-anchor=\"middle\" font-size=\"12\">"
       << escape(panel.title) << "</text>\n";
    if (h.counts.empty()) continue;
    double lo = h.edges.front(), hi = h.edges.back();
    if (!(hi > lo)) { lo -= 1e-12; hi += 1e-12; }
    std::size_t cmax = *std::max_element(h.counts.begin(), h.counts.end());
    const double width = (hi - lo) / static_cast<double>(h.counts.size());
    double dmax = static_cast<double>(cmax) / (static_cast<double>(panel.sample_count) * width);
    if (panel.reference_sigma > 0) {
      dmax = std::max(dmax, 1.0 / (panel.reference_sigma * std::sqrt(2 * M_PI)));
    }
    const Frame f{ox + kMargin, kMargin, panel_w - 1.5 * kMargin, kHeight - 2 * kMargin, lo, hi, 0, dmax * 1.1};
    axes(os, f);
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
      const double dens = static_cast<double>(h.counts[k]) / (static_cast<double>(panel.sample_count) * width);
      const double x0 = f.px(h.edges[k]);
      const double x1 = h.edges.size() > k + 1 ? f.px(h.edges[k + 1]) : x0 + 1;
      os << "<rect x=\"" << num(x0) << "\" y=\"" << num(f.py(dens)) << "\" width=\""
         << num(std::max(x1 - x0, 1.0)) << "\" height=\"" << num(f.y0 + f.h - f.py(dens))
         << "\" fill=\"#9ecae1\" stroke=\"#3182bd\" stroke-width=\"0.5\"/>\n";
    }
    if (panel.reference_sigma > 0) {
      os << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\"";
      for (int k = 0; k <= 200; ++k) {
        const double x = lo + (hi - lo) * k / 200.0;
        const double s = panel.reference_sigma;
        const double d = std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2 * M_PI));
        os << num(f.px(x)) << ',' << num(f.py(d)) << ' ';
      }
      os << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string heatmap(std::string_view title, const Heatmap& map, std::span<const Point> markers) {
  std::ostringstream os;
  open(os, kWidth, kHeight, title);
  const double xmax = map.x0 + map.dx * static_cast<double>(map.nx);
  const double ymax = map.y0 + map.dy * static_cast<double>(map.ny);
  const double side = std::min(kWidth - 2 * kMargin - 80, kHeight - 2 * kMargin);
  const double aspect = (xmax - map.x0) / (ymax - map.y0);
  const double w = aspect >= 1 ? side : side * aspect;
  const double h = aspect >= 1 ? side / aspect : side;
  const Frame f{kMargin, kMargin, w, h, map.x0, xmax, map.y0, ymax};
  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  for (double v : map.values) {
    if (std::isfinite(v)) { vmin = std::min(vmin, v); vmax = std::max(vmax, v); }
  }
  if (!(vmax > vmin)) vmax = vmin + 1;
  for (std::size_t iy = 0; iy < map.ny; ++iy) {
    for (std::size_t ix = 0; ix < map.nx; ++ix) {
      const double v = map.values[iy * map.nx + ix];
      std::string fill = "#bbbbbb";
      if (std::isfinite(v)) {
        const double t = std::clamp((v - vmin) / (vmax - vmin), 0.0, 1.0);
        const int r = static_cast<int>(255 * t);
        const int b = static_cast<int>(255 * (1 - t));
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x40%02x", r, b);
        fill = buf;
      }
      const double x = map.x0 + map.dx * static_cast<double>(ix);
      const double y = map.y0 + map.dy * static_cast<double>(iy + 1);
      os << "<rect x=\"" << num(f.px(x)) << "\" y=\"" << num(f.py(y)) << "\" width=\""
         << num(f.w / static_cast<double>(map.nx) + 0.3) << "\" height=\""
         << num(f.h / static_cast<double>(map.ny) + 0.3) << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  axes(os, f);
  for (const Point& m : markers) {
    os << "<circle cx=\"" << num(f.px(m.x)) << "\" cy=\"" << num(f.py(m.y))
       << "\" r=\"5\" fill=\"white\" stroke=\"black\"/>\n";
  }
  os << "<text x=\"" << num(f.x0 + f.w + 20) << "\" y=\"" << num(f.y0 + 10) << "\" font-size=\"11\">max "
     << num(vmax) << "</text>\n<text x=\"" << num(f.x0 + f.w + 20) << "\" y=\"" << num(f.y0 + f.h)
     << "\" font-size=\"11\">min " << num(vmin) << "</text>\n</svg>\n";
  return os.str();
}

std::string track(std::string_view title, std::span<const Point> planned,
                  std::span<const Point> fixes, std::span<const Point> anchors) {
  std::ostringstream os;
  open(os, kWidth, kHeight, title);
  const Frame f = fit_points(planned, fixes, anchors);
  axes(os, f);
  os << "<polyline fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2\" stroke-dasharray=\"6 4\" points=\"";
  for (const Point& p : planned) os << num(f.px(p.x)) << ',' << num(f.py(p.y)) << ' ';
  os << "\"/>\n";
  for (const Point& p : fixes) {
    os << "<circle cx=\"" << num(f.px(p.x)) << "\" cy=\"" << num(f.py(p.y))
       << "\" r=\"1.5\" fill=\"#1f77b4\"/>\n";
  }
  for (const Point& a : anchors) {
    os << "<rect x=\"" << num(f.px(a.x) - 5) << "\" y=\"" << num(f.py(a.y) - 5)
       << "\" width=\"10\" height=\"10\" fill=\"#d62728\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace svg
}  // namespace uwb
