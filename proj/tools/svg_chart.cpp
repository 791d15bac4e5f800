#include "svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace trustsched::tools {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 30;
constexpr double kBottom = 60;

struct Frame {
  double x_min, x_max, y_min, y_max;

  double px(double x) const {
    return kLeft + (x - x_min) / (x_max - x_min) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - y_min) / (y_max - y_min) * (kHeight - kTop - kBottom);
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void open_svg(std::ostringstream& os) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" "
     << "font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void axes(std::ostringstream& os, const Frame& f, const char* x_title, const char* y_title) {
  const double x0 = f.px(f.x_min), x1 = f.px(f.x_max);
  const double y0 = f.py(f.y_min), y1 = f.py(f.y_max);
  os << "<g stroke=\"black\" fill=\"none\">\n"
     << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0)
     << "\" height=\"" << num(y0 - y1) << "\"/>\n</g>\n";
  os << "<g fill=\"black\">\n";
  for (int t = 0; t <= 5; ++t) {
    const double xv = f.x_min + (f.x_max - f.x_min) * t / 5.0;
    const double yv = f.y_min + (f.y_max - f.y_min) * t / 5.0;
    os << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << num(y0 + 18)
       << "\" text-anchor=\"middle\">" << label(xv) << "</text>\n";
    os << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(f.py(yv) + 4)
       << "\" text-anchor=\"end\">" << label(yv) << "</text>\n";
  }
  os << "<text x=\"" << num(0.5 * (x0 + x1)) << "\" y=\"" << num(kHeight - 15)
     << "\" text-anchor=\"middle\">" << x_title << "</text>\n";
  os << "<text x=\"18\" y=\"" << num(0.5 * (y0 + y1)) << "\" text-anchor=\"middle\" "
     << "transform=\"rotate(-90 18 " << num(0.5 * (y0 + y1)) << ")\">" << y_title << "</text>\n";
  os << "</g>\n";
}

void legend_entry(std::ostringstream& os, int slot, const char* color, const char* text,
                  bool filled) {
  const double x = kWidth - kRight + 15;
  const double y = kTop + 10 + 22 * slot;
  if (filled) {
    os << "<rect x=\"" << x << "\" y=\"" << y - 10 << "\" width=\"14\" height=\"14\" fill=\""
       << color << "\" fill-opacity=\"0.5\"/>\n";
  } else {
    os << "<line x1=\"" << x << "\" y1=\"" << y - 3 << "\" x2=\"" << x + 14 << "\" y2=\"" << y - 3
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
  }
  os << "<text x=\"" << x + 20 << "\" y=\"" << y + 2 << "\">" << text << "</text>\n";
}

}  // namespace

std::string render_sweep_svg(const std::vector<SweepRow>& rows) {
  std::map<double, std::vector<const SweepRow*>> columns;
  for (const auto& r : rows) columns[r.x].push_back(&r);
  std::vector<double> xs;
  for (const auto& [x, _] : columns) xs.push_back(x);

  const double x_step = xs.size() > 1 ? xs[1] - xs[0] : 1.0;
  Frame f{0.0, std::max(1.0, xs.empty() ? 1.0 : xs.back()), 0.0, 1.0};

  std::ostringstream os;
  open_svg(os);

  struct Series {
    bool SweepRow::*flag;
    const char* color;
  };
  const Series series[] = {{&SweepRow::ic_mt, "#1f77b4"}, {&SweepRow::ic_bt, "#ff7f0e"}};
  for (const auto& s : series) {
    os << "<g fill=\"" << s.color << "\" fill-opacity=\"0.5\" stroke=\"none\">\n";
    for (const auto& [x, col] : columns) {
      const double b_step = col.size() > 1 ? col[1]->b - col[0]->b : 1.0;
      std::size_t m = 0;
      while (m < col.size()) {
        if (!(col[m]->*s.flag)) {
          ++m;
          continue;
        }
        const std::size_t first = m;
        while (m + 1 < col.size() && col[m + 1]->*s.flag) ++m;
        const double b_lo = std::max(0.0, col[first]->b - 0.5 * b_step);
        const double b_hi = std::min(1.0, col[m]->b + 0.5 * b_step);
        const double x_lo = std::max(f.x_min, x - 0.5 * x_step);
        const double x_hi = std::min(f.x_max, x + 0.5 * x_step);
        os << "<rect x=\"" << num(f.px(x_lo)) << "\" y=\"" << num(f.py(b_hi)) << "\" width=\""
           << num(f.px(x_hi) - f.px(x_lo)) << "\" height=\"" << num(f.py(b_lo) - f.py(b_hi))
           << "\"/>\n";
        ++m;
      }
    }
    os << "</g>\n";
  }
  axes(os, f, "error rate x", "punishment b");
  legend_entry(os, 0, series[0].color, "MeasuredTrust", true);
  legend_entry(os, 1, series[1].color, "BlindTrust", true);
  os << "</svg>\n";
  return os.str();
}

std::string render_curve_svg(const std::vector<CurveRow>& rows) {
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -y_min;
  double x_max = 0.0;
  auto see = [&](const std::optional<double>& v) {
    if (v) {
      y_min = std::min(y_min, *v);
      y_max = std::max(y_max, *v);
    }
  };
  for (const auto& r : rows) {
    see(r.et_mt);
    see(r.et_bt);
    see(r.et_fcfs);
    see(r.et_scf);
    x_max = std::max(x_max, r.x);
  }
  if (!std::isfinite(y_min)) {
    y_min = 0.0;
    y_max = 1.0;
  }
  const double pad = std::max(1e-6, 0.05 * (y_max - y_min));
  Frame f{0.0, x_max > 0.0 ? x_max : 1.0, std::max(0.0, y_min - pad), y_max + pad};

  std::ostringstream os;
  open_svg(os);

  struct Series {
    std::optional<double> CurveRow::*value;
    double CurveRow::*baseline;
    const char* color;
    const char* name;
  };
  const Series series[] = {
      {&CurveRow::et_mt, nullptr, "#1f77b4", "MeasuredTrust"},
      {&CurveRow::et_bt, nullptr, "#ff7f0e", "BlindTrust"},
      {nullptr, &CurveRow::et_fcfs, "#2ca02c", "FCFS"},
      {nullptr, &CurveRow::et_scf, "#d62728", "SCF"},
  };
  int slot = 0;
  for (const auto& s : series) {
    // Absent values break the polyline into segments.
    std::vector<std::vector<std::pair<double, double>>> segments(1);
    for (const auto& r : rows) {
      std::optional<double> v = s.value ? r.*(s.value) : std::optional<double>(r.*(s.baseline));
      if (v) {
        segments.back().emplace_back(f.px(r.x), f.py(*v));
      } else if (!segments.back().empty()) {
        segments.emplace_back();
      }
    }
    os << "<g class=\"series\" data-name=\"" << s.name << "\" stroke=\"" << s.color
       << "\" stroke-width=\"2\" fill=\"none\">\n";
    for (const auto& seg : segments) {
      if (seg.empty()) continue;
      os << "<polyline points=\"";
      for (const auto& [x, y] : seg) os << num(x) << ',' << num(y) << ' ';
      os << "\"/>\n";
    }
    os << "</g>\n";
    legend_entry(os, slot++, s.color, s.name, false);
  }
  axes(os, f, "error rate x", "mean response time");
  os << "</svg>\n";
  return os.str();
}

}  // namespace trustsched::tools
