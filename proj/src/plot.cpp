#include "acrl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace acrl {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

struct Curve {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

std::string color_for(const std::string& method) {
  if (method == "td0") return "#1f77b4";
  if (method == "gtd") return "#ff7f0e";
  if (method == "agtd") return "#2ca02c";
  return "#7f7f7f";
}

std::string label_for(const std::string& method) {
  try {
    return display_name(parse_critic_method(method));
  } catch (const ConfigError&) {
    return method;
  }
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

/// Round tick spacing covering [lo, hi] with about five intervals.
double tick_step(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

void write_svg(const fs::path& path, const std::string& title, const std::string& ylabel,
               const std::vector<Curve>& curves, const double* marker) {
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const Curve& c : curves)
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      xmin = std::min(xmin, c.x[i]);
      xmax = std::max(xmax, c.x[i]);
      ymin = std::min(ymin, c.y[i]);
      ymax = std::max(ymax, c.y[i]);
    }
  if (marker) {
    ymin = std::min(ymin, *marker);
    ymax = std::max(ymax, *marker);
  }
  if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << title << "</text>\n";

  const double xs = tick_step(xmin, xmax);
  for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-9; t += xs)
    svg << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px(t))
        << "\" y2=\"" << num(kTop + ph) << "\" stroke=\"#e6e6e6\"/>\n"
        << "<text x=\"" << num(px(t)) << "\" y=\"" << num(kTop + ph + 18)
        << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  const double ys = tick_step(ymin, ymax);
  for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-9; t += ys)
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(kLeft + pw)
        << "\" y2=\"" << num(py(t)) << "\" stroke=\"#e6e6e6\"/>\n"
        << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(t) + 4)
        << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";

  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n"
      << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 16)
      << "\" text-anchor=\"middle\">actor updates</text>\n"
      << "<text transform=\"translate(20," << num(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel << "</text>\n";

  if (marker)
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(*marker)) << "\" x2=\""
        << num(kLeft + pw) << "\" y2=\"" << num(py(*marker))
        << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";

  for (const Curve& c : curves) {
    svg << "<polyline fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < c.x.size(); ++i)
      svg << (i ? " " : "") << num(px(c.x[i])) << ',' << num(py(c.y[i]));
    svg << "\"/>\n";
  }

  double ly = kTop + 10;
  for (const Curve& c : curves) {
    svg << "<line x1=\"" << num(kLeft + pw + 15) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(kLeft + pw + 40) << "\" y2=\"" << num(ly) << "\" stroke=\"" << c.color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << num(kLeft + pw + 46) << "\" y=\"" << num(ly + 4) << "\">" << c.label
        << "</text>\n";
    ly += 20;
  }
  if (marker)
    svg << "<line x1=\"" << num(kLeft + pw + 15) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(kLeft + pw + 40) << "\" y2=\"" << num(ly)
        << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n"
        << "<text x=\"" << num(kLeft + pw + 46) << "\" y=\"" << num(ly + 4) << "\">solved ("
        << tick_label(*marker) << ")</text>\n";
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << svg.str();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::vector<fs::path> emit_plots(const std::map<std::string, std::vector<AggregateRow>>& series,
                                 const fs::path& out) {
  if (series.empty()) throw ConfigError("no methods to plot");
  std::vector<Curve> proxy, reward;
  for (const auto& [method, rows] : series) {
    Curve p{label_for(method), color_for(method), {}, {}};
    Curve r = p;
    for (const AggregateRow& a : rows) {
      p.x.push_back(static_cast<double>(a.k));
      p.y.push_back(a.grad_proxy_mean);
      r.x.push_back(static_cast<double>(a.k));
      r.y.push_back(a.eval_reward_mean);
    }
    proxy.push_back(std::move(p));
    reward.push_back(std::move(r));
  }
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create directory " + out.string());
  const fs::path a = out / "grad_proxy.svg";
  const fs::path b = out / "eval_reward.svg";
  const double solved = -180.0;
  write_svg(a, "Gradient norm estimate", "gradient norm proxy", proxy, nullptr);
  write_svg(b, "Average evaluation reward", "accumulated reward", reward, &solved);
  return {a, b};
}

}  // namespace acrl
