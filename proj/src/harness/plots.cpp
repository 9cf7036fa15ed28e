#include "vsglab/harness/plots.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "vsglab/errors.hpp"
#include "vsglab/text_io.hpp"

namespace vsglab::harness {
namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 180.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Series {
  std::string label;
  std::vector<double> t;
  std::vector<double> y;
  bool dashed = false;
};

double value(const RunRow& r, Channel c, bool reference) {
  if (c == Channel::kP) return reference ? r.p_set : r.p_out;
  return reference ? r.q_set : r.q_out;
}

Series extract(const RunRecord& rec, Channel c, bool reference, double t0, double t1, const std::string& label) {
  std::vector<std::size_t> in_window;
  for (std::size_t i = 0; i < rec.rows.size(); ++i) {
    if (rec.rows[i].time >= t0 && rec.rows[i].time <= t1) in_window.push_back(i);
  }
  Series s;
  s.label = label;
  s.dashed = reference;
  for (auto k : downsample_indices(in_window.size())) {
    const auto& row = rec.rows[in_window[k]];
    s.t.push_back(row.time);
    s.y.push_back(value(row, c, reference));
  }
  return s;
}

std::string render(const std::vector<Series>& series, const std::string& title, const std::string& y_label) {
  double t_lo = 1e300, t_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  for (const auto& s : series) {
    for (double t : s.t) t_lo = std::min(t_lo, t), t_hi = std::max(t_hi, t);
    for (double y : s.y) y_lo = std::min(y_lo, y), y_hi = std::max(y_hi, y);
  }
  if (!(t_hi > t_lo)) t_hi = t_lo + 1.0;
  if (!(y_hi > y_lo)) y_lo -= 1.0, y_hi += 1.0;
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double t) { return kLeft + (t - t_lo) / (t_hi - t_lo) * pw; };
  auto sy = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * ph; };
  auto num = [](double v) {
    std::ostringstream o;
    o.precision(6);
    o << v;
    return o.str();
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"15\">" << title << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double t = t_lo + (t_hi - t_lo) * i / 5.0;
    const double y = y_lo + (y_hi - y_lo) * i / 5.0;
    svg << "<line x1=\"" << sx(t) << "\" y1=\"" << kTop << "\" x2=\"" << sx(t) << "\" y2=\"" << kTop + ph
        << "\" stroke=\"#eee\"/>\n";
    svg << "<text x=\"" << sx(t) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << sy(y) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << sy(y)
        << "\" stroke=\"#eee\"/>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << sy(y) + 4 << "\" text-anchor=\"end\">" << num(y) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">time [s]</text>\n";
  svg << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" transform=\"rotate(-90 18 " << kTop + ph / 2
      << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";

  std::size_t color = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* stroke = s.dashed ? "#000000" : kPalette[color++ % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.2\""
        << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    for (std::size_t k = 0; k < s.t.size(); ++k) {
      if (k) svg << ' ';
      svg << num(sx(s.t[k])) << ',' << num(sy(s.y[k]));
    }
    svg << "\"/>\n";
    const double ly = kTop + 16.0 + 18.0 * static_cast<double>(i);
    svg << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + pw + 36 << "\" y2=\""
        << ly - 4 << "\" stroke=\"" << stroke << "\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    svg << "<text x=\"" << kLeft + pw + 42 << "\" y=\"" << ly << "\">" << s.label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

// Time of the first reference change of the channel, or of either channel.
double first_step_time(const RunRecord& rec, Channel c) {
  for (std::size_t i = 1; i < rec.rows.size(); ++i) {
    if (value(rec.rows[i], c, true) != value(rec.rows[i - 1], c, true)) return rec.rows[i].time;
  }
  const Channel other = c == Channel::kP ? Channel::kQ : Channel::kP;
  for (std::size_t i = 1; i < rec.rows.size(); ++i) {
    if (value(rec.rows[i], other, true) != value(rec.rows[i - 1], other, true)) return rec.rows[i].time;
  }
  return rec.rows.front().time;
}

}  // namespace

std::vector<std::size_t> downsample_indices(std::size_t n, std::size_t max_points) {
  std::vector<std::size_t> idx;
  if (n == 0) return idx;
  const std::size_t m = std::min(n, std::max<std::size_t>(max_points, 2));
  if (m == n) {
    idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
  }
  idx.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    idx.push_back(static_cast<std::size_t>(std::llround(static_cast<double>(j) * static_cast<double>(n - 1) /
                                                        static_cast<double>(m - 1))));
  }
  return idx;
}

std::vector<std::string> emit_plots(const std::vector<const RunRecord*>& records,
                                    const std::vector<Channel>& channels, const std::string& dir) {
  std::vector<std::string> written;
  if (channels.empty()) return written;
  if (records.empty() || records.front()->rows.empty()) throw InvalidParams("no records to plot");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir);

  const RunRecord& first = *records.front();
  const double t_begin = first.rows.front().time;
  const double t_finish = first.rows.back().time;

  for (Channel c : channels) {
    const std::string unit = c == Channel::kP ? "active power [W]" : "reactive power [var]";
    const double t_step = first_step_time(first, c);
    const std::pair<double, double> views[] = {{t_begin, t_finish},
                                               {std::max(t_begin, t_step - 0.25), std::min(t_finish, t_step + 2.0)}};
    const char* suffixes[] = {"full", "zoom"};
    for (int v = 0; v < 2; ++v) {
      std::vector<Series> series;
      for (const RunRecord* rec : records) {
        series.push_back(extract(*rec, c, false, views[v].first, views[v].second, rec->name));
      }
      series.push_back(extract(first, c, true, views[v].first, views[v].second,
                               std::string(channel_name(c)) + " reference"));
      const std::string title = std::string(channel_name(c)) + (v == 0 ? " response" : " response (zoomed)");
      const auto path = (std::filesystem::path(dir) / (std::string(channel_name(c)) + "_" + suffixes[v] + ".svg")).string();
      text::write_file(path, render(series, title, unit));
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace vsglab::harness
