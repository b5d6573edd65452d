#include "kahler/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "kahler/error.hpp"

namespace kahler {

namespace {

nlohmann::ordered_json number(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

std::ofstream open_out(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << std::setprecision(17);
  return out;
}

const Table& find_table(const std::vector<Table>& tables, const std::string& name) {
  for (const auto& t : tables)
    if (t.name == name) return t;
  throw PreconditionError("plot refers to unknown table '" + name + "'");
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

// Data-to-pixel map of the plot frame.
struct Frame {
  double x0, x1, y0, y1;
  bool lx, ly;
  static constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  double fx(double v) const { return lx ? std::log10(v) : v; }
  double fy(double v) const { return ly ? std::log10(v) : v; }
  double px(double v) const { return L + (fx(v) - x0) / (x1 - x0) * (W - L - R); }
  double py(double v) const { return H - B - (fy(v) - y0) / (y1 - y0) * (H - T - B); }
  bool usable(double x, double y) const {
    return std::isfinite(x) && std::isfinite(y) && (!lx || x > 0) && (!ly || y > 0);
  }
};

void widen(double& lo, double& hi) {
  if (!(hi > lo)) {
    const double pad = std::max(1e-12, std::abs(lo) * 0.05 + 0.5);
    lo -= pad;
    hi += pad;
  } else {
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
}

std::string fmt(double v, bool log) {
  std::ostringstream os;
  os << std::setprecision(3) << (log ? std::pow(10.0, v) : v);
  return os.str();
}

}  // namespace

ReportRecord& ReportRecord::set(const std::string& key, double v) {
  for (auto& [k, x] : values)
    if (k == key) {
      x = v;
      return *this;
    }
  values.emplace_back(key, v);
  return *this;
}

double ReportRecord::get(const std::string& key) const {
  for (const auto& [k, x] : values)
    if (k == key) return x;
  throw PreconditionError("record has no value '" + key + "'");
}

nlohmann::ordered_json to_json(const ReportRecord& r) {
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.values) values[k] = number(v);
  return {{"experiment", r.experiment},
          {"quantity", r.quantity},
          {"criterion", r.criterion},
          {"values", values},
          {"trend_slope", number(r.trend_slope)},
          {"trend_residual", number(r.trend_residual)},
          {"pass", r.pass},
          {"detail", r.detail}};
}

void write_report(const std::filesystem::path& file, const std::string& experiment, std::uint64_t seed,
                  const std::vector<ReportRecord>& records) {
  bool ok = true;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    ok = ok && r.pass;
    list.push_back(to_json(r));
  }
  nlohmann::ordered_json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["pass"] = ok;
  j["records"] = std::move(list);
  auto out = open_out(file);
  out << j.dump(2) << '\n';
}

Table& Table::add(const std::string& column, std::vector<double> values) {
  if (!data.empty() && values.size() != data.front().size())
    throw PreconditionError("column '" + column + "' has a different length");
  columns.push_back(column);
  data.push_back(std::move(values));
  return *this;
}

const std::vector<double>& Table::column(const std::string& c) const {
  for (std::size_t k = 0; k < columns.size(); ++k)
    if (columns[k] == c) return data[k];
  throw PreconditionError("table '" + name + "' has no column '" + c + "'");
}

std::size_t Table::rows() const { return data.empty() ? 0 : data.front().size(); }

void write_csv(const std::filesystem::path& file, const Table& t) {
  auto out = open_out(file);
  for (std::size_t k = 0; k < t.columns.size(); ++k) out << (k ? "," : "") << t.columns[k];
  out << '\n';
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t k = 0; k < t.columns.size(); ++k) {
      if (k) out << ',';
      const double v = t.data[k][r];
      if (std::isfinite(v)) out << v;
      else out << (std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
    }
    out << '\n';
  }
}

std::string render_svg(const PlotSpec& spec, const std::vector<Table>& tables) {
  const Table& t = find_table(tables, spec.table);
  struct Series {
    std::string label;
    const std::vector<double>* x;
    const std::vector<double>* y;
  };
  std::vector<Series> series;
  for (const auto& y : spec.ys) {
    if (spec.kind == PlotSpec::Kind::polygon) {
      const auto colon = y.find(':');
      if (colon == std::string::npos) throw PreconditionError("polygon series must be 'x:y', got '" + y + "'");
      series.push_back({y.substr(colon + 1), &t.column(y.substr(0, colon)), &t.column(y.substr(colon + 1))});
    } else {
      series.push_back({y, &t.column(spec.x), &t.column(y)});
    }
  }

  Frame f{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), spec.log_x,
          spec.log_y};
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x->size(); ++k) {
      const double x = (*s.x)[k], y = (*s.y)[k];
      if (!f.usable(x, y)) continue;
      f.x0 = std::min(f.x0, f.fx(x));
      f.x1 = std::max(f.x1, f.fx(x));
      f.y0 = std::min(f.y0, f.fy(y));
      f.y1 = std::max(f.y1, f.fy(y));
    }
  if (!std::isfinite(f.x0)) f.x0 = 0, f.x1 = 1, f.y0 = 0, f.y1 = 1;
  if (spec.kind == PlotSpec::Kind::histogram && !spec.log_y) f.y0 = std::min(f.y0, 0.0);
  widen(f.x0, f.x1);
  widen(f.y0, f.y1);

  std::ostringstream o;
  o << std::setprecision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Frame::W << "\" height=\"" << Frame::H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << Frame::W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
    << "</text>\n";
  o << "<rect x=\"" << Frame::L << "\" y=\"" << Frame::T << "\" width=\"" << Frame::W - Frame::L - Frame::R
    << "\" height=\"" << Frame::H - Frame::T - Frame::B << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.x0 + (f.x1 - f.x0) * k / 4, yv = f.y0 + (f.y1 - f.y0) * k / 4;
    const double px = Frame::L + (Frame::W - Frame::L - Frame::R) * k / 4;
    const double py = Frame::H - Frame::B - (Frame::H - Frame::T - Frame::B) * k / 4;
    o << "<text x=\"" << px << "\" y=\"" << Frame::H - Frame::B + 16 << "\" text-anchor=\"middle\">"
      << fmt(xv, f.lx) << "</text>\n";
    o << "<text x=\"" << Frame::L - 6 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">" << fmt(yv, f.ly)
      << "</text>\n";
  }
  if (spec.kind != PlotSpec::Kind::polygon)
    o << "<text x=\"" << Frame::W / 2 << "\" y=\"" << Frame::H - 12 << "\" text-anchor=\"middle\">"
      << escape(spec.x) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = palette[s % std::size(palette)];
    std::ostringstream pts;
    pts << std::setprecision(6);
    const auto& xs = *series[s].x;
    const auto& ys = *series[s].y;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (!f.usable(xs[k], ys[k])) continue;
      if (spec.kind == PlotSpec::Kind::histogram) {
        // Step outline around bin centres.
        const double half = xs.size() > 1 ? 0.5 * (xs[std::min(k + 1, xs.size() - 1)] - xs[k == 0 ? 0 : k - 1]) /
                                                (k == 0 || k + 1 == xs.size() ? 1.0 : 2.0)
                                          : 0.5;
        pts << f.px(xs[k] - half) << ',' << f.py(ys[k]) << ' ' << f.px(xs[k] + half) << ',' << f.py(ys[k]) << ' ';
      } else {
        pts << f.px(xs[k]) << ',' << f.py(ys[k]) << ' ';
      }
    }
    const char* tag = spec.kind == PlotSpec::Kind::polygon ? "polygon" : "polyline";
    o << "<" << tag << " fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"" << pts.str()
      << "\"/>\n";
    o << "<text x=\"" << Frame::L + 8 << "\" y=\"" << Frame::T + 16 + 14 * s << "\" fill=\"" << colour << "\">"
      << escape(series[s].label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace kahler
