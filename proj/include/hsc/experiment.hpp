#pragma once

// Sweep plumbing for the command-line runner: numeric ranges, CSV output
// with an atomic rename, a small SVG line plotter and an ordered parallel map.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <vector>

#include "hsc/errors.hpp"

namespace hsc::experiment {

inline double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

// "a,b,c" or "start:stop:step" (stop included when hit within step/1e6)
inline std::vector<double> parse_range(const std::string& text) {
  if (text.empty()) throw invalid_argument("empty range");
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw invalid_argument("range must be start:stop:step, got '" + text + "'");
    double a = parse_double(parts[0]), b = parse_double(parts[1]), h = parse_double(parts[2]);
    if (!(h > 0.0)) throw invalid_argument("range step must be positive");
    if (b < a) throw invalid_argument("range stop below start");
    long n = static_cast<long>(std::floor((b - a) / h + 1e-6));
    if (n > 1000000) throw invalid_argument("range has too many points");
    // integer multiples keep the grid free of accumulated rounding
    for (long i = 0; i <= n; ++i) out.push_back(std::round((a + i * h) * 1e12) / 1e12);
    return out;
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_double(p));
  return out;
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');)
    if (!p.empty()) out.push_back(p);
  return out;
}

// shortest round-trip text, independent of locale
inline std::string fmt(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline std::string fmt_fixed(double v, int digits) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  std::string s(buf, p);
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
  return s;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw invalid_argument("csv row width does not match header");
    rows_.push_back(std::move(row));
  }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  const std::vector<std::string>& header() const { return header_; }

  std::string text() const {
    std::string s;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) s += ',';
        s += r[i];
      }
      s += '\n';
    };
    line(header_);
    for (auto& r : rows_) line(r);
    return s;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// write to a sibling temp file, then rename over the target
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

// ---- plotting -------------------------------------------------------------

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  std::vector<Series> series;
  int width = 640, height = 420;
};

inline std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

inline std::string render_svg(const PlotSpec& spec) {
  const double L = 70, R = 150, T = 40, B = 50;
  const double W = spec.width, H = spec.height;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (auto& s : spec.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" + fmt(H) + "\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + fmt(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + xml_escape(spec.title) +
       "</text>\n";
  o += "<rect x=\"" + fmt(L) + "\" y=\"" + fmt(T) + "\" width=\"" + fmt(W - L - R) + "\" height=\"" +
       fmt(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    double xv = x0 + i * (x1 - x0) / 5, yv = y0 + i * (y1 - y0) / 5;
    o += "<text x=\"" + fmt_fixed(px(xv), 1) + "\" y=\"" + fmt(H - B + 16) +
         "\" text-anchor=\"middle\" font-size=\"11\">" + fmt_fixed(xv, 2) + "</text>\n";
    o += "<text x=\"" + fmt(L - 6) + "\" y=\"" + fmt_fixed(py(yv) + 4, 1) +
         "\" text-anchor=\"end\" font-size=\"11\">" + fmt_fixed(yv, 3) + "</text>\n";
  }
  o += "<text x=\"" + fmt((L + W - R) / 2) + "\" y=\"" + fmt(H - 12) + "\" text-anchor=\"middle\" font-size=\"13\">" +
       xml_escape(spec.xlabel) + "</text>\n";
  o += "<text x=\"16\" y=\"" + fmt((T + H - B) / 2) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 " +
       fmt((T + H - B) / 2) + ")\">" + xml_escape(spec.ylabel) + "</text>\n";
  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    auto& s = spec.series[k];
    const char* c = colors[k % 6];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      pts += fmt_fixed(px(s.x[i]), 2) + "," + fmt_fixed(py(s.y[i]), 2) + " ";
    }
    o += "<polyline fill=\"none\" stroke=\"" + std::string(c) + "\" stroke-width=\"1.8\" points=\"" + pts + "\"/>\n";
    double ly = T + 16 + 18 * static_cast<double>(k);
    o += "<line x1=\"" + fmt(W - R + 10) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(W - R + 34) + "\" y2=\"" + fmt(ly) +
         "\" stroke=\"" + c + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + fmt(W - R + 40) + "\" y=\"" + fmt(ly + 4) + "\" font-size=\"11\">" + xml_escape(s.name) +
         "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

// ---- parallel map -----------------------------------------------------------

// f(i) for i in [0, n), results in index order. Workers pull indices from a
// shared counter; each slot is written by exactly one worker.
template <class R, class F>
std::vector<R> ordered_map(std::size_t n, F f, unsigned threads = 0) {
  std::vector<R> out(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errs(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i; (i = next++) < n;) out[i] = f(i);
      } catch (...) {
        errs[w] = std::current_exception();
        next = n;
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

// ---- key = value config files ------------------------------------------------

// '#' starts a comment; blank lines ignored; keys must be in `allowed`.
inline std::map<std::string, std::string> read_config(const std::filesystem::path& path,
                                                      const std::vector<std::string>& allowed) {
  std::ifstream f(path);
  if (!f) throw invalid_argument("cannot read config file " + path.string());
  std::map<std::string, std::string> kv;
  int lineNo = 0;
  for (std::string line; std::getline(f, line);) {
    ++lineNo;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw invalid_argument(path.string() + ":" + std::to_string(lineNo) + ": expected key = value");
    std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw invalid_argument(path.string() + ":" + std::to_string(lineNo) + ": unknown key '" + k + "'");
    kv[k] = v;
  }
  return kv;
}

}  // namespace hsc::experiment
