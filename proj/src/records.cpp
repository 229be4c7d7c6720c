#include "spikebench/records.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "spikebench/error.hpp"

namespace spikebench {

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw IoError("bad number '" + s + "' in CSV");
  return v;
}

template <class I>
I to_int(const std::string& s) {
  if (s.empty()) throw IoError("empty integer field in CSV");
  char* end = nullptr;
  I v;
  if constexpr (std::is_signed_v<I>)
    v = static_cast<I>(std::strtoll(s.c_str(), &end, 10));
  else
    v = static_cast<I>(std::strtoull(s.c_str(), &end, 10));
  if (*end != '\0') throw IoError("bad integer '" + s + "' in CSV");
  return v;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << body;
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char ch : s) {
    switch (ch) {
      case '&':
        o += "&amp;";
        break;
      case '<':
        o += "&lt;";
        break;
      case '>':
        o += "&gt;";
        break;
      case '"':
        o += "&quot;";
        break;
      default:
        o += ch;
    }
  }
  return o;
}

}  // namespace

std::string records_to_csv(const std::vector<ResultRecord>& records) {
  std::string s = std::string(kCsvHeader) + "\n";
  for (const auto& r : records) {
    if (r.estimator.find(',') != std::string::npos || r.metric.find(',') != std::string::npos)
      throw IoError("CSV fields may not contain commas");
    s += r.estimator + "," + num(r.lambda_star) + "," + num(r.lambda) + "," + r.metric + "," + num(r.value) + "," +
         num(r.stderr_) + "," + std::to_string(r.n) + "," + std::to_string(r.m) + "," + std::to_string(r.trials) +
         "," + std::to_string(r.seed) + "\n";
  }
  return s;
}

std::vector<ResultRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw IoError("missing or wrong CSV header");
  std::vector<ResultRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 10) throw IoError("CSV row has " + std::to_string(f.size()) + " fields");
    ResultRecord r;
    r.estimator = f[0];
    r.lambda_star = to_double(f[1]);
    r.lambda = to_double(f[2]);
    r.metric = f[3];
    r.value = to_double(f[4]);
    r.stderr_ = to_double(f[5]);
    r.n = to_int<std::int64_t>(f[6]);
    r.m = to_int<std::int64_t>(f[7]);
    r.trials = to_int<std::int64_t>(f[8]);
    r.seed = to_int<std::uint64_t>(f[9]);
    out.push_back(std::move(r));
  }
  return out;
}

std::string records_to_svg(const std::vector<ResultRecord>& records) {
  std::map<std::string, std::map<std::string, std::vector<const ResultRecord*>>> panels;
  for (const auto& r : records)
    if (!r.estimator.ends_with("_trial")) panels[r.metric][r.estimator].push_back(&r);  // per-trial rows stay in CSV

  const double W = 520, H = 360, L = 60, R = 150, T = 30, B = 45;
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W * std::max<std::size_t>(1, panels.size())
    << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  std::size_t p = 0;
  for (const auto& [metric, series] : panels) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& [est, rows] : series)
      for (const ResultRecord* r : rows) {
        x0 = std::min(x0, r->lambda_star);
        x1 = std::max(x1, r->lambda_star);
        y0 = std::min(y0, r->value - r->stderr_);
        y1 = std::max(y1, r->value + r->stderr_);
      }
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    const double ox = p * W;
    auto X = [&](double x) { return ox + L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto Y = [&](double y) { return T + (y1 - y) / (y1 - y0) * (H - T - B); };
    o << "<g>\n<text x=\"" << ox + W / 2 - R / 2 << "\" y=\"18\" text-anchor=\"middle\">" << xml_escape(metric)
      << "</text>\n";
    o << "<rect x=\"" << ox + L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double xv = x0 + k * (x1 - x0) / 4, yv = y0 + k * (y1 - y0) / 4;
      o << "<text x=\"" << X(xv) << "\" y=\"" << H - B + 15 << "\" text-anchor=\"middle\">" << num(std::round(xv * 100) / 100)
        << "</text>\n";
      o << "<text x=\"" << ox + L - 5 << "\" y=\"" << Y(yv) + 4 << "\" text-anchor=\"end\">"
        << num(std::round(yv * 1000) / 1000) << "</text>\n";
    }
    o << "<text x=\"" << ox + L + (W - L - R) / 2 << "\" y=\"" << H - 8 << "\" text-anchor=\"middle\">lambda*</text>\n";
    std::size_t s = 0;
    for (const auto& [est, rows_in] : series) {
      std::vector<const ResultRecord*> rows = rows_in;
      std::stable_sort(rows.begin(), rows.end(),
                       [](const ResultRecord* a, const ResultRecord* b) { return a->lambda_star < b->lambda_star; });
      const char* col = palette[s % 8];
      o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
      for (const ResultRecord* r : rows) o << X(r->lambda_star) << "," << Y(r->value) << " ";
      o << "\"><title>" << xml_escape(est) << "</title></polyline>\n";
      for (const ResultRecord* r : rows)
        if (r->stderr_ > 0)
          o << "<line x1=\"" << X(r->lambda_star) << "\" x2=\"" << X(r->lambda_star) << "\" y1=\""
            << Y(r->value - r->stderr_) << "\" y2=\"" << Y(r->value + r->stderr_) << "\" stroke=\"" << col << "\"/>\n";
      o << "<text x=\"" << ox + W - R + 10 << "\" y=\"" << T + 14 * (s + 1) << "\" fill=\"" << col << "\">"
        << xml_escape(est) << "</text>\n";
      ++s;
    }
    o << "</g>\n";
    ++p;
  }
  o << "</svg>\n";
  return o.str();
}

void emit_csv(const std::vector<ResultRecord>& records, const std::string& path) {
  if (records.empty()) throw IoError("no records to write");
  write_file(path, records_to_csv(records));
}

void emit_svg(const std::vector<ResultRecord>& records, const std::string& path) {
  if (records.empty()) throw IoError("no records to write");
  write_file(path, records_to_svg(records));
}

}  // namespace spikebench
