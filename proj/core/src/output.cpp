#include "mgsync/output.hpp"

#include "mgsync/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace mgsync {

namespace {

void put(std::string& line, double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  line.append(buf.data(), res.ptr);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCategory::kIo, "cannot write " + path.string());
  return out;
}

}  // namespace

void write_csv(const Trajectory& tr, std::ostream& out, int decimation) {
  if (decimation < 1) fail(ErrorCategory::kConfig, "write_csv: decimation must be >= 1");
  out << kCsvHeader << '\n';
  std::string line;
  for (std::size_t r = 0; r < tr.size(); r += static_cast<std::size_t>(decimation)) {
    const auto k = static_cast<Eigen::Index>(r);
    for (int i = 0; i < tr.n_dg; ++i) {
      line.clear();
      put(line, tr.t[r]);
      line += ',';
      put(line, tr.tau[r]);
      line += ',';
      line += std::to_string(i + 1);
      for (const Matrix* m : {&tr.delta, &tr.omega, &tr.v, &tr.p, &tr.q, &tr.u_c, &tr.z, &tr.s, &tr.omega_bar}) {
        line += ',';
        put(line, (*m)(k, i));
      }
      line += '\n';
      out << line;
    }
  }
  if (!out) fail(ErrorCategory::kIo, "write_csv: stream error");
}

void write_csv(const Trajectory& tr, const std::filesystem::path& path, int decimation) {
  auto out = open_out(path);
  write_csv(tr, out, decimation);
}

Trajectory read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) fail(ErrorCategory::kIo, "read_csv: missing or unexpected header");

  struct Row {
    double t, tau;
    int dg;
    std::array<double, 9> v;
  };
  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Row row{};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto field = [&](auto& value) {
      const auto res = std::from_chars(p, end, value);
      if (res.ec != std::errc()) fail(ErrorCategory::kIo, "read_csv: bad number on line " + std::to_string(line_no));
      p = res.ptr;
      if (p != end) {
        if (*p != ',') fail(ErrorCategory::kIo, "read_csv: bad separator on line " + std::to_string(line_no));
        ++p;
      }
    };
    field(row.t);
    field(row.tau);
    field(row.dg);
    for (auto& v : row.v) field(v);
    if (p != end) fail(ErrorCategory::kIo, "read_csv: trailing fields on line " + std::to_string(line_no));
    rows.push_back(row);
  }

  int n = 0;
  for (const auto& r : rows) n = std::max(n, r.dg);
  if (n == 0) fail(ErrorCategory::kIo, "read_csv: no data rows");
  if (rows.size() % static_cast<std::size_t>(n) != 0) fail(ErrorCategory::kIo, "read_csv: incomplete record");
  const std::size_t records = rows.size() / n;

  Trajectory tr;
  tr.resize(records, n);
  tr.stride = 1;
  Matrix* fields[9] = {&tr.delta, &tr.omega, &tr.v, &tr.p, &tr.q, &tr.u_c, &tr.z, &tr.s, &tr.omega_bar};
  for (std::size_t r = 0; r < records; ++r) {
    for (int i = 0; i < n; ++i) {
      const Row& row = rows[r * n + i];
      if (row.dg != i + 1 || row.t != rows[r * n].t) fail(ErrorCategory::kIo, "read_csv: rows not grouped by time");
      for (int f = 0; f < 9; ++f) (*fields[f])(static_cast<Eigen::Index>(r), i) = row.v[f];
    }
    tr.t[r] = rows[r * n].t;
    tr.tau[r] = rows[r * n].tau;
    tr.omega0[r] = std::numeric_limits<double>::quiet_NaN();
  }
  tr.step = records > 1 ? tr.t[1] - tr.t[0] : 0.0;
  return tr;
}

Trajectory read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::kIo, "cannot read " + path.string());
  return read_csv(in);
}

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 6);
  return {buf.data(), res.ptr};
}

void panel(std::string& svg, const Trajectory& tr, const Matrix& m, const char* label, double y0) {
  constexpr double kLeft = 80, kWidth = 780, kHeight = 170;
  const std::size_t n = tr.size();
  const std::size_t every = std::max<std::size_t>(1, n / 1500);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t r = 0; r < n; r += every) {
    lo = std::min(lo, m.row(static_cast<Eigen::Index>(r)).minCoeff());
    hi = std::max(hi, m.row(static_cast<Eigen::Index>(r)).maxCoeff());
  }
  if (!(hi > lo)) {
    hi = lo + 0.5;
    lo -= 0.5;
  }
  const double t0 = tr.t.front();
  const double t1 = tr.t.back() > t0 ? tr.t.back() : t0 + 1.0;
  auto x = [&](double t) { return kLeft + kWidth * (t - t0) / (t1 - t0); };
  auto y = [&](double v) { return y0 + kHeight * (1.0 - (v - lo) / (hi - lo)); };

  svg += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(y0) + "\" width=\"" + fmt(kWidth) + "\" height=\"" +
         fmt(kHeight) + "\" fill=\"none\" stroke=\"#888\"/>\n";
  svg += "<text x=\"" + fmt(kLeft) + "\" y=\"" + fmt(y0 - 6) + "\" font-size=\"13\">" + label + "</text>\n";
  svg += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(y0 + 10) + "\" font-size=\"10\" text-anchor=\"end\">" +
         fmt(hi) + "</text>\n";
  svg += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(y0 + kHeight) +
         "\" font-size=\"10\" text-anchor=\"end\">" + fmt(lo) + "</text>\n";
  svg += "<text x=\"" + fmt(kLeft + kWidth) + "\" y=\"" + fmt(y0 + kHeight + 12) +
         "\" font-size=\"10\" text-anchor=\"end\">t = " + fmt(t1) + " s</text>\n";
  for (int i = 0; i < tr.n_dg; ++i) {
    svg += "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"";
    svg += kPalette[static_cast<std::size_t>(i) % kPalette.size()];
    svg += "\" points=\"";
    for (std::size_t r = 0; r < n; r += every) {
      svg += fmt(x(tr.t[r])) + ',' + fmt(y(m(static_cast<Eigen::Index>(r), i))) + ' ';
    }
    svg += "\"/>\n";
  }
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_svg(const Trajectory& tr, const std::filesystem::path& path, std::string_view title) {
  if (tr.size() == 0) fail(ErrorCategory::kConfig, "write_svg: empty trajectory");
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"940\" font-family=\"sans-serif\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) svg += "<text x=\"450\" y=\"20\" font-size=\"15\" text-anchor=\"middle\">" + xml_escape(title) + "</text>\n";
  panel(svg, tr, tr.omega, "output frequency omega_i [rad/s]", 50);
  panel(svg, tr, tr.p, "active power P_i [W]", 270);
  panel(svg, tr, tr.v, "voltage v_i [V]", 490);
  panel(svg, tr, tr.omega_bar, "SC input omega_bar_i [rad/s]", 710);
  svg += "</svg>\n";
  auto out = open_out(path);
  out << svg;
}

}  // namespace mgsync
