#include "fixtures.hpp"

#include "mgsync/engine.hpp"
#include "mgsync/errors.hpp"
#include "mgsync/metrics.hpp"
#include "mgsync/output.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace mgsync {
namespace {

using testing::two_dg_json;

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

TEST(Csv, ThreeStepsTwoDgs) {
  const Scenario s = parse_scenario(two_dg_json(R"("duration_s": 0.003, "events": [])"));
  const auto tr = run(s);
  std::ostringstream out;
  write_csv(tr, out);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
  EXPECT_EQ(count_lines(text), 7u);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(text.back(), '\n');
  std::istringstream rows(text);
  std::string line;
  std::getline(rows, line);
  std::getline(rows, line);
  EXPECT_EQ(line.substr(0, 4), "0,0.");  // t, then tau
  std::getline(rows, line);
  EXPECT_EQ(line.find(",2,"), line.find(',', line.find(',') + 1));
}

TEST(Csv, Decimation) {
  const Scenario s = parse_scenario(two_dg_json(R"("duration_s": 0.25)"));
  const auto tr = run(s);
  std::ostringstream out;
  write_csv(tr, out, 100);
  EXPECT_EQ(count_lines(out.str()), 1u + 3u * 2u);  // records 0, 100, 200
  std::istringstream in(out.str());
  const auto back = read_csv(in);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back.t[1], tr.t[100]);
  EXPECT_EQ(back.omega(2, 1), tr.omega(200, 1));
}

TEST(Csv, RoundTripIsBitExact) {
  const Scenario s = parse_scenario(two_dg_json());
  const auto tr = run(s);
  std::stringstream buf;
  write_csv(tr, buf);
  const auto back = read_csv(buf);
  ASSERT_EQ(back.size(), tr.size());
  EXPECT_EQ(back.t, tr.t);
  EXPECT_EQ(back.tau, tr.tau);
  for (const auto& [a, b] : {std::pair{&tr.delta, &back.delta}, {&tr.omega, &back.omega}, {&tr.v, &back.v},
                             {&tr.p, &back.p}, {&tr.q, &back.q}, {&tr.u_c, &back.u_c}, {&tr.z, &back.z},
                             {&tr.s, &back.s}, {&tr.omega_bar, &back.omega_bar}}) {
    EXPECT_EQ(*a, *b);
  }
  const Window w{0.2, 0.5, false};
  EXPECT_EQ(max_abs_sliding(tr, w), max_abs_sliding(back, w));
  EXPECT_EQ(max_sharing_error(tr, w, s.dg), max_sharing_error(back, w, s.dg));
  std::stringstream again;
  write_csv(back, again);
  std::stringstream first;
  write_csv(tr, first);
  EXPECT_EQ(first.str(), again.str());
}

TEST(Csv, MalformedInput) {
  std::istringstream bad_header("t,omega\n0,1\n");
  EXPECT_THROW(read_csv(bad_header), Error);
  std::istringstream bad_number(std::string(kCsvHeader) + "\n0,0,1,0,x,220,0,0,0,0,0,0\n");
  try {
    (void)read_csv(bad_number);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kIo);
  }
}

TEST(Svg, WritesDocument) {
  const Scenario s = parse_scenario(two_dg_json());
  const auto tr = run(s);
  const auto path = std::filesystem::temp_directory_path() / "mgsync_unit_plot.svg";
  write_svg(tr, path, "a < b & c");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string svg = ss.str();
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace mgsync
