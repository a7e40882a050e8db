#include "mgsync/errors.hpp"
#include "mgsync/gains_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>

namespace mgsync {
namespace {

CommTopology line4() { return {4, {{0, 1}, {1, 2}, {2, 3}}, {0}}; }

GainsFile synthesized() {
  const DelayBounds b{0.5, 0.999};
  const auto res = synthesize_gains(line4(), b);
  GainsFile f;
  f.n_dg = 4;
  f.gains = res.gains;
  f.bounds = b;
  f.certificate = res.certificate;
  f.basis = res.basis;
  return f;
}

TEST(GainsFile, RoundTripKeepsAcceptance) {
  const GainsFile f = synthesized();
  const auto path = std::filesystem::temp_directory_path() / "mgsync_unit_gains.json";
  save_gains(f, path);
  const GainsFile g = load_gains(path);
  std::filesystem::remove(path);
  EXPECT_EQ(g.gains.k, f.gains.k);
  EXPECT_EQ(g.gains.k_bar, f.gains.k_bar);
  EXPECT_EQ(g.certificate.p, f.certificate.p);
  EXPECT_EQ(g.form, LmiForm::kJensen);
  const Matrix a = certified_dynamics(g, line4());
  const auto chk = check_certificate(a, g.bounds, g.certificate, {1e-8, g.form});
  EXPECT_TRUE(chk.accepted) << chk.reason;
}

TEST(GainsFile, TamperedGainsAreRejected) {
  GainsFile f = synthesized();
  for (auto& [e, v] : f.gains.k) v *= 20.0;
  const auto chk = check_certificate(certified_dynamics(f, line4()), f.bounds, f.certificate, {1e-8, f.form});
  EXPECT_FALSE(chk.accepted);
}

TEST(GainsFile, Malformed) {
  EXPECT_THROW(gains_from_json("{}"), Error);
  EXPECT_THROW(gains_from_json("not json"), Error);
  GainsFile f = synthesized();
  f.basis(0, 0) += 1e-3;
  EXPECT_THROW((void)certified_dynamics(f, line4()), Error);
  f = synthesized();
  EXPECT_THROW((void)certified_dynamics(f, CommTopology(3, {{0, 1}, {1, 2}}, {0})), Error);
  try {
    (void)load_gains("/nonexistent/gains.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kIo);
  }
}

}  // namespace
}  // namespace mgsync
