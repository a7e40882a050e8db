#include "mgsync/metrics.hpp"

#include "mgsync/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mgsync {

namespace {

template <typename F>
void for_each_in(const Trajectory& tr, const Window& w, F&& f) {
  for (std::size_t r = 0; r < tr.size(); ++r) {
    if (w.contains(tr.t[r])) f(static_cast<Eigen::Index>(r));
  }
}

}  // namespace

std::vector<double> max_frequency_error(const Trajectory& tr, const Window& w, double reference) {
  std::vector<double> out(tr.n_dg, 0.0);
  for_each_in(tr, w, [&](Eigen::Index r) {
    for (int i = 0; i < tr.n_dg; ++i) out[i] = std::max(out[i], std::abs(tr.omega(r, i) - reference));
  });
  return out;
}

double max_sharing_error(const Trajectory& tr, const Window& w, std::span<const DgParams> params, double threshold) {
  if (static_cast<int>(params.size()) != tr.n_dg) fail(ErrorCategory::kDimension, "max_sharing_error: params size");
  double worst = 0.0;
  for_each_in(tr, w, [&](Eigen::Index r) {
    for (int i = 0; i < tr.n_dg; ++i) {
      for (int j = 0; j < tr.n_dg; ++j) {
        if (i == j || std::abs(tr.p(r, j)) < threshold) continue;
        const double expected = params[j].k_p / params[i].k_p;
        worst = std::max(worst, std::abs(tr.p(r, i) / tr.p(r, j) - expected) / expected);
      }
    }
  });
  return worst;
}

std::vector<double> max_abs_sliding(const Trajectory& tr, const Window& w) {
  std::vector<double> out(tr.n_dg, 0.0);
  for_each_in(tr, w, [&](Eigen::Index r) {
    for (int i = 0; i < tr.n_dg; ++i) out[i] = std::max(out[i], std::abs(tr.s(r, i)));
  });
  return out;
}

std::vector<double> settling_time(const Trajectory& tr, const Window& w, double final, double band) {
  std::vector<double> out(tr.n_dg, std::numeric_limits<double>::quiet_NaN());
  std::vector<Eigen::Index> rows;
  for_each_in(tr, w, [&](Eigen::Index r) { rows.push_back(r); });
  if (rows.empty()) return out;
  for (int i = 0; i < tr.n_dg; ++i) {
    const double tol = band * std::abs(tr.omega(rows.front(), i) - final);
    double settled = tr.t[rows.front()];
    bool inside = true;
    for (auto r : rows) {
      if (std::abs(tr.omega(r, i) - final) > tol) {
        inside = false;
      } else if (!inside) {
        inside = true;
        settled = tr.t[r];
      }
    }
    if (inside) out[i] = settled - w.t0;
  }
  return out;
}

std::vector<double> max_disturbance_rate(const Trajectory& tr, const Window& w) {
  std::vector<double> out(tr.n_dg, 0.0);
  for (std::size_t r = 0; r + 1 < tr.size(); ++r) {
    if (!w.contains(tr.t[r]) || !w.contains(tr.t[r + 1])) continue;
    const double dt = tr.t[r + 1] - tr.t[r];
    for (int i = 0; i < tr.n_dg; ++i) {
      const auto a = static_cast<Eigen::Index>(r);
      const double d0 = tr.omega(a, i) - tr.omega_bar(a, i);
      const double d1 = tr.omega(a + 1, i) - tr.omega_bar(a + 1, i);
      out[i] = std::max(out[i], std::abs(d1 - d0) / dt);
    }
  }
  return out;
}

double max_frequency_deviation(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size() || a.n_dg != b.n_dg) fail(ErrorCategory::kDimension, "trajectories differ in shape");
  if (a.size() == 0) return 0.0;
  return (a.omega - b.omega).cwiseAbs().maxCoeff();
}

}  // namespace mgsync
