#include "mgsync/gains_io.hpp"

#include "mgsync/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace mgsync {

using json = nlohmann::json;

namespace {

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix json_matrix(const json& j, const char* name) {
  if (!j.is_array() || j.empty()) fail(ErrorCategory::kConfig, std::string("gains file: ") + name + " must be a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols) {
      fail(ErrorCategory::kConfig, std::string("gains file: ragged matrix ") + name);
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json edges_json(const EdgeGains& g) {
  json out = json::array();
  for (const auto& [e, v] : g) out.push_back({e.first + 1, e.second == kLeader ? 0 : e.second + 1, v});
  return out;
}

EdgeGains json_edges(const json& j, int n) {
  EdgeGains g;
  for (const auto& e : j) {
    const int a = e.at(0).get<int>();
    const int b = e.at(1).get<int>();
    if (a < 1 || a > n || b < 0 || b > n) fail(ErrorCategory::kConfig, "gains file: edge index out of range");
    g[{a - 1, b == 0 ? kLeader : b - 1}] = e.at(2).get<double>();
  }
  return g;
}

}  // namespace

std::string to_json(const GainsFile& f) {
  json j;
  j["format"] = "mgsync-gains";
  j["version"] = 1;
  j["n_dg"] = f.n_dg;
  j["form"] = f.form == LmiForm::kJensen ? "jensen" : "printed";
  j["reduced"] = f.reduced;
  j["tau_star_s"] = f.bounds.tau_star;
  j["tau_g"] = f.bounds.tau_g;
  j["k"] = edges_json(f.gains.k);
  j["k_bar"] = edges_json(f.gains.k_bar);
  json c;
  c["margin"] = f.certificate.margin;
  c["Q"] = matrix_json(f.certificate.q);
  c["R"] = matrix_json(f.certificate.r);
  c["P"] = matrix_json(f.certificate.p);
  c["M"] = matrix_json(f.certificate.m);
  c["T"] = matrix_json(f.certificate.t);
  c["X"] = matrix_json(f.certificate.x);
  c["basis"] = matrix_json(f.basis);
  j["certificate"] = std::move(c);
  return j.dump(2) + "\n";
}

GainsFile gains_from_json(const std::string& text) {
  GainsFile f;
  try {
    const json j = json::parse(text);
    if (j.value("format", std::string()) != "mgsync-gains") fail(ErrorCategory::kConfig, "gains file: unknown format");
    f.n_dg = j.at("n_dg").get<int>();
    if (f.n_dg < 1) fail(ErrorCategory::kConfig, "gains file: n_dg must be >= 1");
    const std::string form = j.at("form").get<std::string>();
    if (form == "jensen") {
      f.form = LmiForm::kJensen;
    } else if (form == "printed") {
      f.form = LmiForm::kPrinted;
    } else {
      fail(ErrorCategory::kConfig, "gains file: unknown form " + form);
    }
    f.reduced = j.at("reduced").get<bool>();
    f.bounds.tau_star = j.at("tau_star_s").get<double>();
    f.bounds.tau_g = j.at("tau_g").get<double>();
    f.gains.k = json_edges(j.at("k"), f.n_dg);
    f.gains.k_bar = json_edges(j.at("k_bar"), f.n_dg);
    const json& c = j.at("certificate");
    f.certificate.margin = c.at("margin").get<double>();
    f.certificate.q = json_matrix(c.at("Q"), "Q");
    f.certificate.r = json_matrix(c.at("R"), "R");
    f.certificate.p = json_matrix(c.at("P"), "P");
    f.certificate.m = json_matrix(c.at("M"), "M");
    f.certificate.t = json_matrix(c.at("T"), "T");
    f.certificate.x = json_matrix(c.at("X"), "X");
    f.basis = json_matrix(c.at("basis"), "basis");
  } catch (const json::exception& e) {
    fail(ErrorCategory::kConfig, std::string("gains file: ") + e.what());
  }
  return f;
}

void save_gains(const GainsFile& file, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCategory::kIo, "cannot write " + path.string());
  out << to_json(file);
  if (!out) fail(ErrorCategory::kIo, "write failed: " + path.string());
}

GainsFile load_gains(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return gains_from_json(ss.str());
}

Matrix certified_dynamics(const GainsFile& file, const CommTopology& topology) {
  if (topology.size() != file.n_dg) fail(ErrorCategory::kDimension, "gains file DG count differs from the scenario");
  validate_gains(topology, file.gains);
  const Matrix a = error_dynamics_matrix(pinned_matrix(topology, file.gains), follower_matrix(topology, file.gains),
                                         disagreement_matrix(file.n_dg));
  if (!file.reduced) return a;
  const Matrix basis = sliding_manifold_basis(file.n_dg);
  if (file.basis.rows() != basis.rows() || file.basis.cols() != basis.cols() ||
      (file.basis - basis).cwiseAbs().maxCoeff() > 1e-9) {
    fail(ErrorCategory::kConfig, "gains file: stored basis is not the sliding-manifold basis");
  }
  return reduced_dynamics(a, basis);
}

}  // namespace mgsync
