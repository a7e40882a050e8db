#pragma once

// Gains + certificate file written by `synth` and read by `check`.

#include "mgsync/comms.hpp"
#include "mgsync/lmi.hpp"
#include "mgsync/topology.hpp"

#include <filesystem>
#include <string>

namespace mgsync {

struct GainsFile {
  int n_dg = 0;
  GainSet gains;  // k, k_bar; m empty
  LmiForm form = LmiForm::kJensen;
  bool reduced = true;
  DelayBounds bounds;  // tau_g is the synthesis value
  LmiCertificate certificate;
  Matrix basis;  // coordinates the certificate lives in
};

std::string to_json(const GainsFile& file);
GainsFile gains_from_json(const std::string& text);

void save_gains(const GainsFile& file, const std::filesystem::path& path);
/// Throws Error{kIo} when unreadable, Error{kConfig} when malformed.
GainsFile load_gains(const std::filesystem::path& path);

/// Rebuilds the certified dynamics matrix (reduced when the file says so)
/// from the stored gains.
Matrix certified_dynamics(const GainsFile& file, const CommTopology& topology);

}  // namespace mgsync
