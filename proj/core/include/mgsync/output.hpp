#pragma once

// Trajectory serialization: CSV (one row per record and DG) and a
// four-panel SVG plot.

#include "mgsync/engine.hpp"

#include <filesystem>
#include <iosfwd>
#include <string_view>

namespace mgsync {

inline constexpr std::string_view kCsvHeader = "t,tau,dg,delta,omega,v,P,Q,u_c,z,S,omega_bar";

/// Writes every `decimation`-th record. Numbers use the shortest form that
/// reads back to the same double; DG indices are 1-based; LF line endings.
void write_csv(const Trajectory& tr, std::ostream& out, int decimation = 1);
void write_csv(const Trajectory& tr, const std::filesystem::path& path, int decimation = 1);

/// Inverse of write_csv. omega0 is not stored and comes back as NaN; step
/// is taken from the first two time stamps. Throws Error{kIo} on malformed
/// input.
Trajectory read_csv(std::istream& in);
Trajectory read_csv(const std::filesystem::path& path);

/// Panels: output frequencies, active powers, voltages, SC inputs.
void write_svg(const Trajectory& tr, const std::filesystem::path& path, std::string_view title = {});

}  // namespace mgsync
