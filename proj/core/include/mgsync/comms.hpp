#pragma once

// Cyber layer: the uniform time-varying communication delay and the
// timestamped history buffers agents use to look up delayed data.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace mgsync {

struct DelayBounds {
  double tau_star = 0.0;  // max delay [s]
  double tau_g = 0.0;     // max |d tau/dt|
};

struct DelayTrace {
  std::uint64_t seed = 0;
  double step = 0.0;
  std::vector<double> samples;  // tau(k * step), k = 0..n

  [[nodiscard]] double at(std::size_t k) const { return samples.at(k); }
  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
};

/// Random walk tau(t+h) = clamp(tau(t) + h r, 0, tau*), r ~ U(-1, 1), with
/// floor(duration / step + 0.5) + 1 samples. The walk starts at
/// `tau_initial` when given, otherwise at a draw from U(0, tau*).
/// Bit-identical for equal arguments on every platform (mt19937_64 with a
/// fixed 53-bit mapping, no std::uniform_real_distribution).
DelayTrace generate_delay_trace(const DelayBounds& bounds, double step, double duration, std::uint64_t seed,
                                std::optional<double> tau_initial = std::nullopt);

/// Fixed-capacity ring of (timestamp, vector) samples supporting
/// zero-order-hold lookup of past values.
class HistoryBuffer {
 public:
  /// Keeps enough samples to answer any query up to `horizon` seconds old
  /// when samples are appended every `step` seconds.
  HistoryBuffer(double horizon, double step, Eigen::VectorXd initial_value);

  /// Timestamps must be strictly increasing (Error{kBuffer} otherwise).
  void push(double t, const Eigen::VectorXd& value);

  /// Value at the greatest stored timestamp <= t_query. Before the first
  /// sample the initial value is returned (warm-up). Throws Error{kBuffer}
  /// if the answer has already been evicted or t_query is in the future.
  [[nodiscard]] const Eigen::VectorXd& query(double t_query) const;
  /// Timestamp of the sample query(t_query) would return (NaN in warm-up).
  [[nodiscard]] double query_time(double t_query) const;

  [[nodiscard]] std::size_t size() const noexcept { return count_; }
  [[nodiscard]] std::size_t capacity() const noexcept { return times_.size(); }
  [[nodiscard]] double newest_time() const;

 private:
  // Returns ring slot or -1 for warm-up.
  [[nodiscard]] long locate(double t_query) const;

  std::vector<double> times_;
  std::vector<Eigen::VectorXd> values_;
  Eigen::VectorXd initial_;
  std::size_t head_ = 0;  // slot of the oldest sample
  std::size_t count_ = 0;
  bool evicted_ = false;
};

}  // namespace mgsync
