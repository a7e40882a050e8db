#include "mgsync/comms.hpp"

#include "mgsync/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace mgsync {
namespace {

// Uniform on [0, 1) from the top 53 bits.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

DelayTrace generate_delay_trace(const DelayBounds& bounds, double step, double duration, std::uint64_t seed,
                                std::optional<double> tau_initial) {
  if (!(step > 0)) fail(ErrorCategory::kConfig, "delay trace step must be > 0");
  if (!(duration >= 0)) fail(ErrorCategory::kConfig, "delay trace duration must be >= 0");
  if (!(bounds.tau_star >= 0) || !(bounds.tau_g >= 0)) {
    fail(ErrorCategory::kConfig, "delay bounds tau_star and tau_g must be >= 0");
  }
  const auto steps = static_cast<std::size_t>(std::floor(duration / step + 0.5));
  std::mt19937_64 rng(seed);
  DelayTrace trace;
  trace.seed = seed;
  trace.step = step;
  trace.samples.resize(steps + 1);
  double tau = tau_initial ? *tau_initial : bounds.tau_star * unit_draw(rng);
  tau = std::clamp(tau, 0.0, bounds.tau_star);
  trace.samples[0] = tau;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double r = 2.0 * unit_draw(rng) - 1.0;
    tau = std::clamp(tau + step * r, 0.0, bounds.tau_star);
    trace.samples[k] = tau;
  }
  return trace;
}

HistoryBuffer::HistoryBuffer(double horizon, double step, Eigen::VectorXd initial_value)
    : initial_(std::move(initial_value)) {
  if (!(step > 0) || !(horizon >= 0)) fail(ErrorCategory::kConfig, "history buffer needs step > 0, horizon >= 0");
  // One extra sample for the zero-order hold, one for rounding.
  const auto cap = static_cast<std::size_t>(std::ceil(horizon / step)) + 2;
  times_.assign(cap, 0.0);
  values_.assign(cap, Eigen::VectorXd::Zero(initial_.size()));
}

void HistoryBuffer::push(double t, const Eigen::VectorXd& value) {
  if (count_ > 0 && !(t > newest_time())) {
    fail(ErrorCategory::kBuffer, "history buffer timestamps must be strictly increasing");
  }
  const std::size_t cap = times_.size();
  std::size_t slot;
  if (count_ < cap) {
    slot = (head_ + count_) % cap;
    ++count_;
  } else {
    slot = head_;
    head_ = (head_ + 1) % cap;
    evicted_ = true;
  }
  times_[slot] = t;
  values_[slot] = value;
}

double HistoryBuffer::newest_time() const {
  if (count_ == 0) return -std::numeric_limits<double>::infinity();
  return times_[(head_ + count_ - 1) % times_.size()];
}

long HistoryBuffer::locate(double t_query) const {
  if (count_ == 0) return -1;
  if (t_query > newest_time()) {
    fail(ErrorCategory::kBuffer, "history query at t=" + std::to_string(t_query) + " is after the newest sample");
  }
  const std::size_t cap = times_.size();
  auto time_at = [&](std::size_t k) { return times_[(head_ + k) % cap]; };
  if (t_query < time_at(0)) {
    if (evicted_) {
      fail(ErrorCategory::kBuffer,
           "history query at t=" + std::to_string(t_query) + " is older than the buffer horizon");
    }
    return -1;
  }
  // Greatest k with time_at(k) <= t_query.
  std::size_t lo = 0;
  std::size_t hi = count_ - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (time_at(mid) <= t_query) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return static_cast<long>((head_ + lo) % cap);
}

const Eigen::VectorXd& HistoryBuffer::query(double t_query) const {
  const long slot = locate(t_query);
  return slot < 0 ? initial_ : values_[static_cast<std::size_t>(slot)];
}

double HistoryBuffer::query_time(double t_query) const {
  const long slot = locate(t_query);
  return slot < 0 ? std::numeric_limits<double>::quiet_NaN() : times_[static_cast<std::size_t>(slot)];
}

}  // namespace mgsync
