#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "covcast/crr.hpp"

namespace covcast::aci {

// Per-step targets and learning rates for the elementwise update
//   eps_{t+1} = eps_t + gamma * (eps_target - err_t).
struct AciConfig {
    Eigen::VectorXd eps_target;  // in (0,1)^h
    Eigen::VectorXd gamma;       // > 0 elementwise
    bool clamp_floor_auto = true;           // floor = 2/n of the next prediction
    std::optional<double> clamp_floor;      // fixed floor when !clamp_floor_auto (nullopt: off)
    std::optional<double> clamp_ceiling = 1.0 - 1e-9;  // nullopt: off

    int steps() const { return static_cast<int>(eps_target.size()); }
    void validate() const;
};

struct ClampEvent {
    std::int64_t t = 0;   // controller clock at activation
    int step = 0;         // 1-based
    double before = 0;
    double after = 0;
    bool at_floor = false;  // false: ceiling
};

// One observed error is 0/1; steps whose prediction is not scoreable yet
// (start-up) or anymore (drain) stay unavailable, which leaves eps unchanged
// (substituting err = eps_target would be the same fixed point).
struct PartialErrors {
    std::vector<std::optional<double>> err;  // size h, entries 0.0 / 1.0 / nullopt

    explicit PartialErrors(int h) : err(h) {}
    int steps() const { return static_cast<int>(err.size()); }
};

class AciState {
  public:
    explicit AciState(const AciConfig& cfg);

    const Eigen::VectorXd& significance() const { return eps_t_; }
    std::int64_t clock() const { return t_; }
    const std::vector<std::int64_t>& update_counts() const { return updates_; }
    const std::vector<ClampEvent>& clamp_log() const { return clamp_log_; }

    // Applies one tick of the controller. floor_now is the clamp floor for
    // this tick when the config says auto (ignored otherwise).
    void update(const AciConfig& cfg, const PartialErrors& errs,
                std::optional<double> floor_now = std::nullopt);

    // Flat key-value checkpoint, versioned; round-trips exactly.
    std::string serialize() const;
    static AciState deserialize(const std::string& text, const AciConfig& cfg);

  private:
    Eigen::VectorXd eps_t_;
    std::int64_t t_ = 0;                  // ticks processed
    std::vector<std::int64_t> updates_;   // per-step applied update count
    std::vector<ClampEvent> clamp_log_;
};

// The last h interval vectors keyed by origin (time index of the first
// predicted value): prediction with origin o supplies its step-i interval
// when the value at time o + i - 1 arrives.
class PendingBuffer {
  public:
    explicit PendingBuffer(int capacity);

    void record(crr::IntervalVector iv);  // origins must be strictly increasing
    int size() const { return static_cast<int>(buf_.size()); }
    int capacity() const { return capacity_; }

    // Errors scoreable when the true value at time t arrives. require_head
    // demands the step-1 entry (origin == t) be present; the online loop
    // relaxes that only while draining the tail after the last prediction.
    PartialErrors extract_errors(std::int64_t t, double y_true, bool require_head = true) const;

    // The interval that step `step` (1-based) of time t's scoring came from.
    const crr::IntervalVector* find(std::int64_t origin) const;

  private:
    int capacity_;
    std::deque<crr::IntervalVector> buf_;
};

}  // namespace covcast::aci
