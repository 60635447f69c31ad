#pragma once

#include <stdexcept>
#include <string>

namespace smmr {

// Time integration failure (non-finite state or derivative), carrying where
// it happened.  Indices are 0-based and -1 when not applicable.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(std::string what, double time, int macroStep = -1, int stage = -1,
                   int microStep = -1)
      : std::runtime_error(describe(what, time, macroStep, stage, microStep)),
        core_(std::move(what)),
        time_(time),
        macroStep_(macroStep),
        stage_(stage),
        microStep_(microStep) {}

  double time() const { return time_; }
  int macro_step() const { return macroStep_; }
  int stage() const { return stage_; }
  int micro_step() const { return microStep_; }

  IntegrationError with_macro_step(int n) const {
    return IntegrationError(core_, time_, n, stage_, microStep_);
  }

 private:
  static std::string describe(const std::string& what, double time, int macroStep, int stage,
                              int microStep) {
    std::string s = what + " at t=" + std::to_string(time);
    if (macroStep >= 0) s += ", macro step " + std::to_string(macroStep);
    if (stage >= 0) s += ", stage " + std::to_string(stage);
    if (microStep >= 0) s += ", micro step " + std::to_string(microStep);
    return s;
  }

  std::string core_;
  double time_;
  int macroStep_;
  int stage_;
  int microStep_;
};

}  // namespace smmr
