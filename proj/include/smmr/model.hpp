#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>

#include "smmr/projection.hpp"
#include "smmr/vec.hpp"

namespace smmr {

using RhsFn = std::function<void(double t, const Vec& y, Vec& dydt)>;

struct EvalCounters {
  std::uint64_t full = 0;
  std::uint64_t surrogate = 0;
};

// Full model f(t,y) on dimension N and surrogate f_s(t,z) on dimension S,
// bundled with the projection pair connecting the two spaces.  Every RHS
// invocation bumps the matching counter; work-precision reporting relies on
// the counts being exact.
class ModelPair {
 public:
  ModelPair() = default;
  ModelPair(RhsFn fullRhs, RhsFn surrogateRhs, ProjectionPair projection)
      : full_(std::move(fullRhs)),
        surrogate_(std::move(surrogateRhs)),
        projection_(std::move(projection)) {}

  void eval_full(double t, const Vec& y, Vec& out) {
    if (y.size() != projection_.dim_full())
      throw std::invalid_argument("ModelPair::eval_full: state dimension mismatch");
    ++counters_.full;
    full_(t, y, out);
    if (out.size() != projection_.dim_full())
      throw std::invalid_argument("ModelPair::eval_full: output dimension mismatch");
  }

  void eval_surrogate(double t, const Vec& z, Vec& out) {
    if (z.size() != projection_.dim_surrogate())
      throw std::invalid_argument("ModelPair::eval_surrogate: state dimension mismatch");
    ++counters_.surrogate;
    surrogate_(t, z, out);
    if (out.size() != projection_.dim_surrogate())
      throw std::invalid_argument("ModelPair::eval_surrogate: output dimension mismatch");
  }

  const ProjectionPair& projection() const { return projection_; }
  std::size_t dim_full() const { return projection_.dim_full(); }
  std::size_t dim_surrogate() const { return projection_.dim_surrogate(); }

  EvalCounters counters() const { return counters_; }
  void reset_counters() { counters_ = {}; }

 private:
  RhsFn full_;
  RhsFn surrogate_;
  ProjectionPair projection_;
  EvalCounters counters_;
};

}  // namespace smmr
