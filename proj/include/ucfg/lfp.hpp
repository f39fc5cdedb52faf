#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ucfg/convrec.hpp"

namespace ucfg {

struct IntervalRational {
  Rational lo, hi;
  bool upper_known = true;  // false: hi is meaningless, only lo is certified

  Rational width() const { return hi - lo; }
  bool contains(const Rational& q) const { return lo <= q && (!upper_known || q <= hi); }
};

struct LfpOptions {
  Rational tol = Rational(1, 1) / Rational(BigInt(1) << 60);
  int max_iter = 400;
  int bits = 512;                                // dyadic resolution of the bounds
  Rational ceiling = Rational(BigInt(1) << 64);  // a lower bound above this means divergence
  std::function<void(int, const std::vector<Rational>&)> on_iterate;  // lower bounds per iteration
};

struct LfpResult {
  enum class Status { converged, unknown, diverged };
  Status status = Status::unknown;
  std::vector<IntervalRational> values;
  int iterations = 0;
  int newton_steps = 0;
  bool exact = false;  // lo == hi is the fixpoint itself
  std::string note;
};
const char* to_string(LfpResult::Status s);

/// Least nonnegative fixpoint of y = f(0) + x p̂(y).
///
/// Lower bounds ascend from 0 by Kleene steps and by Newton steps whose
/// floating-point solution is accepted only after an exact check that it stays
/// below the fixpoint; upper bounds are exact post-fixpoints F(u) <= u.
/// Throws Error(nonmonotone) for negative initials or coefficients.
LfpResult lfp_eval(const GfSystem& gfs, const LfpOptions& opt = {});

}  // namespace ucfg
