#pragma once

#include <optional>
#include <string>

#include "ucfg/convrec.hpp"

namespace ucfg {

struct SmtOptions {
  /// Confine y to the box |y_i - f_i(0)| <= 1 and x to a radius on which the
  /// fixpoint map contracts the box, so the only solution there is the
  /// generating function. Without it other real branches can satisfy y_1 != 0
  /// for an identically zero sequence.
  bool contraction_box = true;
};

/// QF_NRA script asking for x, y with y = f(0) + x p̂(y) and y_1 != 0;
/// unsat means the distinguished sequence is identically zero.
std::string export_smt(const ConvRecSystem& s, const SmtOptions& opt = {});

/// Radius used by the contraction box: 1 / max(M, 2L, d, 1).
Rational smt_radius(const ConvRecSystem& s);

struct SmtBackend {
  std::string path;
  double timeout_s = 10;
};

struct BackendAnswer {
  enum class Kind { sat, unsat, unknown, failed } kind = Kind::failed;
  std::string output;
};
BackendAnswer run_smt_backend(const SmtBackend& b, const std::string& script);
/// Executable name plus the first line of "--version".
std::string backend_id(const SmtBackend& b);

struct ZeronessConfig {
  int prefix_bound = -1;  // -1: max(64, 2k)
  std::optional<SmtBackend> backend;
  SmtOptions smt;
  int extend_factor = 8;  // prefix search after a sat answer goes to factor * bound
};

struct ZeronessVerdict {
  enum class Kind { nonzero_at, zero_bounded, zero_certified, unknown } kind = Kind::unknown;
  int n = 0;      // nonzero_at
  Rational value;  // nonzero_at
  int bound = 0;  // zero_bounded, and the prefix checked in every case
  std::string backend;
  std::string reason;  // unknown
  std::string model;   // raw backend model on sat
};
const char* to_string(ZeronessVerdict::Kind k);
int default_prefix_bound(const ConvRecSystem& s);

ZeronessVerdict zeroness(const ConvRecSystem& s, const ZeronessConfig& cfg = {});

}  // namespace ucfg
