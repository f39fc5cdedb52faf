#include "ucfg/zeroness.hpp"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ucfg/error.hpp"

namespace ucfg {

const char* to_string(ZeronessVerdict::Kind k) {
  switch (k) {
    case ZeronessVerdict::Kind::nonzero_at: return "nonzero_at";
    case ZeronessVerdict::Kind::zero_bounded: return "zero_bounded";
    case ZeronessVerdict::Kind::zero_certified: return "zero_certified";
    case ZeronessVerdict::Kind::unknown: return "unknown";
  }
  return "?";
}

int default_prefix_bound(const ConvRecSystem& s) { return std::max(64, 2 * s.k()); }

namespace {

std::string smt_num(const Rational& q) {
  std::string mag = q.get_den() == 1 ? to_string(BigInt(abs(q.get_num())))
                                     : "(/ " + to_string(BigInt(abs(q.get_num()))) + " " + to_string(BigInt(q.get_den())) + ")";
  return q < 0 ? "(- " + mag + ")" : mag;
}

std::string smt_poly(const ConvPolynomial& p) {
  std::vector<std::string> parts;
  for (const auto& t : p.terms()) {
    std::string m = smt_num(t.coeff);
    if (!t.vars.empty()) {
      m = "(* " + m;
      for (int v : t.vars) m += " y" + std::to_string(v + 1);
      m += ")";
    }
    parts.push_back(m);
  }
  if (parts.empty()) return "0";
  if (parts.size() == 1) return parts[0];
  std::string out = "(+";
  for (const auto& s : parts) out += " " + s;
  return out + ")";
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

std::string capture(const std::string& cmd, int* status) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    *status = -1;
    return out;
  }
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  *status = pclose(pipe);
  return out;
}

bool looks_like_z3(const std::string& path) {
  return std::filesystem::path(path).filename().string().find("z3") != std::string::npos;
}

}  // namespace

Rational smt_radius(const ConvRecSystem& s) {
  s.validate();
  Rational c = 0;
  for (const auto& v : s.initials) c = std::max(c, Rational(abs(v)));
  c += 1;
  Rational M = 0, L = 0;
  for (const auto& p : s.polys) {
    Rational m = 0, l = 0;
    for (const auto& t : p.terms()) {
      auto deg = static_cast<unsigned long>(t.vars.size());
      m += abs(t.coeff) * pow(c, deg);
      if (deg > 0) l += abs(t.coeff) * Rational(static_cast<long>(deg)) * pow(c, deg - 1);
    }
    M = std::max(M, m);
    L = std::max(L, l);
  }
  Rational bound = std::max<Rational>({M, Rational(2 * L), Rational(s.combined_degree()), Rational(1)});
  return 1 / bound;
}

std::string export_smt(const ConvRecSystem& s, const SmtOptions& opt) {
  s.validate();
  if (s.k() == 0) throw Error(ErrorKind::precondition, "export_smt needs at least one variable");
  const int d = s.combined_degree();
  std::ostringstream out;
  out << "; zeroness of f1: k = " << s.k() << ", combined degree " << d << "\n";
  out << "(set-logic QF_NRA)\n(declare-fun x () Real)\n";
  for (int i = 1; i <= s.k(); ++i) out << "(declare-fun y" << i << " () Real)\n";
  out << "(assert (<= 0 x))\n";
  if (d > 0) out << "(assert (< (* " << d << " x) 1))\n";
  if (opt.contraction_box) {
    out << "(assert (< x " << smt_num(smt_radius(s)) << "))\n";
    for (int i = 0; i < s.k(); ++i) {
      const Rational& c = s.initials[static_cast<std::size_t>(i)];
      out << "(assert (<= " << smt_num(c - 1) << " y" << i + 1 << " " << smt_num(c + 1) << "))\n";
    }
  }
  for (int i = 0; i < s.k(); ++i) {
    const auto& p = s.polys[static_cast<std::size_t>(i)];
    out << "(assert (= y" << i + 1 << " (+ " << smt_num(s.initials[static_cast<std::size_t>(i)]) << " (* x "
        << smt_poly(p) << "))))\n";
  }
  out << "(assert (not (= y1 0)))\n(check-sat)\n(get-model)\n(exit)\n";
  return out.str();
}

BackendAnswer run_smt_backend(const SmtBackend& b, const std::string& script) {
  BackendAnswer ans;
  std::string tmpl = (std::filesystem::temp_directory_path() / "ucfg-smt-XXXXXX").string();
  std::vector<char> name(tmpl.begin(), tmpl.end());
  name.push_back('\0');
  int fd = mkstemp(name.data());
  if (fd < 0) {
    ans.output = "cannot create a temporary file";
    return ans;
  }
  close(fd);
  std::string file(name.data());
  std::ofstream(file) << script;
  auto secs = std::max(1L, static_cast<long>(b.timeout_s + 0.999));
  std::string cmd = "timeout -k 2 " + std::to_string(secs) + " " + shell_quote(b.path) + " ";
  if (looks_like_z3(b.path)) cmd += "-smt2 -T:" + std::to_string(secs) + " ";
  cmd += shell_quote(file) + " 2>&1";
  int status = 0;
  ans.output = capture(cmd, &status);
  std::filesystem::remove(file);
  std::istringstream lines(ans.output);
  std::string first;
  std::getline(lines, first);
  first.erase(std::remove_if(first.begin(), first.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
              first.end());
  if (first == "sat")
    ans.kind = BackendAnswer::Kind::sat;
  else if (first == "unsat")
    ans.kind = BackendAnswer::Kind::unsat;
  else if (first == "unknown" || first == "timeout")
    ans.kind = BackendAnswer::Kind::unknown;
  else
    ans.kind = BackendAnswer::Kind::failed;
  return ans;
}

std::string backend_id(const SmtBackend& b) {
  int status = 0;
  std::string v = capture("timeout 5 " + shell_quote(b.path) + " --version 2>&1", &status);
  std::string first = v.substr(0, v.find('\n'));
  std::string name = std::filesystem::path(b.path).filename().string();
  return status == 0 && !first.empty() ? name + " (" + first + ")" : name;
}

ZeronessVerdict zeroness(const ConvRecSystem& s, const ZeronessConfig& cfg) {
  s.validate();
  if (s.k() == 0) throw Error(ErrorKind::precondition, "zeroness needs at least one variable");
  ZeronessVerdict v;
  const int N = cfg.prefix_bound >= 0 ? cfg.prefix_bound : default_prefix_bound(s);
  v.bound = N;
  auto first_nonzero = [&](int limit) -> bool {
    auto f = eval_prefix(s, limit)[0];
    for (int n = 0; n <= limit; ++n)
      if (f[static_cast<std::size_t>(n)] != 0) {
        v.kind = ZeronessVerdict::Kind::nonzero_at;
        v.n = n;
        v.value = f[static_cast<std::size_t>(n)];
        return true;
      }
    return false;
  };
  if (first_nonzero(N)) return v;
  if (!cfg.backend) {
    v.kind = ZeronessVerdict::Kind::zero_bounded;
    return v;
  }
  v.backend = backend_id(*cfg.backend);
  BackendAnswer a = run_smt_backend(*cfg.backend, export_smt(s, cfg.smt));
  switch (a.kind) {
    case BackendAnswer::Kind::unsat:
      // The generating function solves the system near 0 in either encoding.
      v.kind = ZeronessVerdict::Kind::zero_certified;
      return v;
    case BackendAnswer::Kind::sat: {
      v.model = a.output.substr(a.output.find('\n') == std::string::npos ? a.output.size() : a.output.find('\n') + 1);
      if (!cfg.smt.contraction_box) {
        v.kind = ZeronessVerdict::Kind::unknown;
        v.reason = "backend found a model, but without the contraction box it may lie on another branch";
        return v;
      }
      const int M = N * std::max(1, cfg.extend_factor);
      if (first_nonzero(M)) return v;
      v.kind = ZeronessVerdict::Kind::unknown;
      v.reason = "backend reports a nonzero point; prefix is zero up to " + std::to_string(M);
      return v;
    }
    case BackendAnswer::Kind::unknown:
      v.kind = ZeronessVerdict::Kind::unknown;
      v.reason = "backend answered unknown or timed out";
      return v;
    case BackendAnswer::Kind::failed:
      break;
  }
  v.kind = ZeronessVerdict::Kind::unknown;
  v.reason = "backend failed: " + a.output.substr(0, 200);
  return v;
}

}  // namespace ucfg
