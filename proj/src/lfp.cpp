#include "ucfg/lfp.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "ucfg/error.hpp"

namespace ucfg {

const char* to_string(LfpResult::Status s) {
  switch (s) {
    case LfpResult::Status::converged: return "converged";
    case LfpResult::Status::unknown: return "unknown";
    case LfpResult::Status::diverged: return "diverged";
  }
  return "?";
}

namespace {

using Vec = std::vector<Rational>;

struct Term {
  Rational a;  // x * coeff
  std::vector<int> vars;
};

// F(y) = c + sum of a * prod y over the nonconstant terms.
struct Map {
  int k = 0;
  Vec c;
  std::vector<std::vector<Term>> terms;

  explicit Map(const GfSystem& g) : k(g.system.k()), c(g.system.initials), terms(static_cast<std::size_t>(k)) {
    for (int i = 0; i < k; ++i)
      for (const auto& t : g.system.polys[static_cast<std::size_t>(i)].terms()) {
        Rational a = g.x * t.coeff;
        if (a == 0) continue;
        if (t.vars.empty())
          c[static_cast<std::size_t>(i)] += a;
        else
          terms[static_cast<std::size_t>(i)].push_back({a, t.vars});
      }
  }

  Vec apply(const Vec& y) const {
    Vec out = c;
    Rational m;
    for (int i = 0; i < k; ++i)
      for (const auto& t : terms[static_cast<std::size_t>(i)]) {
        m = t.a;
        for (int v : t.vars) m *= y[static_cast<std::size_t>(v)];
        out[static_cast<std::size_t>(i)] += m;
      }
    return out;
  }

  // J(y) d, exactly.
  Vec jacobian_times(const Vec& y, const Vec& d) const {
    Vec out(static_cast<std::size_t>(k), 0);
    Rational m;
    for (int i = 0; i < k; ++i)
      for (const auto& t : terms[static_cast<std::size_t>(i)])
        for (std::size_t p = 0; p < t.vars.size(); ++p) {
          m = t.a * d[static_cast<std::size_t>(t.vars[p])];
          if (m == 0) continue;
          for (std::size_t q = 0; q < t.vars.size(); ++q)
            if (q != p) m *= y[static_cast<std::size_t>(t.vars[q])];
          out[static_cast<std::size_t>(i)] += m;
        }
    return out;
  }

  // I - J(y), formed exactly so that entries near cancellation keep their digits.
  Eigen::SparseMatrix<double> i_minus_jacobian(const Vec& y) const {
    std::map<std::pair<int, int>, Rational> entries;
    for (int i = 0; i < k; ++i) {
      entries[{i, i}] += 1;
      Rational m;
      for (const auto& t : terms[static_cast<std::size_t>(i)])
        for (std::size_t p = 0; p < t.vars.size(); ++p) {
          m = t.a;
          for (std::size_t q = 0; q < t.vars.size(); ++q)
            if (q != p) m *= y[static_cast<std::size_t>(t.vars[q])];
          entries[{i, t.vars[p]}] -= m;
        }
    }
    std::vector<Eigen::Triplet<double>> trips;
    for (const auto& [ij, v] : entries)
      if (v != 0) trips.emplace_back(ij.first, ij.second, v.get_d());
    Eigen::SparseMatrix<double> a(k, k);
    a.setFromTriplets(trips.begin(), trips.end());
    return a;
  }
};

bool leq(const Vec& a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

struct NewtonSolve {
  std::vector<double> delta, v;  // (I-J)δ = b and (I-J)v = 1
};

std::optional<NewtonSolve> solve(const Map& f, const Vec& y, const Vec& b) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  auto a = f.i_minus_jacobian(y);
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) return std::nullopt;
  Eigen::VectorXd rhs(f.k), ones = Eigen::VectorXd::Ones(f.k);
  for (int i = 0; i < f.k; ++i) rhs[i] = b[static_cast<std::size_t>(i)].get_d();
  Eigen::VectorXd d = lu.solve(rhs), v = lu.solve(ones);
  if (lu.info() != Eigen::Success) return std::nullopt;
  NewtonSolve out;
  for (int i = 0; i < f.k; ++i) {
    if (!std::isfinite(d[i]) || !std::isfinite(v[i]) || v[i] <= 0) return std::nullopt;
    out.delta.push_back(d[i]);
    out.v.push_back(v[i]);
  }
  return out;
}

// J v < v componentwise for some v > 0 bounds the spectral radius of J below 1.
bool contraction_certificate(const Map& f, const Vec& y, const Vec& v) {
  Vec jv = f.jacobian_times(y, v);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(jv[i] < v[i])) return false;
  return true;
}

}  // namespace

LfpResult lfp_eval(const GfSystem& gfs, const LfpOptions& opt) {
  gfs.system.validate();
  if (gfs.x < 0 || !gfs.system.monotone())
    throw Error(ErrorKind::nonmonotone, "lfp_eval needs nonnegative initials, coefficients and evaluation point");
  if (opt.tol <= 0 || opt.bits < 8) throw Error(ErrorKind::precondition, "lfp_eval needs tol > 0 and bits >= 8");
  const Map f(gfs);
  const auto k = static_cast<std::size_t>(f.k);
  const int B = opt.bits;
  const Rational shrink = 1 - Rational(1) / Rational(BigInt(1) << 30);

  LfpResult res;
  Vec lo(k, 0);
  std::optional<Vec> hi;

  auto finish = [&](LfpResult::Status st, bool exact) {
    res.status = st;
    res.exact = exact;
    res.values.clear();
    for (std::size_t i = 0; i < k; ++i)
      res.values.push_back({lo[i], exact ? lo[i] : (hi ? (*hi)[i] : lo[i]), exact || hi.has_value()});
    return res;
  };
  auto width_ok = [&] {
    if (!hi) return false;
    for (std::size_t i = 0; i < k; ++i)
      if ((*hi)[i] - lo[i] > opt.tol) return false;
    return true;
  };
  auto offer_upper = [&](const Vec& u) {
    Vec fu = f.apply(u);
    if (!leq(fu, u)) return false;
    if (!hi) {
      hi = u;
    } else {
      for (std::size_t i = 0; i < k; ++i) (*hi)[i] = std::min((*hi)[i], u[i]);
    }
    if (fu == u) {
      // A fixpoint u with spectral radius of J(u) below 1 is the least one.
      if (auto s = solve(f, u, Vec(k, 0))) {
        Vec v(k);
        for (std::size_t i = 0; i < k; ++i) v[i] = from_double(s->v[i]);
        if (contraction_certificate(f, u, v)) {
          lo = u;
          return true;
        }
      }
    }
    return false;
  };

  if (k == 0) return finish(LfpResult::Status::converged, true);

  for (int it = 1; it <= opt.max_iter; ++it) {
    res.iterations = it;
    Vec flo = f.apply(lo);
    if (flo == lo) return finish(LfpResult::Status::converged, true);
    Vec b(k), next(k);
    for (std::size_t i = 0; i < k; ++i) {
      b[i] = flo[i] - lo[i];
      next[i] = std::max(lo[i], round_down(flo[i], B));
    }

    auto s = solve(f, lo, b);
    Vec step(k, 0);
    bool newton = false;
    if (s) {
      Vec v(k);
      for (std::size_t i = 0; i < k; ++i) {
        step[i] = round_down(from_double(std::max(0.0, s->delta[i])) * shrink, B);
        v[i] = from_double(s->v[i]);
      }
      // δ <= b + Jδ with ρ(J) < 1 gives δ <= (I-J)^{-1} b <= lfp - lo.
      if (contraction_certificate(f, lo, v)) {
        Vec jd = f.jacobian_times(lo, step);
        newton = true;
        for (std::size_t i = 0; i < k && newton; ++i) newton = step[i] <= b[i] + jd[i];
      }
      if (newton) {
        ++res.newton_steps;
        for (std::size_t i = 0; i < k; ++i) next[i] = std::max<Rational>(next[i], lo[i] + step[i]);
      }
    }
    lo = std::move(next);
    if (opt.on_iterate) opt.on_iterate(it, lo);
    for (std::size_t i = 0; i < k; ++i)
      if (lo[i] > opt.ceiling) {
        res.note = "lower bound exceeded the ceiling " + to_decimal(opt.ceiling, 0);
        hi.reset();
        return finish(LfpResult::Status::diverged, false);
      }

    if (s && !width_ok()) {
      // Nearby small-denominator points catch rational fixpoints; otherwise step
      // past the estimate along the direction v.
      Rational gap = 0;
      for (std::size_t i = 0; i < k; ++i) gap = std::max(gap, from_double(std::fabs(s->delta[i])));
      Vec simple(k), local(k);
      for (std::size_t i = 0; i < k; ++i) {
        simple[i] = simplest_between(lo[i], lo[i] + 4 * gap + opt.tol / 4);
        local[i] = simplest_between(lo[i], lo[i] + 4 * from_double(std::fabs(s->delta[i])) + opt.tol / 4);
      }
      if (offer_upper(simple)) return finish(LfpResult::Status::converged, true);
      // Components fed by a critical one converge slowly; lift them onto F(u)
      // once or twice before testing, which settles acyclic dependents exactly.
      for (int pass = 0; pass < 3; ++pass) {
        Vec fl = f.apply(local);
        if (leq(fl, local)) {
          if (offer_upper(local)) return finish(LfpResult::Status::converged, true);
          break;
        }
        for (std::size_t i = 0; i < k; ++i) local[i] = std::max(local[i], fl[i]);
      }
      Rational t = gap / Rational(BigInt(1) << 20) + Rational(1) / Rational(BigInt(1) << (B - 8));
      for (int attempt = 0; attempt < 6 && !width_ok(); ++attempt, t *= 1 << 6) {
        Vec u(k);
        for (std::size_t i = 0; i < k; ++i)
          u[i] = round_up(lo[i] + from_double(s->delta[i] > 0 ? s->delta[i] : 0) + t * from_double(s->v[i]), B);
        if (offer_upper(u)) return finish(LfpResult::Status::converged, true);
        if (hi) break;
      }
    }
    if (width_ok()) return finish(LfpResult::Status::converged, false);
  }
  res.note = "iteration limit reached";
  return finish(LfpResult::Status::unknown, false);
}

}  // namespace ucfg
