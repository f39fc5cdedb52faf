#include "ucfg/sqrtsum.hpp"

#include <algorithm>

#include "json.hpp"
#include "ucfg/error.hpp"
#include "ucfg/lfp.hpp"

namespace ucfg {

namespace {

bool is_power_of(const BigInt& value, const BigInt& base, int* exponent) {
  BigInt v = 1;
  for (int e = 0; v <= value; ++e, v *= base)
    if (v == value) {
      *exponent = e;
      return true;
    }
  return false;
}

BigInt floor_div(const Rational& q) {
  BigInt f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f;
}

BigInt ceil_div(const Rational& q) {
  BigInt f;
  mpz_cdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f;
}

BigInt big(const nlohmann::json& v, const char* what) {
  if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0))
    return BigInt(std::to_string(v.get<unsigned long long>()));
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) return BigInt(s);
  }
  throw Error(ErrorKind::syntax, std::string("instance: ") + what + " must be a nonnegative integer");
}

// √z bounded by integers scaled by 2^bits.
struct RootBounds {
  Rational lo, hi;
  bool exact;
};
RootBounds root(const BigInt& z, int bits) {
  bool exact = false;
  BigInt r = isqrt(z, &exact);
  if (exact) return {Rational(r), Rational(r), true};
  BigInt s = isqrt(z << (2 * bits));
  Rational scale = Rational(BigInt(1) << bits);
  return {Rational(s) / scale, Rational(s + 1) / scale, false};
}

CompareOp flipped(CompareOp op) {
  switch (op) {
    case CompareOp::le: return CompareOp::ge;
    case CompareOp::lt: return CompareOp::gt;
    case CompareOp::gt: return CompareOp::lt;
    case CompareOp::ge: return CompareOp::le;
  }
  return op;
}

std::optional<bool> compare_interval(const Rational& lo, const Rational& hi, CompareOp op, const Rational& v) {
  switch (op) {
    case CompareOp::ge:
      if (lo >= v) return true;
      if (hi < v) return false;
      break;
    case CompareOp::gt:
      if (lo > v) return true;
      if (hi <= v) return false;
      break;
    case CompareOp::le:
      if (hi <= v) return true;
      if (lo > v) return false;
      break;
    case CompareOp::lt:
      if (hi < v) return true;
      if (lo >= v) return false;
      break;
  }
  return std::nullopt;
}

Regex then(Regex a, Regex b) { return b.kind() == Regex::Kind::epsilon ? a : Regex::cat(std::move(a), std::move(b)); }

// Lexicographic rank interval [lo, hi) of Σ_m^k as a union of prefix blocks.
Regex interval(int m, int k, const BigInt& lo, const BigInt& hi, const Regex& sigma) {
  if (lo >= hi) return Regex::none();
  BigInt size = pow(BigInt(m), static_cast<unsigned long>(k));
  if (lo == 0 && hi == size) return Regex::power(sigma, k);
  BigInt child = size / m;
  BigInt dl = lo / child, dh = (hi - 1) / child;
  int l = static_cast<int>(dl.get_si()), h = static_cast<int>(dh.get_si());
  if (l == h) return then(Regex::sym(l), interval(m, k - 1, lo - dl * child, hi - dl * child, sigma));
  std::vector<Regex> parts{then(Regex::sym(l), interval(m, k - 1, lo - dl * child, child, sigma))};
  if (h - l > 1) {
    std::vector<Regex> mid;
    for (int a = l + 1; a < h; ++a) mid.push_back(Regex::sym(a));
    parts.push_back(then(Regex::alt_all(mid), Regex::power(sigma, k - 1)));
  }
  parts.push_back(then(Regex::sym(h), interval(m, k - 1, 0, hi - dh * child, sigma)));
  return Regex::alt_all(parts);
}

std::string nt_x(int i) { return "X" + std::to_string(i); }
std::string nt_c(int i) { return "C" + std::to_string(i); }
std::string nt_state(int i, int q) { return "C" + std::to_string(i) + "_" + std::to_string(q); }

int grammar_size(const Grammar& g) {
  int s = 0;
  for (const auto& p : g.productions()) s += 1 + static_cast<int>(p.body.size());
  return s;
}

}  // namespace

SqrtSumInstance normalise_instance(const BigInt& d0, const std::vector<BigInt>& d, CompareOp op) {
  for (const auto& v : d)
    if (v < 0) throw Error(ErrorKind::precondition, "instance entries must be nonnegative");
  if (d0 < 0) throw Error(ErrorKind::precondition, "d0 must be nonnegative");
  SqrtSumInstance inst;
  inst.op = op;
  inst.original = d.size();
  inst.original_d0 = d0;
  inst.d0 = d0;
  inst.d = d;
  BigInt mx = 0;
  for (const auto& v : d) mx = std::max(mx, v);
  const int n = inst.n();
  int e = 0;
  if (n >= 3 && n % 2 == 1 && is_power_of(mx, BigInt(n + 1), &e) && e % 2 == 0) {
    inst.h = e / 2;
    inst.dmax = mx;
    return inst;
  }
  int target = std::max(3, n + 1);
  if (target % 2 == 0) ++target;
  while (inst.n() < target - 1) {
    inst.d.push_back(1);
    inst.d0 += 1;
  }
  const BigInt base = target + 1;
  BigInt top = 1, half = 1;
  while (top < mx) {
    top *= base * base;
    half *= base;
    ++inst.h;
  }
  inst.d.push_back(top);
  inst.d0 += half;
  inst.dmax = top;
  return inst;
}

SqrtSumInstance parse_instance_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::syntax, std::string("instance: ") + e.what());
  }
  if (!j.is_object() || !j.contains("d0") || !j.contains("d") || !j["d"].is_array())
    throw Error(ErrorKind::syntax, "instance: expected {\"d0\": ..., \"d\": [...], \"op\": ...}");
  std::vector<BigInt> d;
  for (const auto& v : j["d"]) d.push_back(big(v, "every entry of d"));
  CompareOp op = CompareOp::ge;
  if (j.contains("op")) {
    if (!j["op"].is_string()) throw Error(ErrorKind::syntax, "instance: op must be a string");
    op = parse_compare_op(j["op"].get<std::string>());
  }
  return normalise_instance(big(j["d0"], "d0"), d, op);
}

Regex representation_regex(int n, int m, const BigInt& p, const BigInt& q, int ell) {
  if (n < 2) throw Error(ErrorKind::precondition, "representation: base n+1 needs n >= 2");
  if (m < 1 || m > n) throw Error(ErrorKind::precondition, "representation: letter budget m must satisfy 1 <= m <= n");
  if (q <= 0 || p < 0) throw Error(ErrorKind::precondition, "representation: need p >= 0 and q > 0");
  if (ell < 0) throw Error(ErrorKind::precondition, "representation: exponent must be nonnegative");
  const Rational c = make_rational(p, q);
  const int B = n + 1;
  if (c > make_rational(1, n - m + 1))
    throw Error(ErrorKind::precondition, "representation: c = " + to_string(c) + " exceeds 1/(n-m+1)");
  if (pow(BigInt(B), static_cast<unsigned long>(ell)) % c.get_den() != 0)
    throw Error(ErrorKind::precondition, "representation: denominator " + to_string(BigInt(c.get_den())) +
                                             " does not divide (n+1)^" + std::to_string(ell));

  // Cylinder weight in units of the level's word measure.
  const Rational W = make_rational(B, B - m);
  BigInt rest = B - m;
  for (BigInt g; (g = gcd(rest, BigInt(B))) > 1;) rest /= g;
  const bool cylinders = rest == 1;

  std::vector<Regex> letters;
  for (int a = 0; a < m; ++a) letters.push_back(Regex::sym(a));
  const Regex sigma = Regex::alt_all(letters);
  const Regex tail = Regex::star(sigma);

  std::vector<Regex> parts;
  Rational R = c * B;  // remaining measure in units of (n+1)^{-(k+1)}
  BigInt F = 1;        // free words of length k: the last F in lexicographic order
  const int limit = ell + 256 + 8 * static_cast<int>(mpz_sizeinbase(q.get_mpz_t(), 2));
  for (int k = 0; R != 0; ++k) {
    if (k > limit) throw Error(ErrorKind::precondition, "representation: no finite expansion found");
    const BigInt all = pow(BigInt(m), static_cast<unsigned long>(k));
    const BigInt start = all - F;
    if (cylinders && R == Rational(F) * W) {
      parts.push_back(Regex::cat(interval(m, k, start, all, sigma), tail));
      break;
    }
    // y cylinders then s single words; the rest must fit below the free words.
    BigInt ymax = cylinders ? std::min<BigInt>(F, floor_div(R / W)) : BigInt(0);
    std::vector<BigInt> tries;
    for (BigInt y = ymax; y >= 0 && y + 4 > ymax; --y) tries.push_back(y);
    if (tries.back() != 0) tries.push_back(0);
    std::optional<std::pair<BigInt, BigInt>> pick;
    for (const auto& y : tries) {
      Rational left = R - Rational(y) * W;
      Rational room = Rational(F - y) * (W - 1);
      BigInt smax = std::min<BigInt>(F - y, floor_div(left));
      BigInt smin = std::max<BigInt>(0, ceil_div(left - room));
      if (smin > smax) continue;
      // without cylinders the room below is approached but never filled
      if (!cylinders && left - smax == room && room != 0) continue;
      pick = {y, smax};
      break;
    }
    if (!pick)
      throw Error(ErrorKind::precondition, "representation: " + to_string(c) +
                                               " lies in a gap of the measures reachable with " + std::to_string(m) +
                                               " letter(s)");
    const auto& [y, s] = *pick;
    if (y > 0) parts.push_back(Regex::cat(interval(m, k, start, start + y, sigma), tail));
    if (s > 0) parts.push_back(interval(m, k, start + y, start + y + s, sigma));
    R = (R - Rational(y) * W - Rational(s)) * B;
    F = m * (F - y);
  }
  return Regex::alt_all(parts).with_unambiguous(true);
}

ReductionOutput build_reduction(const SqrtSumInstance& inst) {
  const int n = inst.n();
  if (n < 3 || n % 2 == 0) throw Error(ErrorKind::precondition, "reduction needs a normalised instance (n odd, n >= 3)");
  const BigInt& d = inst.dmax;
  const Alphabet sigma = Alphabet::indexed(n);
  const Letter an = n - 1;
  const int half = (n + 1) / 2;

  ReductionOutput out;
  out.ell = 4 * inst.h + 1;
  out.eps = (Rational(n) - make_rational(inst.d0, d)) / (n + 1);
  out.measure_op = flipped(inst.op);
  std::vector<Regex> a_letters;
  for (int j = 0; j < half; ++j) a_letters.push_back(Regex::sym(j));
  out.a_regex = Regex::alt_all(a_letters).with_unambiguous(true);

  std::vector<Automaton> automata;
  for (int i = 0; i < n; ++i) {
    const BigInt& di = inst.d[static_cast<std::size_t>(i)];
    Rational ci = make_rational(d * d - di, 2 * d * d);
    out.c.push_back(ci);
    out.c_regex.push_back(representation_regex(n, n - 1, ci.get_num(), ci.get_den(), out.ell));
    automata.push_back(trim(regex_to_nfa(out.c_regex.back(), sigma)));
  }

  // Display form. Nonterminal order: X0..Xn, A, C_i and its states per i.
  std::vector<std::string> names;
  for (int i = 0; i <= n; ++i) names.push_back(nt_x(i));
  const int A = static_cast<int>(names.size());
  names.push_back("A");
  std::vector<int> c_of(static_cast<std::size_t>(n)), state_base(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    c_of[static_cast<std::size_t>(i)] = static_cast<int>(names.size());
    names.push_back(nt_c(i + 1));
    state_base[static_cast<std::size_t>(i)] = static_cast<int>(names.size());
    for (int q = 0; q < automata[static_cast<std::size_t>(i)].state_count(); ++q) names.push_back(nt_state(i + 1, q));
  }
  auto state_rules = [&](int i, int head, int q, std::vector<Production>& prods, bool gnf, int e) {
    const auto& a = automata[static_cast<std::size_t>(i)];
    if (a.is_accepting(q)) prods.push_back({head, {}});
    for (int id : a.out(q)) {
      const auto& t = a.transitions()[static_cast<std::size_t>(id)];
      Production p{head, {Symbol::t(t.letter), Symbol::nt(state_base[static_cast<std::size_t>(i)] + t.to)}};
      if (gnf) p.body.push_back(Symbol::nt(e));
      prods.push_back(p);
    }
  };

  std::vector<Production> prods;
  for (int i = 1; i <= n; ++i) prods.push_back({0, {Symbol::t(i - 1), Symbol::nt(i)}});
  for (int i = 1; i <= n; ++i) {
    prods.push_back({i, {Symbol::nt(c_of[static_cast<std::size_t>(i - 1)])}});
    prods.push_back({i, {Symbol::nt(A), Symbol::nt(i), Symbol::t(an), Symbol::nt(i)}});
  }
  for (int j = 0; j < half; ++j) prods.push_back({A, {Symbol::t(j)}});
  for (int i = 0; i < n; ++i) {
    const auto& a = automata[static_cast<std::size_t>(i)];
    for (int q0 : a.initial()) state_rules(i, c_of[static_cast<std::size_t>(i)], q0, prods, false, 0);
    for (int q = 0; q < a.state_count(); ++q)
      if (!a.is_initial(q)) state_rules(i, state_base[static_cast<std::size_t>(i)] + q, q, prods, false, 0);
  }
  std::stable_sort(prods.begin(), prods.end(), [](const Production& x, const Production& y) { return x.head < y.head; });
  out.grammar = trim(Grammar(sigma, names, 0, prods, UnambiguityStatus::claimed())).grammar;
  out.size = grammar_size(out.grammar);

  // Short GNF: X_0 <- a_i X_i E, X_i <- a_j X_i T_i | (C_i's rules), T_i <- a_n X_i E.
  std::vector<std::string> gn;
  for (int i = 0; i <= n; ++i) gn.push_back(nt_x(i));
  const int t_base = static_cast<int>(gn.size());
  for (int i = 1; i <= n; ++i) gn.push_back("T" + std::to_string(i));
  const int E = static_cast<int>(gn.size());
  gn.push_back("E");
  for (int i = 0; i < n; ++i) {
    state_base[static_cast<std::size_t>(i)] = static_cast<int>(gn.size());
    for (int q = 0; q < automata[static_cast<std::size_t>(i)].state_count(); ++q) gn.push_back(nt_state(i + 1, q));
  }
  std::vector<Production> g2;
  for (int i = 1; i <= n; ++i) g2.push_back({0, {Symbol::t(i - 1), Symbol::nt(i), Symbol::nt(E)}});
  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j < half; ++j) g2.push_back({i, {Symbol::t(j), Symbol::nt(i), Symbol::nt(t_base + i - 1)}});
    for (int q0 : automata[static_cast<std::size_t>(i - 1)].initial()) state_rules(i - 1, i, q0, g2, true, E);
    g2.push_back({t_base + i - 1, {Symbol::t(an), Symbol::nt(i), Symbol::nt(E)}});
  }
  g2.push_back({E, {}});
  for (int i = 0; i < n; ++i)
    for (int q = 0; q < automata[static_cast<std::size_t>(i)].state_count(); ++q)
      state_rules(i, state_base[static_cast<std::size_t>(i)] + q, q, g2, true, E);
  std::stable_sort(g2.begin(), g2.end(), [](const Production& x, const Production& y) { return x.head < y.head; });
  out.gnf = trim(Grammar(sigma, gn, 0, g2, UnambiguityStatus::claimed())).grammar;
  return out;
}

VerifyReport verify_reduction(const ReductionOutput& out, const SqrtSumInstance& inst, const VerifyOptions& opt) {
  VerifyReport rep;
  const int n = inst.n();
  const Rational d = inst.dmax;
  const Rational x = make_rational(1, n + 1);
  const Alphabet& sigma = out.gnf.alphabet();

  // Direct value and the fixpoint identity c_i + (1 - s)²/2 = 1 - s with s = √d_i/d.
  Rational lo_sum = 0, hi_sum = 0;
  rep.direct_exact = true;
  rep.residuals_zero = true;
  for (int i = 0; i < n; ++i) {
    const BigInt& di = inst.d[static_cast<std::size_t>(i)];
    auto r = root(di, opt.sqrt_bits);
    lo_sum += r.lo;
    hi_sum += r.hi;
    const Rational& ci = out.c[static_cast<std::size_t>(i)];
    Rational residual;
    if (r.exact) {
      Rational xi = 1 - r.lo / d;
      residual = xi - ci - xi * xi / 2;
    } else {
      rep.direct_exact = false;
      residual = ci + make_rational(1, 2) + Rational(di) / (2 * d * d) - 1;
    }
    rep.residuals.push_back(residual);
    rep.residual_exact.push_back(r.exact);
    if (residual != 0) rep.residuals_zero = false;
  }
  rep.direct = {(n - hi_sum / d) * x, (n - lo_sum / d) * x, true};

  rep.alphabet_ok = true;
  for (int i = 0; i < n; ++i) {
    auto a = regex_to_nfa(out.c_regex[static_cast<std::size_t>(i)], sigma);
    rep.c_measure_exact.push_back(regular_measure_exact(a) == out.c[static_cast<std::size_t>(i)]);
    auto trimmed = trim(a);
    for (const auto& t : trimmed.transitions())
      if (t.letter == n - 1) rep.alphabet_ok = false;
  }
  auto a_nfa = regex_to_nfa(out.a_regex, sigma);
  rep.a_measure_exact = regular_measure_exact(a_nfa) == out.a / (n + 1);
  auto counts = path_counts(a_nfa, 3);
  if (counts[0] != 0 || counts[1] != (n + 1) / 2 || counts[2] != 0 || counts[3] != 0) rep.alphabet_ok = false;
  for (const auto& t : a_nfa.transitions())
    if (t.letter == n - 1) rep.alphabet_ok = false;

  // All nonterminal values from one fixpoint computation.
  auto sys = grammar_to_convrec(out.gnf);
  LfpOptions lopt;
  lopt.tol = opt.measure_tol * (n + 1);
  lopt.ceiling = n + 1;
  auto lfp = lfp_eval(gf_system(sys, x), lopt);
  auto scaled = [&](std::size_t v) {
    const auto& iv = lfp.values[v];
    return IntervalRational{x * iv.lo, iv.upper_known ? x * iv.hi : Rational(1), iv.upper_known};
  };
  rep.measure = scaled(0);
  rep.fixpoint_ok = lfp.status != LfpResult::Status::diverged && rep.measure.upper_known;
  for (int i = 1; i <= n; ++i) {
    auto it = std::find(sys.labels.begin(), sys.labels.end(), nt_x(i));
    IntervalRational xi{0, 0, true};  // trimmed away: empty language
    if (it != sys.labels.end()) xi = scaled(static_cast<std::size_t>(it - sys.labels.begin()));
    if (!xi.upper_known) rep.fixpoint_ok = false;
    const Rational& ci = out.c[static_cast<std::size_t>(i - 1)];
    // g(t) = c + t²/2 - t decreases on [0, 1]; a root within tol lies in the interval
    if (ci + xi.lo * xi.lo / 2 - xi.lo < -opt.tol || ci + xi.hi * xi.hi / 2 - xi.hi > opt.tol) rep.fixpoint_ok = false;
    rep.x.push_back(xi);
  }
  Rational gap = std::max<Rational>(abs(rep.measure.hi - rep.direct.lo), abs(rep.direct.hi - rep.measure.lo));
  rep.agree = rep.measure.upper_known && gap <= opt.tol;

  CompareConfig cc;
  cc.search_bound = 8;
  try {
    rep.comparison = compare_measure(out.gnf, out.measure_op, out.eps, cc);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::not_unambiguous) throw;
    rep.comparison.kind = ComparisonResult::Kind::undecided;
    rep.comparison.reason = e.what();
  }
  rep.direct_verdict = compare_interval(lo_sum, hi_sum, inst.op, Rational(inst.d0));
  if (rep.measure.upper_known) rep.weight_verdict = compare_interval(rep.measure.lo, rep.measure.hi, out.measure_op, out.eps);
  rep.verdict_matches = rep.direct_verdict.has_value() &&
                        rep.comparison.kind == (*rep.direct_verdict ? ComparisonResult::Kind::holds
                                                                    : ComparisonResult::Kind::fails);
  if (opt.unambiguity_bound >= 0) rep.unambiguity = check_unambiguous_bounded(out.gnf, opt.unambiguity_bound);
  if (opt.mc_samples > 0) rep.language_estimate = monte_carlo_measure(out.gnf, opt.mc_samples, opt.mc_seed);
  return rep;
}

std::string reduction_json(const ReductionOutput& out, const SqrtSumInstance& inst) {
  nlohmann::ordered_json j;
  auto strs = [](const std::vector<BigInt>& v) {
    std::vector<std::string> s;
    for (const auto& z : v) s.push_back(to_string(z));
    return s;
  };
  j["instance"] = {{"d0", to_string(inst.d0)},
                   {"d", strs(inst.d)},
                   {"op", to_string(inst.op)},
                   {"n", inst.n()},
                   {"h", inst.h},
                   {"d_max", to_string(inst.dmax)},
                   {"original_entries", inst.original},
                   {"original_d0", to_string(inst.original_d0)}};
  j["epsilon"] = to_string(out.eps);
  j["epsilon_decimal"] = to_decimal(out.eps, 30);
  j["measure_op"] = to_string(out.measure_op);
  j["a"] = to_string(out.a);
  std::vector<std::string> cs, regex_sizes;
  for (std::size_t i = 0; i < out.c.size(); ++i) {
    cs.push_back(to_string(out.c[i]));
    regex_sizes.push_back(std::to_string(out.c_regex[i].size()));
  }
  j["c"] = cs;
  j["c_regex_sizes"] = regex_sizes;
  j["ell"] = out.ell;
  j["grammar_size"] = out.size;
  j["grammar_nonterminals"] = out.grammar.nonterminal_count();
  j["gnf_nonterminals"] = out.gnf.nonterminal_count();
  return j.dump(2) + "\n";
}

}  // namespace ucfg
