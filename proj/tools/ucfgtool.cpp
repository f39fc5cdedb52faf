#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ucfg/automaton.hpp"
#include "ucfg/convrec.hpp"
#include "ucfg/derivations.hpp"
#include "ucfg/error.hpp"
#include "ucfg/hash.hpp"
#include "ucfg/measure.hpp"
#include "ucfg/reductions.hpp"
#include "ucfg/sqrtsum.hpp"
#include "ucfg/universality.hpp"
#include "ucfg/zeroness.hpp"

using namespace ucfg;
using json = nlohmann::ordered_json;

namespace {

enum Exit { holds = 0, fails = 1, undecided = 2, usage = 64, data = 65, no_input = 66, internal = 70, unavailable = 69 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Report {
  std::string command;
  json inputs = json::array();
  json config = json::object();
  json result = json::object();
  std::string verdict;
  int exit = Exit::holds;
  std::vector<std::pair<std::string, std::string>> lines;  // text mode body
  std::optional<std::string> raw;                          // printed verbatim in text mode

  void add(std::string key, std::string value) { lines.emplace_back(std::move(key), std::move(value)); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + path);
}

std::string input(Report& r, const std::string& path) {
  std::string text = read_file(path);
  r.inputs.push_back({{"path", path}, {"hash", content_hash(text)}});
  return text;
}

std::string show(const Alphabet& sigma, const Word& w) { return w.empty() ? "eps" : format_word(sigma, w); }

json rational_json(const Rational& q) { return {{"exact", to_string(q)}, {"decimal", to_decimal(q, 20)}}; }

json interval_json(const IntervalRational& iv) {
  json j = {{"lo", rational_json(iv.lo)}};
  if (iv.upper_known) {
    j["hi"] = rational_json(iv.hi);
    j["width"] = to_decimal(iv.width(), 20);
  } else {
    j["hi"] = nullptr;
  }
  return j;
}

std::string interval_text(const IntervalRational& iv) {
  return "[" + to_decimal(iv.lo, 15) + ", " + (iv.upper_known ? to_decimal(iv.hi, 15) : std::string("?")) + "]";
}

json measure_json(const Measure& m) {
  switch (m.kind) {
    case Measure::Kind::exact: return {{"kind", "exact"}, {"value", rational_json(m.value)}};
    case Measure::Kind::interval: return {{"kind", "interval"}, {"interval", interval_json(m.interval)}, {"status", m.status}};
    case Measure::Kind::estimate:
      return {{"kind", "estimate"},   {"mean", m.mean},         {"half_width", m.half_width},
              {"confidence", m.confidence}, {"wilson", {m.lower, m.upper}}, {"samples", m.samples},
              {"seed", m.seed},       {"aborted", m.aborted}};
  }
  return {};
}

std::string measure_text(const Measure& m) {
  std::ostringstream s;
  switch (m.kind) {
    case Measure::Kind::exact: return to_string(m.value) + " = " + to_decimal(m.value, 15);
    case Measure::Kind::interval: return interval_text(m.interval);
    case Measure::Kind::estimate:
      s << m.mean << " +- " << m.half_width << " (" << m.samples << " samples, seed " << m.seed << ")";
      return s.str();
  }
  return {};
}

std::string status_text(const UnambiguityStatus& s) {
  switch (s.kind) {
    case UnambiguityStatus::Kind::claimed: return "claimed";
    case UnambiguityStatus::Kind::bounded_verified: return "verified " + std::to_string(s.bound);
    case UnambiguityStatus::Kind::unknown: break;
  }
  return "unknown";
}

Rational parse_tolerance(const std::string& text) {
  // "2^-40" is accepted besides plain rationals
  auto caret = text.find("^-");
  if (caret != std::string::npos) {
    BigInt base(text.substr(0, caret));
    return Rational(1, 1) / Rational(pow(base, std::stoul(text.substr(caret + 2))));
  }
  return parse_rational(text);
}

bool looks_like_automaton(const std::string& text) {
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (line.rfind("states:", 0) == 0) return true;
  return false;
}

Grammar trusted_gnf(const Grammar& g, int check, Report& r) {
  Grammar s = to_short_gnf(g).grammar;
  if (g.unambiguity().trusted()) return s.with_status(g.unambiguity());
  auto c = check_unambiguous_bounded(s, check);
  if (!c.ok)
    throw Error(ErrorKind::not_unambiguous, "ambiguous: \"" + show(g.alphabet(), c.counterexample->word) + "\" has " +
                                                to_string(c.counterexample->count) + " derivations");
  r.add("unambiguity", "verified " + std::to_string(check));
  return s.with_status(UnambiguityStatus::verified(check));
}

// --- universality ----------------------------------------------------------

struct UniversalityArgs {
  std::string grammar;
  int bound = 32;
  std::string tol = "2^-40";
  int check = 8;
  bool no_measure = false;
  std::string backend;
  double timeout = 10;
};

UniversalityConfig universality_config(const UniversalityArgs& a, Report& r) {
  UniversalityConfig cfg;
  cfg.bound = a.bound;
  cfg.measure_tol = parse_tolerance(a.tol);
  cfg.unambiguity_check = a.check;
  cfg.measure = !a.no_measure;
  if (!a.backend.empty()) cfg.backend = SmtBackend{a.backend, a.timeout};
  r.config["bound"] = a.bound;
  r.config["measure_tol"] = to_string(cfg.measure_tol);
  r.config["unambiguity_check"] = a.check;
  r.config["measure"] = cfg.measure;
  r.config["smt_backend"] = a.backend.empty() ? json(nullptr) : json(a.backend);
  if (!a.backend.empty()) r.config["smt_timeout_s"] = a.timeout;
  return cfg;
}

int exit_for(UniversalityReport::Kind k) {
  switch (k) {
    case UniversalityReport::Kind::not_universal: return Exit::fails;
    case UniversalityReport::Kind::undecided: return Exit::undecided;
    default: return Exit::holds;
  }
}

json universality_json(const UniversalityReport& u, const Alphabet& sigma) {
  json j = {{"kind", to_string(u.kind)}, {"verdict", verdict_line(u, sigma)}};
  j["witness"] = u.witness ? json(show(sigma, *u.witness)) : json(nullptr);
  j["first_gap"] = u.first_gap ? json(*u.first_gap) : json(nullptr);
  json counts = json::array();
  for (const auto& c : u.counts) counts.push_back(to_string(c));
  j["counts"] = counts;
  j["measure"] = u.measure ? measure_json(*u.measure) : json(nullptr);
  if (u.smt)
    j["smt"] = {{"kind", to_string(u.smt->kind)}, {"bound", u.smt->bound}, {"backend", u.smt->backend}, {"reason", u.smt->reason}};
  j["unambiguity"] = status_text(u.assumed);
  j["short_gnf"] = {{"nonterminals", u.gnf_nonterminals}, {"productions", u.gnf_productions}};
  j["reason"] = u.reason;
  return j;
}

void universality_lines(const UniversalityReport& u, const Alphabet& sigma, Report& r) {
  if (u.witness) r.add("witness", show(sigma, *u.witness) + " (length " + std::to_string(u.witness->size()) + ")");
  r.add("short GNF", std::to_string(u.gnf_nonterminals) + " nonterminals, " + std::to_string(u.gnf_productions) + " productions");
  r.add("unambiguity assumed", status_text(u.assumed));
  if (u.measure) r.add("measure", measure_text(*u.measure));
  if (u.smt) r.add("smt", std::string(to_string(u.smt->kind)) + (u.smt->backend.empty() ? "" : " (" + u.smt->backend + ")"));
  r.add("reason", u.reason);
}

void cmd_universality(const UniversalityArgs& a, Report& r) {
  auto g = parse_grammar(input(r, a.grammar));
  auto cfg = universality_config(a, r);
  auto u = decide_universality(g, cfg);
  r.verdict = verdict_line(u, g.alphabet());
  r.exit = exit_for(u.kind);
  r.result = universality_json(u, g.alphabet());
  universality_lines(u, g.alphabet(), r);
}

// --- inclusion -------------------------------------------------------------

struct InclusionArgs {
  std::string lhs, rhs, kind = "nfa-ufa";
  UniversalityArgs u;
};

void cmd_inclusion(const InclusionArgs& a, Report& r) {
  r.config["kind"] = a.kind;
  if (a.kind == "cfg-ufa") {
    r.verdict = "NOT-IMPLEMENTED";
    r.exit = Exit::unavailable;
    r.result["reason"] =
        "cfg-ufa needs the complement of a deterministic pushdown automaton, which this toolkit does not build; "
        "only the left-hand determinisation half is available (nfa-ufa, nfa-ucfg)";
    r.add("reason", r.result["reason"].get<std::string>());
    return;
  }
  auto lhs = parse_automaton(input(r, a.lhs));
  if (a.kind == "nfa-ufa") {
    auto rhs = parse_automaton(input(r, a.rhs));
    auto v = decide_nfa_in_ufa(lhs, rhs);
    r.result["provenance"] = json::parse(provenance_json(v.provenance));
    switch (v.kind) {
      case InclusionVerdict::Kind::holds:
        r.verdict = "HOLDS";
        break;
      case InclusionVerdict::Kind::fails:
        r.verdict = "FAILS(" + show(lhs.alphabet(), *v.witness) + ")";
        r.exit = Exit::fails;
        r.result["witness"] = show(lhs.alphabet(), *v.witness);
        r.add("witness", show(lhs.alphabet(), *v.witness) + " is accepted by the left side only");
        break;
      case InclusionVerdict::Kind::not_unambiguous:
        r.verdict = "RHS-AMBIGUOUS";
        r.exit = Exit::data;
        if (v.witness) {
          r.result["witness"] = show(rhs.alphabet(), *v.witness);
          r.add("witness", show(rhs.alphabet(), *v.witness) + " has two accepting runs on the right side");
        }
        break;
    }
    r.result["verdict"] = r.verdict;
    for (const auto& s : v.provenance.steps) r.add("step", s);
    return;
  }
  if (a.kind != "nfa-ucfg") throw CLI::ValidationError("--kind", "expected nfa-ufa, nfa-ucfg or cfg-ufa");
  auto rhs = parse_grammar(input(r, a.rhs));
  auto cfg = universality_config(a.u, r);
  auto v = decide_nfa_in_ucfg(lhs, rhs, cfg);
  r.result["kind"] = to_string(v.kind);
  r.result["witness"] = v.witness ? json(show(lhs.alphabet(), *v.witness)) : json(nullptr);
  r.result["provenance"] = json::parse(provenance_json(v.provenance));
  const Alphabet& lifted = v.lifted;
  r.result["universality"] = universality_json(v.universality, lifted);
  switch (v.kind) {
    case UcfgInclusionReport::Kind::fails:
      r.verdict = v.witness ? "FAILS(" + show(lhs.alphabet(), *v.witness) + ")" : "FAILS(measure)";
      r.exit = Exit::fails;
      break;
    case UcfgInclusionReport::Kind::holds_bounded: r.verdict = "HOLDS-BOUNDED(" + std::to_string(cfg.bound) + ")"; break;
    case UcfgInclusionReport::Kind::holds_certified: r.verdict = "HOLDS-CERTIFIED"; break;
    case UcfgInclusionReport::Kind::undecided: r.verdict = "UNDECIDED"; r.exit = Exit::undecided; break;
  }
  r.result["verdict"] = r.verdict;
  if (v.witness)
    r.add("witness", show(lhs.alphabet(), *v.witness) + " (lifted word of length " + std::to_string(v.lifted_witness->size()) + ")");
  r.add("lifted alphabet", std::to_string(v.provenance.lifted_alphabet) + " letters");
  for (const auto& s : v.provenance.steps) r.add("step", s);
  r.add("universality", verdict_line(v.universality, lifted));
}

// --- measure ---------------------------------------------------------------

struct MeasureArgs {
  std::string target, compare, tol = "2^-40";
  std::vector<std::uint64_t> mc;
  int check = 8;
};

std::pair<CompareOp, Rational> parse_comparison(const std::string& text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  std::size_t j = i;
  while (j < text.size() && std::strchr("<>=", text[j])) ++j;
  std::string rest = text.substr(j);
  rest.erase(0, rest.find_first_not_of(" \t"));
  rest.erase(rest.find_last_not_of(" \t") + 1);
  if (j == i || rest.empty()) throw CLI::ValidationError("--compare", "expected \"op epsilon\", e.g. \">= 1/2\"");
  return {parse_compare_op(text.substr(i, j - i)), parse_rational(rest)};
}

int exit_for(ComparisonResult::Kind k) {
  switch (k) {
    case ComparisonResult::Kind::holds: return Exit::holds;
    case ComparisonResult::Kind::fails: return Exit::fails;
    case ComparisonResult::Kind::undecided: break;
  }
  return Exit::undecided;
}

void cmd_measure(const MeasureArgs& a, Report& r) {
  std::string text = input(r, a.target);
  const Rational tol = parse_tolerance(a.tol);
  r.config["tol"] = to_string(tol);
  std::optional<std::pair<CompareOp, Rational>> cmp;
  if (!a.compare.empty()) {
    cmp = parse_comparison(a.compare);
    r.config["compare"] = {{"op", to_string(cmp->first)}, {"epsilon", to_string(cmp->second)}};
  }
  std::optional<Measure> mc;
  auto mc_seed = a.mc.size() > 1 ? a.mc[1] : 1;
  if (!a.mc.empty()) r.config["mc"] = {{"samples", a.mc[0]}, {"seed", mc_seed}};

  std::optional<ComparisonResult> verdict;
  Alphabet sigma;
  Measure m;
  if (looks_like_automaton(text)) {
    auto aut = parse_automaton(text);
    sigma = aut.alphabet();
    r.result["target"] = "automaton";
    auto u = check_unambiguous_nfa(aut);
    if (!u.unambiguous) {
      aut = determinise(aut);
      r.result["determinised"] = true;
      r.add("note", "ambiguous automaton determinised before the linear solve");
    }
    m.kind = Measure::Kind::exact;
    m.value = regular_measure_exact(aut);
    if (cmp) verdict = compare_measure(aut, cmp->first, cmp->second);
    if (!a.mc.empty()) mc = monte_carlo_measure(aut, a.mc[0], mc_seed);
  } else {
    r.config["unambiguity_check"] = a.check;
    auto g = parse_grammar(text);
    sigma = g.alphabet();
    r.result["target"] = "grammar";
    auto s = trusted_gnf(g, a.check, r);
    m = ucfg_measure(s, tol);
    if (cmp) {
      CompareConfig cc;
      cc.tol = tol;
      verdict = compare_measure(s, cmp->first, cmp->second, cc);
    }
    if (!a.mc.empty()) mc = monte_carlo_measure(g, a.mc[0], mc_seed);
  }
  r.result["measure"] = measure_json(m);
  r.add("measure", measure_text(m));
  if (verdict) {
    r.verdict = std::string(verdict->kind == ComparisonResult::Kind::holds   ? "HOLDS"
                            : verdict->kind == ComparisonResult::Kind::fails ? "FAILS"
                                                                             : "UNDECIDED");
    if (verdict->witness) r.verdict += "(" + show(sigma, *verdict->witness) + ")";
    r.exit = exit_for(verdict->kind);
    r.result["comparison"] = {{"kind", to_string(verdict->kind)},
                              {"witness", verdict->witness ? json(show(sigma, *verdict->witness)) : json(nullptr)},
                              {"reason", verdict->reason}};
    if (verdict->measure.kind == Measure::Kind::interval && m.kind == Measure::Kind::interval)
      r.result["comparison"]["interval"] = interval_json(verdict->measure.interval);
    if (!verdict->reason.empty()) r.add("reason", verdict->reason);
  } else {
    r.verdict = m.kind == Measure::Kind::exact ? "MEASURE(" + to_string(m.value) + ")" : "MEASURE" + interval_text(m.interval);
  }
  r.result["verdict"] = r.verdict;
  if (mc) {
    r.result["monte_carlo"] = measure_json(*mc);
    r.add("monte carlo", measure_text(*mc));
    bool consistent = m.kind == Measure::Kind::exact
                          ? std::abs(to_double(m.value) - mc->mean) <= 3 * mc->half_width + 1e-12
                          : to_double(m.interval.lo) <= mc->upper + 1e-12 &&
                                (!m.interval.upper_known || mc->lower <= to_double(m.interval.hi) + 1e-12);
    r.result["monte_carlo"]["consistent"] = consistent;
    r.add("monte carlo consistent", consistent ? "yes" : "no");
  }
}

// --- sqrtsum ---------------------------------------------------------------

struct SqrtsumArgs {
  std::string instance, out;
  bool verify = false;
  std::uint64_t mc_samples = 20000, mc_seed = 1;
  int check = 8;
};

void cmd_sqrtsum(const SqrtsumArgs& a, Report& r) {
  SqrtSumInstance inst = parse_instance_json(input(r, a.instance));
  auto out = build_reduction(inst);
  std::string prefix = a.out;
  if (prefix.empty()) {
    std::filesystem::path p(a.instance);
    prefix = (p.parent_path() / p.stem()).string();
  }
  r.config["out"] = prefix;
  r.config["verify"] = a.verify;
  const std::string grammar_text = print_grammar(out.grammar), meta = reduction_json(out, inst);
  write_file(prefix + ".grammar", grammar_text);
  write_file(prefix + ".gnf.grammar", print_grammar(out.gnf));
  write_file(prefix + ".eps", to_string(out.eps) + "\n");
  write_file(prefix + ".meta.json", meta + "\n");
  r.result["files"] = {{"grammar", {{"path", prefix + ".grammar"}, {"hash", content_hash(grammar_text)}}},
                       {"gnf", prefix + ".gnf.grammar"},
                       {"epsilon", prefix + ".eps"},
                       {"metadata", prefix + ".meta.json"}};
  r.result["instance"] = json::parse(meta);
  r.add("grammar", prefix + ".grammar (" + std::to_string(out.grammar.productions().size()) + " productions, size " +
                       std::to_string(out.size) + ")");
  r.add("epsilon", to_string(out.eps) + " = " + to_decimal(out.eps, 15));
  r.add("question", std::string("mu(L(G)) ") + to_string(out.measure_op) + " epsilon");
  r.verdict = "GENERATED";
  if (!a.verify) return;

  VerifyOptions opt;
  opt.unambiguity_bound = a.check;
  opt.mc_samples = a.mc_samples;
  opt.mc_seed = a.mc_seed;
  r.config["unambiguity_check"] = a.check;
  r.config["mc"] = {{"samples", a.mc_samples}, {"seed", a.mc_seed}};
  auto v = verify_reduction(out, inst, opt);
  auto all = [](const std::vector<bool>& b) { return std::all_of(b.begin(), b.end(), [](bool x) { return x; }); };
  std::vector<std::string> failed;
  auto check = [&](const char* name, bool ok) {
    r.result["verify"][name] = ok;
    r.add(name, ok ? "ok" : "FAILED");
    if (!ok) failed.push_back(name);
  };
  check("residuals_zero", v.residuals_zero);
  check("c_measures_exact", all(v.c_measure_exact));
  check("a_measure_exact", v.a_measure_exact);
  check("alphabet_ok", v.alphabet_ok);
  check("fixpoint_ok", v.fixpoint_ok);
  check("agree", v.agree);
  r.result["verify"]["measure"] = interval_json(v.measure);
  r.result["verify"]["direct"] = interval_json(v.direct);
  r.add("derivation-weighted measure", interval_text(v.measure));
  r.add("closed form", interval_text(v.direct));
  if (v.unambiguity) {
    bool ok = v.unambiguity->ok;
    if (!ok) {
      const auto& ce = *v.unambiguity->counterexample;
      r.result["verify"]["ambiguity_witness"] = {{"word", show(out.grammar.alphabet(), ce.word)}, {"trees", to_string(ce.count)}};
      r.add("ambiguity witness", show(out.grammar.alphabet(), ce.word) + " (" + to_string(ce.count) + " trees)");
    }
    check("unambiguous_bounded", ok);
  }
  r.result["verify"]["comparison"] = {{"kind", to_string(v.comparison.kind)}, {"reason", v.comparison.reason}};
  r.result["verify"]["direct_verdict"] = v.direct_verdict ? json(*v.direct_verdict) : json(nullptr);
  r.result["verify"]["weight_verdict"] = v.weight_verdict ? json(*v.weight_verdict) : json(nullptr);
  check("verdict_matches", v.verdict_matches);
  if (v.language_estimate) {
    r.result["verify"]["language_estimate"] = measure_json(*v.language_estimate);
    r.add("sampled language measure", measure_text(*v.language_estimate));
  }
  if (failed.empty()) {
    r.verdict = "VERIFIED";
  } else {
    r.verdict = "VERIFY-FAILED(";
    for (std::size_t i = 0; i < failed.size(); ++i) r.verdict += (i ? "," : "") + failed[i];
    r.verdict += ")";
    r.exit = Exit::fails;
  }
}

// --- seq -------------------------------------------------------------------

struct SeqArgs {
  std::string system, out;
  int n = 10, bound = -1;
  std::string backend;
  double timeout = 10;
  bool literal = false;
};

void cmd_seq_eval(const SeqArgs& a, Report& r) {
  auto s = parse_system(input(r, a.system));
  r.config["n"] = a.n;
  auto table = eval_prefix(s, a.n);
  json rows = json::array();
  for (int i = 0; i < s.k(); ++i) {
    json row = json::array();
    std::string text;
    for (const auto& v : table[static_cast<std::size_t>(i)]) {
      row.push_back(to_string(v));
      text += (text.empty() ? "" : ",") + to_string(v);
    }
    std::string label = i < static_cast<int>(s.labels.size()) && !s.labels[static_cast<std::size_t>(i)].empty()
                            ? s.labels[static_cast<std::size_t>(i)]
                            : "f" + std::to_string(i + 1);
    rows.push_back({{"variable", label}, {"values", row}});
    r.add(label, text);
  }
  r.result["table"] = rows;
  r.verdict = "EVAL(" + std::to_string(a.n) + ")";
}

void cmd_seq_zeroness(const SeqArgs& a, Report& r) {
  auto s = parse_system(input(r, a.system));
  ZeronessConfig cfg;
  cfg.prefix_bound = a.bound;
  cfg.smt.contraction_box = !a.literal;
  if (!a.backend.empty()) cfg.backend = SmtBackend{a.backend, a.timeout};
  r.config["bound"] = a.bound < 0 ? default_prefix_bound(s) : a.bound;
  r.config["smt_backend"] = a.backend.empty() ? json(nullptr) : json(a.backend);
  r.config["contraction_box"] = !a.literal;
  auto z = zeroness(s, cfg);
  r.result = {{"kind", to_string(z.kind)}, {"bound", z.bound}};
  switch (z.kind) {
    case ZeronessVerdict::Kind::nonzero_at:
      r.verdict = "NONZERO-AT(" + std::to_string(z.n) + ")";
      r.exit = Exit::fails;
      r.result["n"] = z.n;
      r.result["value"] = to_string(z.value);
      r.add("value", "f1(" + std::to_string(z.n) + ") = " + to_string(z.value));
      break;
    case ZeronessVerdict::Kind::zero_bounded: r.verdict = "ZERO-BOUNDED(" + std::to_string(z.bound) + ")"; break;
    case ZeronessVerdict::Kind::zero_certified: r.verdict = "ZERO-CERTIFIED"; break;
    case ZeronessVerdict::Kind::unknown: r.verdict = "UNDECIDED"; r.exit = Exit::undecided; break;
  }
  if (!z.backend.empty()) {
    r.result["backend"] = z.backend;
    r.add("backend", z.backend);
  }
  if (!z.reason.empty()) {
    r.result["reason"] = z.reason;
    r.add("reason", z.reason);
  }
}

void cmd_seq_export(const SeqArgs& a, Report& r) {
  auto s = parse_system(input(r, a.system));
  SmtOptions opt;
  opt.contraction_box = !a.literal;
  r.config["contraction_box"] = !a.literal;
  std::string script = export_smt(s, opt);
  r.verdict = "EXPORTED";
  r.result["hash"] = content_hash(script);
  if (!a.out.empty()) {
    write_file(a.out, script);
    r.result["path"] = a.out;
    r.add("script", a.out);
  } else {
    r.result["script"] = script;
    r.raw = script;
  }
}

// --- output ----------------------------------------------------------------

void emit(const Report& r, bool as_json, std::optional<double> ms) {
  if (as_json) {
    json j = {{"command", r.command}, {"inputs", r.inputs}, {"config", r.config},
              {"verdict", r.verdict}, {"exit_code", r.exit}, {"result", r.result}};
    if (ms) j["timings"] = {{"total_ms", *ms}};
    std::cout << j.dump(2) << "\n";
    return;
  }
  if (r.raw) {
    std::cout << *r.raw;
    return;
  }
  std::cout << r.command << ": " << r.verdict << "\n";
  for (const auto& in : r.inputs)
    std::cout << "  input: " << in["path"].get<std::string>() << " [" << in["hash"].get<std::string>() << "]\n";
  if (!r.config.empty()) {
    std::cout << "  config:";
    for (const auto& [k, v] : r.config.items()) std::cout << " " << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump());
    std::cout << "\n";
  }
  for (const auto& [k, v] : r.lines) std::cout << "  " << k << ": " << v << "\n";
  if (ms) std::cout << "  time: " << *ms << " ms\n";
}

void add_universality_options(CLI::App* c, UniversalityArgs& u) {
  c->add_option("--bound", u.bound, "compare word counts up to this length")->capture_default_str()->check(CLI::NonNegativeNumber);
  c->add_option("--measure-tol", u.tol, "width of the measure interval (p/q, decimal or 2^-k)")->capture_default_str();
  c->add_option("--unambiguity-check", u.check, "bounded ambiguity check for grammars without a claim (-1 refuses them)")
      ->capture_default_str();
  c->add_flag("--no-measure", u.no_measure, "skip the measure interval");
  c->add_option("--smt-backend", u.backend, "SMT solver executable for certification")->envname("UCFG_SMT_BACKEND");
  c->add_option("--smt-timeout", u.timeout, "seconds per solver call")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Universality, inclusion and measure tools for unambiguous grammars and automata"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "defaults file of key=value lines ([section] per subcommand)");
  bool as_json = false, timings = false;
  app.add_flag("--json", as_json, "machine-readable report");
  app.add_flag("--timings", timings, "record wall-clock time (reports are then no longer byte-identical)");

  UniversalityArgs ua;
  auto* uni = app.add_subcommand("universality", "is L(G) = Sigma*?");
  uni->add_option("grammar", ua.grammar, "grammar file")->required();
  add_universality_options(uni, ua);

  InclusionArgs ia;
  auto* inc = app.add_subcommand("inclusion", "is L(lhs) a subset of L(rhs)?");
  inc->add_option("lhs", ia.lhs, "automaton file")->required();
  inc->add_option("rhs", ia.rhs, "automaton file (nfa-ufa) or grammar file (nfa-ucfg)")->required();
  inc->add_option("--kind", ia.kind, "nfa-ufa, nfa-ucfg or cfg-ufa")->capture_default_str();
  add_universality_options(inc, ia.u);

  MeasureArgs ma;
  auto* mea = app.add_subcommand("measure", "coin-flip measure of a language");
  mea->add_option("target", ma.target, "automaton or grammar file")->required();
  mea->add_option("--compare", ma.compare, "threshold query, e.g. \">= 1/2\"");
  mea->add_option("--mc", ma.mc, "Monte Carlo cross-check: SAMPLES [SEED]")->expected(1, 2);
  mea->add_option("--tol", ma.tol, "interval width for grammars")->capture_default_str();
  mea->add_option("--unambiguity-check", ma.check, "bounded check for grammars without a claim")->capture_default_str();

  SqrtsumArgs sa;
  auto* sq = app.add_subcommand("sqrtsum", "grammar for a square-root-sum instance");
  sq->add_option("instance", sa.instance, "instance JSON {\"d0\", \"d\", \"op\"}")->required();
  sq->add_option("--out", sa.out, "output prefix (default: instance path without extension)");
  sq->add_flag("--verify", sa.verify, "check the construction");
  sq->add_option("--mc-samples", sa.mc_samples, "samples for the language-measure estimate (0 skips)")->capture_default_str();
  sq->add_option("--mc-seed", sa.mc_seed)->capture_default_str();
  sq->add_option("--unambiguity-check", sa.check, "bounded ambiguity check length (-1 skips)")->capture_default_str();

  SeqArgs qa;
  auto* seq = app.add_subcommand("seq", "convolution-recursive sequence systems");
  seq->add_option("system", qa.system, "system file")->required();
  seq->require_subcommand(1);
  auto* ev = seq->add_subcommand("eval", "prefix table f(0..N)");
  ev->add_option("N", qa.n)->required()->check(CLI::NonNegativeNumber);
  auto* zr = seq->add_subcommand("zeroness", "is the first sequence identically zero?");
  zr->add_option("--bound", qa.bound, "prefix length (default max(64, 2k))");
  zr->add_option("--smt-backend", qa.backend, "SMT solver executable")->envname("UCFG_SMT_BACKEND");
  zr->add_option("--smt-timeout", qa.timeout)->capture_default_str();
  zr->add_flag("--literal", qa.literal, "omit the contraction box from the sentence");
  auto* ex = seq->add_subcommand("export-smt", "write the zeroness sentence as SMT-LIB");
  ex->add_option("--out", qa.out, "script path (default: stdout)");
  ex->add_flag("--literal", qa.literal, "omit the contraction box from the sentence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : Exit::usage;
  }

  Report r;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (*uni) r.command = "universality", cmd_universality(ua, r);
    else if (*inc) r.command = "inclusion", cmd_inclusion(ia, r);
    else if (*mea) r.command = "measure", cmd_measure(ma, r);
    else if (*sq) r.command = "sqrtsum", cmd_sqrtsum(sa, r);
    else if (*ev) r.command = "seq eval", cmd_seq_eval(qa, r);
    else if (*zr) r.command = "seq zeroness", cmd_seq_zeroness(qa, r);
    else if (*ex) r.command = "seq export-smt", cmd_seq_export(qa, r);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "ucfgtool: " << e.what() << "\n";
    return Exit::usage;
  } catch (const IoError& e) {
    std::cerr << "ucfgtool: " << e.what() << "\n";
    return Exit::no_input;
  } catch (const Error& e) {
    std::cerr << "ucfgtool: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return Exit::data;
  } catch (const std::exception& e) {
    std::cerr << "ucfgtool: internal error: " << e.what() << "\n";
    return Exit::internal;
  }
  std::optional<double> ms;
  if (timings)
    ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  emit(r, as_json, ms);
  return r.exit;
}
