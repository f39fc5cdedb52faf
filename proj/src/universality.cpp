#include "ucfg/universality.hpp"

#include "ucfg/convrec.hpp"
#include "ucfg/derivations.hpp"
#include "ucfg/error.hpp"

namespace ucfg {

const char* to_string(UniversalityReport::Kind k) {
  switch (k) {
    case UniversalityReport::Kind::not_universal: return "not_universal";
    case UniversalityReport::Kind::universal_bounded: return "universal_bounded";
    case UniversalityReport::Kind::universal_certified: return "universal_certified";
    case UniversalityReport::Kind::undecided: return "undecided";
  }
  return "?";
}

const char* to_string(UcfgInclusionReport::Kind k) {
  switch (k) {
    case UcfgInclusionReport::Kind::fails: return "fails";
    case UcfgInclusionReport::Kind::holds_bounded: return "holds_bounded";
    case UcfgInclusionReport::Kind::holds_certified: return "holds_certified";
    case UcfgInclusionReport::Kind::undecided: return "undecided";
  }
  return "?";
}

std::string verdict_line(const UniversalityReport& r, const Alphabet& sigma) {
  switch (r.kind) {
    case UniversalityReport::Kind::not_universal:
      if (r.witness) return "NOT-UNIVERSAL(" + (r.witness->empty() ? std::string("eps") : format_word(sigma, *r.witness)) + ")";
      return "NOT-UNIVERSAL(measure<1)";
    case UniversalityReport::Kind::universal_bounded: return "UNIVERSAL-BOUNDED(" + std::to_string(r.bound) + ")";
    case UniversalityReport::Kind::universal_certified: return "UNIVERSAL-CERTIFIED";
    case UniversalityReport::Kind::undecided: return "UNDECIDED";
  }
  return "UNDECIDED";
}

UniversalityReport decide_universality(const Grammar& input, const UniversalityConfig& cfg) {
  if (cfg.bound < 0) throw Error(ErrorKind::precondition, "universality bound must be nonnegative");
  UniversalityReport rep;
  rep.bound = cfg.bound;

  Grammar g = to_short_gnf(input).grammar;
  rep.assumed = input.unambiguity();
  if (!rep.assumed.trusted()) {
    if (cfg.unambiguity_check < 0)
      throw Error(ErrorKind::not_unambiguous, "grammar carries no unambiguity claim");
    auto check = check_unambiguous_bounded(g, cfg.unambiguity_check);
    if (!check.ok)
      throw Error(ErrorKind::not_unambiguous, "ambiguous: \"" + format_word(g.alphabet(), check.counterexample->word) +
                                                  "\" has " + to_string(check.counterexample->count) + " derivations");
    rep.assumed = UnambiguityStatus::verified(cfg.unambiguity_check);
  }
  g = g.with_status(rep.assumed);
  rep.gnf_nonterminals = g.nonterminal_count();
  rep.gnf_productions = static_cast<int>(g.productions().size());

  const int n = g.alphabet().size();
  rep.counts = short_gnf_length_counts(g, cfg.bound);
  BigInt all = 1;
  for (int m = 0; m <= cfg.bound; ++m, all *= n) {
    const BigInt& f = rep.counts[static_cast<std::size_t>(m)];
    if (f > all)
      throw Error(ErrorKind::not_unambiguous, to_string(f) + " derivation trees of length " + std::to_string(m) +
                                                  " exceed the " + to_string(all) + " words");
    if (f < all && !rep.first_gap) rep.first_gap = m;
  }

  if (rep.first_gap) {
    rep.kind = UniversalityReport::Kind::not_universal;
    rep.witness = find_missing_word(g, *rep.first_gap);
    rep.reason = "length " + std::to_string(*rep.first_gap) + " has fewer words than |Σ|^n";
    return rep;
  }

  if (cfg.measure) {
    rep.measure = ucfg_measure(g, cfg.measure_tol);
    const auto& iv = rep.measure->interval;
    if (iv.upper_known && iv.hi < 1) {
      rep.kind = UniversalityReport::Kind::not_universal;
      rep.reason = "measure upper bound " + to_decimal(iv.hi, 12) + " < 1; no missing word up to length " +
                   std::to_string(cfg.bound);
      return rep;
    }
  }

  if (cfg.backend) {
    ZeronessConfig zc;
    zc.prefix_bound = cfg.bound;
    zc.backend = cfg.backend;
    zc.smt = cfg.smt;
    rep.smt = zeroness(universality_difference(g), zc);
    switch (rep.smt->kind) {
      case ZeronessVerdict::Kind::zero_certified:
        rep.kind = UniversalityReport::Kind::universal_certified;
        rep.reason = "difference sequence certified zero by " + rep.smt->backend;
        return rep;
      case ZeronessVerdict::Kind::nonzero_at:
        rep.kind = UniversalityReport::Kind::not_universal;
        rep.first_gap = rep.smt->n;
        rep.witness = find_missing_word(g, rep.smt->n);
        rep.reason = "difference sequence nonzero at " + std::to_string(rep.smt->n);
        return rep;
      case ZeronessVerdict::Kind::zero_bounded:
        break;
      case ZeronessVerdict::Kind::unknown:
        rep.kind = UniversalityReport::Kind::undecided;
        rep.reason = "counts agree up to " + std::to_string(cfg.bound) + " but the backend gave no certificate: " +
                     rep.smt->reason;
        return rep;
    }
  }

  rep.kind = UniversalityReport::Kind::universal_bounded;
  rep.reason = "f(n) = |Σ|^n for n <= " + std::to_string(cfg.bound);
  return rep;
}

UcfgInclusionReport decide_nfa_in_ucfg(const Automaton& a, const Grammar& g, const UniversalityConfig& cfg) {
  Grammar rhs = g;
  if (!g.unambiguity().trusted()) {
    if (cfg.unambiguity_check < 0) throw Error(ErrorKind::not_unambiguous, "grammar carries no unambiguity claim");
    auto gs = to_short_gnf(g).grammar;
    auto check = check_unambiguous_bounded(gs, cfg.unambiguity_check);
    if (!check.ok)
      throw Error(ErrorKind::not_unambiguous, "ambiguous: \"" + format_word(g.alphabet(), check.counterexample->word) +
                                                  "\" has " + to_string(check.counterexample->count) + " derivations");
    rhs = g.with_status(UnambiguityStatus::verified(cfg.unambiguity_check));
  }
  auto built = build_nfa_in_ucfg_instance(a, rhs);
  UcfgInclusionReport out;
  out.provenance = built.instance.provenance;
  out.lifted = built.lhs.lifted();
  const auto& target = std::get<Grammar>(built.instance.target);
  // the instance inherits the claim on g; its own check would only repeat it
  out.universality = decide_universality(target.with_status(rhs.unambiguity()), cfg);
  out.provenance.steps.push_back("universality pipeline");
  switch (out.universality.kind) {
    case UniversalityReport::Kind::not_universal:
      out.kind = UcfgInclusionReport::Kind::fails;
      if (out.universality.witness) {
        out.lifted_witness = out.universality.witness;
        out.witness = project(built.lhs, *out.lifted_witness);
      }
      break;
    case UniversalityReport::Kind::universal_bounded: out.kind = UcfgInclusionReport::Kind::holds_bounded; break;
    case UniversalityReport::Kind::universal_certified: out.kind = UcfgInclusionReport::Kind::holds_certified; break;
    case UniversalityReport::Kind::undecided: out.kind = UcfgInclusionReport::Kind::undecided; break;
  }
  return out;
}

}  // namespace ucfg
