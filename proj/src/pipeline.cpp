#include "vgen/pipeline.hpp"

#include "vgen/scope.hpp"

namespace vgen {

Result<ValidDesign, PipelineFailure> generate_valid_design(const ProbabilityTable& table,
                                                           uint64_t seed,
                                                           const PipelineOptions& opts) {
  AtomStats stats;
  uint64_t s = seed;
  std::string last_reason = "no attempts made";

  for (int attempt = 0; attempt < opts.max_attempts; ++attempt, s = next_seed(s)) {
    ++stats.skeleton_attempts;

    auto skel = generate_skeleton(table, s, opts.limits, opts.tau);
    if (!skel.ok()) {
      ++stats.limit_failures;
      last_reason = skel.error().message;
      continue;
    }

    ResolveOptions ropts;
    ropts.self_ref_prob = opts.strict ? 0.0 : opts.self_ref_prob;
    // Name choices continue the same stream family as the shape choices,
    // but from an independent branch so neither perturbs the other.
    Rng name_rng(mix64(s ^ 0x5eedc0defacadeULL));
    auto named = resolve_scopes(skel.value().tree, name_rng, ropts);
    if (!named.ok()) {
      ++stats.scope_failures;
      last_reason = named.error().reason;
      continue;
    }

    auto typed = infer(std::move(named.value()), TypeFactMode::OpenFacets);
    if (!typed.ok()) {
      ++stats.type_failures;
      last_reason = typed.error().message;
      continue;
    }

    // Open-fact inference keeps unconstrained widths free and the defaulting
    // pass grounds them afterwards, so a width rule whose result was already
    // pinned can be left dormant and then disagree once the free side becomes
    // concrete.  Re-run inference over the defaulted syntax; a disagreement
    // here means the candidate would not stand on its own, so retry.
    auto verify = infer(typed.value().design, TypeFactMode::ConcreteDefaults);
    if (!verify.ok()) {
      ++stats.type_failures;
      last_reason = "post-default check: " + verify.error().message;
      continue;
    }

    ValidDesign out;
    out.typed = std::move(typed.value());
    out.seed = s;
    out.stats = stats;
    return out;
  }

  PipelineFailure f;
  f.reason = "no valid design within " + std::to_string(opts.max_attempts) +
             " attempts (last: " + last_reason + ")";
  f.stats = stats;
  return f;
}

std::string render_design(const ValidDesign& d) { return print_tree(d.typed.design.tree); }

}  // namespace vgen
