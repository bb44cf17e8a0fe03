#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rigidity/exact.hpp"
#include "rigidity/extended.hpp"
#include "rigidity/manifold.hpp"

namespace rigidity {

// A positive bound that is either a scalar or infinite.
class ContextBound {
 public:
  static ContextBound infinite() { return ContextBound(); }
  static ContextBound finite(Scalar v) {
    ContextBound b;
    b.inf_ = false;
    b.v_ = std::move(v);
    return b;
  }

  bool is_infinite() const { return inf_; }
  const Scalar& value() const {
    if (inf_) fail(ErrorKind::Internal, "value() on an infinite bound");
    return v_;
  }

 private:
  bool inf_ = true;
  Scalar v_;
};

// Tight enclosure of a possibly infinite radius, for bounds taken from a model.
ContextBound context_bound(const ExtendedReal& v);

// x < b, three-valued; True when the bound is infinite.
Truth less_than_bound(const Scalar& x, const ContextBound& b);

enum class Regularity { Surjective, Continuous };

// Everything the rewrite rules are allowed to assume about the space and the
// distance-preserving map: radius bounds, homogeneity and periodicity flags,
// and the regularity class of the map (either flavour gives bijectivity, which
// all rules require).  The model, when present, backs the lens-diameter
// oracle; the rbar_* knobs pin that oracle down so replays are deterministic.
struct ClosureContext {
  ContextBound conv = ContextBound::infinite();
  ContextBound inj = ContextBound::infinite();
  bool two_point_homogeneous = false;
  bool periodic_period_one = false;
  Regularity map_regularity = Regularity::Surjective;
  std::optional<ManifoldModel> model;
  double rbar_tol = 1e-6;
  int rbar_budget = 4000;
  std::uint64_t rbar_seed = 1;

  // Rejects a context whose bounds certainly violate conv <= inj / 2; an
  // undecided comparison (overlapping enclosures) passes.
  void validate() const;
};

enum class RuleId { Double, Many, Diff, Oy, Bar, Frac };

const char* rule_name(RuleId r);   // "DOUBLE", "MANY", ...
const char* rule_lemma(RuleId r);  // stable law id recorded on every step
RuleId rule_from_name(const std::string& name);

// One rewrite: inputs are indices into the element list of the derivation
// state, output is the produced distance.  param carries MANY's multiplier or
// the multiple index used by FRAC.
struct DerivationStep {
  RuleId rule = RuleId::Diff;
  std::vector<std::size_t> inputs;
  Scalar output;
  std::optional<long long> param;
  std::string lemma;
};

// Distances known to be preserved, with full provenance: elements start with
// the seeds and grow by one per applied step.
struct PreservedSet {
  ClosureContext context;
  std::vector<Scalar> elements;
  std::vector<DerivationStep> steps;
  std::size_t seed_count = 0;

  PreservedSet(ClosureContext ctx, std::vector<Scalar> seeds);
};

struct RuleOutcome {
  std::optional<DerivationStep> step;  // engaged iff the rule fired
  std::string reason;                  // why it did not
  bool commensurable = false;          // the difference rule hit exactly zero

  bool applied() const { return step.has_value(); }
};

// Applies one rule.  A violated precondition that is *certain* returns an
// inapplicable outcome with the reason; an undecidable comparison on interval
// inputs throws ErrorKind::Refinement.  On success the output is appended to
// the state and the step returned.
RuleOutcome apply_rule(PreservedSet& state, RuleId rule, const std::vector<std::size_t>& inputs,
                       std::optional<long long> param = std::nullopt);

struct DerivationCertificate {
  std::string strategy;
  std::vector<Scalar> seeds;
  ClosureContext context;
  std::vector<DerivationStep> steps;
  Scalar epsilon;
  std::optional<Scalar> achieved;  // present iff the target was reached
};

enum class DeriveStatus { Achieved, RationalSeeds, BudgetExhausted };
const char* derive_status_name(DeriveStatus s);

struct DeriveOutcome {
  DeriveStatus status = DeriveStatus::Achieved;
  DerivationCertificate certificate;  // partial when status != Achieved
  std::string report;
};

// Drives rule applications until some produced distance drops below epsilon.
//   A           difference cascade on exactly two exact seeds
//   B           alternate lens-diameter and small-difference steps from one
//               seed, closing with a difference step when that lands earlier
//   C           search for a multiple whose fractional part is below epsilon
//   exhaustive  deterministic saturation: difference steps while they make
//               progress, then the B-style pair, then the fractional search
// Commensurable seeds are reported as RationalSeeds, not an error; running
// past step_budget returns BudgetExhausted with the partial certificate.
DeriveOutcome derive_to_epsilon(std::vector<Scalar> seeds, const ClosureContext& ctx, const Scalar& epsilon,
                                const std::string& strategy, int step_budget = 10000);

struct VerifyReport {
  bool ok = false;
  std::vector<std::string> lines;  // one per replayed step
  std::string failure;             // first failed check when !ok
};

// Independent replay: re-checks every step's precondition and arithmetic from
// the seeds and the embedded context, then re-checks achieved < epsilon.
VerifyReport verify_certificate(const DerivationCertificate& cert);

// JSON forms.  Serialization is deterministic (sorted keys), so identical
// inputs give byte-identical output.
std::string certificate_to_json(const DerivationCertificate& cert);
std::string derive_outcome_to_json(const DeriveOutcome& out);
std::string verify_report_to_json(const VerifyReport& rep);
// Accepts either a bare certificate object or a derive output wrapping one.
DerivationCertificate certificate_from_json(const std::string& text);

}  // namespace rigidity
