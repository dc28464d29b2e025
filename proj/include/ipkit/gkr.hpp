#pragma once

#include "ipkit/circuit.hpp"
#include "ipkit/sumcheck.hpp"

namespace ipkit {

/// The assertion "V~_layer(z) = value" threaded from the outputs down to
/// the input layer.
struct LayerClaim {
  size_t layer;
  Point z;
  FieldElement value;
};

/// Summand oracle for f_{i,z}(p, w1, w2) =
///   B(z,p) * [add~(p,w1,w2) * (V~(w1) + V~(w2)) + mult~(p,w1,w2) * V~(w1) * V~(w2)]
/// over l = s_i + 2*s_{i+1} variables, per-variable degree 2. Prover-side:
/// evaluations read the trace (binary sub-points become table lookups).
/// The returned oracle borrows c and trace; keep them alive.
SummandOracle make_layer_oracle(const LayeredCircuit& c,
                                const EvaluationTrace& trace,
                                const LayerClaim& claim);

/// Verifier-side start: draw z0 in F^{s_0} and bind the claim to the MLE
/// of the claimed output vector at z0.
LayerClaim output_claim(const LayeredCircuit& c,
                        const DataVector& claimed_outputs, RandomSource& rng);

/// Honest reduction polynomial f(t) = V~(gamma(t)) for the line with
/// gamma(0) = z1, gamma(1) = z2, from the layer's value table.
UnivariatePoly reduction_poly(const MultilinearTable& layer_values,
                              const Point& z1, const Point& z2);

/// Verifier side of the two-claims-to-one reduction: checks the degree
/// bound and both endpoints, then collapses to the claim
/// (gamma(r), f(r)) at a fresh random r.
std::variant<LayerClaim, Rejection> reduce_two_claims(
    size_t next_layer, const Point& z1, const Point& z2,
    const FieldElement& v1, const FieldElement& v2, RandomSource& rng,
    const UnivariatePoly& prover_poly);

struct GkrStrategy {
  enum class Kind { Honest, CorruptOutputs, LieFinalValue, InnerSumcheck };

  Kind kind = Kind::Honest;
  size_t layer = 0;       // LieFinalValue / InnerSumcheck
  u64 offset = 1;         // CorruptOutputs / LieFinalValue value bump
  ProverStrategy inner;   // InnerSumcheck

  static GkrStrategy honest() { return {}; }
  static GkrStrategy corrupt_outputs(u64 offset);
  static GkrStrategy lie_final_value(size_t layer, u64 offset);
  static GkrStrategy inner_sumcheck(size_t layer, ProverStrategy inner);

  std::string name() const;
};

struct GkrRun {
  Verdict verdict = Verdict::Rejected;
  std::optional<Rejection> rejection;
  size_t reject_layer = 0;     // meaningful when rejected
  size_t total_rounds = 0;     // sum-check rounds over all layers
  size_t prover_elements = 0;  // field elements sent prover-to-verifier
  size_t bytes = 0;            // 8 bytes per transmitted element
  OpCounter prover_ops;
  OpCounter verifier_ops;
  std::vector<LayerClaim> chain;  // claim entering each layer, then layer d
  Transcript transcript;
};

/// Full protocol: output claim, one deferred sum-check plus reduction per
/// layer, and the verifier's own input-MLE check at layer d. The verifier
/// sees only the circuit structure, claimed outputs, input vector and
/// prover messages. claimed_outputs is what the prover announces (length
/// S_0); the CorruptOutputs strategy perturbs it first.
GkrRun gkr_prove_verify(const LayeredCircuit& c, const DataVector& input,
                        const DataVector& claimed_outputs, u64 seed,
                        const GkrStrategy& strategy = GkrStrategy::honest());

/// Re-runs the GKR verifier against a recorded transcript (the header
/// embeds circuit, input and claimed outputs). Reports tampering when any
/// recorded value diverges from the re-derived one.
ReplayOutcome replay_gkr(const Transcript& t);

/// The circuit's output polynomial as a summand oracle over its input
/// variables: the monolithic route that verifies sum_{x in {0,1}^n} C(x)
/// with one big sum-check. Requires a single output gate. Per-variable
/// degree bounds are derived structurally (Mul adds them, Add takes max).
SummandOracle circuit_sum_oracle(const LayeredCircuit& c);

/// Predicted field-op count of the honest monolithic prover for this
/// oracle, from the engine's loop structure: per round, (bound+1)
/// abscissae times 2^{l-i} suffix evaluations plus the interpolation.
/// Validated exactly against measured counts at small sizes, then used
/// where 2^m is not runnable.
u64 predicted_monolithic_prover_ops(const SummandOracle& g);

}  // namespace ipkit
