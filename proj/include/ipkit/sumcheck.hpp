#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipkit/poly.hpp"

namespace ipkit {

using json = nlohmann::json;

/// The summand g: F^l -> F with declared per-variable degree bounds.
/// eval must be deterministic and the true degree in variable i must
/// never exceed degree_bounds[i].
struct SummandOracle {
  PrimeModulus modulus;
  int num_vars;
  std::vector<int> degree_bounds;
  std::function<FieldElement(const Point&)> eval;
};

/// Exact sum of g over {0,1}^l. Guarded to l <= 25.
FieldElement brute_force_sum(const SummandOracle& g);

/// The prescribed round-i polynomial
///   s_i(x) = sum over binary suffixes of g(fixed, x, suffix),
/// built by evaluating at degree_bounds[i-1]+1 abscissae and interpolating.
/// fixed holds the i-1 previous challenges; round is 1-based.
UnivariatePoly honest_round_poly(const SummandOracle& g,
                                 const std::vector<FieldElement>& fixed,
                                 int round);

struct RoundMessage {
  int round;  // 1-based
  UnivariatePoly poly;
};

enum class RejectReason {
  SumMismatch,
  DegreeExceeded,
  FinalMismatch,
  FinalValueMismatch,
  EndpointMismatch,
};

std::string reject_reason_name(RejectReason r);

struct Rejection {
  RejectReason reason;
  int round;  // round where the check failed; l+1 for final
};

enum class FinalMode { Direct, Deferred };

struct DeferredClaim {
  Point point;
  FieldElement value;
};

enum class Verdict { Accepted, Rejected, Deferred };

std::string verdict_name(Verdict v);

/// Verifier side of the protocol as an explicit state machine. The state
/// holds only public data: bounds, the running claim H_i and challenges.
class VerifierState {
 public:
  enum class Phase { AwaitRound, FinalCheck, Accepted, Rejected };

  VerifierState(const PrimeModulus& m, int num_vars,
                std::vector<int> degree_bounds, const FieldElement& claim,
                FinalMode mode);

  Phase phase() const { return phase_; }
  int awaiting_round() const { return round_; }
  const FieldElement& running_claim() const { return claim_; }
  const std::vector<FieldElement>& challenges() const { return challenges_; }
  FinalMode final_mode() const { return mode_; }
  const std::optional<Rejection>& rejection() const { return rejection_; }

  /// Returns the drawn challenge, or nullopt after moving to Rejected.
  /// Throws std::logic_error on an out-of-phase or out-of-order message.
  std::optional<FieldElement> check_round(const RoundMessage& msg,
                                          RandomSource& rng);

  /// Direct mode: accept iff H_l = g(r_1..r_l); g is evaluated here and
  /// nowhere else by the verifier. Deferred mode: emit the claim without
  /// touching g (pass nullptr).
  std::variant<Verdict, DeferredClaim> final_check(const SummandOracle* g);

 private:
  void reject(RejectReason reason);

  PrimeModulus modulus_;
  int num_vars_;
  std::vector<int> bounds_;
  FieldElement claim_;
  FinalMode mode_;
  Phase phase_;
  int round_;  // next expected round, 1-based
  std::vector<FieldElement> challenges_;
  std::optional<Rejection> rejection_;
};

/// What the prover does with the protocol.
struct ProverStrategy {
  enum class Kind { Honest, WrongClaim, DeviateAtRound, WrongOracle };

  Kind kind = Kind::Honest;
  u64 claim_offset = 0;                       // WrongClaim
  int deviate_round = 1;                      // DeviateAtRound
  std::shared_ptr<SummandOracle> alternate;   // WrongOracle

  static ProverStrategy honest() { return {}; }
  static ProverStrategy wrong_claim(u64 offset);
  static ProverStrategy deviate_at(int round);
  static ProverStrategy wrong_oracle(SummandOracle alt);

  std::string name() const;
};

/// Message source for one protocol session. Honest play follows
/// honest_round_poly exactly; a cheating prover that is defending a wrong
/// running claim offsets each message by a low-degree polynomial with
/// randomly placed roots, so the lie self-corrects exactly when a
/// challenge hits a root.
class SumcheckProver {
 public:
  SumcheckProver(const SummandOracle& g, const FieldElement& true_claim,
                 ProverStrategy strategy, RandomSource rng);

  /// Defend a fixed total that may differ from the true one (used when an
  /// upstream lie pins the claim, e.g. a corrupted GKR layer claim).
  /// Plays honest iff defended_claim equals true_claim.
  SumcheckProver(const SummandOracle& g, const FieldElement& true_claim,
                 const FieldElement& defended_claim, RandomSource rng);

  /// The total the prover asserts (true claim, offset claim, or the
  /// alternate oracle's sum under WrongOracle).
  const FieldElement& claimed_total() const { return claimed_; }

  RoundMessage round_message(int round);
  void receive_challenge(const FieldElement& r);

 private:
  const SummandOracle& oracle() const;
  UnivariatePoly offset_poly(int round, const FieldElement& delta);

  const SummandOracle& g_;
  ProverStrategy strat_;
  RandomSource rng_;
  FieldElement claimed_;
  FieldElement discrepancy_;  // claimed running value minus true one
  std::vector<FieldElement> fixed_;
  UnivariatePoly last_offset_;
};

/// Replayable wire record: a JSON header plus one JSON record per line,
/// closed by a meta record carrying a checksum of the preceding bytes.
struct Transcript {
  json header;
  std::vector<json> records;
  bool checksum_ok = true;  // set by from_jsonl

  std::string to_jsonl() const;
  static Transcript from_jsonl(const std::string& text);

  /// Field elements sent prover-to-verifier (padded coefficient vectors).
  size_t prover_elements() const;
  /// Challenges sent verifier-to-prover.
  size_t challenge_elements() const;
};

struct SumcheckResult {
  Verdict verdict;
  std::optional<Rejection> rejection;
  std::optional<DeferredClaim> deferred;
  FieldElement claimed_total;
  std::vector<FieldElement> challenges;
  Transcript transcript;
};

/// Drives one full session. All randomness (verifier challenges, cheater
/// root placement) derives from seed, so runs are replayable. Prover and
/// verifier field ops are tallied separately when counters are given.
SumcheckResult run_sumcheck(const SummandOracle& g, const FieldElement& claim,
                            u64 seed, const ProverStrategy& strategy,
                            FinalMode mode, OpCounter* prover_ops = nullptr,
                            OpCounter* verifier_ops = nullptr);

/// Round loop shared by run_sumcheck, the #SAT protocol and the GKR layer
/// sessions. g is the verifier's oracle (bounds come from it; Direct mode
/// evaluates it in the final check); verifier_claim is the total the
/// verifier holds it to. The result's transcript has records but no
/// header; verifier_rng advances in place.
SumcheckResult drive_session(const SummandOracle& g, SumcheckProver& prover,
                             const FieldElement& verifier_claim,
                             FinalMode mode, RandomSource& verifier_rng,
                             OpCounter* prover_ops = nullptr,
                             OpCounter* verifier_ops = nullptr);

struct ReplayOutcome {
  bool tampered = false;
  std::string detail;
  std::optional<Verdict> verdict;
};

/// Re-runs the verifier against recorded messages with the recorded seed.
/// Challenges are redrawn and compared; any divergence from the recorded
/// run reports tampered.
ReplayOutcome replay_sumcheck(const Transcript& t, const SummandOracle& g);

// Oracle builders --------------------------------------------------------

struct Monomial {
  FieldElement coef;
  std::vector<int> exps;  // one exponent per variable
};

/// g = sum of monomials; degree bounds from the max exponent per variable.
SummandOracle monomial_oracle(const PrimeModulus& m, int num_vars,
                              std::vector<Monomial> terms);

/// Multilinear g given by its value table.
SummandOracle table_oracle(MultilinearTable t);

/// g = x_1 * x_2 * ... * x_l.
SummandOracle product_oracle(const PrimeModulus& m, int num_vars);

/// Random monomial-list oracle with per-variable degree <= max_degree.
SummandOracle random_monomial_oracle(const PrimeModulus& m, int num_vars,
                                     int max_degree, int num_terms,
                                     RandomSource& rng);

}  // namespace ipkit
