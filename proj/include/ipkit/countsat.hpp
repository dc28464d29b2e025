#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ipkit/sumcheck.hpp"

namespace ipkit {

/// Boolean formula AST. Grammar:
///   expr := var | '!' expr | '(' expr op expr ')'   op in {'&', '|'}
///   var  := [a-z][a-z0-9]*
/// Whitespace is insignificant; every binary connective is parenthesized.
struct FormulaNode {
  enum class Kind { Var, Not, And, Or };
  Kind kind;
  int var = -1;  // Var
  std::unique_ptr<FormulaNode> left;   // Not uses left only
  std::unique_ptr<FormulaNode> right;
};

class Formula {
 public:
  Formula(std::unique_ptr<FormulaNode> root, std::vector<std::string> vars,
          std::string source);

  const FormulaNode& root() const { return *root_; }
  /// Variables in first-appearance order.
  const std::vector<std::string>& variables() const { return vars_; }
  int num_vars() const { return static_cast<int>(vars_.size()); }
  /// Total AST node count (literals included).
  size_t gate_count() const { return gates_; }
  const std::string& source() const { return source_; }

  bool eval_bool(const std::vector<bool>& assignment) const;

 private:
  std::unique_ptr<FormulaNode> root_;
  std::vector<std::string> vars_;
  std::string source_;
  size_t gates_;
};

/// Throws std::invalid_argument with the offending position on bad input.
Formula parse_formula(const std::string& text);

/// Gate-by-gate arithmetization: NOT(x) -> 1-x, AND -> x*y,
/// OR -> x+y-x*y. Per-variable degree bounds by occurrence count.
struct ArithmeticFormula {
  const Formula* formula;
  PrimeModulus modulus;
  std::vector<int> degree_bounds;

  FieldElement eval(const Point& assignment) const;
};

ArithmeticFormula arithmetize(const Formula& f, const PrimeModulus& m);

/// Exact truth-table count; m <= 22.
u64 count_models(const Formula& f);

/// Summand oracle over the arithmetization (borrows af.formula).
SummandOracle countsat_oracle(const ArithmeticFormula& af);

struct CountsatResult {
  Verdict verdict;
  std::optional<Rejection> rejection;
  u64 claimed;
  Transcript transcript;
};

/// Sum-check in Direct mode over the arithmetization with the claimed
/// count as H_0. Requires modulus > 2^m so counts embed injectively.
/// An honest-strategy prover defends the claimed count (which may be
/// false); other strategies behave as in run_sumcheck.
CountsatResult countsat_protocol(const Formula& f, u64 claimed,
                                 const PrimeModulus& m, u64 seed,
                                 const ProverStrategy& strategy,
                                 OpCounter* prover_ops = nullptr,
                                 OpCounter* verifier_ops = nullptr);

/// Random tree formula for corpus tests: node count <= max_gates,
/// variables drawn from a pool of num_vars names.
Formula random_formula(int num_vars, int max_gates, RandomSource& rng);

}  // namespace ipkit
