#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ipkit/fingerprint.hpp"
#include "ipkit/poly.hpp"

namespace ipkit {

enum class GateOp { Add, Mul };

/// Fan-in-2 gate wired to two gates of the layer below.
struct Gate {
  GateOp op;
  size_t left;
  size_t right;
};

/// Layered arithmetic circuit. Layer 0 holds the outputs, layer d-1 sits
/// directly above the inputs; gates wire only into the adjacent layer
/// below, with the input vector acting as layer d.
class LayeredCircuit {
 public:
  using WiringFn = std::function<FieldElement(
      const Point& z, const Point& w1, const Point& w2)>;

  LayeredCircuit(const PrimeModulus& m, size_t input_width,
                 std::vector<std::vector<Gate>> layers);

  const PrimeModulus& modulus() const { return modulus_; }
  size_t depth() const { return layers_.size(); }
  size_t input_width() const { return input_width_; }
  const std::vector<Gate>& layer(size_t i) const { return layers_.at(i); }

  /// S_i; width(depth()) is the input width.
  size_t width(size_t i) const;

  /// s_i = ceil(log2 S_i); layer values are padded to 2^{s_i}.
  int label_bits(size_t i) const;
  size_t padded_width(size_t i) const { return size_t{1} << label_bits(i); }

  /// Optional O(polylog S) wiring evaluator for structured families.
  void set_closed_form(size_t layer, GateOp kind, WiringFn fn);
  const WiringFn* closed_form(size_t layer, GateOp kind) const;

 private:
  PrimeModulus modulus_;
  size_t input_width_;
  std::vector<std::vector<Gate>> layers_;
  std::map<std::pair<size_t, int>, WiringFn> closed_forms_;
};

/// Per-layer gate values, inputs at index depth(); each vector is padded
/// with zeros to 2^{s_i} so phantom gates read as 0 everywhere.
struct EvaluationTrace {
  std::vector<std::vector<FieldElement>> layers;
};

/// Circuit document: JSON with modulus (decimal string), input_width and
/// layers listed top-down, each gate {"op":"add"|"mul","left":i,"right":j}.
/// Errors carry the layer/gate locus.
LayeredCircuit parse_circuit(const std::string& text);
std::string serialize_circuit(const LayeredCircuit& c);

/// Bottom-up evaluation; input length must equal input_width.
EvaluationTrace evaluate(const LayeredCircuit& c, const DataVector& input);

/// Unpadded output values (layer 0).
DataVector outputs(const LayeredCircuit& c, const EvaluationTrace& trace);

/// V~_i(z), the MLE of the padded layer-i value vector.
FieldElement layer_mle(const EvaluationTrace& trace, size_t layer,
                       const Point& z);

struct WiringPoint {
  Point z;   // length s_i
  Point w1;  // length s_{i+1}
  Point w2;  // length s_{i+1}
};

enum class WiringBackend { DirectSum, ClosedForm };

/// add~_i / mult~_i at (z, w1, w2). DirectSum walks the layer's gate list
/// (O(S_i) per query); ClosedForm calls the circuit family's evaluator and
/// throws std::logic_error when none was installed.
FieldElement wiring_mle(const LayeredCircuit& c, size_t layer, GateOp kind,
                        const WiringPoint& at,
                        WiringBackend backend = WiringBackend::DirectSum);

// Generator families -------------------------------------------------------

/// Balanced tree of Mul gates computing the product of `width` inputs;
/// width must be a power of two >= 2. Ships closed-form wiring.
LayeredCircuit product_tree_circuit(const PrimeModulus& m, size_t width);

/// Random circuit with the given depth and per-layer widths drawn from
/// [1, max_width]; wires and ops drawn uniformly.
LayeredCircuit random_layered_circuit(const PrimeModulus& m, size_t depth,
                                      size_t max_width, RandomSource& rng);

}  // namespace ipkit
