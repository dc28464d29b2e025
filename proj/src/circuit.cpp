#include "ipkit/circuit.hpp"

#include <bit>

#include <nlohmann/json.hpp>

namespace ipkit {

using json = nlohmann::json;

LayeredCircuit::LayeredCircuit(const PrimeModulus& m, size_t input_width,
                               std::vector<std::vector<Gate>> layers)
    : modulus_(m), input_width_(input_width), layers_(std::move(layers)) {
  if (input_width_ == 0)
    throw std::invalid_argument("circuit: input width must be >= 1");
  if (layers_.empty()) throw std::invalid_argument("circuit: no layers");
  for (size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].empty())
      throw std::invalid_argument("circuit: layer " + std::to_string(i) +
                                  " is empty");
    size_t below = i + 1 < layers_.size() ? layers_[i + 1].size()
                                          : input_width_;
    for (size_t gi = 0; gi < layers_[i].size(); ++gi) {
      const Gate& g = layers_[i][gi];
      if (g.left >= below || g.right >= below)
        throw std::invalid_argument(
            "circuit: layer " + std::to_string(i) + " gate " +
            std::to_string(gi) + ": wire index out of range (below width " +
            std::to_string(below) + ")");
    }
  }
}

size_t LayeredCircuit::width(size_t i) const {
  if (i < layers_.size()) return layers_[i].size();
  if (i == layers_.size()) return input_width_;
  throw std::out_of_range("circuit: layer index");
}

int LayeredCircuit::label_bits(size_t i) const {
  return static_cast<int>(std::bit_width(std::bit_ceil(width(i)) >> 1));
}

void LayeredCircuit::set_closed_form(size_t layer, GateOp kind, WiringFn fn) {
  closed_forms_[{layer, kind == GateOp::Add ? 0 : 1}] = std::move(fn);
}

const LayeredCircuit::WiringFn* LayeredCircuit::closed_form(
    size_t layer, GateOp kind) const {
  auto it = closed_forms_.find({layer, kind == GateOp::Add ? 0 : 1});
  return it == closed_forms_.end() ? nullptr : &it->second;
}

LayeredCircuit parse_circuit(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("circuit: malformed document: ") +
                                e.what());
  }
  try {
    PrimeModulus m(std::stoull(doc.at("modulus").get<std::string>()));
    size_t input_width = doc.at("input_width").get<size_t>();
    std::vector<std::vector<Gate>> layers;
    for (const auto& jl : doc.at("layers")) {
      std::vector<Gate> layer;
      for (const auto& jg : jl) {
        std::string op = jg.at("op").get<std::string>();
        if (op != "add" && op != "mul")
          throw std::invalid_argument("circuit: unknown op '" + op + "'");
        layer.push_back(Gate{op == "add" ? GateOp::Add : GateOp::Mul,
                             jg.at("left").get<size_t>(),
                             jg.at("right").get<size_t>()});
      }
      layers.push_back(std::move(layer));
    }
    return LayeredCircuit(m, input_width, std::move(layers));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("circuit: malformed document: ") +
                                e.what());
  }
}

std::string serialize_circuit(const LayeredCircuit& c) {
  json layers = json::array();
  for (size_t i = 0; i < c.depth(); ++i) {
    json jl = json::array();
    for (const Gate& g : c.layer(i))
      jl.push_back(json{{"op", g.op == GateOp::Add ? "add" : "mul"},
                        {"left", g.left},
                        {"right", g.right}});
    layers.push_back(std::move(jl));
  }
  json doc{{"modulus", std::to_string(c.modulus().value())},
           {"input_width", c.input_width()},
           {"layers", layers}};
  return doc.dump(2) + "\n";
}

EvaluationTrace evaluate(const LayeredCircuit& c, const DataVector& input) {
  if (input.size() != c.input_width())
    throw std::invalid_argument("evaluate: input width mismatch");
  const FieldElement zero = FieldElement::zero(c.modulus());
  EvaluationTrace trace;
  trace.layers.assign(c.depth() + 1, {});

  auto& bottom = trace.layers[c.depth()];
  bottom = input;
  bottom.resize(c.padded_width(c.depth()), zero);

  for (size_t i = c.depth(); i-- > 0;) {
    const auto& below = trace.layers[i + 1];
    auto& vals = trace.layers[i];
    vals.reserve(c.padded_width(i));
    for (const Gate& g : c.layer(i)) {
      vals.push_back(g.op == GateOp::Add ? below[g.left] + below[g.right]
                                         : below[g.left] * below[g.right]);
    }
    vals.resize(c.padded_width(i), zero);
  }
  return trace;
}

DataVector outputs(const LayeredCircuit& c, const EvaluationTrace& trace) {
  const auto& top = trace.layers.at(0);
  return DataVector(top.begin(), top.begin() + c.width(0));
}

FieldElement layer_mle(const EvaluationTrace& trace, size_t layer,
                       const Point& z) {
  return mle_eval(MultilinearTable(trace.layers.at(layer)), z);
}

FieldElement wiring_mle(const LayeredCircuit& c, size_t layer, GateOp kind,
                        const WiringPoint& at, WiringBackend backend) {
  if (layer >= c.depth()) throw std::out_of_range("wiring_mle: layer");
  if (static_cast<int>(at.z.size()) != c.label_bits(layer) ||
      static_cast<int>(at.w1.size()) != c.label_bits(layer + 1) ||
      static_cast<int>(at.w2.size()) != c.label_bits(layer + 1))
    throw std::invalid_argument("wiring_mle: arity mismatch");

  if (backend == WiringBackend::ClosedForm) {
    const auto* fn = c.closed_form(layer, kind);
    if (!fn)
      throw std::logic_error("wiring_mle: no closed form for this layer");
    return (*fn)(at.z, at.w1, at.w2);
  }

  const FieldElement one = FieldElement::one(c.modulus());
  FieldElement acc = one.zero_like();
  const auto& gates = c.layer(layer);
  for (size_t gi = 0; gi < gates.size(); ++gi) {
    const Gate& g = gates[gi];
    if (g.op != kind) continue;
    acc += eq_binary_index(at.z, gi, one) * eq_binary_index(at.w1, g.left, one) *
           eq_binary_index(at.w2, g.right, one);
  }
  return acc;
}

LayeredCircuit product_tree_circuit(const PrimeModulus& m, size_t width) {
  if (width < 2 || !std::has_single_bit(width))
    throw std::invalid_argument("product tree: width must be a power of two >= 2");
  std::vector<std::vector<Gate>> layers;
  for (size_t w = 1; w < width; w *= 2) {
    std::vector<Gate> layer;
    layer.reserve(w);
    for (size_t j = 0; j < w; ++j)
      layer.push_back(Gate{GateOp::Mul, 2 * j, 2 * j + 1});
    layers.push_back(std::move(layer));
  }
  LayeredCircuit c(m, width, std::move(layers));

  // Gate j at layer i feeds from (2j, 2j+1): the children share j's bits
  // with a trailing 0 / 1, so both predicates collapse to O(s) products.
  const FieldElement one = FieldElement::one(m);
  for (size_t i = 0; i < c.depth(); ++i) {
    c.set_closed_form(
        i, GateOp::Mul,
        [one](const Point& z, const Point& w1, const Point& w2) {
          FieldElement out = one;
          for (size_t k = 0; k < z.size(); ++k) {
            out *= z[k] * w1[k] + (one - z[k]) * (one - w1[k]);
            out *= z[k] * w2[k] + (one - z[k]) * (one - w2[k]);
          }
          out *= (one - w1.back()) * w2.back();
          return out;
        });
    c.set_closed_form(i, GateOp::Add,
                      [one](const Point&, const Point&, const Point&) {
                        return one.zero_like();
                      });
  }
  return c;
}

LayeredCircuit random_layered_circuit(const PrimeModulus& m, size_t depth,
                                      size_t max_width, RandomSource& rng) {
  if (depth == 0) throw std::invalid_argument("random circuit: depth 0");
  std::vector<size_t> widths(depth + 1);
  for (auto& w : widths) w = 1 + rng.next_below(max_width);
  std::vector<std::vector<Gate>> layers(depth);
  for (size_t i = 0; i < depth; ++i) {
    size_t below = widths[i + 1];
    layers[i].reserve(widths[i]);
    for (size_t j = 0; j < widths[i]; ++j)
      layers[i].push_back(Gate{rng.next_below(2) ? GateOp::Mul : GateOp::Add,
                               rng.next_below(below), rng.next_below(below)});
  }
  return LayeredCircuit(m, widths[depth], std::move(layers));
}

}  // namespace ipkit
