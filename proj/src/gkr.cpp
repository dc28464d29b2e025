#include "ipkit/gkr.hpp"

#include <map>

namespace ipkit {

/// V~ of a padded layer slice: table lookup when the point is binary,
/// otherwise a fold over a local copy.
static FieldElement value_at(const std::vector<FieldElement>& layer,
                             const Point& z) {
  bool binary = true;
  for (const auto& x : z)
    if (x.value() > 1) {
      binary = false;
      break;
    }
  if (binary) {
    size_t idx = 0;
    for (const auto& x : z) idx = (idx << 1) | x.value();
    return layer[idx];
  }
  std::vector<FieldElement> table = layer;
  for (const auto& zj : z) {
    size_t half = table.size() / 2;
    for (size_t k = 0; k < half; ++k)
      table[k] += zj * (table[k + half] - table[k]);
    table.resize(half);
  }
  return table.front();
}

SummandOracle make_layer_oracle(const LayeredCircuit& c,
                                const EvaluationTrace& trace,
                                const LayerClaim& claim) {
  if (claim.layer >= c.depth())
    throw std::out_of_range("layer oracle: layer out of range");
  const size_t i = claim.layer;
  const int si = c.label_bits(i);
  const int s1 = c.label_bits(i + 1);
  if (static_cast<int>(claim.z.size()) != si)
    throw std::invalid_argument("layer oracle: claim arity mismatch");
  const int l = si + 2 * s1;
  const PrimeModulus m = c.modulus();
  const FieldElement one = FieldElement::one(m);
  const Point z = claim.z;

  auto eval = [&c, &trace, z, i, si, s1, one](const Point& pt) {
    Point p(pt.begin(), pt.begin() + si);
    Point w1(pt.begin() + si, pt.begin() + si + s1);
    Point w2(pt.begin() + si + s1, pt.end());

    FieldElement add_acc = one.zero_like();
    FieldElement mul_acc = one.zero_like();
    const auto& gates = c.layer(i);
    for (size_t gi = 0; gi < gates.size(); ++gi) {
      const Gate& g = gates[gi];
      FieldElement e = eq_binary_index(p, gi, one) *
                       eq_binary_index(w1, g.left, one) *
                       eq_binary_index(w2, g.right, one);
      if (g.op == GateOp::Add)
        add_acc += e;
      else
        mul_acc += e;
    }

    const auto& below = trace.layers[i + 1];
    FieldElement v1 = value_at(below, w1);
    FieldElement v2 = value_at(below, w2);
    FieldElement out = add_acc * (v1 + v2) + mul_acc * (v1 * v2);
    if (si > 0) out = eq_eval(z, p) * out;
    return out;
  };
  return {m, l, std::vector<int>(static_cast<size_t>(l), 2), std::move(eval)};
}

LayerClaim output_claim(const LayeredCircuit& c,
                        const DataVector& claimed_outputs, RandomSource& rng) {
  if (claimed_outputs.size() != c.width(0))
    throw std::invalid_argument("output claim: length mismatch");
  const PrimeModulus& m = c.modulus();
  const int s0 = c.label_bits(0);
  Point z;
  z.reserve(static_cast<size_t>(s0));
  for (int k = 0; k < s0; ++k) z.push_back(rng.next_element(m));
  FieldElement r0 = mle_eval(MultilinearTable::padded(claimed_outputs, m), z);
  return {0, z, r0};
}

UnivariatePoly reduction_poly(const MultilinearTable& layer_values,
                              const Point& z1, const Point& z2) {
  return mle_restrict_line(layer_values, line_through(z1, z2));
}

std::variant<LayerClaim, Rejection> reduce_two_claims(
    size_t next_layer, const Point& z1, const Point& z2,
    const FieldElement& v1, const FieldElement& v2, RandomSource& rng,
    const UnivariatePoly& prover_poly) {
  if (z1.size() != z2.size())
    throw std::invalid_argument("reduce: arity mismatch");
  const int s = static_cast<int>(z1.size());
  if (prover_poly.degree() > s)
    return Rejection{RejectReason::DegreeExceeded, 0};
  const FieldElement zero = v1.zero_like();
  if (prover_poly.eval(zero) != v1 || prover_poly.eval(zero.one_like()) != v2)
    return Rejection{RejectReason::EndpointMismatch, 0};
  PrimeModulus m(v1.modulus());
  FieldElement r = rng.next_element(m);
  AffineLine line = line_through(z1, z2);
  return LayerClaim{next_layer, line.at(r), prover_poly.eval(r)};
}

GkrStrategy GkrStrategy::corrupt_outputs(u64 offset) {
  GkrStrategy s;
  s.kind = Kind::CorruptOutputs;
  s.offset = offset;
  return s;
}

GkrStrategy GkrStrategy::lie_final_value(size_t layer, u64 offset) {
  GkrStrategy s;
  s.kind = Kind::LieFinalValue;
  s.layer = layer;
  s.offset = offset;
  return s;
}

GkrStrategy GkrStrategy::inner_sumcheck(size_t layer, ProverStrategy inner) {
  GkrStrategy s;
  s.kind = Kind::InnerSumcheck;
  s.layer = layer;
  s.inner = std::move(inner);
  return s;
}

std::string GkrStrategy::name() const {
  switch (kind) {
    case Kind::Honest:
      return "honest";
    case Kind::CorruptOutputs:
      return "corrupt-outputs+" + std::to_string(offset);
    case Kind::LieFinalValue:
      return "lie-final-value+" + std::to_string(offset) + "@" +
             std::to_string(layer);
    case Kind::InnerSumcheck:
      return "inner:" + inner.name() + "@" + std::to_string(layer);
  }
  return "unknown";
}

static std::vector<std::string> hex_list(const Point& pt) {
  std::vector<std::string> out;
  out.reserve(pt.size());
  for (const auto& x : pt) out.push_back(to_hex(x));
  return out;
}

static Point point_from_hex(const json& arr, const PrimeModulus& m) {
  Point out;
  for (const auto& h : arr) out.push_back(fe_from_hex(h.get<std::string>(), m));
  return out;
}

/// Verifier recomputation of f_{i,z}(p*, w1*, w2*) from circuit structure
/// and the prover-supplied V~ values. Uses the closed-form wiring when the
/// circuit family ships one.
static FieldElement recompute_layer_value(const LayeredCircuit& c,
                                          size_t layer, const Point& z,
                                          const Point& p, const Point& w1,
                                          const Point& w2,
                                          const FieldElement& v1,
                                          const FieldElement& v2) {
  WiringPoint at{p, w1, w2};
  auto backend = [&c, layer](GateOp kind) {
    return c.closed_form(layer, kind) ? WiringBackend::ClosedForm
                                      : WiringBackend::DirectSum;
  };
  FieldElement add_v = wiring_mle(c, layer, GateOp::Add, at, backend(GateOp::Add));
  FieldElement mul_v = wiring_mle(c, layer, GateOp::Mul, at, backend(GateOp::Mul));
  FieldElement out = add_v * (v1 + v2) + mul_v * (v1 * v2);
  if (!z.empty()) out = eq_eval(z, p) * out;
  return out;
}

static json counter_json(const OpCounter& c) {
  return json{{"adds", c.adds}, {"muls", c.muls}, {"invs", c.invs}};
}

GkrRun gkr_prove_verify(const LayeredCircuit& c, const DataVector& input,
                        const DataVector& claimed_outputs, u64 seed,
                        const GkrStrategy& strategy) {
  GkrRun run;
  OpCounter& pc = run.prover_ops;
  OpCounter& vc = run.verifier_ops;

  RandomSource root(seed);
  RandomSource verifier_rng = root.fork(1);
  RandomSource prover_rng = root.fork(2);

  // Prover work: evaluate the circuit and fix the outputs it announces.
  EvaluationTrace trace;
  DataVector announced = claimed_outputs;
  {
    CountScope cs(pc);
    trace = evaluate(c, input);
    if (strategy.kind == GkrStrategy::Kind::CorruptOutputs) {
      FieldElement bump = announced[0].like(strategy.offset);
      if (bump.is_zero()) bump = announced[0].one_like();
      announced[0] += bump;
    }
  }

  run.transcript.header = json{{"protocol", "gkr"},
                               {"modulus", std::to_string(c.modulus().value())},
                               {"seed", seed},
                               {"strategy", strategy.name()},
                               {"circuit", json::parse(serialize_circuit(c))},
                               {"input", hex_list(input)},
                               {"claimed", hex_list(announced)}};
  run.prover_elements += announced.size();

  LayerClaim claim{0, {}, FieldElement::zero(c.modulus())};
  {
    CountScope cs(vc);
    claim = output_claim(c, announced, verifier_rng);
  }
  run.transcript.records.push_back(json{{"kind", "output-claim"},
                                        {"z", hex_list(claim.z)},
                                        {"value", to_hex(claim.value)}});
  run.chain.push_back(claim);

  auto finish = [&](Verdict v, std::optional<Rejection> rej, size_t layer) {
    run.verdict = v;
    run.rejection = rej;
    run.reject_layer = layer;
    run.bytes = 8 * run.prover_elements;
    run.transcript.records.push_back(
        json{{"kind", "summary"},
             {"verdict", verdict_name(v)},
             {"rounds", run.total_rounds},
             {"bytes", run.bytes},
             {"prover_ops", counter_json(run.prover_ops)},
             {"verifier_ops", counter_json(run.verifier_ops)}});
    return run;
  };

  for (size_t layer = 0; layer < c.depth(); ++layer) {
    const int s1 = c.label_bits(layer + 1);
    run.transcript.records.push_back(json{{"kind", "layer"},
                                          {"layer", layer},
                                          {"z", hex_list(claim.z)},
                                          {"claim", to_hex(claim.value)}});

    SummandOracle oracle = make_layer_oracle(c, trace, claim);
    std::optional<SumcheckProver> prover;
    {
      CountScope cs(pc);
      FieldElement true_sum = layer_mle(trace, layer, claim.z);
      if (strategy.kind == GkrStrategy::Kind::InnerSumcheck &&
          strategy.layer == layer)
        prover.emplace(oracle, true_sum, strategy.inner,
                       prover_rng.fork(layer));
      else
        prover.emplace(oracle, true_sum, claim.value, prover_rng.fork(layer));
    }

    SumcheckResult res = drive_session(oracle, *prover, claim.value,
                                       FinalMode::Deferred, verifier_rng, &pc,
                                       &vc);
    run.total_rounds += res.challenges.size();
    run.prover_elements += res.transcript.prover_elements();
    for (auto& rec : res.transcript.records)
      run.transcript.records.push_back(std::move(rec));

    if (res.verdict == Verdict::Rejected)
      return finish(Verdict::Rejected, res.rejection, layer);

    const Point& pt = res.deferred->point;
    Point p(pt.begin(), pt.begin() + c.label_bits(layer));
    Point w1(pt.begin() + c.label_bits(layer),
             pt.begin() + c.label_bits(layer) + s1);
    Point w2(pt.begin() + c.label_bits(layer) + s1, pt.end());

    // Prover sends V~_{i+1} at both queried points.
    FieldElement v1 = claim.value.zero_like(), v2 = v1;
    {
      CountScope cs(pc);
      v1 = layer_mle(trace, layer + 1, w1);
      v2 = layer_mle(trace, layer + 1, w2);
      if (strategy.kind == GkrStrategy::Kind::LieFinalValue &&
          strategy.layer == layer) {
        FieldElement bump = v1.like(strategy.offset);
        if (bump.is_zero()) bump = v1.one_like();
        v1 += bump;
      }
    }
    run.transcript.records.push_back(json{{"dir", "p2v"},
                                          {"kind", "final-values"},
                                          {"v1", to_hex(v1)},
                                          {"v2", to_hex(v2)}});
    run.prover_elements += 2;

    // Verifier recomputes the deferred value from structure + sent values.
    bool final_ok = false;
    {
      CountScope cs(vc);
      final_ok = recompute_layer_value(c, layer, claim.z, p, w1, w2, v1, v2) ==
                 res.deferred->value;
    }
    if (!final_ok)
      return finish(Verdict::Rejected,
                    Rejection{RejectReason::FinalValueMismatch,
                              static_cast<int>(layer)},
                    layer);

    // Two claims -> one via the line through w1*, w2*.
    UnivariatePoly rpoly;
    {
      CountScope cs(pc);
      rpoly = reduction_poly(MultilinearTable(trace.layers[layer + 1]), w1, w2);
    }
    std::vector<std::string> rhex;
    for (const auto& x : rpoly.coeffs()) rhex.push_back(to_hex(x));
    while (static_cast<int>(rhex.size()) < s1 + 1) rhex.emplace_back("0");
    run.transcript.records.push_back(
        json{{"dir", "p2v"}, {"kind", "reduction"}, {"coeffs", rhex}});
    run.prover_elements += rhex.size();

    std::variant<LayerClaim, Rejection> red = Rejection{};
    {
      CountScope cs(vc);
      red = reduce_two_claims(layer + 1, w1, w2, v1, v2, verifier_rng, rpoly);
    }
    if (std::holds_alternative<Rejection>(red)) {
      Rejection rej = std::get<Rejection>(red);
      rej.round = static_cast<int>(layer);
      return finish(Verdict::Rejected, rej, layer);
    }
    claim = std::get<LayerClaim>(red);
    run.transcript.records.push_back(json{{"dir", "v2p"},
                                          {"kind", "reduction-challenge"},
                                          {"z", hex_list(claim.z)},
                                          {"value", to_hex(claim.value)}});
    run.chain.push_back(claim);
  }

  // Input layer: the verifier evaluates the input MLE herself.
  bool ok = false;
  FieldElement input_mle = claim.value.zero_like();
  {
    CountScope cs(vc);
    input_mle =
        mle_eval(MultilinearTable::padded(input, c.modulus()), claim.z);
    ok = input_mle == claim.value;
  }
  run.transcript.records.push_back(json{{"kind", "input-check"},
                                        {"z", hex_list(claim.z)},
                                        {"claim", to_hex(claim.value)},
                                        {"input_mle", to_hex(input_mle)}});
  if (!ok)
    return finish(Verdict::Rejected,
                  Rejection{RejectReason::FinalMismatch,
                            static_cast<int>(c.depth())},
                  c.depth());
  return finish(Verdict::Accepted, std::nullopt, 0);
}

ReplayOutcome replay_gkr(const Transcript& t) {
  ReplayOutcome out;
  auto tampered = [&out](const std::string& why) {
    out.tampered = true;
    out.detail = why;
    return out;
  };
  if (!t.checksum_ok) return tampered("checksum mismatch");

  std::optional<LayeredCircuit> circuit;
  u64 seed = 0;
  DataVector input, claimed;
  try {
    circuit = parse_circuit(t.header.at("circuit").dump());
    seed = t.header.at("seed").get<u64>();
    if (std::stoull(t.header.at("modulus").get<std::string>()) !=
        circuit->modulus().value())
      return tampered("modulus disagrees with embedded circuit");
    input = point_from_hex(t.header.at("input"), circuit->modulus());
    claimed = point_from_hex(t.header.at("claimed"), circuit->modulus());
  } catch (const json::exception&) {
    throw std::invalid_argument("gkr transcript: bad header");
  }
  const LayeredCircuit& c = *circuit;
  const PrimeModulus& m = c.modulus();
  if (input.size() != c.input_width() || claimed.size() != c.width(0))
    return tampered("input/claimed lengths disagree with circuit");

  RandomSource verifier_rng = RandomSource(seed).fork(1);

  size_t idx = 0;
  auto next_record = [&](const char* what) -> const json* {
    if (idx >= t.records.size()) {
      out.tampered = true;
      out.detail = std::string("missing record: ") + what;
      return nullptr;
    }
    return &t.records[idx++];
  };
  auto summary_check = [&](Verdict v) {
    const json* rec = next_record("summary");
    if (!rec) return false;
    if (!rec->contains("kind") || (*rec)["kind"] != "summary" ||
        (*rec)["verdict"] != verdict_name(v)) {
      out.tampered = true;
      out.detail = "summary diverges from re-derived verdict";
      return false;
    }
    if (idx != t.records.size()) {
      out.tampered = true;
      out.detail = "trailing records";
      return false;
    }
    out.verdict = v;
    return true;
  };

  try {
    LayerClaim claim = output_claim(c, claimed, verifier_rng);
    {
      const json* rec = next_record("output-claim");
      if (!rec) return out;
      if (!rec->contains("kind") || (*rec)["kind"] != "output-claim" ||
          point_from_hex((*rec)["z"], m) != claim.z ||
          fe_from_hex((*rec)["value"].get<std::string>(), m) != claim.value)
        return tampered("output claim diverges");
    }

    for (size_t layer = 0; layer < c.depth(); ++layer) {
      const int si = c.label_bits(layer);
      const int s1 = c.label_bits(layer + 1);
      const int l = si + 2 * s1;
      {
        const json* rec = next_record("layer");
        if (!rec) return out;
        if (!rec->contains("kind") || (*rec)["kind"] != "layer" ||
            (*rec)["layer"].get<size_t>() != layer ||
            point_from_hex((*rec)["z"], m) != claim.z ||
            fe_from_hex((*rec)["claim"].get<std::string>(), m) != claim.value)
          return tampered("layer claim diverges");
      }

      VerifierState st(m, l, std::vector<int>(static_cast<size_t>(l), 2),
                       claim.value, FinalMode::Deferred);
      bool rejected = false;
      for (int i = 1; i <= l && !rejected; ++i) {
        const json* rec = next_record("round message");
        if (!rec) return out;
        if (!rec->contains("coeffs") || (*rec)["round"] != i)
          return tampered("unexpected record where round message expected");
        std::vector<FieldElement> coeffs;
        for (const auto& h : (*rec)["coeffs"])
          coeffs.push_back(fe_from_hex(h.get<std::string>(), m));
        auto ch = st.check_round({i, UnivariatePoly(std::move(coeffs))},
                                 verifier_rng);
        if (!ch) {
          const json* fin = next_record("reject record");
          if (!fin) return out;
          if (!fin->contains("final") || (*fin)["final"] != "rejected")
            return tampered("verifier rejected but transcript disagrees");
          if (!summary_check(Verdict::Rejected)) return out;
          return out;
        }
        const json* chrec = next_record("challenge");
        if (!chrec) return out;
        if (!chrec->contains("challenge") || (*chrec)["round"] != i ||
            (*chrec)["challenge"].get<std::string>() != to_hex(*ch))
          return tampered("challenge diverges from seeded draw");
      }

      auto fin_out = st.final_check(nullptr);
      const DeferredClaim& def = std::get<DeferredClaim>(fin_out);
      {
        const json* rec = next_record("deferred record");
        if (!rec) return out;
        if (!rec->contains("final") || (*rec)["final"] != "deferred" ||
            fe_from_hex((*rec)["value"].get<std::string>(), m) != def.value ||
            point_from_hex((*rec)["point"], m) != def.point)
          return tampered("deferred claim diverges");
      }

      Point p(def.point.begin(), def.point.begin() + si);
      Point w1(def.point.begin() + si, def.point.begin() + si + s1);
      Point w2(def.point.begin() + si + s1, def.point.end());

      const json* fv = next_record("final-values");
      if (!fv) return out;
      if (!fv->contains("kind") || (*fv)["kind"] != "final-values")
        return tampered("missing final values");
      FieldElement v1 = fe_from_hex((*fv)["v1"].get<std::string>(), m);
      FieldElement v2 = fe_from_hex((*fv)["v2"].get<std::string>(), m);

      if (recompute_layer_value(c, layer, claim.z, p, w1, w2, v1, v2) !=
          def.value) {
        if (!summary_check(Verdict::Rejected)) return out;
        return out;
      }

      const json* rp = next_record("reduction");
      if (!rp) return out;
      if (!rp->contains("kind") || (*rp)["kind"] != "reduction")
        return tampered("missing reduction poly");
      std::vector<FieldElement> rc;
      for (const auto& h : (*rp)["coeffs"])
        rc.push_back(fe_from_hex(h.get<std::string>(), m));
      auto red = reduce_two_claims(layer + 1, w1, w2, v1, v2, verifier_rng,
                                   UnivariatePoly(std::move(rc)));
      if (std::holds_alternative<Rejection>(red)) {
        if (!summary_check(Verdict::Rejected)) return out;
        return out;
      }
      claim = std::get<LayerClaim>(red);
      const json* rch = next_record("reduction-challenge");
      if (!rch) return out;
      if (!rch->contains("kind") || (*rch)["kind"] != "reduction-challenge" ||
          point_from_hex((*rch)["z"], m) != claim.z ||
          fe_from_hex((*rch)["value"].get<std::string>(), m) != claim.value)
        return tampered("reduction challenge diverges");
    }

    FieldElement input_mle =
        mle_eval(MultilinearTable::padded(input, m), claim.z);
    const json* ic = next_record("input-check");
    if (!ic) return out;
    if (!ic->contains("kind") || (*ic)["kind"] != "input-check" ||
        fe_from_hex((*ic)["input_mle"].get<std::string>(), m) != input_mle)
      return tampered("input check diverges");
    Verdict v =
        input_mle == claim.value ? Verdict::Accepted : Verdict::Rejected;
    if (!summary_check(v)) return out;
  } catch (const std::invalid_argument& e) {
    return tampered(std::string("bad record payload: ") + e.what());
  } catch (const json::exception&) {
    return tampered("bad record shape");
  } catch (const std::bad_variant_access&) {
    return tampered("record sequence does not match protocol flow");
  }
  return out;
}

SummandOracle circuit_sum_oracle(const LayeredCircuit& c) {
  if (c.width(0) != 1)
    throw std::invalid_argument("monolithic oracle needs a single output");
  const size_t n = c.input_width();

  // Structural per-variable degrees: inputs start at unit vectors, Mul
  // adds them, Add takes the max.
  std::vector<std::vector<u64>> degs(n, std::vector<u64>(n, 0));
  for (size_t j = 0; j < n; ++j) degs[j][j] = 1;
  for (size_t i = c.depth(); i-- > 0;) {
    std::vector<std::vector<u64>> next;
    next.reserve(c.width(i));
    for (const Gate& g : c.layer(i)) {
      std::vector<u64> d(n, 0);
      for (size_t v = 0; v < n; ++v)
        d[v] = g.op == GateOp::Mul
                   ? degs[g.left][v] + degs[g.right][v]
                   : std::max(degs[g.left][v], degs[g.right][v]);
      next.push_back(std::move(d));
    }
    degs = std::move(next);
  }
  std::vector<int> bounds;
  bounds.reserve(n);
  for (size_t v = 0; v < n; ++v) bounds.push_back(static_cast<int>(degs[0][v]));

  return {c.modulus(), static_cast<int>(n), std::move(bounds),
          [&c](const Point& pt) {
            EvaluationTrace tr = evaluate(c, pt);
            return tr.layers[0][0];
          }};
}

u64 predicted_monolithic_prover_ops(const SummandOracle& g) {
  // One oracle evaluation has an input-independent op count; measure it
  // once, likewise the per-round interpolation, then count the loop.
  OpCounter ec;
  {
    CountScope cs(ec);
    Point pt(static_cast<size_t>(g.num_vars), FieldElement::zero(g.modulus));
    (void)g.eval(pt);
  }
  const u64 per_eval = ec.total() + 1;  // + the accumulating add

  std::map<int, u64> interp_cost;
  for (int d : g.degree_bounds) {
    if (interp_cost.count(d)) continue;
    OpCounter ic;
    {
      CountScope cs(ic);
      std::vector<std::pair<FieldElement, FieldElement>> pts;
      for (int k = 0; k <= d; ++k)
        pts.emplace_back(FieldElement(static_cast<u64>(k), g.modulus),
                         FieldElement::zero(g.modulus));
      (void)uni_interpolate(pts);
    }
    interp_cost[d] = ic.total();
  }

  u64 total = 0;
  for (int i = 1; i <= g.num_vars; ++i) {
    const int d = g.degree_bounds[i - 1];
    total += (static_cast<u64>(d) + 1) * (1ull << (g.num_vars - i)) * per_eval;
    total += interp_cost[d];
  }
  return total;
}

}  // namespace ipkit
