#include "ipkit/sumcheck.hpp"

#include <sstream>

namespace ipkit {

FieldElement brute_force_sum(const SummandOracle& g) {
  if (g.num_vars > 25)
    throw std::invalid_argument("brute_force_sum: too many variables");
  const FieldElement zero = FieldElement::zero(g.modulus);
  const FieldElement one = FieldElement::one(g.modulus);
  Point pt(static_cast<size_t>(g.num_vars), zero);
  FieldElement sum = zero;
  for (u64 s = 0; s < (1ull << g.num_vars); ++s) {
    for (int j = 0; j < g.num_vars; ++j)
      pt[j] = ((s >> (g.num_vars - 1 - j)) & 1) ? one : zero;
    sum += g.eval(pt);
  }
  return sum;
}

UnivariatePoly honest_round_poly(const SummandOracle& g,
                                 const std::vector<FieldElement>& fixed,
                                 int round) {
  const int l = g.num_vars;
  if (round < 1 || round > l)
    throw std::invalid_argument("honest_round_poly: round out of range");
  if (static_cast<int>(fixed.size()) != round - 1)
    throw std::invalid_argument("honest_round_poly: prefix length");
  const int suffix = l - round;
  const int d = g.degree_bounds[round - 1];
  const FieldElement zero = FieldElement::zero(g.modulus);
  const FieldElement one = FieldElement::one(g.modulus);

  Point pt(fixed.begin(), fixed.end());
  pt.resize(static_cast<size_t>(l), zero);

  std::vector<std::pair<FieldElement, FieldElement>> samples;
  samples.reserve(static_cast<size_t>(d) + 1);
  for (int a = 0; a <= d; ++a) {
    FieldElement x = zero.like(static_cast<u64>(a));
    pt[round - 1] = x;
    FieldElement sum = zero;
    for (u64 s = 0; s < (1ull << suffix); ++s) {
      for (int j = 0; j < suffix; ++j)
        pt[round + j] = ((s >> (suffix - 1 - j)) & 1) ? one : zero;
      sum += g.eval(pt);
    }
    samples.emplace_back(x, sum);
  }
  return uni_interpolate(samples);
}

std::string reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::SumMismatch:
      return "sum-mismatch";
    case RejectReason::DegreeExceeded:
      return "degree-exceeded";
    case RejectReason::FinalMismatch:
      return "final-mismatch";
    case RejectReason::FinalValueMismatch:
      return "final-value-mismatch";
    case RejectReason::EndpointMismatch:
      return "endpoint-mismatch";
  }
  return "unknown";
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Accepted:
      return "accepted";
    case Verdict::Rejected:
      return "rejected";
    case Verdict::Deferred:
      return "deferred";
  }
  return "unknown";
}

VerifierState::VerifierState(const PrimeModulus& m, int num_vars,
                             std::vector<int> degree_bounds,
                             const FieldElement& claim, FinalMode mode)
    : modulus_(m),
      num_vars_(num_vars),
      bounds_(std::move(degree_bounds)),
      claim_(claim),
      mode_(mode),
      phase_(num_vars == 0 ? Phase::FinalCheck : Phase::AwaitRound),
      round_(1) {
  if (static_cast<int>(bounds_.size()) != num_vars_)
    throw std::invalid_argument("verifier: bounds arity mismatch");
}

void VerifierState::reject(RejectReason reason) {
  rejection_ = Rejection{reason, round_};
  phase_ = Phase::Rejected;
}

std::optional<FieldElement> VerifierState::check_round(const RoundMessage& msg,
                                                       RandomSource& rng) {
  if (phase_ != Phase::AwaitRound)
    throw std::logic_error("verifier: round message out of phase");
  if (msg.round != round_)
    throw std::logic_error("verifier: round message out of order");

  if (msg.poly.degree() > bounds_[round_ - 1]) {
    reject(RejectReason::DegreeExceeded);
    return std::nullopt;
  }
  FieldElement zero = claim_.zero_like();
  FieldElement at0 = msg.poly.eval(zero);
  FieldElement at1 = msg.poly.eval(zero.one_like());
  if (at0 + at1 != claim_) {
    reject(RejectReason::SumMismatch);
    return std::nullopt;
  }
  FieldElement r = rng.next_element(modulus_);
  challenges_.push_back(r);
  claim_ = msg.poly.eval(r);
  if (round_ == num_vars_)
    phase_ = Phase::FinalCheck;
  else
    ++round_;
  return r;
}

std::variant<Verdict, DeferredClaim> VerifierState::final_check(
    const SummandOracle* g) {
  if (phase_ != Phase::FinalCheck)
    throw std::logic_error("verifier: final check out of phase");
  if (mode_ == FinalMode::Deferred) {
    phase_ = Phase::Accepted;  // the claim moves on, this session is done
    return DeferredClaim{challenges_, claim_};
  }
  if (!g) throw std::logic_error("verifier: direct final check needs g");
  if (g->eval(challenges_) == claim_) {
    phase_ = Phase::Accepted;
    return Verdict::Accepted;
  }
  round_ = num_vars_ + 1;
  reject(RejectReason::FinalMismatch);
  return Verdict::Rejected;
}

ProverStrategy ProverStrategy::wrong_claim(u64 offset) {
  ProverStrategy s;
  s.kind = Kind::WrongClaim;
  s.claim_offset = offset;
  return s;
}

ProverStrategy ProverStrategy::deviate_at(int round) {
  ProverStrategy s;
  s.kind = Kind::DeviateAtRound;
  s.deviate_round = round;
  return s;
}

ProverStrategy ProverStrategy::wrong_oracle(SummandOracle alt) {
  ProverStrategy s;
  s.kind = Kind::WrongOracle;
  s.alternate = std::make_shared<SummandOracle>(std::move(alt));
  return s;
}

std::string ProverStrategy::name() const {
  switch (kind) {
    case Kind::Honest:
      return "honest";
    case Kind::WrongClaim:
      return "wrong-claim+" + std::to_string(claim_offset);
    case Kind::DeviateAtRound:
      return "deviate-at-" + std::to_string(deviate_round);
    case Kind::WrongOracle:
      return "wrong-oracle";
  }
  return "unknown";
}

SumcheckProver::SumcheckProver(const SummandOracle& g,
                               const FieldElement& true_claim,
                               ProverStrategy strategy, RandomSource rng)
    : g_(g),
      strat_(std::move(strategy)),
      rng_(rng),
      claimed_(true_claim),
      discrepancy_(true_claim.zero_like()) {
  switch (strat_.kind) {
    case ProverStrategy::Kind::WrongClaim:
      claimed_ = true_claim + true_claim.like(strat_.claim_offset);
      discrepancy_ = claimed_ - true_claim;
      break;
    case ProverStrategy::Kind::WrongOracle:
      claimed_ = brute_force_sum(*strat_.alternate);
      break;
    default:
      break;
  }
}

SumcheckProver::SumcheckProver(const SummandOracle& g,
                               const FieldElement& true_claim,
                               const FieldElement& defended_claim,
                               RandomSource rng)
    : g_(g),
      strat_(ProverStrategy::honest()),
      rng_(rng),
      claimed_(defended_claim),
      discrepancy_(defended_claim - true_claim) {
  if (!discrepancy_.is_zero()) strat_.kind = ProverStrategy::Kind::WrongClaim;
}

const SummandOracle& SumcheckProver::oracle() const {
  return strat_.kind == ProverStrategy::Kind::WrongOracle ? *strat_.alternate
                                                          : g_;
}

static UnivariatePoly poly_add(const UnivariatePoly& a,
                               const UnivariatePoly& b) {
  std::vector<FieldElement> coeffs = a.coeffs();
  const auto& bc = b.coeffs();
  if (bc.size() > coeffs.size()) {
    FieldElement zero =
        coeffs.empty() ? bc.front().zero_like() : coeffs.front().zero_like();
    coeffs.resize(bc.size(), zero);
  }
  for (size_t k = 0; k < bc.size(); ++k) coeffs[k] += bc[k];
  return UnivariatePoly(std::move(coeffs));
}

UnivariatePoly SumcheckProver::offset_poly(int round,
                                           const FieldElement& delta) {
  // Builds e with e(0) + e(1) = delta and as many roots as the round's
  // degree bound allows; landing a challenge on a root zeroes the running
  // discrepancy and the prover returns to honest play.
  const int bound = g_.degree_bounds[round - 1];
  const FieldElement zero = delta.zero_like();
  const FieldElement one = delta.one_like();
  if (bound <= 0) {
    FieldElement half = delta * delta.like(2).inverse();
    return UnivariatePoly({half});
  }
  for (;;) {
    std::vector<FieldElement> roots;
    roots.reserve(static_cast<size_t>(bound));
    for (int k = 0; k < bound; ++k) roots.push_back(rng_.next_element(g_.modulus));
    FieldElement p0 = one, p1 = one;
    for (const auto& rho : roots) {
      p0 *= zero - rho;
      p1 *= one - rho;
    }
    FieldElement den = p0 + p1;
    if (den.is_zero()) continue;
    FieldElement c = delta * den.inverse();
    std::vector<FieldElement> coeffs{c};
    for (const auto& rho : roots) {
      // coeffs *= (x - rho)
      coeffs.insert(coeffs.begin(), zero);
      for (size_t k = 0; k + 1 < coeffs.size(); ++k)
        coeffs[k] -= rho * coeffs[k + 1];
    }
    return UnivariatePoly(std::move(coeffs));
  }
}

RoundMessage SumcheckProver::round_message(int round) {
  UnivariatePoly honest = honest_round_poly(oracle(), fixed_, round);
  last_offset_ = UnivariatePoly();

  switch (strat_.kind) {
    case ProverStrategy::Kind::Honest:
    case ProverStrategy::Kind::WrongOracle:
      return {round, honest};
    case ProverStrategy::Kind::DeviateAtRound:
      if (round == strat_.deviate_round) {
        FieldElement c = claimed_.zero_like();
        while (c.is_zero()) c = rng_.next_element(g_.modulus);
        last_offset_ = UnivariatePoly({c});
        return {round, poly_add(honest, last_offset_)};
      }
      return {round, honest};
    case ProverStrategy::Kind::WrongClaim:
      if (discrepancy_.is_zero()) return {round, honest};
      last_offset_ = offset_poly(round, discrepancy_);
      return {round, poly_add(honest, last_offset_)};
  }
  return {round, honest};
}

void SumcheckProver::receive_challenge(const FieldElement& r) {
  fixed_.push_back(r);
  discrepancy_ = last_offset_.eval(r);
}

// Transcript --------------------------------------------------------------

static u64 fnv1a(const std::string& data) {
  u64 h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string Transcript::to_jsonl() const {
  std::ostringstream out;
  out << header.dump() << '\n';
  for (const auto& rec : records) out << rec.dump() << '\n';
  std::string body = out.str();
  json meta{{"dir", "meta"}, {"checksum", to_hex_u64(fnv1a(body))}};
  return body + meta.dump() + '\n';
}

Transcript Transcript::from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<std::string, json>> lines;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      throw std::invalid_argument("transcript: malformed record line");
    }
    lines.emplace_back(line, std::move(j));
  }
  if (lines.size() < 2)
    throw std::invalid_argument("transcript: truncated file");

  Transcript t;
  const json& meta = lines.back().second;
  if (!meta.contains("dir") || meta["dir"] != "meta" ||
      !meta.contains("checksum"))
    throw std::invalid_argument("transcript: missing meta record");
  std::string body;
  for (size_t i = 0; i + 1 < lines.size(); ++i) body += lines[i].first + '\n';
  t.checksum_ok =
      meta["checksum"].get<std::string>() == to_hex_u64(fnv1a(body));

  t.header = lines.front().second;
  for (size_t i = 1; i + 1 < lines.size(); ++i)
    t.records.push_back(lines[i].second);
  return t;
}

size_t Transcript::prover_elements() const {
  size_t n = 0;
  for (const auto& rec : records)
    if (rec.contains("coeffs")) n += rec["coeffs"].size();
  return n;
}

size_t Transcript::challenge_elements() const {
  size_t n = 0;
  for (const auto& rec : records)
    if (rec.contains("challenge")) ++n;
  return n;
}

static json coeffs_record(int round, const UnivariatePoly& poly, int bound) {
  std::vector<std::string> hex;
  for (const auto& c : poly.coeffs()) hex.push_back(to_hex(c));
  // Wire format fixes the message width at bound+1 coefficients.
  while (static_cast<int>(hex.size()) < bound + 1) hex.emplace_back("0");
  return json{{"dir", "p2v"}, {"round", round}, {"coeffs", hex}};
}

static json challenge_record(int round, const FieldElement& r) {
  return json{{"dir", "v2p"}, {"round", round}, {"challenge", to_hex(r)}};
}

static json final_record(const std::variant<Verdict, DeferredClaim>& out,
                         const std::optional<Rejection>& rej) {
  json rec{{"dir", "v2p"}, {"final", ""}};
  if (std::holds_alternative<DeferredClaim>(out)) {
    const auto& d = std::get<DeferredClaim>(out);
    rec["final"] = "deferred";
    std::vector<std::string> pt;
    for (const auto& x : d.point) pt.push_back(to_hex(x));
    rec["point"] = pt;
    rec["value"] = to_hex(d.value);
  } else if (std::get<Verdict>(out) == Verdict::Accepted) {
    rec["final"] = "accepted";
  } else {
    rec["final"] = "rejected";
    if (rej) {
      rec["reason"] = reject_reason_name(rej->reason);
      rec["at"] = rej->round;
    }
  }
  return rec;
}

SumcheckResult drive_session(const SummandOracle& g, SumcheckProver& prover,
                             const FieldElement& verifier_claim, FinalMode mode,
                             RandomSource& verifier_rng, OpCounter* prover_ops,
                             OpCounter* verifier_ops) {
  OpCounter pd, vd;
  OpCounter& pc = prover_ops ? *prover_ops : pd;
  OpCounter& vc = verifier_ops ? *verifier_ops : vd;

  SumcheckResult res{Verdict::Rejected,
                     std::nullopt,
                     std::nullopt,
                     prover.claimed_total(),
                     {},
                     {}};

  VerifierState st(g.modulus, g.num_vars, g.degree_bounds, verifier_claim,
                   mode);

  for (int i = 1; i <= g.num_vars; ++i) {
    RoundMessage msg{0, {}};
    {
      CountScope cs(pc);
      msg = prover.round_message(i);
    }
    res.transcript.records.push_back(
        coeffs_record(i, msg.poly, g.degree_bounds[i - 1]));

    std::optional<FieldElement> ch;
    {
      CountScope cs(vc);
      ch = st.check_round(msg, verifier_rng);
    }
    if (!ch) {
      res.verdict = Verdict::Rejected;
      res.rejection = st.rejection();
      res.transcript.records.push_back(
          final_record(Verdict::Rejected, st.rejection()));
      res.challenges = st.challenges();
      return res;
    }
    res.transcript.records.push_back(challenge_record(i, *ch));
    {
      CountScope cs(pc);
      prover.receive_challenge(*ch);
    }
  }

  std::variant<Verdict, DeferredClaim> out = Verdict::Rejected;
  {
    CountScope cs(vc);
    out = st.final_check(mode == FinalMode::Direct ? &g : nullptr);
  }
  res.transcript.records.push_back(final_record(out, st.rejection()));
  res.challenges = st.challenges();
  if (std::holds_alternative<DeferredClaim>(out)) {
    res.verdict = Verdict::Deferred;
    res.deferred = std::get<DeferredClaim>(out);
  } else {
    res.verdict = std::get<Verdict>(out);
    res.rejection = st.rejection();
  }
  return res;
}

SumcheckResult run_sumcheck(const SummandOracle& g, const FieldElement& claim,
                            u64 seed, const ProverStrategy& strategy,
                            FinalMode mode, OpCounter* prover_ops,
                            OpCounter* verifier_ops) {
  OpCounter pd;
  OpCounter& pc = prover_ops ? *prover_ops : pd;

  RandomSource root(seed);
  RandomSource verifier_rng = root.fork(1);
  RandomSource prover_rng = root.fork(2);

  std::optional<SumcheckProver> prover;
  {
    CountScope cs(pc);
    prover.emplace(g, claim, strategy, prover_rng);
  }

  SumcheckResult res = drive_session(g, *prover, prover->claimed_total(),
                                     mode, verifier_rng, prover_ops,
                                     verifier_ops);
  res.transcript.header =
      json{{"protocol", "sumcheck"},
           {"modulus", std::to_string(g.modulus.value())},
           {"l", g.num_vars},
           {"bounds", g.degree_bounds},
           {"seed", seed},
           {"strategy", strategy.name()},
           {"claim", to_hex(prover->claimed_total())},
           {"mode", mode == FinalMode::Direct ? "direct" : "deferred"}};
  return res;
}

// Replay -------------------------------------------------------------------

static UnivariatePoly poly_from_hex(const json& coeffs,
                                    const PrimeModulus& m) {
  std::vector<FieldElement> c;
  for (const auto& h : coeffs)
    c.push_back(fe_from_hex(h.get<std::string>(), m));
  return UnivariatePoly(std::move(c));
}

ReplayOutcome replay_sumcheck(const Transcript& t, const SummandOracle& g) {
  ReplayOutcome out;
  auto tampered = [&out](const std::string& why) {
    out.tampered = true;
    out.detail = why;
    return out;
  };
  if (!t.checksum_ok) return tampered("checksum mismatch");

  u64 modulus, seed;
  int l;
  std::vector<int> bounds;
  std::string claim_hex, mode_str, recorded_final;
  try {
    modulus = std::stoull(t.header.at("modulus").get<std::string>());
    seed = t.header.at("seed").get<u64>();
    l = t.header.at("l").get<int>();
    bounds = t.header.at("bounds").get<std::vector<int>>();
    claim_hex = t.header.at("claim").get<std::string>();
    mode_str = t.header.at("mode").get<std::string>();
  } catch (const json::exception&) {
    throw std::invalid_argument("transcript: bad header");
  }
  PrimeModulus m(modulus);
  if (g.modulus != m || g.num_vars != l || g.degree_bounds != bounds)
    return tampered("header does not match the oracle");
  FinalMode mode =
      mode_str == "deferred" ? FinalMode::Deferred : FinalMode::Direct;

  VerifierState st(m, l, bounds, fe_from_hex(claim_hex, m), mode);
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

  try {
    for (int i = 1; i <= l; ++i) {
      const json* rec = next_record("round message");
      if (!rec) return out;
      if (!rec->contains("coeffs") || (*rec)["round"] != i)
        return tampered("unexpected record where round message expected");
      RoundMessage msg{i, poly_from_hex((*rec)["coeffs"], m)};
      auto ch = st.check_round(msg, verifier_rng);
      if (!ch) {
        const json* fin = next_record("final record");
        if (!fin) return out;
        if (!fin->contains("final") || (*fin)["final"] != "rejected")
          return tampered("verifier rejected but transcript disagrees");
        if (idx != t.records.size()) return tampered("trailing records");
        out.verdict = Verdict::Rejected;
        return out;
      }
      const json* chrec = next_record("challenge");
      if (!chrec) return out;
      if (!chrec->contains("challenge") || (*chrec)["round"] != i)
        return tampered("unexpected record where challenge expected");
      if ((*chrec)["challenge"].get<std::string>() != to_hex(*ch))
        return tampered("recorded challenge diverges from seeded draw");
    }

    auto fin_out = st.final_check(mode == FinalMode::Direct ? &g : nullptr);
    const json* fin = next_record("final record");
    if (!fin) return out;
    if (!fin->contains("final")) return tampered("missing final verdict");
    std::string recorded = (*fin)["final"].get<std::string>();
    if (std::holds_alternative<DeferredClaim>(fin_out)) {
      const auto& d = std::get<DeferredClaim>(fin_out);
      if (recorded != "deferred" ||
          (*fin)["value"].get<std::string>() != to_hex(d.value))
        return tampered("deferred claim diverges");
      out.verdict = Verdict::Deferred;
    } else {
      Verdict v = std::get<Verdict>(fin_out);
      if (recorded != verdict_name(v)) return tampered("verdict diverges");
      out.verdict = v;
    }
    if (idx != t.records.size()) return tampered("trailing records");
  } catch (const std::invalid_argument& e) {
    return tampered(std::string("bad record payload: ") + e.what());
  } catch (const json::exception&) {
    return tampered("bad record shape");
  }
  return out;
}

// Oracle builders -----------------------------------------------------------

SummandOracle monomial_oracle(const PrimeModulus& m, int num_vars,
                              std::vector<Monomial> terms) {
  std::vector<int> bounds(static_cast<size_t>(num_vars), 0);
  for (const auto& t : terms) {
    if (static_cast<int>(t.exps.size()) != num_vars)
      throw std::invalid_argument("monomial arity mismatch");
    for (int j = 0; j < num_vars; ++j)
      bounds[j] = std::max(bounds[j], t.exps[j]);
  }
  auto shared = std::make_shared<std::vector<Monomial>>(std::move(terms));
  auto eval = [shared, m](const Point& pt) {
    FieldElement sum = FieldElement::zero(m);
    for (const auto& t : *shared) {
      FieldElement term = t.coef;
      for (size_t j = 0; j < pt.size(); ++j)
        for (int e = 0; e < t.exps[j]; ++e) term *= pt[j];
      sum += term;
    }
    return sum;
  };
  return {m, num_vars, std::move(bounds), std::move(eval)};
}

SummandOracle table_oracle(MultilinearTable t) {
  const PrimeModulus m(t.values().front().modulus());
  int l = t.num_vars();
  auto shared = std::make_shared<MultilinearTable>(std::move(t));
  return {m, l, std::vector<int>(static_cast<size_t>(l), 1),
          [shared](const Point& pt) { return mle_eval(*shared, pt); }};
}

SummandOracle product_oracle(const PrimeModulus& m, int num_vars) {
  return {m, num_vars, std::vector<int>(static_cast<size_t>(num_vars), 1),
          [m](const Point& pt) {
            FieldElement prod = FieldElement::one(m);
            for (const auto& x : pt) prod *= x;
            return prod;
          }};
}

SummandOracle random_monomial_oracle(const PrimeModulus& m, int num_vars,
                                     int max_degree, int num_terms,
                                     RandomSource& rng) {
  std::vector<Monomial> terms;
  terms.reserve(static_cast<size_t>(num_terms));
  for (int t = 0; t < num_terms; ++t) {
    Monomial mono{rng.next_element(m), {}};
    mono.exps.reserve(static_cast<size_t>(num_vars));
    for (int j = 0; j < num_vars; ++j)
      mono.exps.push_back(static_cast<int>(
          rng.next_below(static_cast<u64>(max_degree) + 1)));
    terms.push_back(std::move(mono));
  }
  return monomial_oracle(m, num_vars, std::move(terms));
}

}  // namespace ipkit
