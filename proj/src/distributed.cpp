// Copyright 2026 The dbqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dbqc/distributed.hpp"

#include <cmath>

namespace dbqc {

namespace {

std::size_t bits_for(std::size_t outcomes) {
  std::size_t b = 0;
  while ((std::size_t{1} << b) < outcomes) ++b;
  return b;
}

Matrix projector(const Matrix& ket) { return outer(ket); }

}  // namespace

Matrix bell_basis_ket(std::size_t d, std::size_t k) {
  const GeneralizedPauliBasis basis(d);
  return tensor_product(basis[k], Matrix::identity(d)) * bell_state(d).amplitudes;
}

TeleportResult teleport_state(Network& net, const std::string& label, const std::string& ebit, Rng& rng) {
  const Ebit e = net.require_fresh_ebit(ebit);
  const std::string src = net.owner(label);
  std::string near, far, far_party;
  if (e.party_a == src) {
    near = e.label_a, far = e.label_b, far_party = e.party_b;
  } else if (e.party_b == src) {
    near = e.label_b, far = e.label_a, far_party = e.party_a;
  } else {
    throw LocalityError("teleport_state: '" + src + "' holds no end of ebit '" + ebit + "'");
  }
  const std::size_t d = net.layout().dim_of(label);
  if (d != e.dim) throw DimensionError("teleport_state: register and ebit differ in dimension");

  std::vector<double> probs(d * d);
  std::vector<Network> branches;
  for (std::size_t k = 0; k < d * d; ++k) {
    branches.push_back(net);
    probs[k] = branches.back().measure({ProjectionItem{src, {label, near}, bell_basis_ket(d, k), false}});
  }
  const std::size_t k = rng.categorical(probs);
  net = std::move(branches[k]);
  auto& l = net.ledger();
  l.classical_bits_sent += bits_for(d * d);
  net.local_gate(far_party, GeneralizedPauliBasis(d)[k], {far});
  ++l.qt_corrections;
  ++l.depth;
  return TeleportResult{far, k};
}

double remote_cnot_outcome(Network& net, const step::RemoteCnot& x, std::size_t k) {
  const Ebit& e = net.require_fresh_ebit(x.ebit);
  if (e.dim != 2) throw DimensionError("remote_cnot: needs a qubit ebit");
  std::string end_c, end_t;
  if (e.party_a == x.control_party && e.party_b == x.target_party) {
    end_c = e.label_a;
    end_t = e.label_b;
  } else if (e.party_b == x.control_party && e.party_a == x.target_party) {
    end_c = e.label_b;
    end_t = e.label_a;
  } else {
    throw LocalityError("remote_cnot: ebit '" + x.ebit + "' does not connect the two parties");
  }
  const std::size_t m1 = k / 2, m2 = k % 2;
  net.local_gate(x.control_party, gates::CNOT(), {x.control, end_c});
  const double p1 = net.measure({ProjectionItem{x.control_party, {end_c}, ket(2, m1), false}});
  if (p1 <= 0.0) return 0.0;
  if (m1) net.local_gate(x.target_party, gates::X(), {end_t});
  net.local_gate(x.target_party, gates::CNOT(), {end_t, x.target});
  const double p2 = net.measure({ProjectionItem{x.target_party, {end_t}, gates::H() * ket(2, m2), false}});
  if (m2) net.local_gate(x.control_party, gates::Z(), {x.control});
  auto& l = net.ledger();
  l.classical_bits_sent += 2;
  l.qt_corrections += 2;
  l.depth += 2;
  return p1 * p2;
}

RemoteCnotResult remote_cnot(Network& net, const std::string& control, const std::string& target,
                             const std::string& ebit, Rng& rng) {
  const step::RemoteCnot spec{ebit, net.owner(control), control, net.owner(target), target};
  std::vector<double> probs(4);
  std::vector<Network> branches;
  for (std::size_t k = 0; k < 4; ++k) {
    branches.push_back(net);
    probs[k] = remote_cnot_outcome(branches.back(), spec, k);
  }
  const std::size_t k = rng.categorical(probs);
  net = std::move(branches[k]);
  return RemoteCnotResult{k / 2, k % 2};
}

ControlledDecomposition controlled_decomposition(const Matrix& v) {
  if (v.rows() != 2 || !v.is_square() || !is_unitary(v))
    throw ValidationError("controlled_decomposition: V must be a single-qubit unitary");
  const Complex det = v(0, 0) * v(1, 1) - v(0, 1) * v(1, 0);
  const double alpha = std::arg(det) / 2.0;
  const Complex unphase = std::polar(1.0, -alpha);
  const Complex a = v(0, 0) * unphase, b = v(1, 0) * unphase;
  const double gamma = 2.0 * std::atan2(std::abs(b), std::abs(a));
  const double sum = std::abs(a) > 0.0 ? -2.0 * std::arg(a) : 0.0;   // beta + delta
  const double diff = std::abs(b) > 0.0 ? 2.0 * std::arg(b) : 0.0;   // beta - delta
  const double beta = (sum + diff) / 2.0, delta = (sum - diff) / 2.0;
  ControlledDecomposition out;
  out.alpha = alpha;
  out.a = gates::RZ(beta) * gates::RY(gamma / 2.0);
  out.b = gates::RY(-gamma / 2.0) * gates::RZ(-(delta + beta) / 2.0);
  out.c = gates::RZ((delta - beta) / 2.0);
  const Matrix rebuilt = std::polar(1.0, alpha) * (out.a * gates::X() * out.b * gates::X() * out.c);
  if (max_abs_diff(rebuilt, v) > 1e-9) throw Error(Error::Kind::kRuntime, "controlled_decomposition failed");
  return out;
}

ProtocolScript dbqc_script(const DbqcSetup& s) {
  if (s.alice.empty() || s.bob.empty()) throw InvalidArgument("run_dbqc: each party needs a program");
  if (s.psi_in.rows() != s.alice.front().in_dim) throw DimensionError("run_dbqc: psi_in does not fit Alice's program");
  ProtocolScript script;
  script.parties = {Party{"alice", {"psi_in", "U_A"}}, Party{"bob", {"U_B", "psi_out"}}};
  auto& st = script.steps;
  std::string last;
  for (std::size_t k = 0; k < s.alice.size(); ++k) {
    const auto& p = s.alice[k];
    const std::string out = "a" + std::to_string(k) + "_out", in = "a" + std::to_string(k) + "_in";
    st.push_back(step::PrepareProgram{"alice", p, {{out, p.out_dim}}, {{in, p.in_dim}}});
    if (k == 0)
      st.push_back(step::IsiInject{{step::InjectItem{"alice", {in}, s.psi_in}}});
    else
      st.push_back(step::OqtLink{{step::LinkItem{"alice", last, in}}});
    last = out;
  }
  const std::size_t d = s.alice.back().out_dim;
  st.push_back(step::DistributeEbit{"e0", "alice", "e_alice", "bob", "e_bob", d});
  st.push_back(step::OqtLink{{step::LinkItem{"alice", last, "e_alice"}}});
  last = "e_bob";
  for (std::size_t k = 0; k < s.bob.size(); ++k) {
    const auto& p = s.bob[k];
    const std::string out = "b" + std::to_string(k) + "_out", in = "b" + std::to_string(k) + "_in";
    st.push_back(step::PrepareProgram{"bob", p, {{out, p.out_dim}}, {{in, p.in_dim}}});
    st.push_back(step::OqtLink{{step::LinkItem{"bob", last, in}}});
    last = out;
  }
  st.push_back(step::FinalMeasure{"bob", {last}, projector(s.psi_out), s.readout});
  return script;
}

namespace {

ProtocolResult to_result(ScriptRun run) {
  return ProtocolResult{run.estimate, run.ledger, std::move(run.records)};
}

}  // namespace

ProtocolResult run_dbqc(const DbqcSetup& setup, std::size_t shots, std::uint64_t seed) {
  return to_result(run_script(dbqc_script(setup), shots, seed));
}

ProtocolScript triparty_script(const TripartySetup& s, TripartyScheme scheme) {
  ProtocolScript script;
  auto& st = script.steps;
  script.parties = {Party{"A", {"psi_a", "U_A"}}, Party{"B", {"psi_b", "U_B", "psi_out"}}};
  st.push_back(step::PrepareProgram{"A", choi_of(s.u_a), {{"a_out", 2}}, {{"a_in", 2}}});
  st.push_back(step::PrepareProgram{"B", choi_of(s.u_b), {{"b_out", 2}}, {{"b_in", 2}}});
  st.push_back(step::IsiInject{{step::InjectItem{"A", {"a_in"}, s.psi_a}, step::InjectItem{"B", {"b_in"}, s.psi_b}}});
  if (scheme == TripartyScheme::kI) {
    script.parties.push_back(Party{"C", {"U_C", "psi_out"}});
    script.parties[1].knowledge.pop_back();
    st.push_back(step::DistributeEbit{"eAC", "A", "xa", "C", "ya", 2});
    st.push_back(step::DistributeEbit{"eBC", "B", "xb", "C", "yb", 2});
    st.push_back(step::OqtLink{{step::LinkItem{"A", "a_out", "xa"}, step::LinkItem{"B", "b_out", "xb"}}});
    st.push_back(step::PrepareProgram{"C", choi_of(s.u_c), {{"ca_out", 2}, {"cb_out", 2}}, {{"ca_in", 2}, {"cb_in", 2}}});
    st.push_back(step::OqtLink{{step::LinkItem{"C", "ya", "ca_in"}, step::LinkItem{"C", "yb", "cb_in"}}});
    st.push_back(step::FinalMeasure{"C", {"ca_out", "cb_out"}, projector(s.psi_out), s.readout});
    return script;
  }
  if (s.u_c.rows() != 4 || !s.u_c.is_square()) throw DimensionError("triparty: u_c must be a two-qubit gate");
  if (max_abs_diff(s.u_c.block(0, 0, 2, 2), Matrix::identity(2)) > 1e-10 ||
      max_abs_diff(s.u_c.block(0, 2, 2, 2), Matrix(2, 2)) > 1e-10 ||
      max_abs_diff(s.u_c.block(2, 0, 2, 2), Matrix(2, 2)) > 1e-10)
    throw InvalidArgument("triparty scheme II: u_c must be controlled on A's qubit");
  const auto dec = controlled_decomposition(s.u_c.block(2, 2, 2, 2));
  st.push_back(step::DistributeEbit{"e1", "A", "r1a", "B", "r1b", 2});
  st.push_back(step::DistributeEbit{"e2", "A", "r2a", "B", "r2b", 2});
  st.push_back(step::LocalGate{"B", {"b_out"}, dec.c, "C"});
  st.push_back(step::RemoteCnot{"e1", "A", "a_out", "B", "b_out"});
  st.push_back(step::LocalGate{"B", {"b_out"}, dec.b, "B"});
  st.push_back(step::RemoteCnot{"e2", "A", "a_out", "B", "b_out"});
  st.push_back(step::LocalGate{"B", {"b_out"}, dec.a, "A"});
  st.push_back(step::LocalGate{"A", {"a_out"}, Matrix::from_rows({{1.0, 0.0}, {0.0, std::polar(1.0, dec.alpha)}}), "phase"});
  st.push_back(step::DistributeEbit{"e3", "A", "ta", "B", "tb", 2});
  st.push_back(step::BellMeasureQT{"A", "a_out", "ta", "move_a"});
  st.push_back(step::PauliCorrect{"B", "tb", "move_a"});
  st.push_back(step::FinalMeasure{"B", {"tb", "b_out"}, projector(s.psi_out), s.readout});
  return script;
}

ProtocolResult run_triparty(const TripartySetup& setup, TripartyScheme scheme, std::size_t shots,
                            std::uint64_t seed) {
  return to_result(run_script(triparty_script(setup, scheme), shots, seed));
}

PingPongResult pingpong_run(const std::vector<ChoiProgram>& programs, const MixedState& input, Rng* rng,
                            std::span<const int> forced_bits) {
  if (programs.empty()) throw InvalidArgument("pingpong_run: no programs");
  if (!forced_bits.empty() && forced_bits.size() != programs.size())
    throw InvalidArgument("pingpong_run: one forced bit per program");
  if (forced_bits.empty() && rng == nullptr) throw InvalidArgument("pingpong_run: needs an rng");
  const std::string party = "node";
  Network net({Party{party, {}}});
  net.prepare_state(party, "input", input.matrix);
  std::string data = "input";
  OqtRecord rec;
  for (std::size_t k = 0; k < programs.size(); ++k) {
    const auto& p = programs[k];
    if (net.layout().dim_of(data) != p.in_dim) throw DimensionError("pingpong_run: program chain dimension mismatch");
    const std::string block = "block" + std::to_string(k % 2);
    net.prepare_program(party, p, {{block + "_out", p.out_dim}}, {{block + "_in", p.in_dim}});
    const Matrix omega = bell_state(p.in_dim).amplitudes;
    Network zero = net, one = net;
    const double p0 = zero.measure({ProjectionItem{party, {data, block + "_in"}, omega, false}});
    const double p1 = one.measure({ProjectionItem{party, {data, block + "_in"}, omega, true}});
    const int bit = forced_bits.empty() ? static_cast<int>(rng->bernoulli(p1 / (p0 + p1))) : forced_bits[k];
    net = bit ? std::move(one) : std::move(zero);
    rec.parity_bits.push_back(bit);
    rec.probability *= bit ? p1 : p0;
    if (bit) {
      ++rec.s;
      const double d = static_cast<double>(p.in_dim);
      rec.signal *= -1.0 / (d * d - 1.0);
    }
    auto& l = net.ledger();
    ++l.oqt_ops;
    ++l.classical_bits_sent;
    ++l.depth;  // the next block cannot be reused before this step ends
    data = block + "_out";
  }
  rec.final_state = MixedState{RegisterLayout::single(net.layout().dim()), net.state()};
  return PingPongResult{std::move(rec), net.ledger()};
}

OptimizeResult hybrid_optimize(const Objective& f, const OptimizerConfig& config) {
  if (config.initial.empty()) throw InvalidArgument("hybrid_optimize: empty parameter vector");
  if (!(config.step > 0.0) || !(config.shrink > 0.0 && config.shrink < 1.0) || config.grid == 0)
    throw InvalidArgument("hybrid_optimize: bad step, shrink or grid");
  OptimizeResult r;
  auto eval = [&](const std::vector<double>& theta) {
    for (double t : theta)
      if (!std::isfinite(t)) throw InvalidArgument("hybrid_optimize: non-finite parameter");
    Rng rng(config.seed, r.evaluations++);
    const double v = f(theta, rng);
    if (!std::isfinite(v)) throw InvalidArgument("hybrid_optimize: non-finite objective");
    return v;
  };
  r.theta = config.initial;
  r.objective = eval(r.theta);
  r.trace.push_back(r.objective);
  double step = config.step;
  for (std::size_t sweep = 0; sweep < config.sweeps; ++sweep) {
    bool improved = false;
    for (std::size_t i = 0; i < r.theta.size(); ++i) {
      std::vector<double> best = r.theta;
      for (std::size_t g = 1; g <= config.grid; ++g)
        for (double sign : {-1.0, 1.0}) {
          std::vector<double> cand = r.theta;
          cand[i] += sign * static_cast<double>(g) * step;
          const double v = eval(cand);
          if (v < r.objective) {
            r.objective = v;
            best = cand;
            improved = true;
          }
        }
      r.theta = best;
    }
    if (!improved) step *= config.shrink;
    r.trace.push_back(r.objective);
  }
  return r;
}

Objective protocol_objective(std::function<ProtocolScript(const std::vector<double>&)> build,
                             std::function<double(double)> f, std::size_t shots) {
  return [build = std::move(build), f = std::move(f), shots](const std::vector<double>& theta, Rng& rng) {
    return f(run_script(build(theta), shots, rng.next_u64()).estimate.value);
  };
}

}  // namespace dbqc
