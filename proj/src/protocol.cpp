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

#include "dbqc/protocol.hpp"

#include "dbqc/distributed.hpp"

#include <cmath>
#include <map>
#include <memory>

namespace dbqc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

Complex phase_of(Complex z) {
  const double a = std::abs(z);
  return a > 0.0 ? z / a : Complex(1.0);
}

std::size_t bits_for(std::size_t outcomes) {
  std::size_t b = 0;
  while ((std::size_t{1} << b) < outcomes) ++b;
  return b;
}

int pattern_bit(std::size_t pattern, std::size_t m, std::size_t i) {
  return static_cast<int>((pattern >> (m - 1 - i)) & 1U);
}

struct PathData {
  double signal = 1.0;
  Complex weight = 1.0;
  double probability = 1.0;
  std::vector<int> bits, groups;
  std::vector<std::size_t> outcomes, knit_terms;
  std::map<std::string, std::pair<std::size_t, std::size_t>> tags;  // tag -> (outcome, dim)
};

struct Node {
  Network net;
  PathData path;
  std::size_t next = 0;
  bool expanded = false;
  std::vector<double> probs;
  std::map<std::size_t, std::unique_ptr<Node>> children;
  // Readout cache, filled on the first shot that ends here.
  bool read = false;
  Complex expectation = 0.0;
  std::vector<double> born;
};

class Interpreter {
 public:
  explicit Interpreter(const ProtocolScript& s) : script_(s) {
    for (const auto& st : s.steps)
      if (const auto* k = std::get_if<step::KnitCut>(&st)) knits_.emplace(&st, knit_decompose(k->u));
  }

  std::unique_ptr<Node> root() {
    auto n = std::make_unique<Node>();
    n->net = Network(script_.parties, script_.entry_cap);
    advance(*n);
    return n;
  }

  bool is_leaf(const Node& n) const { return n.next >= script_.steps.size() || is_final(n.next); }

  void expand(Node& n) {
    if (n.expanded) return;
    n.expanded = true;
    const Step& s = script_.steps[n.next];
    if (const auto* k = std::get_if<step::KnitCut>(&s)) {
      const auto& dec = knits_.at(&s);
      const std::size_t t = dec.coefficients.size();
      n.probs.resize(t * t);
      for (std::size_t a = 0; a < t; ++a)
        for (std::size_t b = 0; b < t; ++b)
          n.probs[a * t + b] = std::abs(dec.coefficients[a]) * std::abs(dec.coefficients[b]) / dec.overhead;
      (void)k;
      return;
    }
    const std::size_t count = outcome_count(s, n.net);
    n.probs.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      auto child = make_child(n, k);
      n.probs[k] = child ? child->path.probability / n.path.probability : 0.0;
      if (child) n.children.emplace(k, std::move(child));
    }
  }

  Node& child(Node& n, std::size_t k) {
    auto it = n.children.find(k);
    if (it != n.children.end()) return *it->second;
    auto c = make_child(n, k);
    if (!c) throw Error(Error::Kind::kRuntime, "sampled a zero-probability branch");
    return *n.children.emplace(k, std::move(c)).first->second;
  }

  const step::FinalMeasure* final_step() const {
    if (script_.steps.empty()) return nullptr;
    return std::get_if<step::FinalMeasure>(&script_.steps.back());
  }

 private:
  bool is_final(std::size_t i) const { return std::holds_alternative<step::FinalMeasure>(script_.steps[i]); }

  bool is_branching(const Step& s) const {
    return std::holds_alternative<step::IsiInject>(s) || std::holds_alternative<step::OqtLink>(s) ||
           std::holds_alternative<step::BellMeasureQT>(s) || std::holds_alternative<step::RemoteCnot>(s) ||
           (std::holds_alternative<step::KnitCut>(s) && script_.knit_mode == KnitMode::kSampled);
  }

  std::size_t outcome_count(const Step& s, const Network& net) const {
    return std::visit(overloaded{[](const step::IsiInject& x) { return std::size_t{1} << x.items.size(); },
                                 [](const step::OqtLink& x) { return std::size_t{1} << x.items.size(); },
                                 [&](const step::BellMeasureQT& x) {
                                   const std::size_t d = net.layout().dim_of(x.source);
                                   return d * d;
                                 },
                                 [](const step::RemoteCnot&) { return std::size_t{4}; },
                                 [](const auto&) { return std::size_t{1}; }},
                      s);
  }

  void advance(Node& n) {
    while (n.next < script_.steps.size() && !is_final(n.next) && !is_branching(script_.steps[n.next])) {
      apply_deterministic(script_.steps[n.next], n.net, n.path);
      ++n.next;
    }
  }

  std::unique_ptr<Node> make_child(const Node& parent, std::size_t k) {
    auto c = std::make_unique<Node>();
    c->net = parent.net;
    c->path = parent.path;
    const Step& s = script_.steps[parent.next];
    const double p = apply_branch(s, k, c->net, c->path);
    if (p <= 0.0) return nullptr;
    c->path.probability *= p;
    c->next = parent.next + 1;
    advance(*c);
    return c;
  }

  void apply_deterministic(const Step& s, Network& net, PathData& path) {
    std::visit(overloaded{
                   [&](const step::PrepareState& x) { net.prepare_state(x.party, x.label, x.state); },
                   [&](const step::PrepareProgram& x) { net.prepare_program(x.party, x.program, x.out, x.in); },
                   [&](const step::DistributeEbit& x) {
                     net.distribute_ebit(x.id, x.party_a, x.label_a, x.party_b, x.label_b, x.dim);
                   },
                   [&](const step::PauliCorrect& x) {
                     auto it = path.tags.find(x.tag);
                     if (it == path.tags.end()) throw ResourceError("no Bell outcome tagged '" + x.tag + "'");
                     const GeneralizedPauliBasis basis(it->second.second);
                     net.local_gate(x.party, basis[it->second.first], {x.label});
                     ++net.ledger().qt_corrections;
                     ++net.ledger().depth;
                   },
                   [&](const step::LocalGate& x) { net.local_gate(x.party, x.u, x.targets); },
                   [&](const step::KnitCut& x) {
                     const auto& dec = knits_.at(&s);
                     net.sandwich_sum(knit_sandwich_terms(dec, x.party_a, x.label_a, x.party_b, x.label_b));
                     net.ledger().knit_overhead *= dec.overhead;
                   },
                   [&](const step::Broadcast& x) {
                     if (!net.has_party(x.party)) throw LocalityError("unknown party '" + x.party + "'");
                     net.ledger().classical_bits_sent += x.bits;
                   },
                   [&](const step::Discard& x) { net.discard(x.party, x.labels); },
                   [&](const auto&) { throw Error(Error::Kind::kRuntime, "internal: branching step applied as deterministic"); }},
               s);
  }

  // Applies outcome k; returns its conditional probability.
  double apply_branch(const Step& s, std::size_t k, Network& net, PathData& path) {
    return std::visit(
        overloaded{
            [&](const step::IsiInject& x) {
              std::vector<ProjectionItem> items;
              std::size_t dim = 1;
              int any = 0;
              for (std::size_t i = 0; i < x.items.size(); ++i) {
                const auto& it = x.items[i];
                const int bit = pattern_bit(k, x.items.size(), i);
                items.push_back(ProjectionItem{it.party, it.in_port, it.ket.conjugate(), bit == 1});
                dim *= it.ket.rows();
                path.bits.push_back(bit);
                any |= bit;
              }
              path.groups.push_back(any);
              if (any) path.signal *= -1.0 / static_cast<double>(dim - 1);
              net.ledger().classical_bits_sent += x.items.size();
              return net.measure(items);
            },
            [&](const step::OqtLink& x) {
              std::vector<ProjectionItem> items;
              std::size_t dim = 1;
              int any = 0;
              for (std::size_t i = 0; i < x.items.size(); ++i) {
                const auto& it = x.items[i];
                const int bit = pattern_bit(k, x.items.size(), i);
                const std::size_t d = net.layout().dim_of(it.source);
                items.push_back(ProjectionItem{it.party, {it.source, it.target}, bell_state(d).amplitudes, bit == 1});
                dim *= d;
                path.bits.push_back(bit);
                any |= bit;
              }
              path.groups.push_back(any);
              if (any) path.signal *= -1.0 / static_cast<double>(dim * dim - 1);
              net.ledger().oqt_ops += x.items.size();
              net.ledger().classical_bits_sent += x.items.size();
              return net.measure(items);
            },
            [&](const step::BellMeasureQT& x) {
              const std::size_t d = net.layout().dim_of(x.source);
              if (net.ebit_at(x.ebit_end).empty())
                throw ResourceError("'" + x.ebit_end + "' is not an end of a fresh ebit");
              path.outcomes.push_back(k);
              path.tags[x.tag] = {k, d};
              net.ledger().classical_bits_sent += bits_for(d * d);
              return net.measure({ProjectionItem{x.party, {x.source, x.ebit_end}, bell_basis_ket(d, k), false}});
            },
            [&](const step::RemoteCnot& x) {
              path.outcomes.push_back(k);
              return remote_cnot_outcome(net, x, k);
            },
            [&](const step::KnitCut& x) {
              const auto& dec = knits_.at(&s);
              const std::size_t t = dec.coefficients.size();
              const std::size_t a = k / t, b = k % t;
              net.sandwich_sum({SandwichTerm{1.0, knit_local_ops(dec, a, x.party_a, x.label_a, x.party_b, x.label_b),
                                             knit_local_ops(dec, b, x.party_a, x.label_a, x.party_b, x.label_b)}});
              net.ledger().knit_overhead *= dec.overhead;
              path.knit_terms.push_back(k);
              path.weight *= dec.overhead * phase_of(dec.coefficients[a]) * std::conj(phase_of(dec.coefficients[b]));
              return std::abs(dec.coefficients[a]) * std::abs(dec.coefficients[b]) / dec.overhead;
            },
            [&](const auto&) -> double { throw Error(Error::Kind::kRuntime, "internal: step does not branch"); }},
        s);
  }

  const ProtocolScript& script_;
  std::map<const Step*, KnitDecomposition> knits_;
};

Matrix measured_state(const Network& net, const std::vector<std::string>& labels) {
  const Matrix reduced = partial_trace(net.state(), labels, net.layout());
  return permute_registers(reduced, net.layout().restricted_to(labels), [&] {
    std::vector<Register> regs;
    for (const auto& l : labels) regs.push_back(Register{l, net.layout().dim_of(l)});
    return RegisterLayout(std::move(regs));
  }());
}

void throw_first(const std::vector<ScriptIssue>& issues) {
  if (issues.empty()) return;
  const auto& i = issues.front();
  raise(i.kind, "step " + std::to_string(i.step) + ": " + i.message);
}

}  // namespace

std::string step_name(const Step& s) {
  static const char* names[] = {"PrepareState", "PrepareProgram", "DistributeEbit", "IsiInject", "OqtLink",
                                "BellMeasureQT", "PauliCorrect",  "RemoteCnot",     "LocalGate", "KnitCut",
                                "Broadcast",     "Discard",       "FinalMeasure"};
  return names[s.index()];
}

ScriptRun run_script(const ProtocolScript& script, std::size_t shots, std::uint64_t seed, Weighting weighting) {
  if (shots == 0) throw InvalidArgument("run_script: shots must be at least 1");
  throw_first(validate_script(script));
  Interpreter interp(script);
  const step::FinalMeasure& fm = *interp.final_step();
  const bool knit_sampled = script.knit_mode == KnitMode::kSampled;
  auto root = interp.root();

  ScriptRun run;
  std::vector<AffineSample> samples;
  run.records.reserve(shots);
  samples.reserve(shots);
  const double tr_o = fm.observable.trace().real();
  const EigenSystem spectrum = eigh(fm.observable);
  for (std::size_t shot = 0; shot < shots; ++shot) {
    Rng rng(seed, shot);
    Node* n = root.get();
    while (!interp.is_leaf(*n)) {
      interp.expand(*n);
      n = &interp.child(*n, rng.categorical(n->probs));
    }
    if (!n->read) {
      const Matrix rho = measured_state(n->net, fm.labels);
      n->expectation = hs_inner(fm.observable, rho);
      if (!knit_sampled && fm.readout == ReadoutMode::kSampled) n->born = born_weights(spectrum, rho);
      n->read = true;
    }
    OutcomeRecord r;
    r.shot = shot;
    r.parity_bits = n->path.bits;
    r.group_parities = n->path.groups;
    r.outcomes = n->path.outcomes;
    r.knit_terms = n->path.knit_terms;
    r.signal = n->path.signal;
    r.path_probability = n->path.probability;
    if (knit_sampled) {
      r.value = (n->path.weight * n->expectation).real();
    } else {
      r.value = fm.readout == ReadoutMode::kSampled ? spectrum.values[rng.categorical(n->born)]
                                                    : n->expectation.real();
      r.offset = (1.0 - r.signal) * tr_o / static_cast<double>(fm.observable.rows());
    }
    if (shot == 0) run.ledger = n->net.ledger();
    samples.push_back(AffineSample{r.value, r.offset, r.signal});
    run.records.push_back(std::move(r));
  }
  run.estimate = estimate_affine(samples, weighting);
  return run;
}

std::vector<ScriptLeaf> enumerate_script(const ProtocolScript& script) {
  throw_first(validate_script(script));
  if (script.knit_mode == KnitMode::kSampled)
    for (const auto& s : script.steps)
      if (std::holds_alternative<step::KnitCut>(s))
        throw InvalidArgument("enumerate_script: sampled knitting has no finite branch list");
  Interpreter interp(script);
  std::vector<ScriptLeaf> leaves;
  std::vector<std::unique_ptr<Node>> stack;
  stack.push_back(interp.root());
  while (!stack.empty()) {
    auto n = std::move(stack.back());
    stack.pop_back();
    if (interp.is_leaf(*n)) {
      leaves.push_back(ScriptLeaf{n->path.probability, n->path.signal, n->path.bits, n->path.groups, n->net});
      continue;
    }
    interp.expand(*n);
    for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) stack.push_back(std::move(it->second));
  }
  return leaves;
}

}  // namespace dbqc
