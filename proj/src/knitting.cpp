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

#include "dbqc/knitting.hpp"

#include <cmath>
#include <map>

#include "dbqc/error.hpp"
#include "dbqc/oblivious.hpp"
#include "dbqc/qmath.hpp"

namespace dbqc {

namespace {

std::size_t qudit_dim(std::size_t rows) {
  const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(rows))));
  if (d < 2 || d * d != rows) throw DimensionError("knit_decompose: gate must act on two equal qudits");
  return d;
}

Complex phase_of(Complex z) {
  const double a = std::abs(z);
  return a > 0.0 ? z / a : Complex(1.0);
}

struct PreparedCut {
  KnitDecomposition dec;
  std::vector<Matrix> embedded;  // per flat term, on the circuit layout
  std::vector<double> magnitudes;
};

Matrix initial_density(const KnitCircuit& c) {
  const Matrix rho = c.initial.cols() == 1 ? outer(c.initial) : c.initial;
  if (rho.rows() != c.layout.dim() || !rho.is_square())
    throw DimensionError("knit circuit: initial state does not match the layout");
  return rho;
}

}  // namespace

Matrix KnitDecomposition::reconstruct() const {
  const GeneralizedPauliBasis basis(d);
  Matrix u(d * d, d * d);
  for (std::size_t i = 0; i < d * d; ++i)
    for (std::size_t j = 0; j < d * d; ++j)
      if (coefficients(i, j) != Complex(0.0)) u += coefficients(i, j) * tensor_product(basis[i], basis[j]);
  return u;
}

KnitDecomposition knit_decompose(const Matrix& u) {
  if (!u.is_square()) throw DimensionError("knit_decompose: gate must be square");
  const std::size_t d = qudit_dim(u.rows());
  if (!is_unitary(u)) throw ValidationError("knit_decompose: marked gate is not unitary");
  const GeneralizedPauliBasis basis(d);
  KnitDecomposition k;
  k.d = d;
  k.coefficients = Matrix(d * d, d * d);
  double norm = 0.0;
  const double scale = 1.0 / static_cast<double>(d * d);
  for (std::size_t i = 0; i < d * d; ++i)
    for (std::size_t j = 0; j < d * d; ++j) {
      const Complex c = hs_inner(tensor_product(basis[i], basis[j]), u) * scale;
      k.coefficients(i, j) = c;
      norm += std::abs(c);
    }
  k.one_norm = norm;
  k.overhead = norm * norm;
  return k;
}

std::vector<LocalOp> knit_local_ops(const KnitDecomposition& k, std::size_t t, const std::string& party_a,
                                    const std::string& label_a, const std::string& party_b,
                                    const std::string& label_b) {
  const GeneralizedPauliBasis basis(k.d);
  const std::size_t n = k.d * k.d;
  return {LocalOp{party_a, label_a, basis[t / n]}, LocalOp{party_b, label_b, basis[t % n]}};
}

std::vector<SandwichTerm> knit_sandwich_terms(const KnitDecomposition& k, const std::string& party_a,
                                              const std::string& label_a, const std::string& party_b,
                                              const std::string& label_b) {
  const std::size_t terms = k.coefficients.size();
  std::vector<SandwichTerm> out;
  for (std::size_t s = 0; s < terms; ++s) {
    if (k.coefficients[s] == Complex(0.0)) continue;
    for (std::size_t t = 0; t < terms; ++t) {
      if (k.coefficients[t] == Complex(0.0)) continue;
      out.push_back(SandwichTerm{k.coefficients[s] * std::conj(k.coefficients[t]),
                                 knit_local_ops(k, s, party_a, label_a, party_b, label_b),
                                 knit_local_ops(k, t, party_a, label_a, party_b, label_b)});
    }
  }
  return out;
}

double knit_direct(const KnitCircuit& circuit, const Matrix& observable) {
  Matrix rho = initial_density(circuit);
  for (const auto& g : circuit.gates) rho = conjugate_by(rho, g.op.matrix, g.op.targets, circuit.layout);
  return hs_inner(observable, rho).real();
}

KnitResult knit_estimate(const KnitCircuit& circuit, const Matrix& observable, KnitMode mode, std::size_t shots,
                         Rng& rng, std::vector<KnitShot>* trace) {
  if (observable.rows() != circuit.layout.dim() || !observable.is_square())
    throw DimensionError("knit_estimate: observable does not match the layout");
  const Matrix rho0 = initial_density(circuit);

  std::vector<PreparedCut> cuts;
  for (const auto& g : circuit.gates) {
    if (!g.cut) continue;
    if (g.op.targets.size() != 2) throw DimensionError("knit_estimate: a cut gate must act on two registers");
    PreparedCut pc{knit_decompose(g.op.matrix), {}, {}};
    if (circuit.layout.dim_of(g.op.targets[0]) != pc.dec.d || circuit.layout.dim_of(g.op.targets[1]) != pc.dec.d)
      throw DimensionError("knit_estimate: cut gate does not match its registers");
    const GeneralizedPauliBasis basis(pc.dec.d);
    const std::size_t n = pc.dec.d * pc.dec.d;
    for (std::size_t t = 0; t < n * n; ++t) {
      pc.embedded.push_back(embed_operator(tensor_product(basis[t / n], basis[t % n]), g.op.targets, circuit.layout));
      pc.magnitudes.push_back(std::abs(pc.dec.coefficients[t]));
    }
    cuts.push_back(std::move(pc));
  }

  KnitResult result;
  result.cuts = cuts.size();
  for (const auto& c : cuts) result.overhead *= c.dec.overhead;

  if (mode == KnitMode::kExactSum) {
    Matrix rho = rho0;
    std::size_t ci = 0;
    for (const auto& g : circuit.gates) {
      if (!g.cut) {
        rho = conjugate_by(rho, g.op.matrix, g.op.targets, circuit.layout);
        continue;
      }
      const PreparedCut& pc = cuts[ci++];
      const std::size_t terms = pc.embedded.size();
      Matrix next(rho.rows(), rho.cols());
      for (std::size_t s = 0; s < terms; ++s) {
        if (pc.magnitudes[s] == 0.0) continue;
        const Matrix left = pc.embedded[s] * rho;
        for (std::size_t t = 0; t < terms; ++t) {
          if (pc.magnitudes[t] == 0.0) continue;
          next += (pc.dec.coefficients[s] * std::conj(pc.dec.coefficients[t])) * (left * pc.embedded[t].adjoint());
        }
      }
      rho = std::move(next);
    }
    result.estimate = hs_inner(observable, rho).real();
    return result;
  }

  if (shots == 0) throw InvalidArgument("knit_estimate: sampled mode needs at least one shot");
  std::map<std::vector<std::size_t>, Complex> cache;
  auto evaluate = [&](const std::vector<std::size_t>& key) {
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Matrix rho = rho0;
    std::size_t ci = 0;
    for (const auto& g : circuit.gates) {
      if (!g.cut) {
        rho = conjugate_by(rho, g.op.matrix, g.op.targets, circuit.layout);
        continue;
      }
      const PreparedCut& pc = cuts[ci];
      rho = pc.embedded[key[2 * ci]] * rho * pc.embedded[key[2 * ci + 1]].adjoint();
      ++ci;
    }
    const Complex v = hs_inner(observable, rho);
    cache.emplace(key, v);
    return v;
  };

  double mean = 0.0, m2 = 0.0;  // Welford
  std::vector<std::size_t> key(2 * cuts.size());
  for (std::size_t shot = 0; shot < shots; ++shot) {
    Complex weight = result.overhead;
    for (std::size_t ci = 0; ci < cuts.size(); ++ci) {
      const auto& pc = cuts[ci];
      key[2 * ci] = rng.categorical(pc.magnitudes);
      key[2 * ci + 1] = rng.categorical(pc.magnitudes);
      weight *= phase_of(pc.dec.coefficients[key[2 * ci]]) * std::conj(phase_of(pc.dec.coefficients[key[2 * ci + 1]]));
    }
    const double x = (weight * evaluate(key)).real();
    if (trace) trace->push_back(KnitShot{key, x});
    const double delta = x - mean;
    mean += delta / static_cast<double>(shot + 1);
    m2 += delta * (x - mean);
  }
  const double n = static_cast<double>(shots);
  result.shots = shots;
  result.estimate = mean;
  const double var = shots > 1 ? m2 / (n - 1.0) : 0.0;
  result.std_error = std::sqrt(var / n);
  return result;
}

}  // namespace dbqc
