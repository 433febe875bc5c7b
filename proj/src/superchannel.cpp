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

#include "dbqc/superchannel.hpp"

#include <cmath>

#include "dbqc/error.hpp"
#include "dbqc/qmath.hpp"

namespace dbqc {

Superchannel Superchannel::make(Matrix u1, Matrix u2, std::size_t in_dim, std::size_t out_dim,
                                std::size_t memory_dim) {
  if (in_dim == 0 || out_dim == 0 || memory_dim == 0) throw DimensionError("Superchannel: dimensions must be positive");
  if (u1.rows() != in_dim * memory_dim || !u1.is_square())
    throw DimensionError("Superchannel: pre-circuit must act on (in, memory)");
  if (u2.rows() != out_dim * memory_dim || !u2.is_square())
    throw DimensionError("Superchannel: post-circuit must act on (out, memory)");
  if (!is_unitary(u1, 1e-9) || !is_unitary(u2, 1e-9)) throw ValidationError("Superchannel: circuits must be unitary");
  return Superchannel{std::move(u1), std::move(u2), in_dim, out_dim, memory_dim};
}

Superchannel Superchannel::pre_post(const Matrix& v, const Matrix& w) {
  return make(v.transpose(), w, v.rows(), w.rows(), 1);
}

std::vector<Matrix> superchannel_kraus(const Superchannel& sc) {
  const std::size_t mdim = sc.memory_dim, din = sc.in_dim, dout = sc.out_dim;
  std::vector<Matrix> k1(mdim, Matrix(din, din));
  for (std::size_t m = 0; m < mdim; ++m)
    for (std::size_t i = 0; i < din; ++i)
      for (std::size_t j = 0; j < din; ++j) k1[m](i, j) = sc.u1(i * mdim + m, j * mdim);
  std::vector<Matrix> out;
  for (std::size_t mu = 0; mu < mdim; ++mu) {
    Matrix s(dout * din, dout * din);
    for (std::size_t m = 0; m < mdim; ++m) {
      Matrix k2(dout, dout);
      for (std::size_t o = 0; o < dout; ++o)
        for (std::size_t p = 0; p < dout; ++p) k2(o, p) = sc.u2(o * mdim + mu, p * mdim + m);
      s += tensor_product(k2, k1[m]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

ChoiProgram apply_superchannel(const Superchannel& sc, const ChoiProgram& program) {
  if (program.in_dim != sc.in_dim || program.out_dim != sc.out_dim)
    throw DimensionError("apply_superchannel: program ports (" + std::to_string(program.out_dim) + ", " +
                         std::to_string(program.in_dim) + ") do not match the superchannel");
  const auto kraus = superchannel_kraus(sc);
  std::vector<const Matrix*> active;
  for (const auto& s : kraus)
    if (s.frobenius_norm() > 1e-12) active.push_back(&s);
  ChoiProgram out{program.out_dim, program.in_dim, Matrix{}, Matrix(program.rho.rows(), program.rho.cols())};
  if (program.pure() && active.size() == 1) {
    out.ket = *active.front() * program.ket;
    out.rho = outer(out.ket);
    return out;
  }
  for (const Matrix* s : active) out.rho += *s * program.rho * s->adjoint();
  return out;
}

bool is_valid_choi(const ChoiProgram& c, double tol) {
  if (c.rho.rows() != c.out_dim * c.in_dim || !c.rho.is_square()) return false;
  if (!is_hermitian(c.rho, tol)) return false;
  for (double ev : eigh(c.rho).values)
    if (ev < -tol) return false;
  Matrix marginal = Matrix::identity(c.in_dim);
  marginal *= 1.0 / static_cast<double>(c.in_dim);
  return max_abs_diff(trace_out(c.rho, {"out"}, c.layout()), marginal) <= tol;
}

Matrix controlled_channel_superpose(const std::vector<std::complex<double>>& coeffs,
                                    const std::vector<Dilation>& dilations, const MixedState& rho,
                                    const Matrix& ancilla_state) {
  if (coeffs.empty() || coeffs.size() != dilations.size())
    throw InvalidArgument("controlled_channel_superpose: need one coefficient per dilation");
  const std::size_t d = rho.matrix.rows();
  const std::size_t a = dilations.front().ancilla_dim;
  double l1 = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (dilations[i].ancilla_dim != a) throw DimensionError("controlled_channel_superpose: ancilla dims differ");
    if (dilations[i].u.rows() != d * a) throw DimensionError("controlled_channel_superpose: dilation dimension");
    l1 += std::abs(coeffs[i]);
  }
  if (l1 <= 0.0) throw InvalidArgument("controlled_channel_superpose: all coefficients are zero");
  const Matrix rho_a = ancilla_state.empty() ? outer(ket(a, 0)) : ancilla_state;
  if (rho_a.rows() != a || !rho_a.is_square()) throw DimensionError("controlled_channel_superpose: ancilla state");
  const Matrix joint = tensor_product(rho.matrix, rho_a);
  const RegisterLayout layout{{"sys", d}, {"anc", a}};
  Matrix out(d, d);
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      Matrix term = trace_out(dilations[i].u * joint * dilations[j].u.adjoint(), {"anc"}, layout);
      term *= coeffs[i] * std::conj(coeffs[j]) / (l1 * l1);
      out += term;
    }
  return out;
}

double dqc1_channel_trace(const Dilation& dilation, const MixedState& rho, MeasurementAxis axis) {
  const std::size_t a = dilation.ancilla_dim;
  if (dilation.u.rows() != rho.matrix.rows() * a) throw DimensionError("dqc1_channel_trace: dilation dimension");
  const MixedState joint{RegisterLayout{{"sys", rho.matrix.rows()}, {"anc", a}},
                         tensor_product(rho.matrix, outer(ket(a, 0)))};
  return dqc1(dilation.u, joint, axis);
}

BranchPair oqt_compose_choi(const ChoiProgram& p1, const ChoiProgram& p2) {
  if (p1.out_dim != p2.in_dim)
    throw DimensionError("oqt_compose_choi: first program's out port (" + std::to_string(p1.out_dim) +
                         ") does not match second program's in port (" + std::to_string(p2.in_dim) + ")");
  auto pair = oqt_step_on(p2, p1.rho, p1.layout("out", "in"), "out");
  return pair;
}

}  // namespace dbqc
