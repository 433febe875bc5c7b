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

#include "dbqc/states.hpp"

#include <cmath>

#include "dbqc/error.hpp"

namespace dbqc {

PureState PureState::make(RegisterLayout layout, Matrix amplitudes) {
  if (amplitudes.cols() != 1 || amplitudes.rows() != layout.dim())
    throw DimensionError("PureState: amplitude vector does not match layout dimension " +
                         std::to_string(layout.dim()));
  if (!amplitudes.all_finite()) throw ValidationError("PureState: non-finite amplitude");
  if (std::abs(norm(amplitudes) - 1.0) > kEps) throw ValidationError("PureState: state is not normalized");
  return PureState{std::move(layout), std::move(amplitudes)};
}

MixedState MixedState::make(RegisterLayout layout, Matrix matrix) {
  if (!matrix.is_square() || matrix.rows() != layout.dim())
    throw DimensionError("MixedState: matrix does not match layout dimension " + std::to_string(layout.dim()));
  if (!matrix.all_finite()) throw ValidationError("MixedState: non-finite entry");
  if (!is_hermitian(matrix)) throw ValidationError("MixedState: matrix is not Hermitian");
  if (std::abs(matrix.trace() - 1.0) > kEps) throw ValidationError("MixedState: trace is not one");
  for (double ev : eigh(matrix).values)
    if (ev < -kEps) throw ValidationError("MixedState: matrix is not positive semidefinite");
  return MixedState{std::move(layout), std::move(matrix)};
}

MixedState MixedState::from_pure(const PureState& psi) { return MixedState{psi.layout, psi.density()}; }

KrausChannel KrausChannel::make(std::vector<Matrix> kraus, double tol) {
  if (kraus.empty()) throw ValidationError("KrausChannel: no Kraus operators");
  const std::size_t out = kraus.front().rows();
  const std::size_t in = kraus.front().cols();
  if (out == 0 || in == 0) throw DimensionError("KrausChannel: empty Kraus operator");
  Matrix sum(in, in);
  for (const auto& k : kraus) {
    if (k.rows() != out || k.cols() != in) throw DimensionError("KrausChannel: Kraus operators differ in shape");
    if (!k.all_finite()) throw ValidationError("KrausChannel: non-finite entry");
    sum += k.adjoint() * k;
  }
  if (max_abs_diff(sum, Matrix::identity(in)) > tol)
    throw ValidationError("KrausChannel: Kraus set is not trace preserving");
  return KrausChannel{in, out, std::move(kraus)};
}

KrausChannel KrausChannel::unitary(const Matrix& u) {
  if (!dbqc::is_unitary(u)) throw ValidationError("KrausChannel: operator is not unitary");
  return KrausChannel{u.cols(), u.rows(), {u}};
}

bool KrausChannel::is_unitary() const {
  return kraus.size() == 1 && in_dim == out_dim && dbqc::is_unitary(kraus.front());
}

RegisterLayout ChoiProgram::layout(const std::string& out_label, const std::string& in_label) const {
  return RegisterLayout{{out_label, out_dim}, {in_label, in_dim}};
}

PureState bell_state(std::size_t d, const std::string& a, const std::string& b) {
  if (d < 2) throw InvalidArgument("bell_state: dimension must be at least 2");
  Matrix amps(d * d, 1);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i) amps[i * d + i] = amp;
  return PureState{RegisterLayout{{a, d}, {b, d}}, std::move(amps)};
}

namespace {

// Amplitudes (o, i) -> K[o][i] / sqrt(d_in).
Matrix vectorize(const Matrix& k) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(k.cols()));
  Matrix v(k.size(), 1);
  for (std::size_t o = 0; o < k.rows(); ++o)
    for (std::size_t i = 0; i < k.cols(); ++i) v[o * k.cols() + i] = k(o, i) * scale;
  return v;
}

}  // namespace

ChoiProgram choi_of(const Matrix& u) {
  if (!is_unitary(u)) throw ValidationError("choi_of: operator is not unitary");
  ChoiProgram c{u.rows(), u.cols(), vectorize(u), Matrix{}};
  c.rho = outer(c.ket);
  return c;
}

ChoiProgram choi_of(const KrausChannel& ch) {
  const KrausChannel checked = KrausChannel::make(ch.kraus);
  if (checked.is_unitary()) return choi_of(checked.kraus.front());
  Matrix rho(ch.out_dim * ch.in_dim, ch.out_dim * ch.in_dim);
  for (const auto& k : checked.kraus) rho += outer(vectorize(k));
  return ChoiProgram{ch.out_dim, ch.in_dim, Matrix{}, std::move(rho)};
}

KrausChannel channel_of_choi(const ChoiProgram& c) {
  const std::size_t dim = c.out_dim * c.in_dim;
  if (c.rho.rows() != dim || !c.rho.is_square()) throw DimensionError("channel_of_choi: Choi matrix has wrong shape");
  Matrix marginal = Matrix::identity(c.in_dim);
  marginal *= 1.0 / static_cast<double>(c.in_dim);
  if (max_abs_diff(trace_out(c.rho, {"out"}, c.layout()), marginal) > 1e-9)
    throw ValidationError("channel_of_choi: input marginal is not maximally mixed");
  Matrix j = c.rho;
  j *= static_cast<double>(c.in_dim);
  const auto es = eigh(j);
  std::vector<Matrix> kraus;
  for (std::size_t n = dim; n-- > 0;) {
    const double lambda = es.values[n];
    if (lambda < -kEps) throw ValidationError("channel_of_choi: Choi matrix is not positive semidefinite");
    if (lambda <= 1e-12) continue;
    Complex phase = 1.0;
    for (std::size_t r = 0; r < dim; ++r) {
      const Complex v = es.vectors(r, n);
      if (std::abs(v) > 1e-9) {
        phase = std::conj(v) / std::abs(v);
        break;
      }
    }
    const double scale = std::sqrt(lambda);
    Matrix k(c.out_dim, c.in_dim);
    for (std::size_t o = 0; o < c.out_dim; ++o)
      for (std::size_t i = 0; i < c.in_dim; ++i) k(o, i) = scale * phase * es.vectors(o * c.in_dim + i, n);
    kraus.push_back(std::move(k));
  }
  return KrausChannel::make(std::move(kraus), 1e-8);
}

Matrix program_unitary(const ChoiProgram& c) {
  if (!c.pure()) throw InvalidArgument("program_unitary: program is not pure");
  const double scale = std::sqrt(static_cast<double>(c.in_dim));
  Matrix u(c.out_dim, c.in_dim);
  for (std::size_t o = 0; o < c.out_dim; ++o)
    for (std::size_t i = 0; i < c.in_dim; ++i) u(o, i) = scale * c.ket[o * c.in_dim + i];
  return u;
}

Dilation stinespring_dilation(const KrausChannel& ch) {
  const KrausChannel checked = KrausChannel::make(ch.kraus);
  if (checked.in_dim != checked.out_dim) throw InvalidArgument("stinespring_dilation: channel must be square");
  const std::size_t d = checked.in_dim;
  const std::size_t r = checked.kraus.size();
  if (r == 1) return Dilation{checked.kraus.front(), 1};
  Matrix iso(d * r, d);
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t s = 0; s < d; ++s)
      for (std::size_t t = 0; t < d; ++t) iso(s * r + k, t) = checked.kraus[k](s, t);
  const Matrix w = complete_to_unitary(iso);
  // Columns of w: first d are |t>|0>, the rest fill the remaining slots in order.
  Matrix u(d * r, d * r);
  std::size_t extra = d;
  for (std::size_t col = 0; col < d * r; ++col) {
    const std::size_t src = col % r == 0 ? col / r : extra++;
    for (std::size_t row = 0; row < d * r; ++row) u(row, col) = w(row, src);
  }
  return Dilation{std::move(u), r};
}

MixedState apply_channel(const KrausChannel& ch, const MixedState& rho) {
  if (rho.matrix.rows() != ch.in_dim)
    throw DimensionError("apply_channel: state dimension " + std::to_string(rho.matrix.rows()) +
                         " does not match channel input " + std::to_string(ch.in_dim));
  Matrix out(ch.out_dim, ch.out_dim);
  for (const auto& k : ch.kraus) out += k * rho.matrix * k.adjoint();
  RegisterLayout layout = ch.in_dim == ch.out_dim ? rho.layout : RegisterLayout::single(ch.out_dim);
  return MixedState{std::move(layout), std::move(out)};
}

ChoiProgram transpose_program(const ChoiProgram& c) {
  if (!c.pure()) throw InvalidArgument("transpose_program: only unitary (pure) programs can be transposed");
  Matrix ket(c.ket.size(), 1);
  for (std::size_t o = 0; o < c.out_dim; ++o)
    for (std::size_t i = 0; i < c.in_dim; ++i) ket[i * c.out_dim + o] = c.ket[o * c.in_dim + i];
  ChoiProgram t{c.in_dim, c.out_dim, std::move(ket), Matrix{}};
  t.rho = outer(t.ket);
  return t;
}

ChoiProgram conjugate_program(const ChoiProgram& c) {
  if (!c.pure()) throw InvalidArgument("conjugate_program: only unitary (pure) programs can be conjugated");
  ChoiProgram t{c.out_dim, c.in_dim, c.ket.conjugate(), Matrix{}};
  t.rho = outer(t.ket);
  return t;
}

ChoiProgram adjoint_program(const ChoiProgram& c) { return conjugate_program(transpose_program(c)); }

RebitEmbedding rebit_embed(const Matrix& u) {
  if (!is_unitary(u)) throw ValidationError("rebit_embed: operator is not unitary");
  const std::size_t d = u.rows();
  Matrix q(2 * d, 2 * d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      const double re = u(a, b).real(), im = u(a, b).imag();
      q(2 * a, 2 * b) = re;
      q(2 * a + 1, 2 * b + 1) = re;
      q(2 * a, 2 * b + 1) = -im;
      q(2 * a + 1, 2 * b) = im;
    }
  return RebitEmbedding{std::move(q), d};
}

PureState rebit_input(const PureState& psi, const std::string& rebit_label) {
  const std::size_t d = psi.amplitudes.rows();
  Matrix phi(2 * d, 1);
  for (std::size_t s = 0; s < d; ++s) {
    phi[2 * s] = psi.amplitudes[s].real();
    phi[2 * s + 1] = psi.amplitudes[s].imag();
  }
  return PureState{psi.layout.concat(RegisterLayout{{rebit_label, 2}}), std::move(phi)};
}

}  // namespace dbqc
