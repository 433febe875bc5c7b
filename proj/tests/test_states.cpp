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

#include <cmath>

#include "doctest.h"
#include "dbqc/gates.hpp"
#include "dbqc/states.hpp"
#include "oracles.hpp"

using namespace dbqc;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (auto& z : m.entries()) z = Complex(rng.normal(), rng.normal());
  return m;
}

// Random TP Kraus set: blocks of a random isometry d -> d*r.
std::vector<Matrix> random_kraus(std::size_t d, std::size_t r, Rng& rng) {
  const Matrix u = random_unitary(d * r, rng);
  std::vector<Matrix> ks;
  for (std::size_t k = 0; k < r; ++k) {
    Matrix m(d, d);
    for (std::size_t s = 0; s < d; ++s)
      for (std::size_t t = 0; t < d; ++t) m(s, t) = u(k * d + s, t);
    ks.push_back(m);
  }
  return ks;
}

std::vector<Matrix> depolarizing_kraus() {
  std::vector<Matrix> ks;
  for (const Matrix& p : {gates::I(), gates::X(), gates::Y(), gates::Z()}) {
    Matrix k = p;
    k *= 0.5;
    ks.push_back(k);
  }
  return ks;
}

Matrix kraus_sum(const std::vector<Matrix>& ks, const Matrix& rho) {
  Matrix out(ks.front().rows(), ks.front().rows());
  for (const auto& k : ks) out += oracle::naive_matmul(oracle::naive_matmul(k, rho), oracle::dagger(k));
  return out;
}

Matrix scaled_identity(std::size_t d) {
  Matrix m = Matrix::identity(d);
  m *= 1.0 / static_cast<double>(d);
  return m;
}

}  // namespace

TEST_CASE("bell_state amplitudes and marginals") {
  const auto w2 = bell_state(2);
  CHECK(oracle::max_diff(w2.amplitudes, Matrix::column({M_SQRT1_2, 0.0, 0.0, M_SQRT1_2})) < 1e-15);
  const auto w3 = bell_state(3);
  for (std::size_t i = 0; i < 9; ++i)
    CHECK(std::abs(w3.amplitudes[i] - (i % 4 == 0 ? 1.0 / std::sqrt(3.0) : 0.0)) < 1e-15);
  CHECK(oracle::max_diff(oracle::naive_partial_trace(w3.density(), {0}, {3, 3}), scaled_identity(3)) < 1e-12);
  CHECK(oracle::max_diff(oracle::naive_partial_trace(w3.density(), {1}, {3, 3}), scaled_identity(3)) < 1e-12);
  CHECK_THROWS_AS(bell_state(1), InvalidArgument);
}

TEST_CASE("choi_of unitaries and channels") {
  CHECK(oracle::max_diff(choi_of(gates::I()).ket, bell_state(2).amplitudes) < 1e-15);
  const auto cx = choi_of(gates::X());
  CHECK(oracle::max_diff(cx.ket, Matrix::column({0.0, M_SQRT1_2, M_SQRT1_2, 0.0})) < 1e-15);
  const auto dep = choi_of(KrausChannel::make(depolarizing_kraus()));
  CHECK_FALSE(dep.pure());
  CHECK(oracle::max_diff(dep.rho, scaled_identity(4)) < 1e-12);
  Matrix bad = gates::X();
  bad *= 0.9;
  CHECK_THROWS_AS(choi_of(KrausChannel{2, 2, {bad}}), ValidationError);
}

TEST_CASE("choi state of a channel matches the Kraus sum on the Bell state") {
  Rng rng(40);
  for (std::size_t d : {2u, 3u}) {
    const auto ks = random_kraus(d, 3, rng);
    const auto c = choi_of(KrausChannel::make(ks));
    // Oracle: (E (x) id)(|w><w|) assembled term by term with E on the first half.
    const Matrix w = bell_state(d).density();
    Matrix expect(d * d, d * d);
    for (const auto& k : ks) {
      const Matrix kk = oracle::naive_kron(k, Matrix::identity(d));
      expect += oracle::naive_matmul(oracle::naive_matmul(kk, w), oracle::dagger(kk));
    }
    CHECK(oracle::max_diff(c.rho, expect) < 1e-12);
  }
}

TEST_CASE("channel_of_choi examples and round trip") {
  const auto id = channel_of_choi(choi_of(gates::I()));
  REQUIRE(id.kraus.size() == 1);
  CHECK(oracle::max_diff(id.kraus[0], gates::I()) < 1e-12);

  const ChoiProgram mixed{2, 2, Matrix{}, scaled_identity(4)};
  const auto dep = channel_of_choi(mixed);
  for (std::size_t b = 0; b < 2; ++b) {
    const auto out = apply_channel(dep, MixedState{RegisterLayout::single(2), outer(ket(2, b))});
    CHECK(oracle::max_diff(out.matrix, scaled_identity(2)) < 1e-12);
  }

  const auto x = channel_of_choi(choi_of(gates::X()));
  REQUIRE(x.kraus.size() == 1);
  CHECK(distance_up_to_phase(x.kraus[0], gates::X()) < 1e-12);

  Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 2 + static_cast<std::size_t>(t % 3);
    const auto c = choi_of(KrausChannel::make(random_kraus(d, 1 + t % 4, rng)));
    CHECK(oracle::max_diff(choi_of(channel_of_choi(c)).rho, c.rho) < 1e-9);
  }
}

TEST_CASE("channel_of_choi rejects invalid Choi matrices") {
  Matrix neg(4, 4);
  neg(0, 0) = 0.5;
  neg(3, 3) = 0.5;
  neg(1, 2) = 0.3;
  neg(2, 1) = 0.3;
  neg(0, 3) = 0.6;
  neg(3, 0) = 0.6;
  CHECK_THROWS_AS(channel_of_choi(ChoiProgram{2, 2, Matrix{}, neg}), ValidationError);
  Matrix skew(4, 4);
  skew(0, 0) = 1.0;
  CHECK_THROWS_AS(channel_of_choi(ChoiProgram{2, 2, Matrix{}, skew}), ValidationError);
}

TEST_CASE("stinespring dilation reproduces Kraus blocks") {
  const Matrix k0 = Matrix::from_rows({{1.0, 0.0}, {0.0, 0.0}});
  const Matrix k1 = Matrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});
  Matrix z = gates::Z(), i2 = gates::I();
  z *= M_SQRT1_2;
  i2 *= M_SQRT1_2;
  Rng rng(42);
  const std::vector<std::vector<Matrix>> sets{{k0, k1}, {i2, z}, random_kraus(3, 4, rng)};
  for (const auto& ks : sets) {
    const auto dil = stinespring_dilation(KrausChannel::make(ks));
    const std::size_t d = ks.front().rows(), r = ks.size();
    CHECK(dil.ancilla_dim == r);
    CHECK(unitarity_residual(dil.u) < 1e-10);
    for (std::size_t k = 0; k < r; ++k)
      for (std::size_t s = 0; s < d; ++s)
        for (std::size_t t = 0; t < d; ++t) CHECK(std::abs(dil.u(s * r + k, t * r) - ks[k](s, t)) < 1e-10);
  }
  const Matrix u = random_unitary(3, rng);
  CHECK(stinespring_dilation(KrausChannel::unitary(u)).u == u);
}

TEST_CASE("apply_channel equals the dilation route") {
  Rng rng(43);
  for (int t = 0; t < 30; ++t) {
    const std::size_t d = 2 + static_cast<std::size_t>(t % 3);
    const std::size_t r = 1 + static_cast<std::size_t>(t % 4);
    const auto ch = KrausChannel::make(random_kraus(d, r, rng));
    const MixedState rho{RegisterLayout::single(d), random_density(d, rng)};
    const auto out = apply_channel(ch, rho);
    CHECK(oracle::max_diff(out.matrix, kraus_sum(ch.kraus, rho.matrix)) < 1e-12);
    const auto dil = stinespring_dilation(ch);
    const Matrix joint = oracle::naive_kron(rho.matrix, outer(ket(r, 0)));
    const Matrix evolved = oracle::naive_matmul(oracle::naive_matmul(dil.u, joint), oracle::dagger(dil.u));
    CHECK(oracle::max_diff(oracle::naive_partial_trace(evolved, {0}, {d, r}), out.matrix) < 1e-10);
    CHECK(std::abs(out.matrix.trace() - 1.0) < 1e-12);
  }
}

TEST_CASE("apply_channel examples") {
  Rng rng(44);
  const MixedState rho{RegisterLayout::single(2), random_density(2, rng)};
  CHECK(oracle::max_diff(apply_channel(KrausChannel::unitary(gates::I()), rho).matrix, rho.matrix) < 1e-15);
  CHECK(oracle::max_diff(apply_channel(KrausChannel::make(depolarizing_kraus()), rho).matrix, scaled_identity(2)) <
        1e-12);
  Matrix z = gates::Z(), i2 = gates::I();
  z *= M_SQRT1_2;
  i2 *= M_SQRT1_2;
  const Matrix plus = Matrix::column({M_SQRT1_2, M_SQRT1_2});
  const auto deph = apply_channel(KrausChannel::make({i2, z}), MixedState{RegisterLayout::single(2), outer(plus)});
  CHECK(oracle::max_diff(deph.matrix, scaled_identity(2)) < 1e-12);
  CHECK_THROWS_AS(apply_channel(KrausChannel::make(depolarizing_kraus()),
                                MixedState{RegisterLayout::single(3), scaled_identity(3)}),
                  DimensionError);
}

TEST_CASE("program transpose and conjugate") {
  const auto w = choi_of(gates::I());
  CHECK(transpose_program(w).ket == w.ket);
  CHECK(conjugate_program(w).ket == w.ket);
  const Matrix sdg = Matrix::from_rows({{1.0, 0.0}, {0.0, Complex(0, -1)}});
  CHECK(oracle::max_diff(conjugate_program(choi_of(gates::S())).ket, choi_of(sdg).ket) < 1e-15);
  Rng rng(45);
  const Matrix u = random_unitary(3, rng);
  const auto c = choi_of(u);
  CHECK(transpose_program(transpose_program(c)).ket == c.ket);
  CHECK(oracle::max_diff(transpose_program(c).ket, choi_of(u.transpose()).ket) < 1e-15);
  CHECK(oracle::max_diff(program_unitary(adjoint_program(c)), oracle::dagger(u)) < 1e-14);
  CHECK_THROWS_AS(transpose_program(ChoiProgram{2, 2, Matrix{}, scaled_identity(4)}), InvalidArgument);
}

TEST_CASE("vectorization identity: (A (x) I)|w> = (I (x) A^T)|w>") {
  Rng rng(46);
  for (std::size_t d : {2u, 3u, 4u}) {
    const Matrix a = random_matrix(d, d, rng);
    const Matrix w = bell_state(d).amplitudes;
    const Matrix lhs = oracle::naive_matmul(oracle::naive_kron(a, Matrix::identity(d)), w);
    const Matrix rhs = oracle::naive_matmul(oracle::naive_kron(Matrix::identity(d), a.transpose()), w);
    CHECK(oracle::max_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("rebit embedding examples") {
  const auto qx = rebit_embed(gates::X());
  CHECK(qx.q == oracle::naive_kron(gates::X(), gates::I()));
  const auto qs = rebit_embed(gates::S());
  for (const auto& z : qs.q.entries()) CHECK(z.imag() == 0.0);
  CHECK(oracle::max_diff(oracle::naive_matmul(qs.q.transpose(), qs.q), Matrix::identity(4)) < 1e-12);
  const auto phi = rebit_input(PureState::make(RegisterLayout::single(2), ket(2, 0)));
  CHECK(phi.amplitudes == ket(4, 0));
  CHECK(phi.layout.labels() == std::vector<std::string>{"q", "rebit"});
  CHECK_THROWS_AS(rebit_embed(Matrix::from_rows({{1.0, 1.0}, {0.0, 1.0}})), ValidationError);
}

TEST_CASE("rebit statistics equal the complex statistics") {
  Rng rng(47);
  for (std::size_t d : {2u, 3u, 4u})
    for (int t = 0; t < 100; ++t) {
      const Matrix u = random_unitary(d, rng);
      const auto psi = PureState::make(RegisterLayout::single(d), random_ket(d, rng));
      const std::size_t a = static_cast<std::size_t>(rng.next_u64() % d);
      const auto emb = rebit_embed(u);
      const auto phi = rebit_input(psi);
      CHECK(std::abs(norm(phi.amplitudes) - 1.0) < 1e-12);
      const Matrix out = oracle::naive_matmul(emb.q, phi.amplitudes);
      const double p_rebit = std::norm(out[2 * a]) + std::norm(out[2 * a + 1]);
      const double p_complex = std::norm(oracle::naive_matmul(u, psi.amplitudes)[a]);
      CHECK(std::abs(p_rebit - p_complex) < 1e-10);
    }
}

TEST_CASE("state validation") {
  CHECK_THROWS_AS(PureState::make(RegisterLayout::single(2), Matrix::column({1.0, 1.0})), ValidationError);
  CHECK_THROWS_AS(PureState::make(RegisterLayout::single(3), ket(2, 0)), DimensionError);
  CHECK_THROWS_AS(MixedState::make(RegisterLayout::single(2), Matrix::from_rows({{1.5, 0.0}, {0.0, -0.5}})),
                  ValidationError);
  CHECK_NOTHROW(MixedState::make(RegisterLayout::single(2), scaled_identity(2)));
}
