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
#include "dbqc/kernels.hpp"
#include "dbqc/qmath.hpp"
#include "oracles.hpp"

using namespace dbqc;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (auto& z : m.entries()) z = Complex(rng.normal(), rng.normal());
  return m;
}

}  // namespace

TEST_CASE("matmul and kron agree with naive loops") {
  Rng rng(11);
  const Matrix a = random_matrix(5, 7, rng);
  const Matrix b = random_matrix(7, 3, rng);
  CHECK(oracle::max_diff(a * b, oracle::naive_matmul(a, b)) < 1e-12);
  const Matrix c = random_matrix(2, 3, rng);
  CHECK(oracle::max_diff(tensor_product(a, c), oracle::naive_kron(a, c)) < 1e-14);
}

TEST_CASE("tensor_product enforces the entry cap") {
  const Matrix a = Matrix::identity(64);
  CHECK_THROWS_AS(tensor_product(a, a, 1000), CapacityError);
  CHECK_NOTHROW(tensor_product(a, Matrix::identity(2)));
}

TEST_CASE("embed_operator matches digit-wise oracle on non-adjacent targets") {
  Rng rng(3);
  const RegisterLayout layout{{"a", 2}, {"b", 3}, {"c", 2}, {"d", 3}};
  const std::vector<std::size_t> dims{2, 3, 2, 3};
  const Matrix op = random_unitary(6, rng);
  const Matrix e = embed_operator(op, {"d", "a"}, layout);
  CHECK(oracle::max_diff(e, oracle::naive_embed(op, {3, 0}, dims)) < 1e-13);
  CHECK_THROWS_AS(embed_operator(op, {"a", "c"}, layout), DimensionError);
  CHECK_THROWS_AS(embed_operator(op, {"a", "zz"}, layout), DimensionError);
}

TEST_CASE("partial trace and trace_out match the oracle") {
  Rng rng(5);
  const RegisterLayout layout{{"a", 2}, {"b", 3}, {"c", 2}};
  const std::vector<std::size_t> dims{2, 3, 2};
  const Matrix rho = random_density(12, rng);
  CHECK(oracle::max_diff(partial_trace(rho, {"c", "a"}, layout), oracle::naive_partial_trace(rho, {0, 2}, dims)) <
        1e-13);
  CHECK(oracle::max_diff(trace_out(rho, {"a", "c"}, layout), oracle::naive_partial_trace(rho, {1}, dims)) < 1e-13);
  CHECK(std::abs(partial_trace(rho, {}, layout)(0, 0) - 1.0) < 1e-12);
}

TEST_CASE("conjugation and ket application agree with embedded products") {
  Rng rng(8);
  const RegisterLayout layout{{"a", 3}, {"b", 2}, {"c", 2}};
  const Matrix rho = random_density(12, rng);
  const Matrix u = random_unitary(4, rng);
  const Matrix full = oracle::naive_embed(u, {2, 0 + 1}, {3, 2, 2});
  const Matrix expect = oracle::naive_matmul(oracle::naive_matmul(full, rho), oracle::dagger(full));
  CHECK(oracle::max_diff(conjugate_by(rho, u, {"c", "b"}, layout), expect) < 1e-12);
  const Matrix psi = random_ket(12, rng);
  CHECK(oracle::max_diff(apply_to_ket(psi, u, {"c", "b"}, layout), oracle::naive_matmul(full, psi)) < 1e-12);
}

TEST_CASE("project_reduce equals the sandwich with the projector ket") {
  Rng rng(9);
  const RegisterLayout layout{{"s", 3}, {"m", 2}, {"n", 2}};
  const Matrix rho = random_density(12, rng);
  const Matrix k = random_ket(4, rng);
  // Oracle: move measured registers last via naive embed of a permutation,
  // then contract with the ket explicitly.
  Matrix expect(3, 3);
  const std::vector<std::size_t> dims{3, 2, 2};
  for (std::size_t r = 0; r < 12; ++r)
    for (std::size_t c = 0; c < 12; ++c) {
      const auto dr = oracle::digits(r, dims);
      const auto dc = oracle::digits(c, dims);
      // measured order is (n, m)
      const std::size_t kr = dr[2] * 2 + dr[1];
      const std::size_t kc = dc[2] * 2 + dc[1];
      expect(dr[0], dc[0]) += std::conj(k[kr]) * rho(r, c) * k[kc];
    }
  CHECK(oracle::max_diff(project_reduce(rho, {"n", "m"}, k, layout), expect) < 1e-13);
}

TEST_CASE("permute_registers round-trips and matches embed ordering") {
  Rng rng(4);
  const RegisterLayout src{{"a", 2}, {"b", 3}, {"c", 2}};
  const RegisterLayout dst{{"c", 2}, {"a", 2}, {"b", 3}};
  const Matrix a = random_unitary(2, rng);
  const Matrix b = random_unitary(3, rng);
  const Matrix c = random_unitary(2, rng);
  const Matrix in_src = oracle::naive_kron(oracle::naive_kron(a, b), c);
  const Matrix in_dst = oracle::naive_kron(oracle::naive_kron(c, a), b);
  CHECK(oracle::max_diff(permute_registers(in_src, src, dst), in_dst) < 1e-14);
  CHECK(oracle::max_diff(permute_registers(in_dst, dst, src), in_src) < 1e-14);
  const Matrix ka = random_ket(2, rng), kb = random_ket(3, rng), kc = random_ket(2, rng);
  CHECK(oracle::max_diff(permute_registers(oracle::naive_kron(oracle::naive_kron(ka, kb), kc), src, dst),
                         oracle::naive_kron(oracle::naive_kron(kc, ka), kb)) < 1e-14);
}

TEST_CASE("random objects satisfy their defining properties") {
  Rng rng(21);
  for (std::size_t d : {1u, 2u, 5u, 8u}) {
    const Matrix u = random_unitary(d, rng);
    CHECK(oracle::max_diff(oracle::naive_matmul(oracle::dagger(u), u), Matrix::identity(d)) < 1e-12);
    const Matrix rho = random_density(d, rng, 2);
    CHECK(std::abs(oracle::naive_trace(rho) - 1.0) < 1e-12);
    CHECK(oracle::max_diff(rho, oracle::dagger(rho)) < 1e-14);
    for (double ev : eigh(rho).values) CHECK(ev > -1e-12);
  }
  // Haar first moment: E|U_00|^2 = 1/d.
  double acc = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) acc += std::norm(random_unitary(3, rng)(0, 0));
  CHECK(std::abs(acc / n - 1.0 / 3.0) < 0.02);
}

TEST_CASE("eigh reconstructs the matrix") {
  Rng rng(2);
  const Matrix rho = random_density(6, rng);
  const auto es = eigh(rho);
  Matrix rebuilt(6, 6);
  for (std::size_t k = 0; k < 6; ++k) {
    Matrix v(6, 1);
    for (std::size_t i = 0; i < 6; ++i) v[i] = es.vectors(i, k);
    rebuilt += es.values[k] * oracle::naive_matmul(v, oracle::dagger(v));
    if (k > 0) CHECK(es.values[k] >= es.values[k - 1]);
  }
  CHECK(oracle::max_diff(rebuilt, rho) < 1e-12);
}

TEST_CASE("complete_to_unitary keeps the given columns") {
  Rng rng(6);
  const Matrix u = random_unitary(5, rng);
  const Matrix iso = u.block(0, 0, 5, 2);
  const Matrix full = complete_to_unitary(iso);
  CHECK(is_unitary(full));
  CHECK(oracle::max_diff(full.block(0, 0, 5, 2), iso) < 1e-15);
  CHECK_THROWS_AS(complete_to_unitary(Matrix::from_rows({{1.0, 1.0}, {0.0, 0.0}})), ValidationError);
}

TEST_CASE("distance_up_to_phase ignores a global phase") {
  Rng rng(1);
  const Matrix u = random_unitary(4, rng);
  Matrix v = u;
  v *= std::polar(1.0, 0.7);
  CHECK(distance_up_to_phase(u, v) < 1e-7);
  CHECK(distance_up_to_phase(u, random_unitary(4, rng)) > 0.1);
}

TEST_CASE("serial and OpenMP kernels are bit-identical") {
  Rng rng(13);
  const RegisterLayout layout{{"a", 4}, {"b", 8}, {"c", 8}};
  const Matrix rho = random_density(256, rng);
  const Matrix u = random_unitary(32, rng);
  const auto split = kernels::make_split(layout, {2, 0});
  CHECK(kernels::serial::matmul(rho, rho) == kernels::omp::matmul(rho, rho));
  CHECK(kernels::serial::kron(u, u) == kernels::omp::kron(u, u));
  Matrix s = rho, o = rho;
  kernels::serial::apply_left(u, split, s);
  kernels::omp::apply_left(u, split, o);
  CHECK(s == o);
  kernels::serial::apply_right_adjoint(u, split, s);
  kernels::omp::apply_right_adjoint(u, split, o);
  CHECK(s == o);
  CHECK(kernels::serial::partial_trace(rho, split) == kernels::omp::partial_trace(rho, split));
  const Matrix k = random_ket(32, rng);
  CHECK(kernels::serial::project_reduce(rho, split, k) == kernels::omp::project_reduce(rho, split, k));
}

TEST_CASE("tensor product basics and associativity") {
  const Matrix x = Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
  const Matrix z = Matrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
  CHECK(tensor_product(Matrix::identity(2), Matrix::identity(2)) == Matrix::identity(4));
  const Matrix xz = tensor_product(x, z);
  CHECK(xz == oracle::naive_kron(x, z));
  CHECK(xz(0, 2) == Complex(1.0));
  CHECK(xz(1, 3) == Complex(-1.0));
  CHECK(tensor_product(ket(2, 0), ket(2, 1)) == ket(4, 1));
  Rng rng(31);
  const Matrix a = random_unitary(2, rng), b = random_unitary(3, rng), c = random_unitary(2, rng);
  CHECK(oracle::max_diff(tensor_product(tensor_product(a, b), c), tensor_product(a, tensor_product(b, c))) < 1e-15);
  // Dyadic entries multiply exactly, so the two groupings agree bit for bit.
  const Matrix p = Matrix::from_rows({{0.5, Complex(0, -0.25)}, {2.0, Complex(1.5, 1)}});
  const Matrix q = Matrix::from_rows({{Complex(0, 1), 0.0, -1.0}, {0.125, 1.0, Complex(1, 1)}});
  const Matrix r = Matrix::from_rows({{-1.0, 0.5}, {Complex(0, 0.5), 4.0}});
  CHECK(tensor_product(tensor_product(p, q), r) == tensor_product(p, tensor_product(q, r)));
}

TEST_CASE("embeds on disjoint targets commute and identity embeds to identity") {
  Rng rng(32);
  const RegisterLayout layout{{"q0", 2}, {"q1", 2}, {"q2", 2}};
  const Matrix cnot = Matrix::from_rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}});
  CHECK(oracle::max_diff(embed_operator(cnot, {"q2", "q0"}, layout), oracle::naive_embed(cnot, {2, 0}, {2, 2, 2})) ==
        0.0);
  const Matrix a = embed_operator(random_unitary(4, rng), {"q0", "q2"}, layout);
  const Matrix b = embed_operator(random_unitary(2, rng), {"q1"}, layout);
  CHECK(oracle::max_diff(a * b, b * a) < 1e-15);
  CHECK(embed_operator(Matrix::identity(4), {"q2", "q1"}, layout) == Matrix::identity(8));
}

TEST_CASE("partial trace recovers product factors and bell marginals") {
  Rng rng(33);
  const Matrix ra = random_density(3, rng), rb = random_density(2, rng);
  const RegisterLayout layout{{"A", 3}, {"B", 2}};
  CHECK(oracle::max_diff(partial_trace(tensor_product(ra, rb), {"A"}, layout), ra) < 1e-12);
  CHECK(oracle::max_diff(partial_trace(tensor_product(ra, rb), {"B"}, layout), rb) < 1e-12);
  Matrix w(9, 1);
  for (std::size_t i = 0; i < 3; ++i) w[i * 3 + i] = 1.0 / std::sqrt(3.0);
  const RegisterLayout ab{{"A", 3}, {"B", 3}};
  Matrix third = Matrix::identity(3);
  third *= 1.0 / 3.0;
  CHECK(oracle::max_diff(partial_trace(outer(w), {"A"}, ab), third) < 1e-12);
  CHECK(partial_trace(ra, {"A"}, RegisterLayout{{"A", 3}}) == ra);
}

TEST_CASE("random_unitary determinism and residual up to d=64") {
  Rng r1(77), r2(77);
  CHECK(random_unitary(4, r1) == random_unitary(4, r2));
  Rng rng(78);
  const Matrix one = random_unitary(1, rng);
  CHECK(std::abs(std::abs(one[0]) - 1.0) < 1e-15);
  for (std::size_t d : {4u, 16u, 64u}) CHECK(unitarity_residual(random_unitary(d, rng)) < 1e-12);
}

TEST_CASE("distance_up_to_phase examples") {
  Rng rng(34);
  const Matrix u = random_unitary(3, rng);
  Matrix minus = u;
  minus *= -1.0;
  CHECK(distance_up_to_phase(u, minus) < 1e-14);
  CHECK(distance_up_to_phase(u, u) < 1e-14);
  const Matrix z = Matrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
  CHECK(std::abs(distance_up_to_phase(Matrix::identity(2), z) - 2.0) < 1e-12);
  CHECK_THROWS_AS(distance_up_to_phase(u, Matrix::identity(2)), DimensionError);
}
