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


// Serial reference vs OpenMP kernels on an 8-qubit density matrix.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "dbqc/kernels.hpp"
#include "dbqc/qmath.hpp"
#include "dbqc/rng.hpp"

namespace {

using namespace dbqc;

struct Fixture {
  RegisterLayout layout;
  Matrix rho;
  Matrix gate;
  Matrix a, b;
  kernels::Split split;
  kernels::Split traced;

  explicit Fixture(std::size_t qubits) {
    std::vector<Register> regs;
    for (std::size_t i = 0; i < qubits; ++i) regs.push_back({"q" + std::to_string(i), 2});
    layout = RegisterLayout(regs);
    Rng rng(42);
    const std::size_t d = std::size_t{1} << qubits;
    rho = random_density(d, rng);
    gate = random_unitary(4, rng);
    a = random_unitary(d, rng);
    b = random_unitary(d, rng);
    split = kernels::make_split(layout, {1, qubits - 2});
    traced = kernels::make_split(layout, {0, 2, 4});
  }
};

const Fixture& fixture() {
  static const Fixture f(8);
  return f;
}

template <Matrix (*F)(const Matrix&, const Matrix&)>
void BM_matmul(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(F(f.a, f.b));
}

template <void (*F)(const Matrix&, const kernels::Split&, Matrix&)>
void BM_apply_left(benchmark::State& state) {
  const auto& f = fixture();
  Matrix m = f.rho;
  for (auto _ : state) {
    F(f.gate, f.split, m);
    benchmark::ClobberMemory();
  }
}

template <void (*F)(const Matrix&, const kernels::Split&, Matrix&)>
void BM_apply_right_adjoint(benchmark::State& state) {
  const auto& f = fixture();
  Matrix m = f.rho;
  for (auto _ : state) {
    F(f.gate, f.split, m);
    benchmark::ClobberMemory();
  }
}

template <Matrix (*F)(const Matrix&, const kernels::Split&)>
void BM_partial_trace(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(F(f.rho, f.traced));
}

}  // namespace

BENCHMARK(BM_matmul<dbqc::kernels::serial::matmul>)->Name("matmul/serial");
BENCHMARK(BM_matmul<dbqc::kernels::omp::matmul>)->Name("matmul/omp");
BENCHMARK(BM_apply_left<dbqc::kernels::serial::apply_left>)->Name("apply_left/serial");
BENCHMARK(BM_apply_left<dbqc::kernels::omp::apply_left>)->Name("apply_left/omp");
BENCHMARK(BM_apply_right_adjoint<dbqc::kernels::serial::apply_right_adjoint>)->Name("apply_right_adjoint/serial");
BENCHMARK(BM_apply_right_adjoint<dbqc::kernels::omp::apply_right_adjoint>)->Name("apply_right_adjoint/omp");
BENCHMARK(BM_partial_trace<dbqc::kernels::serial::partial_trace>)->Name("partial_trace/serial");
BENCHMARK(BM_partial_trace<dbqc::kernels::omp::partial_trace>)->Name("partial_trace/omp");

BENCHMARK_MAIN();
