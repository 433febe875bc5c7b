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

#include "dbqc/oblivious.hpp"

#include <cmath>
#include <numbers>

#include "dbqc/error.hpp"
#include "dbqc/qmath.hpp"

namespace dbqc {

namespace {

constexpr const char* kOut = "#out";
constexpr const char* kIn = "#in";

Matrix matrix_power(const Matrix& m, std::size_t k) {
  Matrix out = Matrix::identity(m.rows());
  for (std::size_t i = 0; i < k; ++i) out = out * m;
  return out;
}

BinaryBranch make_branch(int parity, Matrix unnormalized, RegisterLayout layout) {
  const double p = std::max(0.0, unnormalized.trace().real());
  if (p > 1e-300) unnormalized *= 1.0 / p;
  return BinaryBranch{parity, p, MixedState{std::move(layout), std::move(unnormalized)}};
}

double double_pow(double base, std::size_t e) {
  double r = 1.0;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

GeneralizedPauliBasis::GeneralizedPauliBasis(std::size_t d) : d_(d) {
  if (d < 2) throw InvalidArgument("GeneralizedPauliBasis: dimension must be at least 2");
  const Matrix x = gates::shift(d);
  const Matrix z = gates::clock(d);
  ops_.reserve(d * d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) ops_.push_back(matrix_power(x, a) * matrix_power(z, b));
}

Matrix FlagState::density() const {
  const Matrix w = outer(bell_state(dim).amplitudes);
  if (which == FlagKind::kOmega) return w;
  Matrix perp = Matrix::identity(dim * dim) - w;
  perp *= 1.0 / static_cast<double>(dim * dim - 1);
  return perp;
}

BlackBox::BlackBox(std::size_t dim, Action action, std::string name)
    : dim_(dim), action_(std::move(action)), name_(std::move(name)),
      calls_(std::make_shared<std::atomic<std::size_t>>(0)) {
  if (dim_ == 0) throw DimensionError("BlackBox: dimension must be positive");
  if (!action_) throw InvalidArgument("BlackBox: empty action");
}

BlackBox BlackBox::from_matrix(const Matrix& u, std::string name) {
  if (!is_unitary(u)) throw ValidationError("BlackBox: operator is not unitary");
  return BlackBox(u.rows(), [u](const Matrix& cols) { return u * cols; }, std::move(name));
}

void BlackBox::apply(Matrix& m, const kernels::Split& target) const {
  const auto& t = target.target_offsets;
  const auto& r = target.rest_offsets;
  if (t.size() != dim_) throw DimensionError("BlackBox '" + name_ + "': target register has wrong dimension");
  const std::size_t cols = m.cols();
  Matrix gathered(dim_, r.size() * cols);
  for (std::size_t ri = 0; ri < r.size(); ++ri)
    for (std::size_t c = 0; c < cols; ++c)
      for (std::size_t k = 0; k < dim_; ++k) gathered(k, ri * cols + c) = m(r[ri] + t[k], c);
  const Matrix result = action_(gathered);
  calls_->fetch_add(1);
  if (result.rows() != dim_ || result.cols() != gathered.cols())
    throw DimensionError("BlackBox '" + name_ + "': action returned the wrong shape");
  for (std::size_t ri = 0; ri < r.size(); ++ri)
    for (std::size_t c = 0; c < cols; ++c)
      for (std::size_t k = 0; k < dim_; ++k) m(r[ri] + t[k], c) = result(k, ri * cols + c);
}

BlackBox program_black_box(const ChoiProgram& program, std::string name) {
  if (!program.pure()) throw InvalidArgument("program_black_box: program is not pure");
  if (program.in_dim != program.out_dim) throw DimensionError("program_black_box: program is not square");
  const std::size_t d = program.in_dim;
  const Matrix ket = program.ket;
  return BlackBox(
      d,
      [ket, d](const Matrix& cols) {
        const double scale = std::sqrt(static_cast<double>(d));
        Matrix out(d, cols.cols());
        for (std::size_t c = 0; c < cols.cols(); ++c)
          for (std::size_t o = 0; o < d; ++o) {
            Complex acc = 0.0;
            for (std::size_t i = 0; i < d; ++i) acc += ket[o * d + i] * cols(i, c);
            out(o, c) = scale * acc;
          }
        return out;
      },
      std::move(name));
}

BranchPair isi_measure(const ChoiProgram& program, const PureState& inject) {
  if (inject.amplitudes.rows() != program.in_dim)
    throw DimensionError("isi_measure: injected state has dimension " + std::to_string(inject.amplitudes.rows()) +
                         ", program input port has " + std::to_string(program.in_dim));
  const RegisterLayout ports = program.layout(kOut, kIn);
  const Matrix b0 = project_reduce(program.rho, {kIn}, inject.amplitudes.conjugate(), ports);
  const Matrix b1 = trace_out(program.rho, {kIn}, ports) - b0;
  const RegisterLayout out = RegisterLayout::single(program.out_dim, "out");
  return BranchPair{make_branch(0, b0, out), make_branch(1, b1, out)};
}

BranchPair oqt_step_on(const ChoiProgram& program, const Matrix& state, const RegisterLayout& layout,
                       const std::string& system_label) {
  if (state.rows() != layout.dim() || !state.is_square())
    throw DimensionError("oqt_step: state does not match its layout");
  if (layout.dim_of(system_label) != program.in_dim)
    throw DimensionError("oqt_step: register '" + system_label + "' has dimension " +
                         std::to_string(layout.dim_of(system_label)) + ", program input port has " +
                         std::to_string(program.in_dim));
  const RegisterLayout joint_layout = program.layout(kOut, kIn).concat(layout);
  const Matrix joint = tensor_product(program.rho, state);
  const Matrix omega = bell_state(program.in_dim).amplitudes;
  const std::vector<std::string> measured{kIn, system_label};
  const Matrix b0 = project_reduce(joint, measured, omega, joint_layout);
  const Matrix b1 = trace_out(joint, measured, joint_layout) - b0;

  const RegisterLayout source = joint_layout.without(measured).renamed(kOut, system_label);
  std::vector<Register> regs = layout.registers();
  for (auto& r : regs)
    if (r.label == system_label) r.dim = program.out_dim;
  const RegisterLayout target(std::move(regs));
  return BranchPair{make_branch(0, permute_registers(b0, source, target), target),
                    make_branch(1, permute_registers(b1, source, target), target)};
}

BranchPair oqt_step(const ChoiProgram& program, const MixedState& input) {
  if (input.matrix.rows() != program.in_dim)
    throw DimensionError("oqt_step: input has dimension " + std::to_string(input.matrix.rows()) +
                         ", program input port has " + std::to_string(program.in_dim));
  auto pair = oqt_step_on(program, input.matrix, RegisterLayout::single(program.in_dim, "sys"), "sys");
  const RegisterLayout out =
      program.out_dim == program.in_dim ? input.layout : RegisterLayout::single(program.out_dim);
  pair.zero.post_state.layout = out;
  pair.one.post_state.layout = out;
  return pair;
}

OqtRecord oqt_sequence(const std::vector<ChoiProgram>& programs, const MixedState& input, Rng* rng,
                       std::span<const int> forced_bits) {
  if (!forced_bits.empty() && forced_bits.size() != programs.size())
    throw InvalidArgument("oqt_sequence: forced bit count does not match the number of programs");
  if (forced_bits.empty() && rng == nullptr && !programs.empty())
    throw InvalidArgument("oqt_sequence: need either an rng or forced bits");
  OqtRecord rec;
  rec.final_state = input;
  for (std::size_t k = 0; k < programs.size(); ++k) {
    const auto pair = oqt_step(programs[k], rec.final_state);
    int bit;
    if (!forced_bits.empty()) {
      bit = forced_bits[k];
      if (bit != 0 && bit != 1) throw InvalidArgument("oqt_sequence: forced bits must be 0 or 1");
    } else {
      bit = rng->uniform() < pair.zero.probability ? 0 : 1;
    }
    const BinaryBranch& br = bit == 0 ? pair.zero : pair.one;
    rec.parity_bits.push_back(bit);
    rec.probability *= br.probability;
    if (bit == 1) {
      const double d = static_cast<double>(programs[k].in_dim);
      rec.signal *= -1.0 / (d * d - 1.0);
      ++rec.s;
    }
    rec.final_state = br.post_state;
  }
  return rec;
}

Matrix oqt_closed_form(const Matrix& u_total, const Matrix& rho, std::size_t s) {
  const std::size_t d = rho.rows();
  const double dd = static_cast<double>(d);
  const double lambda = (s % 2 == 0 ? 1.0 : -1.0) / double_pow(dd * dd - 1.0, s);
  Matrix out = Matrix::identity(d);
  out *= (1.0 - lambda) / dd;
  Matrix signal = u_total * rho * u_total.adjoint();
  signal *= lambda;
  return out + signal;
}

std::vector<double> born_weights(const EigenSystem& es, const Matrix& rho) {
  const std::size_t n = es.values.size();
  if (rho.rows() != n) throw DimensionError("born_weights: dimension mismatch");
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += rho(i, j) * es.vectors(j, k);
      acc += std::conj(es.vectors(i, k)) * row;
    }
    w[k] = std::max(0.0, acc.real());
  }
  return w;
}

double sample_observable(const Matrix& observable, const Matrix& rho, Rng& rng) {
  if (!is_hermitian(observable)) throw ValidationError("sample_observable: observable is not Hermitian");
  if (observable.rows() != rho.rows()) throw DimensionError("sample_observable: dimension mismatch");
  const EigenSystem es = eigh(observable);
  return es.values[rng.categorical(born_weights(es, rho))];
}

Estimate estimate_affine(std::span<const AffineSample> samples, Weighting weighting) {
  if (samples.empty()) throw InvalidArgument("estimate: no records");
  const double n = static_cast<double>(samples.size());
  Estimate e;
  e.records = samples.size();
  if (weighting == Weighting::kUniform) {
    double sum = 0.0, sq = 0.0;
    for (const auto& s : samples) {
      const double v = (s.x - s.offset) / s.signal;
      sum += v;
      sq += v * v;
    }
    e.value = sum / n;
    if (samples.size() > 1) e.std_error = std::sqrt(std::max(0.0, (sq - n * e.value * e.value) / (n - 1.0)) / n);
    return e;
  }
  double num = 0.0, den = 0.0;
  for (const auto& s : samples) {
    num += s.signal * (s.x - s.offset);
    den += s.signal * s.signal;
  }
  e.value = num / den;
  if (samples.size() > 1) {
    double acc = 0.0;
    for (const auto& s : samples) {
      const double r = s.x - s.offset - s.signal * e.value;
      acc += s.signal * s.signal * r * r;
    }
    e.std_error = std::sqrt(acc * n / (n - 1.0)) / den;
  }
  return e;
}

Estimate oqt_estimate_observable(std::span<const OqtRecord> records, const Matrix& observable, ReadoutMode mode,
                                 Rng* rng, Weighting weighting) {
  if (records.empty()) throw InvalidArgument("oqt_estimate_observable: no records");
  if (!is_hermitian(observable)) throw ValidationError("oqt_estimate_observable: observable is not Hermitian");
  if (mode == ReadoutMode::kSampled && rng == nullptr)
    throw InvalidArgument("oqt_estimate_observable: sampled readout needs an rng");
  const std::size_t d = observable.rows();
  const double tr_o = observable.trace().real();
  EigenSystem es;
  if (mode == ReadoutMode::kSampled) es = eigh(observable);
  std::vector<AffineSample> samples;
  samples.reserve(records.size());
  for (const auto& r : records) {
    const Matrix& rho = r.final_state.matrix;
    if (rho.rows() != d) throw DimensionError("oqt_estimate_observable: record dimension mismatch");
    const double x = mode == ReadoutMode::kExpectation ? hs_inner(observable, rho).real() : es.values[rng->categorical(born_weights(es, rho))];
    samples.push_back({x, (1.0 - r.signal) * tr_o / static_cast<double>(d), r.signal});
  }
  return estimate_affine(samples, weighting);
}

namespace {

struct JointParts {
  RegisterLayout layout;
  Matrix state;
  std::vector<std::string> measured;
  std::vector<std::string> outs;
  Matrix omega;
};

JointParts join_parts(const std::vector<Part>& parts) {
  if (parts.empty()) throw InvalidArgument("multiparty_binary_bell: no parts");
  JointParts j;
  j.state = Matrix::identity(1);
  j.omega = Matrix::identity(1);
  std::vector<Register> regs;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& p = parts[k];
    if (p.input.matrix.rows() != p.program.in_dim)
      throw DimensionError("multiparty_binary_bell: part " + std::to_string(k) + " input has dimension " +
                           std::to_string(p.input.matrix.rows()) + ", program input port has " +
                           std::to_string(p.program.in_dim));
    const std::string o = "#o" + std::to_string(k), i = "#i" + std::to_string(k), s = "#s" + std::to_string(k);
    regs.push_back({o, p.program.out_dim});
    regs.push_back({i, p.program.in_dim});
    regs.push_back({s, p.program.in_dim});
    j.measured.push_back(i);
    j.measured.push_back(s);
    j.outs.push_back(o);
    j.state = tensor_product(j.state, tensor_product(p.program.rho, p.input.matrix));
    j.omega = tensor_product(j.omega, bell_state(p.program.in_dim).amplitudes);
  }
  j.layout = RegisterLayout(std::move(regs));
  return j;
}

}  // namespace

BranchPair multiparty_binary_bell(const std::vector<Part>& parts) {
  const JointParts j = join_parts(parts);
  const Matrix b0 = project_reduce(j.state, j.measured, j.omega, j.layout);
  const Matrix b1 = trace_out(j.state, j.measured, j.layout) - b0;
  std::vector<Register> regs;
  for (std::size_t k = 0; k < parts.size(); ++k) regs.push_back({"p" + std::to_string(k), parts[k].program.out_dim});
  const RegisterLayout out(std::move(regs));
  return BranchPair{make_branch(0, b0, out), make_branch(1, b1, out)};
}

ParitySampling local_parity_sampling(const std::vector<Part>& parts, std::size_t shots, Rng& rng) {
  if (shots == 0) throw InvalidArgument("local_parity_sampling: shots must be positive");
  if (parts.empty()) throw InvalidArgument("local_parity_sampling: no parts");
  // Parts are independent, so each local projector outcome is drawn from its
  // own marginal.
  std::vector<double> p0;
  ParitySampling out;
  out.shots = shots;
  for (const auto& p : parts) {
    const auto pair = oqt_step(p.program, p.input);
    p0.push_back(pair.zero.probability);
    const double d = static_cast<double>(p.program.in_dim);
    out.sample_cost *= d * d;
  }
  out.pattern_counts.assign(std::size_t{1} << parts.size(), 0);
  for (std::size_t shot = 0; shot < shots; ++shot) {
    std::size_t pattern = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) pattern = (pattern << 1) | (rng.uniform() < p0[k] ? 0u : 1u);
    ++out.pattern_counts[pattern];
    if (pattern == 0)
      ++out.all_zero;
    else
      ++out.rest;
  }
  return out;
}

namespace {

void check_flag(const FlagState& flag, std::size_t d) {
  if (flag.dim != d)
    throw DimensionError("oqc: flag dimension " + std::to_string(flag.dim) + " does not match " + std::to_string(d));
}

RegisterLayout oqc_layout(std::size_t control_dim, std::size_t d) {
  return RegisterLayout{{"c", control_dim}, {"data", d}, {"anc", d}, {"f1", d}, {"f2", d}};
}

// One control stage: swaps (data, anc) with the flag pair unless the control
// is in P, applies the black boxes to the data slot, and swaps back.
Matrix oqc_stage(const Matrix& projector, const BlackBox& u, const BlackBox& u_conj, std::size_t d,
                 const RegisterLayout& layout) {
  const std::size_t m = projector.rows();
  const Matrix swap = gates::SWAP(d * d);
  const Matrix cswap =
      tensor_product(projector, Matrix::identity(d * d * d * d)) + tensor_product(Matrix::identity(m) - projector, swap);
  Matrix v = cswap;
  u.apply(v, kernels::make_split(layout, {layout.index_of("data")}));
  u_conj.apply(v, kernels::make_split(layout, {layout.index_of("anc")}));
  return cswap * v;
}

}  // namespace

OqcCircuit oqc_build(const BlackBox& apply_u, const BlackBox& apply_u_conj, std::size_t d, const FlagState& flag) {
  check_flag(flag, d);
  if (apply_u.dim() != d || apply_u_conj.dim() != d) throw DimensionError("oqc_build: black box dimension mismatch");
  const RegisterLayout layout = oqc_layout(2, d);
  const Matrix p1 = outer(ket(2, 1));
  return OqcCircuit{layout, oqc_stage(p1, apply_u, apply_u_conj, d, layout), flag};
}

OqcCircuit multiplexer_build(const std::vector<Matrix>& projectors,
                             const std::vector<std::pair<BlackBox, BlackBox>>& programs, std::size_t d,
                             const FlagState& flag) {
  check_flag(flag, d);
  if (projectors.empty() || projectors.size() != programs.size())
    throw InvalidArgument("multiplexer_build: need one program pair per projector");
  const std::size_t m = projectors.front().rows();
  Matrix sum(m, m);
  for (const auto& p : projectors) {
    if (!p.is_square() || p.rows() != m) throw DimensionError("multiplexer_build: projector shapes differ");
    if (!is_hermitian(p) || max_abs_diff(p * p, p) > kEps)
      throw ValidationError("multiplexer_build: control operator is not a projector");
    sum += p;
  }
  if (max_abs_diff(sum, Matrix::identity(m)) > kEps)
    throw ValidationError("multiplexer_build: projectors do not resolve the identity");
  const RegisterLayout layout = oqc_layout(m, d);
  Matrix v = Matrix::identity(layout.dim());
  for (std::size_t k = 0; k < projectors.size(); ++k) {
    if (programs[k].first.dim() != d || programs[k].second.dim() != d)
      throw DimensionError("multiplexer_build: black box dimension mismatch");
    v = oqc_stage(projectors[k], programs[k].first, programs[k].second, d, layout) * v;
  }
  return OqcCircuit{layout, std::move(v), flag};
}

Matrix restrict_to_flag(const OqcCircuit& circuit) {
  if (circuit.flag.which != FlagKind::kOmega)
    throw InvalidArgument("restrict_to_flag: the complement flag is mixed; use oqc_induced_state");
  return project_reduce(circuit.unitary, {"f1", "f2"}, bell_state(circuit.flag.dim).amplitudes, circuit.layout);
}

Matrix oqc_induced_state(const OqcCircuit& circuit, const Matrix& rho) {
  const Matrix joint = tensor_product(rho, circuit.flag.density());
  if (joint.rows() != circuit.layout.dim()) throw DimensionError("oqc_induced_state: state dimension mismatch");
  const Matrix evolved = circuit.unitary * joint * circuit.unitary.adjoint();
  return trace_out(evolved, {"f1", "f2"}, circuit.layout);
}

std::vector<GateOp> toffoli_boundary_compile() {
  const double q = std::numbers::pi / 4;
  return {
      {"RY(pi/4)", {"t"}, gates::RY(q)},   {"CNOT", {"c2", "t"}, gates::CNOT()}, {"RY(pi/4)", {"t"}, gates::RY(q)},
      {"CNOT", {"c1", "t"}, gates::CNOT()}, {"RY(-pi/4)", {"t"}, gates::RY(-q)}, {"CNOT", {"c2", "t"}, gates::CNOT()},
      {"RY(-pi/4)", {"t"}, gates::RY(-q)},
  };
}

}  // namespace dbqc
