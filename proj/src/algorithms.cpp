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

#include "dbqc/algorithms.hpp"

#include <cmath>
#include <numbers>

#include "dbqc/error.hpp"
#include "dbqc/qmath.hpp"

namespace dbqc {

namespace {

Matrix plus_density() {
  Matrix m(2, 2, {0.5, 0.5, 0.5, 0.5});
  return m;
}

// Rotates the measured qubit so that outcome 0 corresponds to +1 along `axis`.
double control_p0(const Matrix& control, MeasurementAxis axis) {
  Matrix basis = gates::H();
  if (axis == MeasurementAxis::kY) basis = gates::H() * gates::S().adjoint();
  return (basis * control * basis.adjoint())(0, 0).real();
}

void require_square_dim(const Matrix& m, std::size_t d, const char* what) {
  if (!m.is_square() || m.rows() != d)
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(d) + ", got " +
                         std::to_string(m.rows()));
}

// Rotation taking |0> to r|0> + sqrt(1-r^2)|1>.
Matrix amplitude_rotation(double r) {
  r = std::clamp(r, 0.0, 1.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - r * r));
  return Matrix::from_rows({{r, -s}, {s, r}});
}

// Smallest n with (2n+1) theta >= pi/2. p within 1e-12 of 1 needs no
// iteration; asin would otherwise inflate its rounding error to ~1e-8.
std::size_t exact_iterations(double theta) {
  if (std::sin(theta) * std::sin(theta) > 1.0 - 1e-12) return 0;
  const double x = std::numbers::pi / (4.0 * theta) - 0.5;
  return x <= 1e-9 ? 0 : static_cast<std::size_t>(std::ceil(x - 1e-9));
}

PureState normalized_block(const Matrix& full, std::size_t offset, std::size_t len, const std::string& label,
                           double* weight) {
  Matrix v(len, 1);
  double w = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    v[i] = full[offset + i];
    w += std::norm(v[i]);
  }
  *weight = w;
  if (w > 1e-300) v *= 1.0 / std::sqrt(w);
  return PureState{RegisterLayout::single(len, label), std::move(v)};
}

}  // namespace

double dqc1(const Matrix& u, const MixedState& rho, MeasurementAxis axis) {
  if (!is_unitary(u)) throw ValidationError("dqc1: operator is not unitary");
  require_square_dim(rho.matrix, u.rows(), "dqc1");
  const RegisterLayout layout{{"c", 2}, {"sys", u.rows()}};
  Matrix state = tensor_product(plus_density(), rho.matrix);
  state = conjugate_by(state, gates::controlled(u), {"c", "sys"}, layout);
  return control_p0(partial_trace(state, {"c"}, layout), axis);
}

Odqc1Result odqc1(const ChoiProgram& program, const ChoiProgram& conj_program, const MixedState& rho,
                  const MixedState& eta, MeasurementAxis axis, FlagKind flag) {
  const std::size_t d = program.in_dim;
  require_square_dim(rho.matrix, d, "odqc1 rho");
  require_square_dim(eta.matrix, d, "odqc1 eta");
  const auto circuit = oqc_build(program_black_box(program, "U"), program_black_box(conj_program, "U*"), d,
                                 FlagState{flag, d});
  const Matrix input = tensor_product({plus_density(), rho.matrix, eta.matrix});
  const Matrix out = oqc_induced_state(circuit, input);
  const RegisterLayout layout{{"c", 2}, {"data", d}, {"anc", d}};
  return Odqc1Result{control_p0(partial_trace(out, {"c"}, layout), axis), flag};
}

SwapTestResult swap_test(const PureState& psi, const PureState& phi, std::size_t shots, Rng& rng) {
  if (shots == 0) throw InvalidArgument("swap_test: shots must be positive");
  const std::size_t d = psi.amplitudes.rows();
  if (phi.amplitudes.rows() != d) throw DimensionError("swap_test: states have different dimensions");
  const RegisterLayout layout{{"c", 2}, {"a", d}, {"b", d}};
  Matrix state = tensor_product({ket(2, 0), psi.amplitudes, phi.amplitudes});
  state = apply_to_ket(state, gates::H(), {"c"}, layout);
  state = apply_to_ket(state, gates::controlled(gates::SWAP(d)), {"c", "a", "b"}, layout);
  state = apply_to_ket(state, gates::H(), {"c"}, layout);
  double p0 = 0.0;
  for (std::size_t i = 0; i < d * d; ++i) p0 += std::norm(state[i]);
  SwapTestResult r;
  r.p0 = p0;
  r.shots = shots;
  std::size_t zeros = 0;
  for (std::size_t s = 0; s < shots; ++s)
    if (rng.uniform() < p0) ++zeros;
  const double phat = static_cast<double>(zeros) / static_cast<double>(shots);
  r.estimate = std::clamp(2.0 * phat - 1.0, 0.0, 1.0);
  r.std_error = 2.0 * std::sqrt(phat * (1.0 - phat) / static_cast<double>(shots));
  return r;
}

ComposeResult compose_programs(const ChoiProgram& p1, const ChoiProgram& p2) {
  if (!p1.pure() || !p2.pure()) throw InvalidArgument("compose_programs: programs must be pure");
  const std::size_t d = p1.in_dim;
  if (p1.out_dim != d || p2.in_dim != d || p2.out_dim != d)
    throw DimensionError("compose_programs: programs must share one square dimension");
  const RegisterLayout layout{{"o1", d}, {"i1", d}, {"o2", d}, {"i2", d}};
  // Pairing the out ports natively yields U1^T U2; conjugating p1 first turns
  // that into U1^dagger U2.
  const Matrix joint = tensor_product(conjugate_program(p1).ket, p2.ket);
  const Matrix omega = bell_state(d).amplitudes;
  const Matrix b0 = project_ket(joint, {"o1", "o2"}, omega, layout);
  const Matrix rho0 = outer(b0);
  const Matrix rho1 = trace_out(outer(joint), {"o1", "o2"}, layout) - rho0;
  const RegisterLayout ports{{"out", d}, {"in", d}};
  ComposeResult r;
  const double p0 = rho0.trace().real();
  const double p1w = std::max(0.0, rho1.trace().real());
  Matrix n0 = rho0, n1 = rho1;
  n0 *= 1.0 / p0;
  if (p1w > 1e-300) n1 *= 1.0 / p1w;
  r.zero = BinaryBranch{0, p0, MixedState{ports, n0}};
  r.one = BinaryBranch{1, p1w, MixedState{ports, n1}};
  Matrix k = b0;
  k *= 1.0 / std::sqrt(p0);
  r.program = ChoiProgram{d, d, k, n0};
  return r;
}

BlockEncoding block_encoding_check(const Matrix& g, std::size_t control_dim, std::size_t data_dim) {
  if (control_dim == 0 || data_dim == 0 || g.rows() != control_dim * data_dim || !g.is_square())
    throw DimensionError("block_encoding_check: operator does not match (control, data) dimensions");
  if (unitarity_residual(g) > 1e-9) throw ValidationError("block_encoding_check: operator is not unitary");
  const Matrix m = g.block(0, 0, data_dim, data_dim);
  const Matrix mm = m.adjoint() * m;
  const double p = mm.trace().real() / static_cast<double>(data_dim);
  Matrix scalar = Matrix::identity(data_dim);
  scalar *= p;
  if (p <= 1e-14 || max_abs_diff(mm, scalar) > 1e-9)
    throw ValidationError("not a block encoding: M^dagger M is not proportional to the identity");
  BlockEncoding be;
  be.g = g;
  be.control_dim = control_dim;
  be.data_dim = data_dim;
  be.p = std::min(p, 1.0);
  be.theta = std::asin(std::sqrt(be.p));
  be.u = m;
  be.u *= 1.0 / std::sqrt(p);
  return be;
}

Matrix random_block_encoding(std::size_t d, double p, Rng& rng) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("random_block_encoding: p must lie in (0, 1]");
  const double s = std::sqrt(p), c = std::sqrt(1.0 - p);
  const Matrix rot = Matrix::from_rows({{s, c}, {c, -s}});
  const auto branch = [d](const Matrix& v) {
    return tensor_product(outer(ket(2, 0)), Matrix::identity(d)) + tensor_product(outer(ket(2, 1)), v);
  };
  const Matrix v1 = random_unitary(d, rng), u = random_unitary(d, rng), v2 = random_unitary(d, rng);
  return branch(v1) * tensor_product(rot, u) * branch(v2);
}

std::size_t oaa_recommended_iterations(double theta) {
  if (!(theta > 0.0)) throw InvalidArgument("oaa_recommended_iterations: theta must be positive");
  const double x = std::numbers::pi / (4.0 * theta) - 0.5;
  std::size_t n = x <= 0.0 ? 0 : static_cast<std::size_t>(std::llround(x));
  while (n > 0 && (2.0 * static_cast<double>(n) + 1.0) * theta > std::numbers::pi / 2 + theta + 1e-12) --n;
  return n;
}

namespace {

Matrix zero_reflection(std::size_t control_dim, std::size_t data_dim) {
  Matrix r = Matrix::identity(control_dim * data_dim);
  r *= -1.0;
  for (std::size_t i = 0; i < data_dim; ++i) r(i, i) = 1.0;
  return r;
}

}  // namespace

Matrix oaa_walk(const BlockEncoding& be) {
  const Matrix r = zero_reflection(be.control_dim, be.data_dim);
  Matrix w = be.g * r * be.g.adjoint() * r;
  w *= -1.0;
  return w;
}

OaaResult oaa_amplify(const BlockEncoding& be, std::size_t n, const PureState& psi) {
  if (psi.amplitudes.rows() != be.data_dim) throw DimensionError("oaa_amplify: input has wrong dimension");
  const Matrix w = oaa_walk(be);
  Matrix state = be.g * tensor_product(ket(be.control_dim, 0), psi.amplitudes);
  for (std::size_t k = 0; k < n; ++k) state = w * state;
  OaaResult r;
  r.post_state = normalized_block(state, 0, be.data_dim, "data", &r.success);
  r.full_state = std::move(state);
  r.recommended_n = oaa_recommended_iterations(be.theta);
  return r;
}

OaaOqtResult oaa_via_oqt(const BlockEncoding& be, std::size_t n, const MixedState& data_input, Rng* rng,
                         std::span<const int> forced_bits) {
  require_square_dim(data_input.matrix, be.data_dim, "oaa_via_oqt");
  const Matrix r = zero_reflection(be.control_dim, be.data_dim);
  Matrix neg_g = be.g;
  neg_g *= -1.0;
  const ChoiProgram g = choi_of(be.g);
  const ChoiProgram reflect = choi_of(r * be.g.adjoint() * r);
  const ChoiProgram minus_g = choi_of(neg_g);
  std::vector<ChoiProgram> programs{g};
  for (std::size_t k = 0; k < n; ++k) {
    programs.push_back(reflect);
    programs.push_back(minus_g);
  }
  const MixedState input{RegisterLayout{{"control", be.control_dim}, {"data", be.data_dim}},
                         tensor_product(outer(ket(be.control_dim, 0)), data_input.matrix)};
  return OaaOqtResult{oqt_sequence(programs, input, rng, forced_bits), programs.size()};
}

Matrix LCUPlan::combined() const {
  if (unitaries.empty()) throw InvalidArgument("LCUPlan: combined() needs explicit unitaries");
  Matrix c(data_dim, data_dim);
  for (std::size_t i = 0; i < terms(); ++i) {
    Matrix t = unitaries[i];
    t *= coefficients[i] / l1;
    c += t;
  }
  return c;
}

namespace {

LCUPlan plan_skeleton(std::vector<double> coefficients) {
  if (coefficients.empty()) throw InvalidArgument("LCU plan: no terms");
  LCUPlan plan;
  for (double c : coefficients) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("LCU plan: coefficients must be finite and >= 0");
    plan.l1 += c;
  }
  if (plan.l1 <= 0.0) throw InvalidArgument("LCU plan: all coefficients are zero");
  const std::size_t m = coefficients.size();
  Matrix col(m, 1);
  for (std::size_t i = 0; i < m; ++i) {
    const double a = std::sqrt(coefficients[i] / plan.l1);
    plan.alpha.push_back(a);
    plan.beta.push_back(a);
    col[i] = a;
  }
  plan.coefficients = std::move(coefficients);
  plan.prepare = complete_to_unitary(col);
  plan.unprepare = plan.prepare.adjoint();
  return plan;
}

Matrix direct_select(const std::vector<Matrix>& us) {
  const std::size_t m = us.size(), d = us.front().rows();
  Matrix sel(m * d, m * d);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) sel(k * d + i, k * d + j) = us[k](i, j);
  return sel;
}

}  // namespace

LCUPlan make_lcu_plan(std::vector<double> coefficients, std::vector<Matrix> unitaries) {
  if (coefficients.size() != unitaries.size()) throw InvalidArgument("LCU plan: one unitary per coefficient");
  LCUPlan plan = plan_skeleton(std::move(coefficients));
  plan.data_dim = unitaries.front().rows();
  for (const auto& u : unitaries) {
    if (u.rows() != plan.data_dim) throw DimensionError("LCU plan: unitaries differ in dimension");
    if (!is_unitary(u)) throw ValidationError("LCU plan: term is not unitary");
  }
  plan.unitaries = std::move(unitaries);
  return plan;
}

LCUPlan make_lcu_plan(std::vector<double> coefficients, std::vector<std::pair<BlackBox, BlackBox>> programs,
                      std::size_t d) {
  if (coefficients.size() != programs.size()) throw InvalidArgument("LCU plan: one program pair per coefficient");
  LCUPlan plan = plan_skeleton(std::move(coefficients));
  plan.data_dim = d;
  for (const auto& p : programs)
    if (p.first.dim() != d || p.second.dim() != d) throw DimensionError("LCU plan: black box dimension mismatch");
  plan.programs = std::move(programs);
  return plan;
}

Matrix lcu_circuit(const LCUPlan& plan) {
  if (plan.unitaries.empty()) throw InvalidArgument("lcu_circuit: plan has no explicit unitaries");
  const Matrix id = Matrix::identity(plan.data_dim);
  return tensor_product(plan.unprepare, id) * direct_select(plan.unitaries) * tensor_product(plan.prepare, id);
}

LcuResult lcu_apply(const LCUPlan& plan, const PureState& psi) {
  if (psi.amplitudes.rows() != plan.data_dim) throw DimensionError("lcu_apply: input has wrong dimension");
  const Matrix out = lcu_circuit(plan) * tensor_product(ket(plan.terms(), 0), psi.amplitudes);
  LcuResult r;
  r.post_state = normalized_block(out, 0, plan.data_dim, "data", &r.success);
  if (r.success < 1e-14) throw ValidationError("lcu_apply: degenerate superposition (zero success probability)");
  r.post_state.layout = psi.layout;
  return r;
}

LcuResult lcu_apply_oblivious(const LCUPlan& plan, const PureState& psi, const PureState& eta) {
  if (plan.programs.empty()) throw InvalidArgument("lcu_apply_oblivious: plan has no black-box programs");
  const std::size_t d = plan.data_dim, m = plan.terms();
  if (psi.amplitudes.rows() != d || eta.amplitudes.rows() != d)
    throw DimensionError("lcu_apply_oblivious: input has wrong dimension");
  std::vector<Matrix> projectors;
  for (std::size_t i = 0; i < m; ++i) projectors.push_back(outer(ket(m, i)));
  const Matrix select = restrict_to_flag(multiplexer_build(projectors, plan.programs, d));
  const Matrix id = Matrix::identity(d * d);
  const Matrix circuit = tensor_product(plan.unprepare, id) * select * tensor_product(plan.prepare, id);
  const Matrix out = circuit * tensor_product({ket(m, 0), psi.amplitudes, eta.amplitudes});
  LcuResult r;
  r.post_state = normalized_block(out, 0, d * d, "data", &r.success);
  if (r.success < 1e-14)
    throw ValidationError("lcu_apply_oblivious: degenerate superposition (zero success probability)");
  r.post_state.layout = RegisterLayout{{"data", d}, {"eta", d}};
  return r;
}

OqsResult oqs(OqsMode mode, const LCUPlan& plan, const std::optional<PureState>& input) {
  const std::size_t d = plan.data_dim, m = plan.terms();
  const Matrix v = lcu_circuit(plan);
  if (mode == OqsMode::kApply) {
    if (!input) throw InvalidArgument("oqs apply: an input state is required");
    const BlockEncoding be = block_encoding_check(v, m, d);
    const std::size_t n = exact_iterations(be.theta);
    const double target = std::numbers::pi / (2.0 * (2.0 * static_cast<double>(n) + 1.0));
    const Matrix lowered = tensor_product(amplitude_rotation(std::sin(target) / std::sin(be.theta)), be.g);
    const BlockEncoding boosted = block_encoding_check(lowered, 2 * m, d);
    const OaaResult r = oaa_amplify(boosted, n, *input);
    return OqsResult{be.p, r.success, n, PureState{input->layout, r.post_state.amplitudes}};
  }
  // Generate: amplitude amplification of V|0,0> onto ancilla |0>.
  const Matrix start = tensor_product(ket(m, 0), ket(d, 0));
  double p = 0.0;
  normalized_block(v * start, 0, d, "data", &p);
  if (p < 1e-14) throw ValidationError("oqs generate: degenerate superposition (zero success probability)");
  const double theta = std::asin(std::sqrt(std::min(1.0, p)));
  const std::size_t n = exact_iterations(theta);
  const double target = std::numbers::pi / (2.0 * (2.0 * static_cast<double>(n) + 1.0));
  const Matrix prep = tensor_product(amplitude_rotation(std::sin(target) / std::sin(theta)), v);
  const std::size_t dim = 2 * m * d;
  Matrix s0 = Matrix::identity(dim);
  s0(0, 0) = -1.0;
  Matrix sgood = Matrix::identity(dim);
  for (std::size_t i = 0; i < d; ++i) sgood(i, i) = -1.0;
  Matrix q = prep * s0 * prep.adjoint() * sgood;
  q *= -1.0;
  Matrix state = prep * ket(dim, 0);
  for (std::size_t k = 0; k < n; ++k) state = q * state;
  OqsResult r;
  r.initial_success = p;
  r.iterations = n;
  r.state = normalized_block(state, 0, d, "data", &r.success);
  return r;
}

}  // namespace dbqc
