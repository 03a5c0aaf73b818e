#include "telesim/schmidt.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace telesim {

namespace {

// Multiplies column k of m by phase.
void scale_column(Eigen::Matrix2cd& m, int k, const Cplx& phase) {
  m(0, k) *= phase;
  m(1, k) *= phase;
}

CMatrix to_cmatrix(const Eigen::Matrix2cd& m) {
  CMatrix out(2);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) out.at(r, c) = m(r, c);
  }
  return out;
}

}  // namespace

SchmidtPair::SchmidtPair(double a, double b) : a_(a), b_(b) {
  if (!(b >= 0.0) || !(a >= b)) {
    throw std::invalid_argument("Schmidt coefficients must satisfy a >= b >= 0");
  }
  if (std::abs(a * a + b * b - 1.0) > kNormTol) {
    throw std::invalid_argument("Schmidt coefficients must satisfy a^2 + b^2 = 1");
  }
}

SchmidtPair SchmidtPair::from_b_squared(double b_squared) {
  if (!(b_squared >= 0.0) || b_squared > 0.5 + 1e-15) {
    throw std::invalid_argument("b^2 must lie in [0, 1/2]");
  }
  b_squared = std::min(b_squared, 0.5);
  return SchmidtPair(std::sqrt(1.0 - b_squared), std::sqrt(b_squared));
}

std::pair<SchmidtPair, LocalFrame> schmidt_decompose(const PureState& state) {
  if (state.num_qubits() != 2) {
    throw std::invalid_argument("Schmidt decomposition is defined for two qubits");
  }
  if (!state.normalized()) {
    throw std::invalid_argument("Schmidt decomposition requires a normalized state");
  }

  // Coefficient matrix C(i, j) = <ij|psi> with i on qubit 0, j on qubit 1;
  // little-endian index is i + 2j.
  Eigen::Matrix2cd coeff;
  coeff(0, 0) = state.amp(0);
  coeff(1, 0) = state.amp(1);
  coeff(0, 1) = state.amp(2);
  coeff(1, 1) = state.amp(3);

  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(coeff,
                                         Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix2cd u = svd.matrixU();
  Eigen::Matrix2cd v = svd.matrixV();
  const double a = svd.singularValues()(0);
  const double b = svd.singularValues()(1);

  // Pin the residual per-column phase freedom: rotate each left singular
  // vector so its first component of magnitude > tol is real positive, and
  // rotate the matching right vector the opposite way to keep C = U S V†.
  for (int k = 0; k < 2; ++k) {
    Cplx pivot = u(0, k);
    if (std::abs(pivot) <= 1e-12) pivot = u(1, k);
    if (std::abs(pivot) > 1e-12) {
      const Cplx phase = std::conj(pivot) / std::abs(pivot);
      scale_column(u, k, phase);
      scale_column(v, k, std::conj(phase));
    }
  }

  // C = U S V†  =>  (U† on qubit 0) ⊗ (Vᵀ on qubit 1) maps the state to S.
  LocalFrame frame{to_cmatrix(u.adjoint()), to_cmatrix(v.transpose())};
  return {SchmidtPair(std::min(a, 1.0), std::max(b, 0.0)), std::move(frame)};
}

double entanglement_entropy(const SchmidtPair& p) {
  const auto term = [](double w) { return w > 0.0 ? -w * std::log2(w) : 0.0; };
  const double e = term(p.a() * p.a()) + term(p.b() * p.b());
  return std::clamp(e, 0.0, 1.0);
}

double channel_width(const SchmidtPair& p) { return 2.0 * p.b() * p.b(); }

PureState channel_pair_state(const SchmidtPair& p) {
  return PureState::from_amps(2, {Cplx{p.a()}, Cplx{}, Cplx{}, Cplx{p.b()}}, true);
}

}  // namespace telesim
