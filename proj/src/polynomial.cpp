#include <Eigen/Eigenvalues>
#include <stdexcept>

#include "potlab/potential.hpp"

namespace potlab {

Polynomial::Polynomial(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back() == cplx{}) coeffs_.pop_back();
  if (coeffs_.empty()) throw std::invalid_argument("Polynomial: zero polynomial");
}

cplx Polynomial::operator()(cplx z) const {
  cplx v{};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * z + *it;
  return v;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  std::vector<cplx> c(coeffs_.size() + other.coeffs_.size() - 1);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < other.coeffs_.size(); ++j) c[i + j] += coeffs_[i] * other.coeffs_[j];
  }
  return Polynomial(std::move(c));
}

std::vector<cplx> Polynomial::roots() const {
  const std::size_t n = degree();
  if (n == 0) return {};
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < n; ++i) companion(i, n - 1) = -coeffs_[i] / leading();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Polynomial::roots: eigen solver failed");
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
  return out;
}

}  // namespace potlab
