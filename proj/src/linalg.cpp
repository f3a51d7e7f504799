#include "sqconv/linalg.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>

namespace sqconv {

namespace {

Eigen::EigenSolver<MatrixXd> solve(const MatrixXd& m, bool vectors) {
  if (m.rows() != m.cols()) throw InvalidArgument("eigenvalues need a square matrix");
  if (m.rows() > kMaxEigenDimension) throw InvalidArgument("matrix too large for dense eigensolver");
  if (!m.allFinite()) throw NumericalError(Failure::NotConverged, "matrix has non-finite entries");
  Eigen::EigenSolver<MatrixXd> solver(m, vectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError(Failure::NotConverged, "QR iteration did not converge");
  }
  return solver;
}

}  // namespace

ComplexList eigenvalues(const MatrixXd& m) {
  if (m.size() == 0) return {};
  const auto solver = solve(m, false);
  ComplexList out(solver.eigenvalues().data(), solver.eigenvalues().data() + m.rows());
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return out;
}

double eigenpair_residual(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  const auto solver = solve(m, true);
  const Eigen::MatrixXcd mc = m.cast<Complex>();
  const double scale = std::max(m.norm(), 1e-300);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const Eigen::VectorXcd v = solver.eigenvectors().col(i);
    const Eigen::VectorXcd r = mc * v - solver.eigenvalues()(i) * v;
    worst = std::max(worst, r.norm() / (scale * std::max(v.norm(), 1e-300)));
  }
  return worst;
}

int count_unstable(const ComplexList& eigs, double threshold) {
  return static_cast<int>(
      std::count_if(eigs.begin(), eigs.end(), [&](const Complex& z) { return z.real() > threshold; }));
}

}  // namespace sqconv
