#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "dataset.hpp"
#include "smooth2d.hpp"

namespace llfpca {

// Quadrature-discretized spectral decomposition of a covariance surface:
// eigenvalues in nonincreasing order and L2-orthonormal eigenfunction samples.
struct EigenSystem {
  EvaluationGrid grid;
  std::vector<double> eigenvalues;
  std::vector<Eigen::VectorXd> eigenfunctions;

  std::size_t retained() const { return eigenvalues.size(); }
};

// Analytic reference system sampled on the same grid, for error reports.
struct ModelEigenSystem {
  std::vector<double> eigenvalues;
  std::vector<Eigen::VectorXd> eigenfunctions;
};

struct ComponentErrors {
  double eigenvalue_abs_error = 0.0;
  double l2_error = 0.0;   // quadrature L2 norm after sign alignment
  double sup_error = 0.0;  // grid sup norm after sign alignment
};

// Flips `estimated` to whichever sign minimizes quadrature L2 distance to
// `reference`; exact ties keep +1.
inline Eigen::VectorXd align_sign(const Eigen::VectorXd& estimated,
                                  const Eigen::VectorXd& reference,
                                  const Eigen::VectorXd& weights) {
  if (estimated.size() != reference.size() || estimated.size() != weights.size())
    throw LengthMismatch(static_cast<std::size_t>(estimated.size()),
                         static_cast<std::size_t>(reference.size()));
  // ||e - r||^2 - ||-e - r||^2 = -4 <e, r>, so the sign of the weighted inner
  // product decides; zero keeps +1.
  double inner = (weights.array() * estimated.array() * reference.array()).sum();
  return inner >= 0.0 ? estimated : Eigen::VectorXd(-estimated);
}

// Solves the integral-operator eigenproblem by quadrature: with
// W = diag(weights), eigendecomposes the symmetric W^{1/2} M W^{1/2} and maps
// unit eigenvectors back through W^{-1/2}, giving L2-orthonormal samples.
// Retains at most `max_components` eigenvalues, dropping nonpositive ones and
// those below 1e-10 of the largest.
inline EigenSystem decompose_matrix(const EvaluationGrid& grid, const Eigen::MatrixXd& values,
                                    int max_components) {
  const Eigen::Index G = values.rows();
  if (values.cols() != G || static_cast<std::size_t>(G) != grid.size())
    throw GridMismatch("covariance matrix does not match grid size");
  double asym = (values - values.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8) throw AsymmetricInput(asym);
  if (max_components < 1) throw InvalidDataset("component count must be positive");

  Eigen::VectorXd sqw(G), isqw(G);
  for (Eigen::Index g = 0; g < G; ++g) {
    sqw[g] = std::sqrt(grid.weights()[static_cast<std::size_t>(g)]);
    isqw[g] = sqw[g] > 0.0 ? 1.0 / sqw[g] : 0.0;
  }
  Eigen::MatrixXd sym = sqw.asDiagonal() * values * sqw.asDiagonal();
  sym = ((sym + sym.transpose()) / 2.0).eval();  // scrub rounding asymmetry
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("EigenSolverFailure", "eigensolver failed");

  // Solver returns ascending order; walk from the back.
  double top = solver.eigenvalues()[G - 1];
  if (!(top > 0.0)) throw NoPositiveEigenvalues();
  double threshold = 1e-10 * top;

  EigenSystem out{grid, {}, {}};
  for (Eigen::Index r = G - 1; r >= 0 && static_cast<int>(out.retained()) < max_components; --r) {
    double lambda = solver.eigenvalues()[r];
    if (!(lambda > threshold)) break;
    Eigen::VectorXd psi = isqw.asDiagonal() * solver.eigenvectors().col(r);
    // Deterministic canonical sign: nonnegative quadrature integral, falling
    // back to the first non-tiny sample.
    double integral = 0.0;
    for (Eigen::Index g = 0; g < G; ++g)
      integral += grid.weights()[static_cast<std::size_t>(g)] * psi[g];
    double pick = integral;
    if (std::abs(integral) < 1e-12) {
      for (Eigen::Index g = 0; g < G; ++g)
        if (std::abs(psi[g]) > 1e-8) {
          pick = psi[g];
          break;
        }
    }
    if (pick < 0.0) psi = -psi;
    out.eigenvalues.push_back(lambda);
    out.eigenfunctions.push_back(std::move(psi));
  }
  if (out.retained() == 0) throw NoPositiveEigenvalues();
  return out;
}

inline EigenSystem decompose(const CovarianceEstimate& cov, int max_components) {
  return decompose_matrix(cov.raw.grid, cov.values, max_components);
}

// Rank-J reconstruction: sum of omega_j psi_j psi_j^T over the first J
// retained components.
inline Eigen::MatrixXd reconstruct(const EigenSystem& eig, int J) {
  if (J < 0 || static_cast<std::size_t>(J) > eig.retained())
    throw TooManyComponents(J, eig.retained());
  const Eigen::Index G = static_cast<Eigen::Index>(eig.grid.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(G, G);
  for (int j = 0; j < J; ++j)
    out += eig.eigenvalues[static_cast<std::size_t>(j)] *
           (eig.eigenfunctions[static_cast<std::size_t>(j)] *
            eig.eigenfunctions[static_cast<std::size_t>(j)].transpose());
  return out;
}

// Per-component comparison against an analytic reference on the same grid.
inline std::vector<ComponentErrors> eigen_errors(const EigenSystem& eig,
                                                 const ModelEigenSystem& truth, int j0) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(eig.grid.size()));
  for (std::size_t g = 0; g < eig.grid.size(); ++g)
    w[static_cast<Eigen::Index>(g)] = eig.grid.weights()[g];

  std::vector<ComponentErrors> out;
  for (int j = 0; j < j0; ++j) {
    auto idx = static_cast<std::size_t>(j);
    if (idx >= eig.retained() || idx >= truth.eigenvalues.size()) break;
    if (truth.eigenfunctions[idx].size() != static_cast<Eigen::Index>(eig.grid.size()))
      throw GridMismatch("reference eigenfunctions sampled on a different grid");
    ComponentErrors ce;
    ce.eigenvalue_abs_error = std::abs(eig.eigenvalues[idx] - truth.eigenvalues[idx]);
    Eigen::VectorXd aligned = align_sign(eig.eigenfunctions[idx], truth.eigenfunctions[idx], w);
    Eigen::VectorXd diff = aligned - truth.eigenfunctions[idx];
    ce.l2_error = std::sqrt((w.array() * diff.array().square()).sum());
    ce.sup_error = diff.cwiseAbs().maxCoeff();
    out.push_back(ce);
  }
  return out;
}

}  // namespace llfpca
