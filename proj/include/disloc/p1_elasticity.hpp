#pragma once

#include "disloc/elastic_tensor.hpp"
#include "disloc/mesh.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace disloc {

/// Tensor action with the major-symmetrized entries; W only sees this part.
struct SymTensor {
  std::array<double, 16> c{};
  explicit SymTensor(const ElasticTensor& t);
  double operator()(int i, int j, int k, int l) const { return c[i * 8 + j * 4 + k * 2 + l]; }
  Matrix2 apply(const Matrix2& m) const;
};

/// P1 vector stiffness K_{(a,i),(b,k)} = ∫ C_ijkl d_j phi_a d_l phi_b; DOF 2a+i.
std::vector<Eigen::Triplet<double>> p1_stiffness(const TriMesh& mesh, const ElasticTensor& c);

struct NeumannSolve {
  std::vector<Vec2> u;
  double residual = 0.0;  // |K u + f| / |f|
};

/// Minimizes (1/2) u.K u + f.u: the rigid-mode part of f is projected out
/// (translations, plus the rotation for coercive tensors), those modes are
/// pinned, and the reduced system is factorized directly.
NeumannSolve p1_neumann_solve(const TriMesh& mesh, const ElasticTensor& c,
                              const std::vector<Eigen::Triplet<double>>& stiffness, Eigen::VectorXd f);

/// P1 Laplacian (scalar) with homogeneous Dirichlet data: returns the matrix
/// on interior nodes and the interior numbering (-1 on the boundary).
Eigen::SparseMatrix<double> p1_dirichlet_laplacian(const TriMesh& mesh, std::vector<int>& interior);

}  // namespace disloc
