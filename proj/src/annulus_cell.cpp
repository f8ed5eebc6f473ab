#include "disloc/annulus_cell.hpp"

#include "disloc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <string>

namespace disloc {

AnnulusMesh::AnnulusMesh(double inner_r, double outer_r, const CellMeshParams& p) : inner(inner_r), outer(outer_r) {
  if (!(inner > 0.0) || !(outer > inner)) throw ConfigError("annulus needs 0 < inner < outer");
  if (p.n_theta < 8) throw ConfigError("annulus mesh needs n_theta >= 8");
  n_theta = p.n_theta;
  h_theta = kTwoPi / n_theta;
  const double len = std::log(outer / inner);
  if (p.n_s > 0) {
    n_s = p.n_s;
  } else {
    if (!(p.aspect > 0.0)) throw ConfigError("annulus mesh aspect must be positive");
    n_s = std::max(1, static_cast<int>(std::ceil(len / (p.aspect * h_theta) - 1e-9)));
  }
  h_s = len / n_s;
  const double asp = aspect();
  if (asp > p.aspect_cap || asp < 1.0 / p.aspect_cap)
    throw ConfigError("annulus element aspect ratio outside the configured cap");
}

double AnnulusMesh::radius(int i) const { return inner * std::exp(i * h_s); }

namespace {

constexpr int kGaussS = 2;
constexpr int kGaussT = 3;

// Shape-function data of one theta column at one quadrature point.
struct QPoint {
  double a, b, w;      // local coordinates and weight (including h_s h_theta)
  Vec2 er, et;
  std::array<Vec2, 4> g;  // d_s N e_r + d_theta N e_theta for the 4 corners
};

// Corner order: (i,j), (i+1,j), (i,j+1), (i+1,j+1).
std::array<Vec2, 4> shape_grads(double a, double b, double hs, double ht, const Vec2& er, const Vec2& et) {
  const double ds[4] = {-(1 - b) / hs, (1 - b) / hs, -b / hs, b / hs};
  const double dt[4] = {-(1 - a) / ht, -a / ht, (1 - a) / ht, a / ht};
  std::array<Vec2, 4> g;
  for (int c = 0; c < 4; ++c) g[c] = ds[c] * er + dt[c] * et;
  return g;
}

std::vector<QPoint> column_points(const AnnulusMesh& m, int j) {
  const quad::Rule1D& gs = quad::gauss01(kGaussS);
  const quad::Rule1D& gt = quad::gauss01(kGaussT);
  std::vector<QPoint> pts;
  for (int qa = 0; qa < kGaussS; ++qa)
    for (int qb = 0; qb < kGaussT; ++qb) {
      QPoint q;
      q.a = gs.x[qa];
      q.b = gt.x[qb];
      q.w = gs.w[qa] * gt.w[qb] * m.h_s * m.h_theta;
      const double th = (j + q.b) * m.h_theta;
      q.er = unit_direction(th);
      q.et = rot90(q.er);
      q.g = shape_grads(q.a, q.b, m.h_s, m.h_theta, q.er, q.et);
      pts.push_back(q);
    }
  return pts;
}

std::array<int, 4> corners(const AnnulusMesh& m, int i, int j) {
  return {m.node(i, j), m.node(i + 1, j), m.node(i, j + 1), m.node(i + 1, j + 1)};
}

// r beta = xi ⊗ e_theta / 2 pi + sum_c u_c ⊗ g_c
Matrix2 scaled_beta(const Vec2& xi, const Vec2& et, const std::array<Vec2, 4>& g, const std::array<Vec2, 4>& u) {
  Matrix2 b = outer(xi, et) / kTwoPi;
  for (int c = 0; c < 4; ++c) b += outer(u[c], g[c]);
  return b;
}

CellSolution solve_annulus(const ElasticTensor& c, const Vec2& xi, double eps, double outer_r,
                           const CellMeshParams& p) {
  const auto t0 = std::chrono::steady_clock::now();
  CellSolution sol;
  sol.xi = xi;
  sol.eps = eps;
  sol.outer = outer_r;
  sol.mesh = AnnulusMesh(eps, outer_r, p);
  const AnnulusMesh& m = sol.mesh;
  const int ndof = 2 * m.n_nodes();
  sol.u.assign(static_cast<std::size_t>(m.n_nodes()), Vec2::Zero());

  if (xi.norm() == 0.0) {
    sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
  }

  // Element matrices depend only on the theta column.
  std::vector<std::vector<QPoint>> cols(static_cast<std::size_t>(m.n_theta));
  std::vector<Eigen::Matrix<double, 8, 8>> ke(static_cast<std::size_t>(m.n_theta));
  std::vector<Eigen::Matrix<double, 8, 1>> fe(static_cast<std::size_t>(m.n_theta));
  for (int j = 0; j < m.n_theta; ++j) {
    cols[j] = column_points(m, j);
    ke[j].setZero();
    fe[j].setZero();
    for (const QPoint& q : cols[j]) {
      const Matrix2 cg = c.apply(outer(xi, q.et) / kTwoPi);
      for (int a = 0; a < 4; ++a)
        for (int k = 0; k < 2; ++k) {
          fe[j](2 * a + k) += q.w * cg.row(k).dot(q.g[a]);
          for (int b = 0; b < 4; ++b)
            for (int l = 0; l < 2; ++l) {
              Matrix2 e = Matrix2::Zero();
              e.row(l) = q.g[b].transpose();
              ke[j](2 * a + k, 2 * b + l) += q.w * c.apply(e).row(k).dot(q.g[a]);
            }
        }
    }
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m.n_s) * m.n_theta * 64);
  Vector rhs = Vector::Zero(ndof);
  for (int i = 0; i < m.n_s; ++i)
    for (int j = 0; j < m.n_theta; ++j) {
      const auto nd = corners(m, i, j);
      for (int a = 0; a < 4; ++a)
        for (int k = 0; k < 2; ++k) {
          rhs(2 * nd[a] + k) -= fe[j](2 * a + k);
          for (int b = 0; b < 4; ++b)
            for (int l = 0; l < 2; ++l) trip.emplace_back(2 * nd[a] + k, 2 * nd[b] + l, ke[j](2 * a + k, 2 * b + l));
        }
    }
  SparseMatrix kmat(ndof, ndof);
  kmat.setFromTriplets(trip.begin(), trip.end());

  // Pin the mean displacement (exact null space in every mode).
  std::vector<RankOneTerm> pins;
  for (int k = 0; k < 2; ++k) {
    Vector g = Vector::Zero(ndof);
    for (int n = 0; n < m.n_nodes(); ++n) g(2 * n + k) = 1.0;
    pins.push_back({g, penalty_weight(kmat, g)});
  }

  const PcgResult res = pcg_solve(kmat, pins, rhs, p.rel_tol, p.max_iter);
  if (!res.converged) throw SolverError("cell solve did not converge (relative residual " +
                                        std::to_string(res.rel_residual) + ")");
  sol.residual = res.rel_residual;
  sol.iterations = res.iterations;
  for (int n = 0; n < m.n_nodes(); ++n) sol.u[n] = Vec2(res.x(2 * n), res.x(2 * n + 1));

  double energy = 0.0;
  for (int i = 0; i < m.n_s; ++i)
    for (int j = 0; j < m.n_theta; ++j) {
      const auto nd = corners(m, i, j);
      const std::array<Vec2, 4> u = {sol.u[nd[0]], sol.u[nd[1]], sol.u[nd[2]], sol.u[nd[3]]};
      for (const QPoint& q : cols[j]) energy += q.w * c.energy_density(scaled_beta(xi, q.et, q.g, u));
    }
  sol.energy = energy;
  sol.value = energy / std::abs(std::log(eps));
  sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

CellSolution solve_checked(const ElasticTensor& c, const Vec2& xi, double eps, double outer_r,
                           const CellMeshParams& p) {
  CellSolution sol = solve_annulus(c, xi, eps, outer_r, p);
  if (p.max_rel_error > 0.0 && sol.value > 0.0) {
    CellMeshParams coarse = p;
    coarse.n_theta = p.n_theta / 2;
    coarse.n_s = p.n_s > 0 ? std::max(1, p.n_s / 2) : 0;
    coarse.max_rel_error = 0.0;
    const CellSolution cs = solve_annulus(c, xi, eps, outer_r, coarse);
    // second-order convergence in h: error of the fine value ~ (coarse - fine) / 3
    sol.error_estimate = std::abs(cs.value - sol.value) / 3.0 / sol.value;
    if (sol.error_estimate > p.max_rel_error)
      throw SolverError("cell mesh too coarse: estimated relative error " + std::to_string(sol.error_estimate));
  }
  return sol;
}

}  // namespace

Matrix2 CellSolution::beta(const Vec2& x) const {
  const AnnulusMesh& m = mesh;
  const double r = x.norm();
  if (!(r >= m.inner * (1 - 1e-12) && r <= m.outer * (1 + 1e-12)))
    throw ConfigError("point outside the cell annulus");
  double th = std::atan2(x.y(), x.x());
  if (th < 0) th += kTwoPi;
  const double su = std::log(r / m.inner) / m.h_s;
  const int i = std::clamp(static_cast<int>(std::floor(su)), 0, m.n_s - 1);
  const double tu = th / m.h_theta;
  const int j = std::clamp(static_cast<int>(std::floor(tu)), 0, m.n_theta - 1);
  const double a = su - i, b = tu - j;
  const Vec2 er = unit_direction(th), et = rot90(er);
  const auto nd = corners(m, i, j);
  const std::array<Vec2, 4> uu = {u[nd[0]], u[nd[1]], u[nd[2]], u[nd[3]]};
  return scaled_beta(xi, et, shape_grads(a, b, m.h_s, m.h_theta, er, et), uu) / r;
}

Vec2 CellSolution::circulation(double r) const {
  // One midpoint per theta element: exact for the corrector (d_theta u is
  // constant along theta in each element) and for the K_hat part.
  Vec2 sum = Vec2::Zero();
  for (int j = 0; j < mesh.n_theta; ++j) {
    const double th = (j + 0.5) * mesh.h_theta;
    const Vec2 er = unit_direction(th);
    sum += beta(r * er) * rot90(er) * (r * mesh.h_theta);
  }
  return sum;
}

AngularProfile CellSolution::profile() const {
  const AnnulusMesh& m = mesh;
  const int i = std::clamp(static_cast<int>(std::lround(0.5 * m.n_s)), 1, m.n_s - 1);
  std::vector<Matrix2> samples(static_cast<std::size_t>(m.n_theta));
  for (int j = 0; j < m.n_theta; ++j) {
    const double th = j * m.h_theta;
    const Vec2 er = unit_direction(th), et = rot90(er);
    Matrix2 acc = Matrix2::Zero();
    // average over the four elements sharing node (i, j)
    for (int di = -1; di <= 0; ++di)
      for (int dj = -1; dj <= 0; ++dj) {
        const int ei = i + di, ej = (j + dj + m.n_theta) % m.n_theta;
        const auto nd = corners(m, ei, ej);
        const std::array<Vec2, 4> uu = {u[nd[0]], u[nd[1]], u[nd[2]], u[nd[3]]};
        acc += scaled_beta(xi, et, shape_grads(-di, -dj, m.h_s, m.h_theta, er, et), uu);
      }
    samples[j] = 0.25 * acc;
  }
  return AngularProfile(std::move(samples));
}

CellSolution solve_cell(const ElasticTensor& c, const Vec2& xi, double eps, const CellMeshParams& p) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("solve_cell needs 0 < eps < 1");
  return solve_checked(c, xi, eps, 1.0, p);
}

CellSolution solve_cell_hardcore(const ElasticTensor& c, const Vec2& xi, double eps, double rho,
                                 const CellMeshParams& p) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("solve_cell_hardcore needs 0 < eps < 1");
  if (!(rho > eps && rho <= 1.0)) throw ConfigError("solve_cell_hardcore needs eps < rho <= 1");
  return solve_checked(c, xi, eps, rho, p);
}

PsiLimit psi_limit(const ElasticTensor& c, const Vec2& xi, const CellMeshParams& p,
                   const std::vector<double>& eps_list, double monotone_tol) {
  if (xi.norm() == 0.0) throw ConfigError("psi_limit needs xi != 0");
  if (eps_list.size() < 2) throw ConfigError("psi_limit needs at least two eps values");
  PsiLimit out;
  out.eps = eps_list;
  std::vector<double> logs;
  for (double e : eps_list) {
    out.psi_eps.push_back(solve_cell(c, xi, e, p).value);
    logs.push_back(std::abs(std::log(e)));
  }
  // psi_eps = psi + A / L  =>  L psi_eps is affine in L with slope psi
  for (std::size_t k = 0; k + 1 < eps_list.size(); ++k) {
    const double num = logs[k + 1] * out.psi_eps[k + 1] - logs[k] * out.psi_eps[k];
    out.richardson.push_back(num / (logs[k + 1] - logs[k]));
  }
  out.value = out.richardson.back();
  const double scale = std::abs(out.value);
  int sign = 0;
  for (std::size_t k = 0; k + 1 < out.richardson.size(); ++k) {
    const double d = out.richardson[k + 1] - out.richardson[k];
    if (std::abs(d) <= monotone_tol * scale) continue;
    const int s = d > 0 ? 1 : -1;
    if (sign != 0 && s != sign) throw SolverError("psi extrapolation rejected: non-monotone estimates");
    sign = s;
  }
  for (std::size_t k = 0; k < eps_list.size(); ++k)
    out.rate_constant = std::max(out.rate_constant, std::abs(out.psi_eps[k] - out.value) * logs[k] / xi.squaredNorm());
  if (c.mode() == TensorMode::isotropic)
    out.profile_value = psi_from_profile(c, SingularField::beta_r2_isotropic(c, xi).profile());
  return out;
}

AngularProfile profile_from_cell(const ElasticTensor& c, const Vec2& xi, double eps, const CellMeshParams& p) {
  return solve_cell(c, xi, eps, p).profile().made_admissible(xi);
}

}  // namespace disloc
