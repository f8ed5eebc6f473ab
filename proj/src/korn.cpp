#include "disloc/korn.hpp"

#include "disloc/parallel.hpp"
#include "disloc/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <sstream>

namespace disloc {

double KornSample::skew2_normalized() const {
  return std::max(0.0, skew2 - area * skew_avg.squaredNorm());
}

double korn_ratio(const KornSample& s) {
  const double den = s.sym2 + s.mass * s.mass;
  if (!(den > 0.0)) return 0.0;
  return s.skew2_normalized() / den;
}

namespace {

struct Accum {
  double skew2 = 0.0, sym2 = 0.0, area = 0.0;
  Matrix2 skew_int = Matrix2::Zero();
  void add(const Matrix2& b, double w) {
    const Matrix2 k = skew(b);
    skew2 += w * k.squaredNorm();
    sym2 += w * sym(b).squaredNorm();
    skew_int += w * k;
    area += w;
  }
  KornSample finish(double mass) const {
    KornSample s;
    s.skew2 = skew2;
    s.sym2 = sym2;
    s.area = area;
    s.skew_avg = area > 0.0 ? Matrix2(skew_int / area) : Matrix2::Zero();
    s.mass = mass;
    return s;
  }
};

struct QuadPoint {
  Vec2 x;
  double w;
};

std::vector<QuadPoint> domain_points(const Domain2D& omega, double h, int rule_order) {
  const TriMesh mesh = TriMesh::build(omega, h);
  const quad::TriRule& rule = quad::triangle_rule(rule_order);
  std::vector<QuadPoint> pts;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const auto c = mesh.corners(static_cast<int>(t));
    const double jac = 2.0 * mesh.area(static_cast<int>(t));
    for (std::size_t q = 0; q < rule.w.size(); ++q)
      pts.push_back({c[0] + rule.a[q] * (c[1] - c[0]) + rule.b[q] * (c[2] - c[0]), rule.w[q] * jac});
  }
  return pts;
}

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t sample_seed(std::uint64_t seed, KornFamily family, std::size_t index) {
  return splitmix(splitmix(seed) ^ splitmix(static_cast<std::uint64_t>(family) * 0x100000001B3ull + index));
}

// Polynomial fields beta = sum_k c_k Phi_k in scaled coordinates about the
// bbox center: gradients of monomials x^i y^j (0 < i + j <= degree) per row,
// or symmetric matrices with monomial entries (i + j <= degree). Integrals are
// kept as quadratic forms in c, and samples draw c = W z with z standard
// normal and W orthonormalizing ∫|beta|^2, so the ensemble does not depend on
// the monomial basis.
struct PolyBasis {
  Eigen::MatrixXd skew_gram, sym_gram, whiten;
  std::vector<Matrix2> skew_int;
  double area = 0.0;
};

std::vector<Matrix2> basis_values(KornFamily family, int degree, const Vec2& z, double s) {
  std::vector<Matrix2> out;
  auto mono = [&](int i, int j) { return std::pow(z.x(), i) * std::pow(z.y(), j); };
  for (int i = 0; i <= degree; ++i)
    for (int j = 0; i + j <= degree; ++j) {
      if (family == KornFamily::gradient_polynomials) {
        if (i + j == 0) continue;
        const Vec2 g((i > 0 ? i * mono(i - 1, j) : 0.0) / s, (j > 0 ? j * mono(i, j - 1) : 0.0) / s);
        for (int row = 0; row < 2; ++row) {
          Matrix2 m = Matrix2::Zero();
          m.row(row) = g.transpose();
          out.push_back(m);
        }
      } else {
        const double v = mono(i, j);
        Matrix2 a, b, c;
        a << v, 0.0, 0.0, 0.0;
        b << 0.0, 0.0, 0.0, v;
        c << 0.0, v, v, 0.0;
        out.push_back(a);
        out.push_back(b);
        out.push_back(c);
      }
    }
  return out;
}

PolyBasis poly_basis(KornFamily family, int degree, const std::vector<QuadPoint>& pts, const Domain2D& omega) {
  const auto [lo, hi] = omega.bbox();
  const Vec2 c = 0.5 * (lo + hi);
  const double s = 0.5 * (hi - lo).maxCoeff();
  const std::size_t n = basis_values(family, degree, Vec2::Zero(), 1.0).size();
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n, n);
  PolyBasis pb;
  pb.skew_gram = Eigen::MatrixXd::Zero(n, n);
  pb.sym_gram = Eigen::MatrixXd::Zero(n, n);
  pb.skew_int.assign(n, Matrix2::Zero());
  for (const QuadPoint& q : pts) {
    const auto phi = basis_values(family, degree, (q.x - c) / s, s);
    std::vector<Matrix2> k(n), e(n);
    for (std::size_t a = 0; a < n; ++a) {
      k[a] = skew(phi[a]);
      e[a] = sym(phi[a]);
      pb.skew_int[a] += q.w * k[a];
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        const double kk = q.w * (k[a].array() * k[b].array()).sum();
        const double ee = q.w * (e[a].array() * e[b].array()).sum();
        pb.skew_gram(a, b) += kk;
        pb.sym_gram(a, b) += ee;
        full(a, b) += kk + ee;
      }
    pb.area += q.w;
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < a; ++b) {
      pb.skew_gram(a, b) = pb.skew_gram(b, a);
      pb.sym_gram(a, b) = pb.sym_gram(b, a);
      full(a, b) = full(b, a);
    }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(full);
  pb.whiten = es.eigenvectors() * es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse().asDiagonal();
  return pb;
}

// Whitened form of ∫|beta_skew - A|^2.
Eigen::MatrixXd skew_normalized_form(const PolyBasis& pb) {
  const Eigen::Index n = pb.whiten.rows();
  Eigen::MatrixXd q = pb.skew_gram;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      q(a, b) -= (pb.skew_int[static_cast<std::size_t>(a)].array() * pb.skew_int[static_cast<std::size_t>(b)].array())
                     .sum() /
                 pb.area;
  return pb.whiten.transpose() * q * pb.whiten;
}

KornSample polynomial_sample(std::uint64_t sseed, const PolyBasis& pb, int refine_steps) {
  std::mt19937_64 rng(sseed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXd z(pb.whiten.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = nd(rng);
  if (refine_steps > 0) {
    const Eigen::MatrixXd q = skew_normalized_form(pb);
    for (int k = 0; k < refine_steps; ++k) z = (q * z).normalized();
  }
  const Eigen::VectorXd c = pb.whiten * z;
  KornSample s;
  s.skew2 = c.dot(pb.skew_gram * c);
  s.sym2 = c.dot(pb.sym_gram * c);
  s.area = pb.area;
  Matrix2 k = Matrix2::Zero();
  for (Eigen::Index i = 0; i < c.size(); ++i) k += c(i) * pb.skew_int[static_cast<std::size_t>(i)];
  s.skew_avg = k / pb.area;
  return s;
}

std::string descriptor(KornFamily f, std::uint64_t seed, std::size_t index) {
  std::ostringstream os;
  os << "family=" << to_string(f) << " seed=" << seed << " index=" << index;
  return os.str();
}

}  // namespace

KornSample korn_sample(const LimitStrain& beta, double mass, const Domain2D& omega, double h, int rule_order) {
  Accum acc;
  for (const QuadPoint& q : domain_points(omega, h, rule_order)) acc.add(beta(q.x), q.w);
  return acc.finish(mass);
}

KornSample korn_sample(const StrainField& field, const DislocationConfig& mu, const SimParams& p) {
  Accum acc;
  const Matrix2 a = field.skew_offset();
  for (const SingularField& s : field.singular())
    quad::integrate_annulus(s.center(), field.eps(), mu.rho, p.self_ds, p.self_theta_panels, p.self_gauss,
                            [&](const Vec2& x, double w) {
                              acc.add(field.singular_part(x) + field.corrector_gradient(x) - a, w);
                            });
  field.integrate(p, mu.rho, [&](const Vec2& x, double w, int tri) {
    acc.add(field.singular_part(x) + field.corrector_gradient(tri) - a, w);
  });
  return acc.finish(mu.total_variation());
}

std::string to_string(KornFamily f) {
  switch (f) {
    case KornFamily::symmetric: return "symmetric";
    case KornFamily::gradient_polynomials: return "gradient-polynomials";
    case KornFamily::dislocation_fields: return "dislocation-fields";
    case KornFamily::mixed: return "mixed";
  }
  return "symmetric";
}

KornFamily korn_family_from_string(const std::string& s) {
  for (KornFamily f : {KornFamily::symmetric, KornFamily::gradient_polynomials, KornFamily::dislocation_fields,
                       KornFamily::mixed})
    if (to_string(f) == s) return f;
  throw ConfigError("unknown Korn family '" + s + "'");
}

DislocationConfig random_configuration(std::uint64_t sseed, const Domain2D& omega, const KornOptions& opt) {
  std::mt19937_64 rng(sseed);
  const auto [lo, hi] = omega.bbox();
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
  std::uniform_int_distribution<int> pick(0, 3);
  const BurgersSystem s = BurgersSystem::square();
  DislocationConfig cfg;
  cfg.eps = opt.eps;
  cfg.rho = opt.rho;
  const double margin = opt.rho * (1.0 + 1e-9);
  int attempts = 0;
  while (static_cast<int>(cfg.count()) < opt.dislocations) {
    if (++attempts > 100000) throw ConfigError("cannot place the requested dislocations with this hard-core radius");
    const Vec2 x(ux(rng), uy(rng));
    if (!omega.contains(x) || omega.boundary_distance(x) < margin) continue;
    bool ok = true;
    for (const Dislocation& d : cfg.dislocations)
      if ((d.x - x).norm() < 2.0 * margin) ok = false;
    if (!ok) continue;
    cfg.dislocations.push_back({x, s.vectors()[pick(rng)]});
  }
  return cfg;
}

namespace {

KornSample dislocation_sample(std::uint64_t sseed, const Domain2D& omega, const KornOptions& opt) {
  const DislocationConfig cfg = random_configuration(sseed, omega, opt);
  SimParams p = opt.sim;
  p.direct_total = false;
  const SimResult r = minimize_energy(omega, cfg, opt.tensor, p);
  return korn_sample(r.field, cfg, p);
}

}  // namespace

KornSample korn_replay(KornFamily family, std::uint64_t seed, std::size_t index, const Domain2D& omega,
                       const KornOptions& opt) {
  if (family == KornFamily::mixed) throw ConfigError("replay a mixed sample through its member family");
  KornSample s = family == KornFamily::dislocation_fields
                     ? dislocation_sample(sample_seed(seed, family, index), omega, opt)
                     : polynomial_sample(sample_seed(seed, family, index),
                                         poly_basis(family, opt.degree, domain_points(omega, opt.h, 4), omega),
                                         opt.refine_steps);
  s.descriptor = descriptor(family, seed, index);
  return s;
}

KornSweep korn_sweep(KornFamily family, std::size_t n_samples, std::uint64_t seed, const Domain2D& omega,
                     const KornOptions& opt) {
  if (n_samples < 1) throw ConfigError("korn_sweep needs at least one sample");
  // (member family, index) list
  std::vector<std::pair<KornFamily, std::size_t>> plan;
  if (family == KornFamily::mixed) {
    for (std::size_t i = 0; i < n_samples; ++i) plan.emplace_back(KornFamily::gradient_polynomials, i);
    for (int j = 0; j < opt.mixed_dislocation_samples; ++j)
      plan.emplace_back(KornFamily::dislocation_fields, static_cast<std::size_t>(j));
  } else {
    for (std::size_t i = 0; i < n_samples; ++i) plan.emplace_back(family, i);
  }
  const KornFamily poly_family = family == KornFamily::symmetric ? family : KornFamily::gradient_polynomials;
  const PolyBasis pb = family == KornFamily::dislocation_fields
                           ? PolyBasis{}
                           : poly_basis(poly_family, opt.degree, domain_points(omega, opt.h, 4), omega);

  const auto samples = parallel_map(plan.size(), opt.threads, [&](std::size_t k) {
    const auto [f, i] = plan[k];
    const std::uint64_t ss = sample_seed(seed, f, i);
    KornSample s = f == KornFamily::dislocation_fields ? dislocation_sample(ss, omega, opt)
                                                        : polynomial_sample(ss, pb, opt.refine_steps);
    s.descriptor = descriptor(f, seed, i);
    return s;
  });

  KornSweep out;
  out.family = family;
  out.seed = seed;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double r = korn_ratio(samples[k]);
    out.ratios.push_back(r);
    out.descriptors.push_back(samples[k].descriptor);
    if (k == 0 || r > out.empirical_c) {
      out.empirical_c = r;
      out.worst_index = k;
      out.worst_descriptor = samples[k].descriptor;
    }
  }
  return out;
}

}  // namespace disloc
