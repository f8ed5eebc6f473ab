#include "disloc/singular_fields.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace disloc {

AngularProfile::AngularProfile(std::vector<Matrix2> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 4) throw ConfigError("angular profile needs at least 4 samples");
  prepare();
}

AngularProfile AngularProfile::sample(const std::function<Matrix2(double)>& fn, int n) {
  std::vector<Matrix2> s(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) s[j] = fn(kTwoPi * j / n);
  return AngularProfile(std::move(s));
}

void AngularProfile::prepare() {
  const std::size_t n = samples_.size();
  gr_.resize(n);
  gt_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2 er = unit_direction(angle(j));
    gr_[j] = samples_[j] * er;
    gt_[j] = samples_[j] * rot90(er);
  }
  dgr_.resize(n);
  dgt_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jp = (j + 1) % n, jm = (j + n - 1) % n;
    dgr_[j] = 0.5 * (gr_[jp] - gr_[jm]);
    dgt_[j] = 0.5 * (gt_[jp] - gt_[jm]);
  }
}

Matrix2 AngularProfile::at(double theta) const {
  const std::size_t n = samples_.size();
  double u = theta / kTwoPi;
  u -= std::floor(u);
  u *= static_cast<double>(n);
  std::size_t j = static_cast<std::size_t>(u);
  if (j >= n) j = n - 1;
  const double t = u - static_cast<double>(j);
  const std::size_t k = (j + 1) % n;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const Vec2 gr = h00 * gr_[j] + h10 * dgr_[j] + h01 * gr_[k] + h11 * dgr_[k];
  const Vec2 gt = h00 * gt_[j] + h10 * dgt_[j] + h01 * gt_[k] + h11 * dgt_[k];
  const Vec2 er = unit_direction(theta);
  return outer(gr, er) + outer(gt, rot90(er));
}

Vec2 AngularProfile::circulation() const {
  Vec2 sum = Vec2::Zero();
  for (const Vec2& g : gt_) sum += g;
  return sum * (kTwoPi / static_cast<double>(gt_.size()));
}

AngularProfile AngularProfile::made_admissible(const Vec2& xi) const {
  const std::size_t n = samples_.size();
  Vec2 mean_r = Vec2::Zero(), mean_t = Vec2::Zero();
  for (std::size_t j = 0; j < n; ++j) {
    mean_r += gr_[j];
    mean_t += gt_[j];
  }
  mean_r /= static_cast<double>(n);
  mean_t /= static_cast<double>(n);
  const Vec2 shift = xi / kTwoPi - mean_t;
  std::vector<Matrix2> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2 er = unit_direction(angle(j));
    out[j] = outer(mean_r, er) + outer(gt_[j] + shift, rot90(er));
  }
  return AngularProfile(std::move(out));
}

void AngularProfile::write_csv(std::ostream& os) const {
  char buf[160];
  for (std::size_t j = 0; j < samples_.size(); ++j) {
    const Matrix2& g = samples_[j];
    std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e,%.16e,%.16e\n", angle(j), g(0, 0), g(0, 1), g(1, 0), g(1, 1));
    os << buf;
  }
}

SingularField SingularField::toy(const Vec2& b, const Vec2& x0) {
  if (b.norm() == 0.0) throw ConfigError("toy field needs b != 0");
  SingularField f;
  f.kind_ = FieldKind::toy;
  f.x0_ = x0;
  f.xi_ = b;
  return f;
}

SingularField SingularField::k_hat(const Vec2& xi, const Vec2& x0) {
  if (xi.norm() == 0.0) throw ConfigError("k_hat needs xi != 0");
  SingularField f;
  f.kind_ = FieldKind::k_hat;
  f.x0_ = x0;
  f.xi_ = xi;
  return f;
}

SingularField SingularField::k_tilde(const Vec2& xi, const Vec2& x0, double r_eps) {
  if (xi.norm() == 0.0) throw ConfigError("k_tilde needs xi != 0");
  if (!(r_eps > 0.0)) throw ConfigError("k_tilde needs r_eps > 0");
  SingularField f;
  f.kind_ = FieldKind::k_tilde;
  f.x0_ = x0;
  f.xi_ = xi;
  f.r_eps_ = r_eps;
  return f;
}

SingularField SingularField::beta_r2_isotropic(const ElasticTensor& c, const Vec2& xi, const Vec2& x0) {
  if (c.mode() != TensorMode::isotropic)
    throw ConfigError("beta_r2 closed form is only available for isotropic tensors");
  if (xi.norm() == 0.0) throw ConfigError("beta_r2 needs xi != 0");
  SingularField f;
  f.kind_ = FieldKind::beta_r2_isotropic;
  f.x0_ = x0;
  f.xi_ = xi;
  f.amp_ = xi.norm();
  f.cos_ = xi.x() / f.amp_;
  f.sin_ = xi.y() / f.amp_;
  f.nu_ = c.poisson();
  return f;
}

SingularField SingularField::from_profile(AngularProfile profile, const Vec2& x0) {
  SingularField f;
  f.kind_ = FieldKind::profile;
  f.x0_ = x0;
  f.xi_ = profile.circulation();
  f.profile_ = std::make_shared<const AngularProfile>(std::move(profile));
  return f;
}

SingularField SingularField::moved_to(const Vec2& x0) const {
  SingularField f = *this;
  f.x0_ = x0;
  return f;
}

Matrix2 SingularField::operator()(const Vec2& x) const {
  if (singular() && (x - x0_).norm() == 0.0) throw std::domain_error("singular field evaluated at its center");
  return eval(x);
}

Matrix2 SingularField::eval(const Vec2& x) const {
  const Vec2 d = x - x0_;
  const double r2 = d.squaredNorm();
  switch (kind_) {
    case FieldKind::toy:
    case FieldKind::k_hat:
      return outer(xi_, rot90(d)) / (kTwoPi * r2);
    case FieldKind::k_tilde:
      if (r2 >= r_eps_ * r_eps_) return Matrix2::Zero();
      return outer(xi_, rot90(d)) / (kTwoPi * r_eps_ * r_eps_);
    case FieldKind::beta_r2_isotropic: {
      // Rotate into the frame where the charge is along e1.
      const double px = cos_ * d.x() + sin_ * d.y();
      const double py = -sin_ * d.x() + cos_ * d.y();
      const double q = 1.0 - nu_;
      const double k = (1.0 - 2.0 * nu_) / (2.0 * q);
      const double r4 = r2 * r2;
      const double a = amp_ / kTwoPi;
      Matrix2 b;
      b(0, 0) = a * (-py / r2 + py * (py * py - px * px) / (2.0 * q * r4));
      b(0, 1) = a * (px / r2 + px * (px * px - py * py) / (2.0 * q * r4));
      b(1, 0) = -a * (k * px / r2 + px * py * py / (q * r4));
      b(1, 1) = -a * (k * py / r2 - px * px * py / (q * r4));
      Matrix2 rot;
      rot << cos_, -sin_, sin_, cos_;
      return rot * b * rot.transpose();
    }
    case FieldKind::profile:
      return profile_->at(std::atan2(d.y(), d.x())) / std::sqrt(r2);
  }
  return Matrix2::Zero();
}

AngularProfile SingularField::profile(int n) const {
  if (kind_ == FieldKind::k_tilde) throw ConfigError("k_tilde is not homogeneous; no angular profile");
  if (kind_ == FieldKind::profile && static_cast<int>(profile_->size()) == n) return *profile_;
  return AngularProfile::sample([this](double th) { return eval(x0_ + unit_direction(th)); }, n);
}

Matrix2 evaluate_sum(std::span<const SingularField> fields, const Vec2& x) {
  Matrix2 s = Matrix2::Zero();
  for (const SingularField& f : fields) s += f(x);
  return s;
}

Vec2 circulation(const std::function<Matrix2(const Vec2&)>& field, const Vec2& center, double radius, int n_quad,
                 std::span<const Vec2> singular_points) {
  if (n_quad < 16) throw ConfigError("circulation needs n_quad >= 16");
  if (!(radius > 0.0)) throw ConfigError("circulation needs radius > 0");
  for (const Vec2& p : singular_points)
    if (std::abs((p - center).norm() - radius) < 1e-9 * radius)
      throw ConfigError("circulation circle passes through a singular point");
  Vec2 sum = Vec2::Zero();
  for (int j = 0; j < n_quad; ++j) {
    const double th = kTwoPi * j / n_quad;
    const Vec2 er = unit_direction(th);
    sum += field(center + radius * er) * rot90(er);
  }
  return sum * (radius * kTwoPi / n_quad);
}

Vec2 circulation(const SingularField& field, const Vec2& center, double radius, int n_quad) {
  std::vector<Vec2> pts;
  if (field.singular()) pts.push_back(field.center());
  return circulation([&field](const Vec2& x) { return field(x); }, center, radius, n_quad, pts);
}

Vec2 circulation(std::span<const SingularField> fields, const Vec2& center, double radius, int n_quad) {
  std::vector<Vec2> pts;
  for (const SingularField& f : fields)
    if (f.singular()) pts.push_back(f.center());
  return circulation([fields](const Vec2& x) { return evaluate_sum(fields, x); }, center, radius, n_quad, pts);
}

double psi_from_profile(const ElasticTensor& c, const AngularProfile& g) {
  double s = 0.0;
  for (const Matrix2& m : g.samples()) s += c.energy_density(m);
  return s * kTwoPi / static_cast<double>(g.size());
}

}  // namespace disloc
