#include "skewmix/compact_group.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "skewmix/errors.hpp"

namespace skewmix {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
using cd = std::complex<double>;

double reduce_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

Eigen::Vector4d hamilton(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
  const Eigen::Vector3d va = a.tail<3>();
  const Eigen::Vector3d vb = b.tail<3>();
  Eigen::Vector4d out;
  out[0] = a[0] * b[0] - va.dot(vb);
  out.tail<3>() = a[0] * vb + b[0] * va + va.cross(vb);
  return out;
}

Eigen::Vector4d axis_quaternion(int axis, double angle) {
  Eigen::Vector4d q = Eigen::Vector4d::Zero();
  q[0] = std::cos(0.5 * angle);
  q[1 + axis] = std::sin(0.5 * angle);
  return q;
}

// exp(-i theta H) for Hermitian H.
Eigen::MatrixXcd unitary_exp(const Eigen::MatrixXcd& h, double theta) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::MatrixXcd& v = es.eigenvectors();
  Eigen::VectorXcd phases(h.rows());
  for (Eigen::Index a = 0; a < h.rows(); ++a) {
    phases[a] = std::exp(cd(0.0, -theta * es.eigenvalues()[a]));
  }
  return v * phases.asDiagonal() * v.adjoint();
}

void require_same(GroupKind a, GroupKind b) {
  if (a != b) throw std::invalid_argument("group kinds differ");
}

// Gauss-Legendre nodes/weights on [-1,1] by Golub-Welsch.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = b;
    jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  x.resize(n);
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    x[k] = es.eigenvalues()[k];
    const double v0 = es.eigenvectors()(0, k);
    w[k] = 2.0 * v0 * v0;
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Unit test directions for directional derivatives.
std::vector<AlgebraElement> unit_directions(GroupKind kind) {
  if (kind == GroupKind::SO2) return {AlgebraElement::so2(1.0)};
  std::vector<AlgebraElement> dirs;
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e[k] = 1.0;
    dirs.push_back(AlgebraElement::su2(e));
  }
  for (const auto& p : sphere_mesh(24)) dirs.push_back(AlgebraElement::su2(p));
  return dirs;
}

}  // namespace

std::string to_string(GroupKind kind) { return kind == GroupKind::SO2 ? "SO2" : "SU2"; }

GroupKind group_kind_from_string(const std::string& name) {
  if (name == "SO2" || name == "so2") return GroupKind::SO2;
  if (name == "SU2" || name == "su2") return GroupKind::SU2;
  throw std::invalid_argument("unknown group backend: " + name);
}

int algebra_dim(GroupKind kind) { return kind == GroupKind::SO2 ? 1 : 3; }

// ---------------------------------------------------------------------------
// GroupElement

GroupElement GroupElement::identity(GroupKind kind) {
  return {kind, 0.0, Eigen::Vector4d(1, 0, 0, 0)};
}

GroupElement GroupElement::rotation(double angle) {
  return {GroupKind::SO2, reduce_angle(angle), Eigen::Vector4d(1, 0, 0, 0)};
}

GroupElement GroupElement::from_quaternion(const Eigen::Vector4d& q) {
  const double n = q.norm();
  if (!(n > 0.0)) throw DomainError("zero quaternion");
  return {GroupKind::SU2, 0.0, q / n};
}

double GroupElement::angle() const {
  if (kind_ != GroupKind::SO2) throw std::logic_error("angle() on SU2 element");
  return angle_;
}

const Eigen::Vector4d& GroupElement::quaternion() const {
  if (kind_ != GroupKind::SU2) throw std::logic_error("quaternion() on SO2 element");
  return q_;
}

Eigen::Matrix2cd GroupElement::su2_matrix() const {
  const auto& q = quaternion();
  Eigen::Matrix2cd u;
  u << cd(q[0], -q[3]), cd(-q[2], -q[1]), cd(q[2], -q[1]), cd(q[0], q[3]);
  return u;
}

GroupElement operator*(const GroupElement& g, const GroupElement& h) {
  return group::mul(g, h);
}

// ---------------------------------------------------------------------------
// AlgebraElement

AlgebraElement AlgebraElement::zero(GroupKind kind) { return {kind, Eigen::Vector3d::Zero()}; }
AlgebraElement AlgebraElement::so2(double x) { return {GroupKind::SO2, Eigen::Vector3d(x, 0, 0)}; }
AlgebraElement AlgebraElement::su2(double x, double y, double z) {
  return {GroupKind::SU2, Eigen::Vector3d(x, y, z)};
}
AlgebraElement AlgebraElement::su2(const Eigen::Vector3d& v) { return {GroupKind::SU2, v}; }

double AlgebraElement::norm() const {
  return kind == GroupKind::SO2 ? std::abs(coords[0]) : coords.norm();
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
  require_same(kind, o.kind);
  return {kind, coords + o.coords};
}
AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
  require_same(kind, o.kind);
  return {kind, coords - o.coords};
}
AlgebraElement AlgebraElement::operator*(double s) const { return {kind, coords * s}; }
AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
  require_same(kind, o.kind);
  coords += o.coords;
  return *this;
}

// ---------------------------------------------------------------------------
// group operations

namespace group {

GroupElement mul(const GroupElement& g, const GroupElement& h) {
  require_same(g.kind(), h.kind());
  if (g.kind() == GroupKind::SO2) return GroupElement::rotation(g.angle() + h.angle());
  return GroupElement::from_quaternion(hamilton(g.quaternion(), h.quaternion()));
}

GroupElement inverse(const GroupElement& g) {
  if (g.kind() == GroupKind::SO2) return GroupElement::rotation(-g.angle());
  Eigen::Vector4d q = g.quaternion();
  q.tail<3>() *= -1.0;
  return GroupElement::from_quaternion(q);
}

GroupElement exp(const AlgebraElement& x) {
  if (x.kind == GroupKind::SO2) return GroupElement::rotation(x.coords[0]);
  const double theta = x.coords.norm();
  Eigen::Vector4d q;
  q[0] = std::cos(0.5 * theta);
  // sin(theta/2)/theta, stable near zero
  const double s = theta > 1e-8 ? std::sin(0.5 * theta) / theta : 0.5 - theta * theta / 48.0;
  q.tail<3>() = s * x.coords;
  return GroupElement::from_quaternion(q);
}

AlgebraElement log(const GroupElement& g) {
  if (g.kind() == GroupKind::SO2) {
    double a = g.angle();
    if (a > std::numbers::pi) a -= kTwoPi;
    return AlgebraElement::so2(a);
  }
  const auto& q = g.quaternion();
  const double vn = q.tail<3>().norm();
  const double theta = 2.0 * std::atan2(vn, q[0]);
  if (kTwoPi - theta < 1e-12) throw DomainError("log: SU2 element at the cut locus (-I)");
  if (vn < 1e-300) return AlgebraElement::zero(GroupKind::SU2);
  return AlgebraElement::su2(q.tail<3>() * (theta / vn));
}

Eigen::MatrixXd adjoint_matrix(const GroupElement& g) {
  if (g.kind() == GroupKind::SO2) return Eigen::MatrixXd::Identity(1, 1);
  const auto& q = g.quaternion();
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Eigen::MatrixXd r(3, 3);
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& x) {
  require_same(g.kind(), x.kind);
  if (g.kind() == GroupKind::SO2) return x;
  return AlgebraElement::su2(adjoint_matrix(g) * x.coords);
}

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  require_same(x.kind, y.kind);
  if (x.kind == GroupKind::SO2) return AlgebraElement::zero(GroupKind::SO2);
  return AlgebraElement::su2(x.coords.cross(y.coords));
}

double distance(const GroupElement& g, const GroupElement& h) {
  const GroupElement d = mul(inverse(g), h);
  if (d.kind() == GroupKind::SO2) {
    const double a = d.angle();
    return std::min(a, kTwoPi - a);
  }
  const auto& q = d.quaternion();
  return 2.0 * std::atan2(q.tail<3>().norm(), q[0]);
}

GroupElement haar_sample(GroupKind kind, std::mt19937_64& rng) {
  if (kind == GroupKind::SO2) {
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    return GroupElement::rotation(u(rng));
  }
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector4d q;
  do {
    for (int k = 0; k < 4; ++k) q[k] = n(rng);
  } while (q.norm() < 1e-12);
  return GroupElement::from_quaternion(q);
}

}  // namespace group

// ---------------------------------------------------------------------------
// representations

std::string Irrep::name() const {
  std::ostringstream os;
  if (kind == GroupKind::SO2) {
    os << "n=" << label;
  } else if (label % 2 == 0) {
    os << "j=" << label / 2;
  } else {
    os << "j=" << label << "/2";
  }
  return os.str();
}

double rep_norm(const Irrep& rho) {
  return rho.kind == GroupKind::SO2 ? std::abs(rho.label) : rho.spin();
}

Eigen::MatrixXcd spin_matrix(int two_j, int axis) {
  const int d = two_j + 1;
  const double j = 0.5 * two_j;
  Eigen::MatrixXcd jp = Eigen::MatrixXcd::Zero(d, d);
  Eigen::MatrixXcd jz = Eigen::MatrixXcd::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    const double m = j - a;
    jz(a, a) = m;
    // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> has index a-1.
    if (a > 0) jp(a - 1, a) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  switch (axis) {
    case 0:
      return 0.5 * (jp + jp.adjoint());
    case 1:
      return cd(0.0, -0.5) * (jp - jp.adjoint());
    default:
      return jz;
  }
}

Eigen::MatrixXcd derived_rep(const Irrep& rho, const AlgebraElement& x) {
  require_same(rho.kind, x.kind);
  if (rho.kind == GroupKind::SO2) {
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = cd(0.0, rho.label * x.coords[0]);
    return m;
  }
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(rho.dim(), rho.dim());
  for (int k = 0; k < 3; ++k) h += x.coords[k] * spin_matrix(rho.label, k);
  return cd(0.0, -1.0) * h;
}

Eigen::MatrixXcd irrep_matrix(const Irrep& rho, const GroupElement& g) {
  require_same(rho.kind, g.kind());
  if (rho.kind == GroupKind::SO2) {
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = std::exp(cd(0.0, rho.label * g.angle()));
    return m;
  }
  const int d = rho.dim();
  if (rho.label == 0) return Eigen::MatrixXcd::Identity(1, 1);
  const auto& q = g.quaternion();
  const double vn = q.tail<3>().norm();
  const double theta = 2.0 * std::atan2(vn, q[0]);
  if (vn < 1e-300) {
    const double sign = (q[0] < 0 && rho.label % 2 == 1) ? -1.0 : 1.0;
    return sign * Eigen::MatrixXcd::Identity(d, d);
  }
  const Eigen::Vector3d n = q.tail<3>() / vn;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k < 3; ++k) h += n[k] * spin_matrix(rho.label, k);
  return unitary_exp(h, theta);
}

std::vector<Eigen::Vector3d> sphere_mesh(int points) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(points);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < points; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / points;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * k;
    out.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return out;
}

double rep_norm_on_mesh(const Irrep& rho, int mesh_points) {
  if (rho.kind == GroupKind::SO2) {
    return derived_rep(rho, AlgebraElement::so2(1.0)).norm();
  }
  double best = 0.0;
  for (const auto& p : sphere_mesh(mesh_points)) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(derived_rep(rho, AlgebraElement::su2(p)));
    best = std::max(best, svd.singularValues()[0]);
  }
  return best;
}

std::vector<Irrep> irreps_up_to(GroupKind kind, int cutoff) {
  std::vector<Irrep> out;
  if (kind == GroupKind::SO2) {
    for (int n = -cutoff; n <= cutoff; ++n) out.push_back(Irrep::so2(n));
  } else {
    for (int t = 0; t <= cutoff; ++t) out.push_back(Irrep::su2_twice_spin(t));
  }
  return out;
}

double IsotypicVector::l2_norm() const {
  return coefficients.norm() / std::sqrt(static_cast<double>(irrep.dim()));
}

// ---------------------------------------------------------------------------
// quadrature

HaarQuadrature HaarQuadrature::circle(int points) {
  HaarQuadrature q;
  q.kind_ = GroupKind::SO2;
  for (int k = 0; k < points; ++k) {
    q.nodes_.push_back(GroupElement::rotation(kTwoPi * k / points));
    q.weights_.push_back(1.0 / points);
  }
  return q;
}

HaarQuadrature HaarQuadrature::euler(int n_alpha, int n_beta, int n_gamma) {
  HaarQuadrature q;
  q.kind_ = GroupKind::SU2;
  std::vector<double> x, w;
  gauss_legendre(n_beta, x, w);
  for (int a = 0; a < n_alpha; ++a) {
    const double alpha = kTwoPi * a / n_alpha;
    for (int b = 0; b < n_beta; ++b) {
      const double beta = std::acos(x[b]);
      for (int c = 0; c < n_gamma; ++c) {
        const double gamma = 2.0 * kTwoPi * c / n_gamma;
        const Eigen::Vector4d qq = hamilton(hamilton(axis_quaternion(2, alpha), axis_quaternion(1, beta)),
                                            axis_quaternion(2, gamma));
        q.nodes_.push_back(GroupElement::from_quaternion(qq));
        q.weights_.push_back(0.5 * w[b] / (static_cast<double>(n_alpha) * n_gamma));
        q.euler_.emplace_back(alpha, beta, gamma);
      }
    }
  }
  return q;
}

std::vector<Eigen::MatrixXcd> HaarQuadrature::irrep_values(const Irrep& rho) const {
  require_same(rho.kind, kind_);
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(nodes_.size());
  if (kind_ == GroupKind::SO2) {
    for (const auto& g : nodes_) out.push_back(irrep_matrix(rho, g));
    return out;
  }
  const int d = rho.dim();
  const double j = rho.spin();
  const Eigen::MatrixXcd jy = spin_matrix(rho.label, 1);
  double last_beta = -1.0;
  Eigen::MatrixXcd small_d;
  for (const auto& e : euler_) {
    if (e[1] != last_beta) {
      small_d = unitary_exp(jy, e[1]);
      last_beta = e[1];
    }
    Eigen::MatrixXcd m(d, d);
    for (int a = 0; a < d; ++a) {
      const double ma = j - a;
      for (int b = 0; b < d; ++b) {
        const double mb = j - b;
        m(a, b) = std::exp(cd(0.0, -ma * e[0])) * small_d(a, b) * std::exp(cd(0.0, -mb * e[2]));
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<cd> HaarQuadrature::sample(const std::function<cd(const GroupElement&)>& f) const {
  std::vector<cd> out;
  out.reserve(nodes_.size());
  for (const auto& g : nodes_) out.push_back(f(g));
  return out;
}

// ---------------------------------------------------------------------------
// Peter-Weyl

PeterWeylResult peter_weyl(const HaarQuadrature& quad, std::span<const cd> samples, int cutoff,
                           double tolerance) {
  if (samples.size() != quad.size()) throw std::invalid_argument("peter_weyl: sample count mismatch");
  PeterWeylResult res;
  double total = 0.0;
  for (std::size_t k = 0; k < quad.size(); ++k) total += quad.weights()[k] * std::norm(samples[k]);
  res.l2_norm = std::sqrt(total);

  double captured = 0.0;
  for (const Irrep& rho : irreps_up_to(quad.kind(), cutoff)) {
    const auto values = quad.irrep_values(rho);
    const int d = rho.dim();
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t k = 0; k < quad.size(); ++k) {
      c += (quad.weights()[k] * samples[k]) * values[k].conjugate();
    }
    c *= static_cast<double>(d);
    IsotypicVector iv{rho, c};
    captured += iv.l2_norm() * iv.l2_norm();
    res.components.push_back(std::move(iv));
  }
  res.captured_norm = std::sqrt(captured);
  res.residual_norm = std::sqrt(std::abs(total - captured));
  res.truncated = res.residual_norm > tolerance * std::max(1.0, res.l2_norm);
  return res;
}

cd reconstruct(const std::vector<IsotypicVector>& components, const GroupElement& g) {
  cd sum = 0.0;
  for (const auto& iv : components) {
    sum += (iv.coefficients.array() * irrep_matrix(iv.irrep, g).array()).sum();
  }
  return sum;
}

double cn_norm(const std::function<double(const GroupElement&)>& phi, int order,
               const HaarQuadrature& quad) {
  const auto dirs = unit_directions(quad.kind());
  double total = 0.0;
  for (int k = 0; k <= order; ++k) {
    const double h = k == 0 ? 0.0 : (k == 1 ? 1e-5 : (k == 2 ? 1e-4 : 1e-2));
    double sup = 0.0;
    for (const auto& g : quad.nodes()) {
      if (k == 0) {
        sup = std::max(sup, std::abs(phi(g)));
        continue;
      }
      for (const auto& x : dirs) {
        double acc = 0.0;
        for (int i = 0; i <= k; ++i) {
          const double t = (0.5 * k - i) * h;
          const double sign = (i % 2 == 0) ? 1.0 : -1.0;
          acc += sign * binomial(k, i) * phi(g * group::exp(x * t));
        }
        sup = std::max(sup, std::abs(acc) / std::pow(h, k));
      }
    }
    total += sup;
  }
  return total;
}

FourierDecayReport fourier_decay_check(const std::function<double(const GroupElement&)>& phi,
                                       int order, int cutoff, const HaarQuadrature& quad) {
  FourierDecayReport rep;
  rep.order = order;
  rep.cn_norm = cn_norm(phi, order, quad);
  const auto samples = quad.sample([&](const GroupElement& g) { return cd(phi(g), 0.0); });
  const auto pw = peter_weyl(quad, samples, cutoff);
  for (const auto& iv : pw.components) {
    if (iv.irrep.trivial()) continue;
    const double ratio =
        rep.cn_norm > 0 ? std::pow(rep_norm(iv.irrep), order) * iv.l2_norm() / rep.cn_norm : 0.0;
    rep.ratios.emplace_back(iv.irrep, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  return rep;
}

}  // namespace skewmix
