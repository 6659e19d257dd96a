#pragma once

// Fiber groups SO(2) and SU(2): arithmetic, Lie algebra, Haar quadrature,
// irreducible representations and Peter-Weyl analysis.
//
// Conventions. so(2) is identified with R, exp(x) is rotation by x.
// su(2) carries the basis e_k = -i sigma_k / 2, which is orthonormal for the
// Ad-invariant norm in which exp(X) rotates R^3 (via Ad) by the angle |X|.
// SU(2) elements are unit quaternions (w, x, y, z) <-> w I - i (x,y,z).sigma.
// The spin-j representation has d(rho)(e_k) = -i J_k, so ||rho_j|| = j.

#include <complex>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace skewmix {

enum class GroupKind { SO2, SU2 };

std::string to_string(GroupKind kind);
GroupKind group_kind_from_string(const std::string& name);
int algebra_dim(GroupKind kind);

class GroupElement {
 public:
  static GroupElement identity(GroupKind kind);
  static GroupElement rotation(double angle);
  static GroupElement from_quaternion(const Eigen::Vector4d& q);

  GroupKind kind() const noexcept { return kind_; }
  /// SO2 only; reduced to [0, 2pi).
  double angle() const;
  /// SU2 only; (w, x, y, z) with unit norm.
  const Eigen::Vector4d& quaternion() const;
  Eigen::Matrix2cd su2_matrix() const;

 private:
  GroupElement(GroupKind kind, double angle, const Eigen::Vector4d& q)
      : kind_(kind), angle_(angle), q_(q) {}

  GroupKind kind_;
  double angle_ = 0.0;
  Eigen::Vector4d q_ = Eigen::Vector4d(1, 0, 0, 0);
};

/// Lie algebra element in the fixed orthonormal basis. so(2) uses coords[0].
struct AlgebraElement {
  GroupKind kind = GroupKind::SO2;
  Eigen::Vector3d coords = Eigen::Vector3d::Zero();

  static AlgebraElement zero(GroupKind kind);
  static AlgebraElement so2(double x);
  static AlgebraElement su2(double x, double y, double z);
  static AlgebraElement su2(const Eigen::Vector3d& v);

  int dim() const { return algebra_dim(kind); }
  double norm() const;

  AlgebraElement operator+(const AlgebraElement& other) const;
  AlgebraElement operator-(const AlgebraElement& other) const;
  AlgebraElement operator*(double s) const;
  AlgebraElement& operator+=(const AlgebraElement& other);
};

GroupElement operator*(const GroupElement& g, const GroupElement& h);

namespace group {

GroupElement mul(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);
GroupElement exp(const AlgebraElement& x);
/// Principal logarithm. Throws DomainError at the cut locus (SU2: -I).
AlgebraElement log(const GroupElement& g);
AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& x);
/// Matrix of Ad_g in the fixed basis (dim x dim).
Eigen::MatrixXd adjoint_matrix(const GroupElement& g);
AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y);
/// Bi-invariant distance: the norm of log(g^{-1} h), valid up to the cut locus.
double distance(const GroupElement& g, const GroupElement& h);
GroupElement haar_sample(GroupKind kind, std::mt19937_64& rng);

}  // namespace group

struct Irrep {
  GroupKind kind = GroupKind::SO2;
  /// SO2: character index n. SU2: twice the spin, 2j.
  int label = 0;

  static Irrep so2(int n) { return {GroupKind::SO2, n}; }
  static Irrep su2_twice_spin(int two_j) { return {GroupKind::SU2, two_j}; }
  static Irrep trivial_of(GroupKind kind) { return {kind, 0}; }

  int dim() const { return kind == GroupKind::SO2 ? 1 : label + 1; }
  bool trivial() const { return label == 0; }
  double spin() const { return 0.5 * label; }
  std::string name() const;

  bool operator==(const Irrep&) const = default;
};

/// ||rho||: exact value (|n| for SO2, j for SU2).
double rep_norm(const Irrep& rho);
/// Numerical sup of ||d rho(X)||_op over a mesh of unit X (cross-check).
double rep_norm_on_mesh(const Irrep& rho, int mesh_points);

Eigen::MatrixXcd irrep_matrix(const Irrep& rho, const GroupElement& g);
Eigen::MatrixXcd derived_rep(const Irrep& rho, const AlgebraElement& x);
/// Spin-j angular momentum matrix J_axis (axis 0,1,2) in the basis m = j..-j.
Eigen::MatrixXcd spin_matrix(int two_j, int axis);

/// Irreps up to a cutoff: SO2 |n| <= cutoff, SU2 2j <= cutoff.
std::vector<Irrep> irreps_up_to(GroupKind kind, int cutoff);

/// Points of a near-uniform mesh of the unit sphere in R^3 (Fibonacci lattice).
std::vector<Eigen::Vector3d> sphere_mesh(int points);

/// Isotypic component phi^rho(g) = sum_ab C_ab rho(g)_ab.
struct IsotypicVector {
  Irrep irrep;
  Eigen::MatrixXcd coefficients;

  /// L^2(G) norm of the component: ||C||_F / sqrt(dim).
  double l2_norm() const;
};

class HaarQuadrature {
 public:
  /// Trapezoidal rule on the circle.
  static HaarQuadrature circle(int points);
  /// Product rule in ZYZ Euler angles: trapezoid in alpha on [0,2pi),
  /// Gauss-Legendre in cos(beta), trapezoid in gamma on [0,4pi).
  static HaarQuadrature euler(int n_alpha, int n_beta, int n_gamma);

  GroupKind kind() const { return kind_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<GroupElement>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  /// rho(g_k) at every node, using the separable Euler structure for SU2.
  std::vector<Eigen::MatrixXcd> irrep_values(const Irrep& rho) const;

  std::vector<std::complex<double>> sample(
      const std::function<std::complex<double>(const GroupElement&)>& f) const;

 private:
  GroupKind kind_ = GroupKind::SO2;
  std::vector<GroupElement> nodes_;
  std::vector<double> weights_;
  std::vector<Eigen::Vector3d> euler_;  // (alpha, beta, gamma), SU2 only
};

struct PeterWeylResult {
  std::vector<IsotypicVector> components;
  double l2_norm = 0.0;        // ||phi||_{L^2(G)} by quadrature
  double captured_norm = 0.0;  // sqrt(sum ||phi^rho||^2)
  double residual_norm = 0.0;  // sqrt(|l2^2 - captured^2|)
  bool truncated = false;      // residual above tolerance: cutoff too small
};

PeterWeylResult peter_weyl(const HaarQuadrature& quad,
                           std::span<const std::complex<double>> samples,
                           int cutoff, double tolerance = 1e-6);

std::complex<double> reconstruct(const std::vector<IsotypicVector>& components,
                                 const GroupElement& g);

/// ||phi||_{C^n}: sum over k <= n of sup_g sup_X |d^k/dt^k phi(g exp(tX))|,
/// X over a fixed set of unit directions, g over the quadrature nodes.
double cn_norm(const std::function<double(const GroupElement&)>& phi, int order,
               const HaarQuadrature& quad);

struct FourierDecayReport {
  int order = 0;
  double cn_norm = 0.0;
  std::vector<std::pair<Irrep, double>> ratios;  // ||rho||^n ||phi^rho|| / ||phi||_{C^n}
  double max_ratio = 0.0;
};

FourierDecayReport fourier_decay_check(
    const std::function<double(const GroupElement&)>& phi, int order, int cutoff,
    const HaarQuadrature& quad);

}  // namespace skewmix
