#include "skewmix/symbolic_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "skewmix/errors.hpp"

namespace skewmix {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sampled_sup(const std::function<double(double)>& f, int samples) {
  double best = 0.0;
  for (int i = 0; i < samples; ++i) best = std::max(best, f((i + 0.5) / samples));
  return best;
}
}  // namespace

// ---------------------------------------------------------------------------

double TrigSeries::value(double u) const {
  double acc = constant;
  for (std::size_t k = 0; k < cos_coeffs.size(); ++k) acc += cos_coeffs[k] * std::cos(kTwoPi * (k + 1) * u);
  for (std::size_t k = 0; k < sin_coeffs.size(); ++k) acc += sin_coeffs[k] * std::sin(kTwoPi * (k + 1) * u);
  return acc;
}

double TrigSeries::derivative(double u) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < cos_coeffs.size(); ++k) {
    const double w = kTwoPi * (k + 1);
    acc -= w * cos_coeffs[k] * std::sin(w * u);
  }
  for (std::size_t k = 0; k < sin_coeffs.size(); ++k) {
    const double w = kTwoPi * (k + 1);
    acc += w * sin_coeffs[k] * std::cos(w * u);
  }
  return acc;
}

double TrigSeries::oscillation_bound() const {
  double s = 0.0;
  for (double a : cos_coeffs) s += std::abs(a);
  for (double b : sin_coeffs) s += std::abs(b);
  return s;
}

double TrigSeries::derivative_bound() const {
  double s = 0.0;
  for (std::size_t k = 0; k < cos_coeffs.size(); ++k) s += kTwoPi * (k + 1) * std::abs(cos_coeffs[k]);
  for (std::size_t k = 0; k < sin_coeffs.size(); ++k) s += kTwoPi * (k + 1) * std::abs(sin_coeffs[k]);
  return s;
}

bool TrigSeries::is_constant() const { return oscillation_bound() == 0.0; }

// ---------------------------------------------------------------------------

ExpandingModel ExpandingModel::doubling() { return from_lengths({0.5, 0.5}, "doubling"); }
ExpandingModel ExpandingModel::tripling() { return from_lengths({1.0 / 3, 1.0 / 3, 1.0 / 3}, "tripling"); }

ExpandingModel ExpandingModel::from_lengths(std::vector<double> lengths, std::string name) {
  if (lengths.size() < 2) throw std::invalid_argument("expanding model needs at least two branches");
  const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("branch lengths must sum to 1");
  for (double l : lengths) {
    if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("branch lengths must lie in (0, 1)");
  }
  ExpandingModel m;
  m.name_ = std::move(name);
  m.lengths_ = std::move(lengths);
  double c = 0.0;
  for (double l : m.lengths_) {
    m.offsets_.push_back(c);
    c += l;
  }
  const auto [lo, hi] = std::minmax_element(m.lengths_.begin(), m.lengths_.end());
  m.bounds_ = {1.0, 1.0 / *hi, 1.0, 1.0 / *lo};
  return m;
}

int ExpandingModel::branch_of(double u) const {
  if (!(u >= 0.0 && u < 1.0)) throw DomainError("base point outside [0, 1)");
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), u);
  return static_cast<int>(it - offsets_.begin()) - 1;
}

double ExpandingModel::sigma(double u) const {
  const int i = branch_of(u);
  double v = (u - offsets_[i]) / lengths_[i];
  if (v >= 1.0) v = 0.0;
  if (v < 0.0) v = 0.0;
  return v;
}

// ---------------------------------------------------------------------------

RoofFunction::RoofFunction(TrigSeries series) : series_(std::move(series)) {
  tau_min_ = series_.constant - series_.oscillation_bound();
  if (!(tau_min_ > 0.0)) throw std::invalid_argument("roof function must be bounded below by a positive constant");
  c1_norm_ = std::max(series_.constant + series_.oscillation_bound(), series_.derivative_bound());
}

RoofFunction RoofFunction::constant(double c) { return RoofFunction(TrigSeries{c, {}, {}}); }
RoofFunction RoofFunction::standard() { return RoofFunction(TrigSeries{1.0, {0.3}, {}}); }

// ---------------------------------------------------------------------------

Eigen::Vector3d su2_dexp(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double t = a.norm();
  double c1, c2;
  if (t < 1e-4) {
    c1 = 0.5 - t * t / 24.0;
    c2 = 1.0 / 6.0 - t * t / 120.0;
  } else {
    c1 = (1.0 - std::cos(t)) / (t * t);
    c2 = (t - std::sin(t)) / (t * t * t);
  }
  const Eigen::Vector3d ab = a.cross(b);
  return b + c1 * ab + c2 * a.cross(ab);
}

HolonomyCocycle HolonomyCocycle::make(GroupKind kind, std::string name,
                                      std::function<GroupElement(double)> value,
                                      std::function<AlgebraElement(double)> derivative) {
  HolonomyCocycle c;
  c.kind = kind;
  c.name = std::move(name);
  c.value = std::move(value);
  c.derivative = std::move(derivative);
  const auto& d = c.derivative;
  c.c1_norm = 1.05 * sampled_sup([&](double u) { return d(u).norm(); }, 8192);
  return c;
}

HolonomyCocycle HolonomyCocycle::trivial(GroupKind kind) {
  HolonomyCocycle c;
  c.kind = kind;
  c.name = "trivial";
  c.value = [kind](double) { return GroupElement::identity(kind); };
  c.derivative = [kind](double) { return AlgebraElement::zero(kind); };
  return c;
}

HolonomyCocycle HolonomyCocycle::constant(const GroupElement& g) {
  HolonomyCocycle c;
  c.kind = g.kind();
  c.name = "constant";
  c.value = [g](double) { return g; };
  const GroupKind kind = g.kind();
  c.derivative = [kind](double) { return AlgebraElement::zero(kind); };
  return c;
}

HolonomyCocycle HolonomyCocycle::so2_angle(TrigSeries angle) {
  HolonomyCocycle c;
  c.kind = GroupKind::SO2;
  c.name = "so2_trig";
  c.value = [angle](double u) { return GroupElement::rotation(angle.value(u)); };
  c.derivative = [angle](double u) { return AlgebraElement::so2(angle.derivative(u)); };
  c.c1_norm = 1.05 * angle.derivative_bound();
  return c;
}

HolonomyCocycle HolonomyCocycle::so2_winding(int k) {
  HolonomyCocycle c;
  c.kind = GroupKind::SO2;
  c.name = "so2_affine";
  c.value = [k](double u) { return GroupElement::rotation(kTwoPi * k * u); };
  c.derivative = [k](double) { return AlgebraElement::so2(kTwoPi * k); };
  c.c1_norm = 1.05 * kTwoPi * std::abs(k);
  return c;
}

HolonomyCocycle HolonomyCocycle::su2_exp(TrigSeries x, TrigSeries y, TrigSeries z) {
  auto coords = [x, y, z](double u) { return Eigen::Vector3d(x.value(u), y.value(u), z.value(u)); };
  auto slopes = [x, y, z](double u) {
    return Eigen::Vector3d(x.derivative(u), y.derivative(u), z.derivative(u));
  };
  return make(
      GroupKind::SU2, "su2_exp_trig",
      [coords](double u) { return group::exp(AlgebraElement::su2(coords(u))); },
      [coords, slopes](double u) { return AlgebraElement::su2(su2_dexp(coords(u), slopes(u))); });
}

// ---------------------------------------------------------------------------

double ConsistentPast::point(const ExpandingModel& model, double u) const {
  for (int i : branches) u = model.branch_inverse(i, u);
  return u;
}

std::vector<double> ConsistentPast::trajectory(const ExpandingModel& model, double u) const {
  std::vector<double> out;
  out.reserve(branches.size());
  for (int i : branches) {
    u = model.branch_inverse(i, u);
    out.push_back(u);
  }
  return out;
}

double ConsistentPast::contraction(const ExpandingModel& model, double u) const {
  double d = 1.0;
  for (int i : branches) {
    d *= model.branch_derivative(i, u);
    u = model.branch_inverse(i, u);
  }
  return d;
}

ConsistentPast ConsistentPast::tail(int from) const {
  return {std::vector<int>(branches.begin() + from, branches.end())};
}

ConsistentPast ConsistentPast::head(int count) const {
  return {std::vector<int>(branches.begin(), branches.begin() + count)};
}

std::vector<ConsistentPast> enumerate_pasts(const ExpandingModel& model, int depth,
                                            std::uint64_t limit) {
  if (depth < 0) throw std::invalid_argument("depth must be non-negative");
  const auto m = static_cast<std::uint64_t>(model.branch_count());
  std::uint64_t count = 1;
  for (int k = 0; k < depth; ++k) {
    if (count > limit / m) throw CapacityError("past enumeration exceeds the declared limit");
    count *= m;
  }
  if (count > limit) throw CapacityError("past enumeration exceeds the declared limit");
  std::vector<ConsistentPast> out;
  out.reserve(count);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    ConsistentPast p;
    p.branches.resize(depth);
    std::uint64_t r = idx;
    for (int k = depth - 1; k >= 0; --k) {
      p.branches[k] = static_cast<int>(r % m);
      r /= m;
    }
    out.push_back(std::move(p));
  }
  return out;
}

GroupElement holonomy_product(const ExpandingModel& model, const HolonomyCocycle& cocycle,
                              const ConsistentPast& past, double u) {
  GroupElement acc = GroupElement::identity(cocycle.kind);
  for (int i : past.branches) {
    u = model.branch_inverse(i, u);
    acc = acc * cocycle(u);
  }
  return acc;
}

double birkhoff_roof(const ExpandingModel& model, const RoofFunction& roof,
                     const ConsistentPast& past, double u) {
  double acc = 0.0;
  for (int i : past.branches) {
    u = model.branch_inverse(i, u);
    acc += roof(u);
  }
  return acc;
}

SuspensionPoint flow(const SuspensionPoint& p, double t, const ExpandingModel& model,
                     const RoofFunction& roof, const HolonomyCocycle& cocycle) {
  if (t < 0.0) throw DomainError("flow time must be non-negative");
  SuspensionPoint q = p;
  double height = q.s + t;
  double top = roof(q.u);
  while (height >= top) {
    height -= top;
    q.g = cocycle(q.u) * q.g;
    q.u = model.sigma(q.u);
    top = roof(q.u);
  }
  q.s = height;
  return q;
}

int crossing_count(const SuspensionPoint& p, double t, const ExpandingModel& model,
                   const RoofFunction& roof) {
  double u = p.u;
  double height = p.s + t;
  int k = 0;
  while (height >= roof(u)) {
    height -= roof(u);
    u = model.sigma(u);
    ++k;
  }
  return k;
}

}  // namespace skewmix
