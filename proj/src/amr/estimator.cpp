#include "camr/amr/estimator.hpp"

#include <cmath>

namespace camr {

namespace {

constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)
const std::array<Vec2, 4> kGaussPoints{Vec2{-kGauss, -kGauss}, Vec2{kGauss, -kGauss},
                                       Vec2{-kGauss, kGauss}, Vec2{kGauss, kGauss}};

double energy_product(const Material& m, const Voigt& s) {
  const Voigt e = m.strain(s);
  return s[0] * e[0] + s[1] * e[1] + s[2] * e[2];
}

}  // namespace

std::array<Voigt, 4> gauss_stress(const Mesh& mesh, const FeSpace& space, std::size_t leaf,
                                  std::span<const double> u, const MaterialTable& materials) {
  const Material& mat = materials.of(mesh.element(space.leaves()[leaf]).solid);
  std::array<Voigt, 4> out{};
  for (std::size_t g = 0; g < 4; ++g)
    out[g] = mat.stress(strain_at(space, leaf, kinematics(mesh, space, leaf, kGaussPoints[g]), u));
  return out;
}

std::vector<Voigt> recover_stress(const Mesh& mesh, const FeSpace& space, std::span<const double> u,
                                  const MaterialTable& materials) {
  if (space.order() != 1) throw ConfigError("stress recovery is implemented for Q1 only");
  std::vector<Voigt> sum(space.num_nodes(), Voigt{});
  std::vector<double> weight(space.num_nodes(), 0.0);
  // Extrapolation: the bilinear through the Gauss values, evaluated at the
  // corners, i.e. at +-sqrt(3) in Gauss-point coordinates.
  const double s3 = std::sqrt(3.0);
  const auto& corners = reference_nodes(1);
  for (std::size_t i = 0; i < space.num_elements(); ++i) {
    const auto gs = gauss_stress(mesh, space, i, u, materials);
    const double area = mesh.element_measure(space.leaves()[i]);
    const int* nodes = space.element_nodes(i);
    for (int a = 0; a < 4; ++a) {
      Voigt v{};
      for (std::size_t g = 0; g < 4; ++g) {
        const double w = 0.25 * (1.0 + s3 * corners[a].x * (kGaussPoints[g].x / kGauss)) *
                         (1.0 + s3 * corners[a].y * (kGaussPoints[g].y / kGauss));
        for (int c = 0; c < 3; ++c) v[c] += w * gs[g][c];
      }
      auto& acc = sum[static_cast<std::size_t>(nodes[a])];
      for (int c = 0; c < 3; ++c) acc[c] += area * v[c];
      weight[static_cast<std::size_t>(nodes[a])] += area;
    }
  }
  std::vector<Voigt> out(space.num_nodes(), Voigt{});
  for (std::size_t n = 0; n < out.size(); ++n)
    if (weight[n] > 0.0)
      for (int c = 0; c < 3; ++c) out[n][c] = sum[n][c] / weight[n];
  for (const auto& h : space.constraints()) {
    Voigt v{};
    for (std::size_t m = 0; m < h.masters.size(); ++m)
      for (int c = 0; c < 3; ++c) v[c] += h.weights[m] * out[static_cast<std::size_t>(h.masters[m])][c];
    out[static_cast<std::size_t>(h.slave)] = v;
  }
  return out;
}

ErrorField element_errors(const Mesh& mesh, const FeSpace& space, std::span<const double> u,
                          std::span<const Voigt> recovered, const MaterialTable& materials) {
  if (space.order() != 1) throw ConfigError("error estimation is implemented for Q1 only");
  ErrorField f;
  f.elements = space.leaves();
  f.xi.resize(space.num_elements());
  f.omega.resize(space.num_elements());
  double xi2 = 0.0, om2 = 0.0;
  for (std::size_t i = 0; i < space.num_elements(); ++i) {
    const Material& mat = materials.of(mesh.element(space.leaves()[i]).solid);
    const int* nodes = space.element_nodes(i);
    double e2 = 0.0, w2 = 0.0;
    for (std::size_t g = 0; g < 4; ++g) {
      const auto k = kinematics(mesh, space, i, kGaussPoints[g]);
      const Voigt sh = mat.stress(strain_at(space, i, k, u));
      Voigt ss{};
      for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 3; ++c) ss[c] += k.n[a] * recovered[static_cast<std::size_t>(nodes[a])][c];
      const Voigt d{ss[0] - sh[0], ss[1] - sh[1], ss[2] - sh[2]};
      e2 += k.det * energy_product(mat, d);
      w2 += k.det * energy_product(mat, sh);
    }
    e2 = std::max(e2, 0.0);
    f.xi[i] = std::sqrt(e2);
    f.omega[i] = std::sqrt(std::max(w2, 0.0) + e2);
    xi2 += e2;
    om2 += std::max(w2, 0.0) + e2;
  }
  f.xi_global = std::sqrt(xi2);
  f.omega_global = std::sqrt(om2);
  return f;
}

void AmrTargets::validate() const {
  if (!(e_global > 0.0 && e_global < 1.0)) throw ConfigError("e_global must lie in (0, 1)");
  if (!(e_local > 0.0 && e_local < 1.0)) throw ConfigError("e_local must lie in (0, 1)");
  if (!(delta >= 0.0 && delta < 1.0)) throw ConfigError("delta must lie in [0, 1)");
  if (n_max < 1) throw ConfigError("n_max must be at least 1");
}

std::vector<double> thresholds(const ErrorField& errors, const AmrTargets& targets) {
  std::vector<double> out(errors.xi.size());
  if (targets.combination == Combination::ZzGlobal) {
    const double n = static_cast<double>(std::max<std::size_t>(errors.xi.size(), 1));
    std::fill(out.begin(), out.end(), targets.e_global * errors.omega_global / std::sqrt(n));
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = targets.e_local * errors.omega[i];
  }
  return out;
}

std::set<int> mark(const ErrorField& errors, std::span<const double> limits, const ContactPairing* pairing) {
  std::set<int> m;
  for (std::size_t i = 0; i < errors.xi.size(); ++i)
    if (errors.xi[i] > limits[i]) m.insert(errors.elements[i]);
  if (pairing != nullptr) {
    std::vector<int> partners;
    for (int e : m)
      if (int p = pairing->partner(e); p >= 0) partners.push_back(p);
    m.insert(partners.begin(), partners.end());
  }
  return m;
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::None: return "NONE";
    case StopReason::Target: return "TARGET";
    case StopReason::EmptyMarking: return "EMPTY";
    case StopReason::LocalArea: return "LOCAL";
    case StopReason::Budget: return "BUDGET";
  }
  return "NONE";
}

StopDecision should_stop(const ErrorField& errors, const std::set<int>& marked, const Mesh& mesh,
                         const AmrTargets& targets, int iteration) {
  StopDecision d;
  double marked_area = 0.0, total = 0.0;
  for (int e : errors.elements) total += mesh.element_measure(e);
  for (int e : marked) marked_area += mesh.element_measure(e);
  d.eta = total > 0.0 ? marked_area / total : 0.0;
  if (targets.combination == Combination::ZzGlobal) {
    if (marked.empty()) d.reason = StopReason::EmptyMarking;
    else if (errors.xi_global <= targets.e_global * errors.omega_global) d.reason = StopReason::Target;
  } else if (d.eta <= targets.delta) {
    d.reason = marked.empty() ? StopReason::EmptyMarking : StopReason::LocalArea;
  }
  if (d.reason == StopReason::None && iteration >= targets.n_max) d.reason = StopReason::Budget;
  d.stop = d.reason != StopReason::None;
  return d;
}

}  // namespace camr
