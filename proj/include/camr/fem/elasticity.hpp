#pragma once

#include <array>
#include <map>
#include <span>
#include <vector>

#include "camr/fem/space.hpp"
#include "camr/fem/sparse.hpp"

namespace camr {

/// Isotropic linear elastic material under plane strain.
struct Material {
  double young_modulus = 210e9;
  double poisson_ratio = 0.3;

  /// Throws ConfigError unless E > 0 and 0 <= nu < 0.5.
  void validate() const;
  /// Voigt stiffness (row-major 3x3), engineering shear strain.
  std::array<double, 9> stiffness() const;
  Voigt stress(const Voigt& strain) const;
  Voigt strain(const Voigt& stress) const;
};

/// Material per solid id.
class MaterialTable {
 public:
  MaterialTable() = default;
  MaterialTable(std::initializer_list<std::pair<const int, Material>> init);

  void set(int solid, const Material& m);
  /// Throws ConfigError for an unknown solid id.
  const Material& of(int solid) const;

 private:
  std::map<int, Material> by_solid_;
};

/// Constant traction (Pa) applied on every boundary edge with `tag`.
struct Traction {
  int tag = tags::kNone;
  Vec2 value;
};

struct AssemblyOptions {
  /// Gauss points per direction; 0 selects order + 1.
  int quadrature_points = 0;
  std::vector<Traction> tractions;
};

struct AssembledSystem {
  SparseMatrix stiffness;
  std::vector<double> load;
};

/// All-DOF stiffness and load on the space's leaves (hanging DOFs included).
AssembledSystem assemble_stiffness(const Mesh& mesh, const FeSpace& space,
                                   const MaterialTable& materials, const AssemblyOptions& options = {});

/// Strain-displacement data of one leaf at a reference point.
struct PointKinematics {
  double det = 0.0;
  Vec2 x;
  std::array<double, 9> dn_dx{};
  std::array<double, 9> dn_dy{};
  std::array<double, 9> n{};
};

PointKinematics kinematics(const Mesh& mesh, const FeSpace& space, std::size_t leaf, Vec2 ref);

/// Engineering strain of the full-DOF field `u` in a leaf at a reference point.
Voigt strain_at(const FeSpace& space, std::size_t leaf, const PointKinematics& k,
                std::span<const double> u);

/// Displacement at a reference point of a leaf.
Vec2 displacement_at(const FeSpace& space, std::size_t leaf, Vec2 ref, std::span<const double> u);

}  // namespace camr
