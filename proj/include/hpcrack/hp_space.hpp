#pragma once

// Continuous tensor-product Lagrange space with a polynomial degree per cell.
//
// Nodes sit at Gauss-Lobatto points. Vertex DOFs are shared by position; edge
// DOFs are shared only between cells of equal level and degree. Everything
// else (hanging faces, degree jumps, Dirichlet data) is expressed as affine
// constraints x_c = sum_m w_m x_m + g_c whose masters are never constrained.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hpcrack/mesh.hpp"
#include "hpcrack/polynomials.hpp"
#include "hpcrack/problem.hpp"

namespace hpcrack {

using DofIndex = std::uint32_t;

/// Polynomial degree per cell, indexed by CellId. Inactive cells keep
/// whatever degree they had when they were last active.
class DegreeMap
{
public:
  DegreeMap() = default;
  DegreeMap(const QuadMesh& mesh, int uniform_degree);

  [[nodiscard]] int operator[](CellId id) const { return degree_.at(id.value); }
  void set(CellId id, int p);
  /// Grows the table to cover newly created cells, which inherit their parent's degree.
  void extend_to(const QuadMesh& mesh);
  [[nodiscard]] std::size_t size() const { return degree_.size(); }
  [[nodiscard]] int max_degree_on(const QuadMesh& mesh) const;

  friend bool operator==(const DegreeMap&, const DegreeMap&) = default;

private:
  std::vector<int> degree_;
};

struct DofHandler
{
  /// Global DOFs per cell (indexed by CellId), local index a + (p+1) b.
  std::vector<std::vector<DofIndex>> cell_dofs;
  std::vector<std::array<double, 2>> support_points;
  std::size_t n_dofs = 0;
  /// DOFs owned by cells; the rest are face-trace DOFs of hanging faces.
  std::size_t n_cell_dofs = 0;
  /// Extra trace DOFs keyed by (coarse cell, side) for hanging faces whose
  /// coarse side has a higher degree than the face trace.
  std::map<std::pair<std::uint32_t, int>, std::vector<DofIndex>> face_dofs;

  friend bool operator==(const DofHandler&, const DofHandler&) = default;
};

class ConstraintError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class ConstraintSet
{
public:
  struct Entry
  {
    std::vector<std::pair<DofIndex, double>> masters;
    double inhomogeneity = 0.0;
    bool dirichlet = false;
  };

  ConstraintSet() = default;
  ConstraintSet(std::size_t n_dofs, std::map<DofIndex, Entry> entries);

  [[nodiscard]] std::size_t n_dofs() const { return free_index_.size(); }
  [[nodiscard]] std::size_t n_free() const { return free_dofs_.size(); }
  [[nodiscard]] std::size_t n_constrained() const { return entries_.size(); }
  [[nodiscard]] bool is_constrained(DofIndex i) const { return free_index_[i] < 0; }
  [[nodiscard]] const Entry& entry(DofIndex i) const { return entries_.at(i); }
  [[nodiscard]] const std::map<DofIndex, Entry>& entries() const { return entries_; }
  /// Position of a free DOF in the condensed vector, -1 for constrained ones.
  [[nodiscard]] long free_index(DofIndex i) const { return free_index_[i]; }
  [[nodiscard]] const std::vector<DofIndex>& free_dofs() const { return free_dofs_; }

  /// Overwrites constrained entries from their masters (idempotent).
  void distribute(Eigen::VectorXd& full) const;
  /// Full vector from free values; homogeneous drops the inhomogeneities.
  [[nodiscard]] Eigen::VectorXd expand(const Eigen::VectorXd& free, bool homogeneous) const;
  [[nodiscard]] Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& full) const;

private:
  std::map<DofIndex, Entry> entries_;
  std::vector<long> free_index_;
  std::vector<DofIndex> free_dofs_;
};

using SolutionField = Eigen::VectorXd;

struct PointValue
{
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
};

struct ShapeValue
{
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
};

/// Tensor-product Lagrange basis function `node` (= a + (p+1) b) of degree p
/// at reference point (s, t); gradient is with respect to (s, t).
ShapeValue shape_eval(int p, int node, std::array<double, 2> ref);

/// Tensor-product Gauss rule on [0,1]^2.
struct QuadratureRule
{
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
};

QuadratureRule gauss_rule(int n);

DofHandler distribute_dofs(const QuadMesh& mesh, const DegreeMap& degrees);

ConstraintSet build_constraints(const QuadMesh& mesh, const DegreeMap& degrees, const DofHandler& dofs,
                                const Problem& problem);

/// Whether a cell side lies on the Dirichlet set, and on which part.
std::optional<DirichletPart> dirichlet_part(const QuadMesh& mesh, CellId cell, Side side, bool slit);

/// Local node indices (a + (p+1) b) on one side, ordered along the side.
std::vector<int> side_nodes(int p, Side side);

PointValue evaluate(const QuadMesh& mesh, const DegreeMap& degrees, const DofHandler& dofs,
                    std::span<const double> coeffs, CellId cell, std::array<double, 2> ref);

/// A finite element space on a mesh together with its boundary value problem.
class HpSpace
{
public:
  HpSpace(QuadMesh mesh, DegreeMap degrees, Problem problem);

  [[nodiscard]] const QuadMesh& mesh() const { return mesh_; }
  [[nodiscard]] const DegreeMap& degrees() const { return degrees_; }
  [[nodiscard]] const DofHandler& dofs() const { return dofs_; }
  [[nodiscard]] const ConstraintSet& constraints() const { return constraints_; }
  [[nodiscard]] const Problem& problem() const { return problem_; }
  [[nodiscard]] int degree(CellId id) const { return degrees_[id]; }
  [[nodiscard]] std::size_t n_dofs() const { return dofs_.n_dofs; }

  /// Nodal interpolant of f with constraints distributed.
  [[nodiscard]] SolutionField interpolate(const std::function<double(double, double)>& f) const;
  /// Field that satisfies the Dirichlet data and is zero at every free DOF.
  [[nodiscard]] SolutionField lift() const;

  [[nodiscard]] PointValue evaluate(const SolutionField& coeffs, CellId cell, std::array<double, 2> ref) const;
  /// Evaluates in the cell chosen by QuadMesh::locate.
  [[nodiscard]] PointValue evaluate_at(const SolutionField& coeffs, double x, double y) const;

  /// Physical position of a reference point in a cell.
  [[nodiscard]] std::array<double, 2> map_to_physical(CellId cell, std::array<double, 2> ref) const;

private:
  QuadMesh mesh_;
  DegreeMap degrees_;
  Problem problem_;
  DofHandler dofs_;
  ConstraintSet constraints_;
};

}  // namespace hpcrack
