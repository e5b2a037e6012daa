#pragma once

// Quadtree mesh of the unit square made of axis-aligned square cells.
//
// Every cell lives on an integer lattice: a cell of level l with anchor (i, j)
// covers [i, i+1] x [j, j+1] scaled by h_l = 1 / (n0 * 2^l), where n0 is the
// number of cells per row of the initial grid. Geometry is therefore exact in
// binary floating point, and any mesh line of the initial grid (in particular
// y = 0.5 for even n0) stays a union of cell edges after refinement.

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <variant>
#include <vector>

namespace hpcrack {

struct CellId
{
  std::uint32_t value = 0;

  friend auto operator<=>(const CellId&, const CellId&) = default;
};

enum class Side : std::uint8_t { left = 0, right = 1, bottom = 2, top = 3 };

inline constexpr std::array<Side, 4> all_sides = {Side::left, Side::right, Side::bottom, Side::top};

/// Outer boundary piece a cell face lies on.
enum class BoundaryTag : std::uint8_t { left = 0, right = 1, bottom = 2, top = 3 };

/// Deepest refinement level supported by the integer lattice.
inline constexpr int max_supported_level = 24;

struct Cell
{
  CellId id;
  int level = 0;
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::optional<CellId> parent;
  std::optional<std::array<CellId, 4>> children;  // index = dx + 2 * dy
  bool active = true;
};

/// What lies across one side of an active cell.
struct FaceRef
{
  enum class Kind : std::uint8_t { boundary, same_level, coarser, finer };

  CellId owner;
  Side side = Side::left;
  Kind kind = Kind::boundary;
  /// BoundaryTag, the single same-or-coarser neighbor, or the two finer
  /// neighbors ordered by increasing coordinate along the face.
  std::variant<BoundaryTag, CellId, std::array<CellId, 2>> neighbor;
};

struct Located
{
  CellId cell;
  std::array<double, 2> reference;
};

class DomainError : public std::out_of_range
{
public:
  using std::out_of_range::out_of_range;
};

class QuadMesh
{
public:
  /// Uniform n0 x n0 grid of level-0 cells.
  static QuadMesh create_uniform(int n0);

  /// The 8 x 8 starting grid (h = 1/8) of the crack benchmark.
  static QuadMesh create_initial() { return create_uniform(8); }

  /// Refines every marked active cell plus whatever else is needed to keep
  /// the mesh 1-irregular. Closure is breadth first in (level, i, j) order.
  [[nodiscard]] QuadMesh refine(const std::set<CellId>& marked) const;

  [[nodiscard]] FaceRef neighbor(CellId cell, Side side) const;

  /// Every face of the active mesh exactly once: boundary faces, same-level
  /// faces seen from the left/bottom cell, hanging faces seen from the coarse
  /// cell. Ordered by owner (active order) then side.
  [[nodiscard]] std::vector<FaceRef> faces() const;

  /// Active cell whose closure contains (x, y); ties resolved to the smallest
  /// (level, i, j). Throws DomainError outside [0,1]^2.
  [[nodiscard]] Located locate(double x, double y) const;

  /// All active cells whose closure contains (x, y), sorted by (level, i, j).
  [[nodiscard]] std::vector<CellId> cells_containing(double x, double y) const;

  [[nodiscard]] const Cell& cell(CellId id) const { return cells_.at(id.value); }
  [[nodiscard]] const std::vector<Cell>& cells() const { return cells_; }
  [[nodiscard]] const std::vector<CellId>& active() const { return active_; }
  [[nodiscard]] std::size_t n_active() const { return active_.size(); }
  [[nodiscard]] int base_resolution() const { return n0_; }
  [[nodiscard]] int max_level() const;

  [[nodiscard]] std::optional<CellId> find(int level, std::int64_t i, std::int64_t j) const;

  [[nodiscard]] double h(CellId id) const { return cell_size(cell(id).level); }
  [[nodiscard]] std::array<double, 2> origin(CellId id) const;
  [[nodiscard]] double cell_size(int level) const;

  /// Corner coordinates on the finest supported lattice (exact integers).
  [[nodiscard]] std::array<std::int64_t, 2> lattice_origin(CellId id) const;
  [[nodiscard]] std::int64_t lattice_size(CellId id) const;
  [[nodiscard]] std::int64_t lattice_extent() const;

private:
  QuadMesh() = default;

  static std::uint64_t key(int level, std::int64_t i, std::int64_t j);
  void split(CellId id);
  void rebuild_active_index();
  [[nodiscard]] std::int64_t cells_per_row(int level) const;

  int n0_ = 1;
  std::vector<Cell> cells_;
  std::vector<CellId> active_;
  std::unordered_map<std::uint64_t, CellId> lookup_;
};

/// Ordering used for all deterministic traversals: (level, i, j).
bool cell_order(const QuadMesh& mesh, CellId a, CellId b);

}  // namespace hpcrack

template <>
struct std::hash<hpcrack::CellId>
{
  std::size_t operator()(const hpcrack::CellId& id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
