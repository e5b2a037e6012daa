#include "hpcrack/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <tuple>

namespace hpcrack {

bool cell_order(const QuadMesh& mesh, CellId a, CellId b)
{
  const Cell& ca = mesh.cell(a);
  const Cell& cb = mesh.cell(b);
  return std::tie(ca.level, ca.i, ca.j) < std::tie(cb.level, cb.i, cb.j);
}

QuadMesh QuadMesh::create_uniform(int n0)
{
  if (n0 < 1 || n0 > 32)
    throw std::invalid_argument("initial grid must have between 1 and 32 cells per row");
  QuadMesh mesh;
  mesh.n0_ = n0;
  mesh.cells_.reserve(static_cast<std::size_t>(n0) * n0);
  for (std::int64_t i = 0; i < n0; ++i)
    for (std::int64_t j = 0; j < n0; ++j) {
      Cell c;
      c.id = CellId{static_cast<std::uint32_t>(mesh.cells_.size())};
      c.level = 0;
      c.i = i;
      c.j = j;
      mesh.lookup_.emplace(key(0, i, j), c.id);
      mesh.cells_.push_back(c);
    }
  mesh.rebuild_active_index();
  return mesh;
}

std::uint64_t QuadMesh::key(int level, std::int64_t i, std::int64_t j)
{
  // 6 bits of level, 29 bits per coordinate: enough for n0 * 2^24 <= 2^29.
  return (static_cast<std::uint64_t>(level) << 58) | (static_cast<std::uint64_t>(i) << 29) |
         static_cast<std::uint64_t>(j);
}

std::int64_t QuadMesh::cells_per_row(int level) const { return static_cast<std::int64_t>(n0_) << level; }

double QuadMesh::cell_size(int level) const { return 1.0 / static_cast<double>(cells_per_row(level)); }

std::array<double, 2> QuadMesh::origin(CellId id) const
{
  const Cell& c = cell(id);
  const double h = cell_size(c.level);
  return {static_cast<double>(c.i) * h, static_cast<double>(c.j) * h};
}

std::array<std::int64_t, 2> QuadMesh::lattice_origin(CellId id) const
{
  const Cell& c = cell(id);
  const int shift = max_supported_level - c.level;
  return {c.i << shift, c.j << shift};
}

std::int64_t QuadMesh::lattice_size(CellId id) const
{
  return std::int64_t{1} << (max_supported_level - cell(id).level);
}

std::int64_t QuadMesh::lattice_extent() const { return static_cast<std::int64_t>(n0_) << max_supported_level; }

int QuadMesh::max_level() const
{
  int m = 0;
  for (CellId id : active_)
    m = std::max(m, cell(id).level);
  return m;
}

std::optional<CellId> QuadMesh::find(int level, std::int64_t i, std::int64_t j) const
{
  if (level < 0 || level > max_supported_level || i < 0 || j < 0 || i >= cells_per_row(level) ||
      j >= cells_per_row(level))
    return std::nullopt;
  auto it = lookup_.find(key(level, i, j));
  if (it == lookup_.end())
    return std::nullopt;
  return it->second;
}

void QuadMesh::split(CellId id)
{
  if (cell(id).level >= max_supported_level)
    throw std::length_error("quadtree refinement exceeds the supported depth");
  std::array<CellId, 4> kids{};
  const Cell parent = cell(id);
  for (int dy = 0; dy < 2; ++dy)
    for (int dx = 0; dx < 2; ++dx) {
      Cell c;
      c.id = CellId{static_cast<std::uint32_t>(cells_.size())};
      c.level = parent.level + 1;
      c.i = 2 * parent.i + dx;
      c.j = 2 * parent.j + dy;
      c.parent = id;
      lookup_.emplace(key(c.level, c.i, c.j), c.id);
      kids[static_cast<std::size_t>(dx + 2 * dy)] = c.id;
      cells_.push_back(c);
    }
  cells_[id.value].children = kids;
  cells_[id.value].active = false;
}

void QuadMesh::rebuild_active_index()
{
  active_.clear();
  for (const Cell& c : cells_)
    if (c.active)
      active_.push_back(c.id);
  std::sort(active_.begin(), active_.end(), [this](CellId a, CellId b) { return cell_order(*this, a, b); });
}

QuadMesh QuadMesh::refine(const std::set<CellId>& marked) const
{
  QuadMesh out = *this;
  if (marked.empty())
    return out;

  std::vector<CellId> seeds(marked.begin(), marked.end());
  for (CellId id : seeds)
    if (!cell(id).active)
      throw std::invalid_argument("refine: marked cell " + std::to_string(id.value) + " is not active");
  std::sort(seeds.begin(), seeds.end(), [this](CellId a, CellId b) { return cell_order(*this, a, b); });

  std::deque<CellId> queue(seeds.begin(), seeds.end());
  while (!queue.empty()) {
    const CellId id = queue.front();
    queue.pop_front();
    if (!out.cell(id).active)
      continue;
    const Cell c = out.cell(id);
    // A coarser face neighbor would end up two levels away from the children.
    for (Side side : all_sides) {
      std::int64_t ni = c.i;
      std::int64_t nj = c.j;
      switch (side) {
        case Side::left: --ni; break;
        case Side::right: ++ni; break;
        case Side::bottom: --nj; break;
        case Side::top: ++nj; break;
      }
      const std::int64_t row = out.cells_per_row(c.level);
      if (ni < 0 || nj < 0 || ni >= row || nj >= row)
        continue;
      if (out.find(c.level, ni, nj))
        continue;
      const auto coarse = out.find(c.level - 1, ni / 2, nj / 2);
      if (coarse && out.cell(*coarse).active)
        queue.push_back(*coarse);
    }
    out.split(id);
  }
  out.rebuild_active_index();
  return out;
}

FaceRef QuadMesh::neighbor(CellId id, Side side) const
{
  const Cell& c = cell(id);
  if (!c.active)
    throw std::invalid_argument("neighbor: cell is not active");
  FaceRef face;
  face.owner = id;
  face.side = side;

  std::int64_t ni = c.i;
  std::int64_t nj = c.j;
  switch (side) {
    case Side::left: --ni; break;
    case Side::right: ++ni; break;
    case Side::bottom: --nj; break;
    case Side::top: ++nj; break;
  }
  const std::int64_t row = cells_per_row(c.level);
  if (ni < 0 || nj < 0 || ni >= row || nj >= row) {
    face.kind = FaceRef::Kind::boundary;
    face.neighbor = static_cast<BoundaryTag>(static_cast<std::uint8_t>(side));
    return face;
  }

  if (const auto same = find(c.level, ni, nj)) {
    const Cell& n = cell(*same);
    if (n.active) {
      face.kind = FaceRef::Kind::same_level;
      face.neighbor = *same;
      return face;
    }
    // The two children of n touching the shared face.
    const auto& kids = *n.children;
    std::array<CellId, 2> pair{};
    switch (side) {
      case Side::left: pair = {kids[1], kids[3]}; break;
      case Side::right: pair = {kids[0], kids[2]}; break;
      case Side::bottom: pair = {kids[2], kids[3]}; break;
      case Side::top: pair = {kids[0], kids[1]}; break;
    }
    if (!cell(pair[0]).active || !cell(pair[1]).active)
      throw std::logic_error("neighbor: mesh is not 1-irregular");
    face.kind = FaceRef::Kind::finer;
    face.neighbor = pair;
    return face;
  }

  const auto coarse = find(c.level - 1, ni / 2, nj / 2);
  if (!coarse || !cell(*coarse).active)
    throw std::logic_error("neighbor: mesh is not 1-irregular");
  face.kind = FaceRef::Kind::coarser;
  face.neighbor = *coarse;
  return face;
}

std::vector<FaceRef> QuadMesh::faces() const
{
  std::vector<FaceRef> out;
  for (CellId id : active_)
    for (Side side : all_sides) {
      FaceRef f = neighbor(id, side);
      const bool keep = f.kind == FaceRef::Kind::boundary || f.kind == FaceRef::Kind::finer ||
                        (f.kind == FaceRef::Kind::same_level && (side == Side::right || side == Side::top));
      if (keep)
        out.push_back(f);
    }
  return out;
}

std::vector<CellId> QuadMesh::cells_containing(double x, double y) const
{
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
    throw DomainError("point (" + std::to_string(x) + ", " + std::to_string(y) + ") outside the unit square");

  auto contains = [this](CellId id, double px, double py) {
    const auto o = origin(id);
    const double hh = h(id);
    return px >= o[0] && px <= o[0] + hh && py >= o[1] && py <= o[1] + hh;
  };

  std::vector<CellId> found;
  std::vector<CellId> stack;
  const double scaled_x = x * n0_;
  const double scaled_y = y * n0_;
  const auto i0 = static_cast<std::int64_t>(std::floor(scaled_x));
  const auto j0 = static_cast<std::int64_t>(std::floor(scaled_y));
  for (std::int64_t i = i0 - 1; i <= i0; ++i)
    for (std::int64_t j = j0 - 1; j <= j0; ++j)
      if (auto id = find(0, i, j); id && contains(*id, x, y))
        stack.push_back(*id);

  while (!stack.empty()) {
    const CellId id = stack.back();
    stack.pop_back();
    const Cell& c = cell(id);
    if (c.active) {
      found.push_back(id);
      continue;
    }
    for (CellId kid : *c.children)
      if (contains(kid, x, y))
        stack.push_back(kid);
  }
  std::sort(found.begin(), found.end(), [this](CellId a, CellId b) { return cell_order(*this, a, b); });
  found.erase(std::unique(found.begin(), found.end()), found.end());
  return found;
}

Located QuadMesh::locate(double x, double y) const
{
  const auto candidates = cells_containing(x, y);
  if (candidates.empty())
    throw DomainError("locate: no active cell contains the point");
  const CellId id = candidates.front();
  const auto o = origin(id);
  const double hh = h(id);
  return {id, {(x - o[0]) / hh, (y - o[1]) / hh}};
}

}  // namespace hpcrack
