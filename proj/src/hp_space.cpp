#include "hpcrack/hp_space.hpp"

#include <algorithm>
#include <string>
#include <tuple>

namespace hpcrack {

namespace {

Side opposite(Side s)
{
  switch (s) {
    case Side::left: return Side::right;
    case Side::right: return Side::left;
    case Side::bottom: return Side::top;
    case Side::top: return Side::bottom;
  }
  return s;
}

std::vector<DofIndex> global_side_dofs(const DofHandler& dofs, CellId cell, int p, Side side)
{
  std::vector<DofIndex> out;
  for (int local : side_nodes(p, side))
    out.push_back(dofs.cell_dofs[cell.value][static_cast<std::size_t>(local)]);
  return out;
}

/// Point at parameter t in [0,1] along one side of a cell.
std::array<double, 2> point_on_side(const QuadMesh& mesh, CellId cell, Side side, double t)
{
  const auto o = mesh.origin(cell);
  const double h = mesh.h(cell);
  switch (side) {
    case Side::left: return {o[0], o[1] + h * t};
    case Side::right: return {o[0] + h, o[1] + h * t};
    case Side::bottom: return {o[0] + h * t, o[1]};
    case Side::top: return {o[0] + h * t, o[1] + h};
  }
  return o;
}

}  // namespace

// ---------------------------------------------------------------- DegreeMap

DegreeMap::DegreeMap(const QuadMesh& mesh, int uniform_degree) : degree_(mesh.cells().size(), uniform_degree)
{
  if (uniform_degree < 1 || uniform_degree > max_degree)
    throw std::invalid_argument("degree must lie in [1, 7]");
}

void DegreeMap::set(CellId id, int p)
{
  if (p < 1 || p > max_degree)
    throw std::invalid_argument("degree must lie in [1, 7]");
  degree_.at(id.value) = p;
}

void DegreeMap::extend_to(const QuadMesh& mesh)
{
  const auto& cells = mesh.cells();
  for (std::size_t k = degree_.size(); k < cells.size(); ++k) {
    const auto& parent = cells[k].parent;
    degree_.push_back(parent ? degree_.at(parent->value) : 1);
  }
}

int DegreeMap::max_degree_on(const QuadMesh& mesh) const
{
  int m = 0;
  for (CellId id : mesh.active())
    m = std::max(m, (*this)[id]);
  return m;
}

// ------------------------------------------------------------ ConstraintSet

ConstraintSet::ConstraintSet(std::size_t n_dofs, std::map<DofIndex, Entry> entries)
    : entries_(std::move(entries)), free_index_(n_dofs, 0)
{
  for (const auto& [dof, e] : entries_)
    free_index_.at(dof) = -1;
  long next = 0;
  for (std::size_t i = 0; i < n_dofs; ++i)
    if (free_index_[i] >= 0) {
      free_index_[i] = next++;
      free_dofs_.push_back(static_cast<DofIndex>(i));
    }
  for (const auto& [dof, e] : entries_)
    for (const auto& [m, w] : e.masters)
      if (free_index_.at(m) < 0)
        throw ConstraintError("constraint on DOF " + std::to_string(dof) + " has constrained master " +
                              std::to_string(m));
}

void ConstraintSet::distribute(Eigen::VectorXd& full) const
{
  for (const auto& [dof, e] : entries_) {
    double v = e.inhomogeneity;
    for (const auto& [m, w] : e.masters)
      v += w * full[m];
    full[dof] = v;
  }
}

Eigen::VectorXd ConstraintSet::expand(const Eigen::VectorXd& free, bool homogeneous) const
{
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_dofs()));
  for (std::size_t k = 0; k < free_dofs_.size(); ++k)
    full[free_dofs_[k]] = free[static_cast<Eigen::Index>(k)];
  for (const auto& [dof, e] : entries_) {
    double v = homogeneous ? 0.0 : e.inhomogeneity;
    for (const auto& [m, w] : e.masters)
      v += w * full[m];
    full[dof] = v;
  }
  return full;
}

Eigen::VectorXd ConstraintSet::restrict_to_free(const Eigen::VectorXd& full) const
{
  Eigen::VectorXd out(static_cast<Eigen::Index>(free_dofs_.size()));
  for (std::size_t k = 0; k < free_dofs_.size(); ++k)
    out[static_cast<Eigen::Index>(k)] = full[free_dofs_[k]];
  return out;
}

// ----------------------------------------------------------- basis helpers

ShapeValue shape_eval(int p, int node, std::array<double, 2> ref)
{
  const auto& basis = lagrange_basis(p);
  const int a = node % (p + 1);
  const int b = node / (p + 1);
  const double va = basis.value(a, ref[0]);
  const double vb = basis.value(b, ref[1]);
  ShapeValue out;
  out.value = va * vb;
  out.gradient = {basis.derivative(a, ref[0]) * vb, va * basis.derivative(b, ref[1])};
  return out;
}

QuadratureRule gauss_rule(int n)
{
  const auto& g = gauss_1d(n);
  QuadratureRule rule;
  for (std::size_t j = 0; j < g.points.size(); ++j)
    for (std::size_t i = 0; i < g.points.size(); ++i) {
      rule.points.push_back({g.points[i], g.points[j]});
      rule.weights.push_back(g.weights[i] * g.weights[j]);
    }
  return rule;
}

std::vector<int> side_nodes(int p, Side side)
{
  std::vector<int> out;
  for (int k = 0; k <= p; ++k)
    switch (side) {
      case Side::left: out.push_back(k * (p + 1)); break;
      case Side::right: out.push_back(p + k * (p + 1)); break;
      case Side::bottom: out.push_back(k); break;
      case Side::top: out.push_back(k + p * (p + 1)); break;
    }
  return out;
}

std::optional<DirichletPart> dirichlet_part(const QuadMesh& mesh, CellId cell, Side side, bool slit)
{
  const auto o = mesh.lattice_origin(cell);
  const std::int64_t len = mesh.lattice_size(cell);
  const std::int64_t extent = mesh.lattice_extent();
  switch (side) {
    case Side::left:
      if (o[0] == 0)
        return DirichletPart::left;
      break;
    case Side::right:
      if (o[0] + len == extent)
        return DirichletPart::right;
      break;
    case Side::bottom:
      if (o[1] == 0)
        return DirichletPart::bottom;
      break;
    case Side::top:
      if (o[1] + len == extent)
        return DirichletPart::top;
      break;
  }
  if (slit && (side == Side::bottom || side == Side::top)) {
    const std::int64_t y = side == Side::bottom ? o[1] : o[1] + len;
    if (2 * y == extent && 2 * o[0] >= extent)
      return DirichletPart::slit;
  }
  return std::nullopt;
}

// ---------------------------------------------------------- DOF numbering

DofHandler distribute_dofs(const QuadMesh& mesh, const DegreeMap& degrees)
{
  DofHandler d;
  d.cell_dofs.resize(mesh.cells().size());

  std::map<std::pair<std::int64_t, std::int64_t>, DofIndex> vertices;
  // (vertical?, x, y, length, degree) -> first of the p-1 interior edge DOFs
  std::map<std::tuple<int, std::int64_t, std::int64_t, std::int64_t, int>, DofIndex> edges;

  auto new_dof = [&d](double x, double y) {
    d.support_points.push_back({x, y});
    return static_cast<DofIndex>(d.support_points.size() - 1);
  };

  for (CellId id : mesh.active()) {
    const int p = degrees[id];
    const auto& g = gll_nodes(p);
    const auto lo = mesh.lattice_origin(id);
    const std::int64_t len = mesh.lattice_size(id);
    const auto o = mesh.origin(id);
    const double h = mesh.h(id);
    auto& local = d.cell_dofs[id.value];
    local.resize(static_cast<std::size_t>((p + 1) * (p + 1)));

    for (int b = 0; b <= p; ++b)
      for (int a = 0; a <= p; ++a) {
        const bool on_x = a == 0 || a == p;
        const bool on_y = b == 0 || b == p;
        DofIndex dof = 0;
        if (on_x && on_y) {
          const auto key = std::make_pair(lo[0] + (a ? len : 0), lo[1] + (b ? len : 0));
          auto it = vertices.find(key);
          if (it == vertices.end())
            it = vertices.emplace(key, new_dof(o[0] + (a ? h : 0.0), o[1] + (b ? h : 0.0))).first;
          dof = it->second;
        } else if (on_x) {
          const std::int64_t x = lo[0] + (a ? len : 0);
          const auto key = std::make_tuple(1, x, lo[1], len, p);
          auto it = edges.find(key);
          if (it == edges.end()) {
            const double xe = o[0] + (a ? h : 0.0);
            const DofIndex first = new_dof(xe, o[1] + h * g[1]);
            for (int k = 2; k < p; ++k)
              new_dof(xe, o[1] + h * g[static_cast<std::size_t>(k)]);
            it = edges.emplace(key, first).first;
          }
          dof = it->second + static_cast<DofIndex>(b - 1);
        } else if (on_y) {
          const std::int64_t y = lo[1] + (b ? len : 0);
          const auto key = std::make_tuple(0, lo[0], y, len, p);
          auto it = edges.find(key);
          if (it == edges.end()) {
            const double ye = o[1] + (b ? h : 0.0);
            const DofIndex first = new_dof(o[0] + h * g[1], ye);
            for (int k = 2; k < p; ++k)
              new_dof(o[0] + h * g[static_cast<std::size_t>(k)], ye);
            it = edges.emplace(key, first).first;
          }
          dof = it->second + static_cast<DofIndex>(a - 1);
        } else {
          dof = new_dof(o[0] + h * g[static_cast<std::size_t>(a)], o[1] + h * g[static_cast<std::size_t>(b)]);
        }
        local[static_cast<std::size_t>(a + (p + 1) * b)] = dof;
      }
  }
  d.n_cell_dofs = d.support_points.size();

  // Trace DOFs for hanging faces whose coarse side is not the lowest degree.
  for (const FaceRef& f : mesh.faces()) {
    if (f.kind != FaceRef::Kind::finer)
      continue;
    const auto kids = std::get<std::array<CellId, 2>>(f.neighbor);
    const int pc = degrees[f.owner];
    const int q = std::min({pc, degrees[kids[0]], degrees[kids[1]]});
    if (pc == q || q < 2)
      continue;
    const auto& g = gll_nodes(q);
    std::vector<DofIndex> face;
    for (int k = 1; k < q; ++k) {
      const auto pt = point_on_side(mesh, f.owner, f.side, g[static_cast<std::size_t>(k)]);
      face.push_back(new_dof(pt[0], pt[1]));
    }
    d.face_dofs.emplace(std::make_pair(f.owner.value, static_cast<int>(f.side)), std::move(face));
  }
  d.n_dofs = d.support_points.size();
  return d;
}

// ------------------------------------------------------------ constraints

ConstraintSet build_constraints(const QuadMesh& mesh, const DegreeMap& degrees, const DofHandler& dofs,
                                const Problem& problem)
{
  std::map<DofIndex, double> dirichlet;
  for (CellId id : mesh.active()) {
    const int p = degrees[id];
    for (Side side : all_sides) {
      const auto part = dirichlet_part(mesh, id, side, problem.slit);
      if (!part)
        continue;
      for (DofIndex dof : global_side_dofs(dofs, id, p, side))
        if (!dirichlet.contains(dof)) {
          const auto& pt = dofs.support_points[dof];
          dirichlet.emplace(dof, problem.dirichlet(pt[0], pt[1], *part));
        }
    }
  }

  // Trace DOFs of hanging faces on the slit are Dirichlet as well.
  if (problem.slit)
    for (const auto& [key, face] : dofs.face_dofs) {
      const CellId owner{key.first};
      const auto side = static_cast<Side>(key.second);
      if (const auto part = dirichlet_part(mesh, owner, side, true))
        for (DofIndex dof : face) {
          const auto& pt = dofs.support_points[dof];
          dirichlet.emplace(dof, problem.dirichlet(pt[0], pt[1], *part));
        }
    }

  std::map<DofIndex, std::vector<std::pair<DofIndex, double>>> raw;
  auto constrain = [&](DofIndex dof, const std::vector<DofIndex>& masters, int q, double t) {
    if (dirichlet.contains(dof) || raw.contains(dof))
      return;
    const auto& basis = lagrange_basis(q);
    std::vector<std::pair<DofIndex, double>> row;
    for (int k = 0; k <= q; ++k) {
      const double w = basis.value(k, t);
      if (w != 0.0)
        row.emplace_back(masters[static_cast<std::size_t>(k)], w);
    }
    raw.emplace(dof, std::move(row));
  };

  for (const FaceRef& f : mesh.faces()) {
    if (f.kind == FaceRef::Kind::boundary)
      continue;
    if (dirichlet_part(mesh, f.owner, f.side, problem.slit))
      continue;
    const int pc = degrees[f.owner];

    if (f.kind == FaceRef::Kind::same_level) {
      const CellId other = std::get<CellId>(f.neighbor);
      const int pn = degrees[other];
      if (pc == pn)
        continue;
      // Minimum-degree rule: the higher side follows the lower side's trace.
      const bool owner_low = pc < pn;
      const CellId lo = owner_low ? f.owner : other;
      const CellId hi = owner_low ? other : f.owner;
      const Side lo_side = owner_low ? f.side : opposite(f.side);
      const Side hi_side = opposite(lo_side);
      const int q = std::min(pc, pn);
      const int ph = std::max(pc, pn);
      const auto masters = global_side_dofs(dofs, lo, q, lo_side);
      const auto slaves = global_side_dofs(dofs, hi, ph, hi_side);
      const auto& g = gll_nodes(ph);
      for (int k = 1; k < ph; ++k)
        constrain(slaves[static_cast<std::size_t>(k)], masters, q, g[static_cast<std::size_t>(k)]);
      continue;
    }

    // Hanging face seen from the coarse cell.
    const auto kids = std::get<std::array<CellId, 2>>(f.neighbor);
    const int p0 = degrees[kids[0]];
    const int p1 = degrees[kids[1]];
    const int q = std::min({pc, p0, p1});
    const auto coarse = global_side_dofs(dofs, f.owner, pc, f.side);
    std::vector<DofIndex> masters;
    if (pc == q) {
      masters = coarse;
    } else {
      masters.push_back(coarse.front());
      if (q >= 2) {
        const auto& face = dofs.face_dofs.at(std::make_pair(f.owner.value, static_cast<int>(f.side)));
        masters.insert(masters.end(), face.begin(), face.end());
      }
      masters.push_back(coarse.back());
      const auto& g = gll_nodes(pc);
      for (int k = 1; k < pc; ++k)
        constrain(coarse[static_cast<std::size_t>(k)], masters, q, g[static_cast<std::size_t>(k)]);
    }
    const Side fine_side = opposite(f.side);
    const auto fine0 = global_side_dofs(dofs, kids[0], p0, fine_side);
    const auto fine1 = global_side_dofs(dofs, kids[1], p1, fine_side);
    const auto& g0 = gll_nodes(p0);
    const auto& g1 = gll_nodes(p1);
    for (int k = 1; k <= p0; ++k)
      constrain(fine0[static_cast<std::size_t>(k)], masters, q, 0.5 * g0[static_cast<std::size_t>(k)]);
    for (int k = 0; k < p1; ++k)
      constrain(fine1[static_cast<std::size_t>(k)], masters, q, 0.5 + 0.5 * g1[static_cast<std::size_t>(k)]);
  }

  // Resolve chains so that every master is free; Dirichlet values fold into
  // the inhomogeneity.
  std::map<DofIndex, ConstraintSet::Entry> resolved;
  std::map<DofIndex, int> state;  // 1 = in progress, 2 = done
  std::function<const ConstraintSet::Entry&(DofIndex)> resolve = [&](DofIndex dof) -> const ConstraintSet::Entry& {
    auto& st = state[dof];
    if (st == 2)
      return resolved.at(dof);
    if (st == 1)
      throw ConstraintError("constraint cycle through DOF " + std::to_string(dof));
    st = 1;
    std::map<DofIndex, double> acc;
    double inhom = 0.0;
    for (const auto& [m, w] : raw.at(dof)) {
      if (auto it = dirichlet.find(m); it != dirichlet.end()) {
        inhom += w * it->second;
      } else if (raw.contains(m)) {
        const auto& sub = resolve(m);
        inhom += w * sub.inhomogeneity;
        for (const auto& [mm, ww] : sub.masters)
          acc[mm] += w * ww;
      } else {
        acc[m] += w;
      }
    }
    ConstraintSet::Entry e;
    e.inhomogeneity = inhom;
    for (const auto& [m, w] : acc)
      if (w != 0.0)
        e.masters.emplace_back(m, w);
    state[dof] = 2;
    return resolved.emplace(dof, std::move(e)).first->second;
  };
  for (const auto& [dof, row] : raw)
    resolve(dof);

  for (const auto& [dof, value] : dirichlet) {
    ConstraintSet::Entry e;
    e.inhomogeneity = value;
    e.dirichlet = true;
    resolved[dof] = std::move(e);
  }
  return ConstraintSet(dofs.n_dofs, std::move(resolved));
}

// --------------------------------------------------------------- evaluation

PointValue evaluate(const QuadMesh& mesh, const DegreeMap& degrees, const DofHandler& dofs,
                    std::span<const double> coeffs, CellId cell, std::array<double, 2> ref)
{
  const int p = degrees[cell];
  const auto& basis = lagrange_basis(p);
  std::array<double, max_degree + 1> vs{};
  std::array<double, max_degree + 1> ds{};
  std::array<double, max_degree + 1> vt{};
  std::array<double, max_degree + 1> dt{};
  for (int k = 0; k <= p; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    vs[ku] = basis.value(k, ref[0]);
    ds[ku] = basis.derivative(k, ref[0]);
    vt[ku] = basis.value(k, ref[1]);
    dt[ku] = basis.derivative(k, ref[1]);
  }
  const auto& local = dofs.cell_dofs[cell.value];
  PointValue out;
  double gs = 0.0;
  double gt = 0.0;
  for (int b = 0; b <= p; ++b)
    for (int a = 0; a <= p; ++a) {
      const double c = coeffs[local[static_cast<std::size_t>(a + (p + 1) * b)]];
      const auto au = static_cast<std::size_t>(a);
      const auto bu = static_cast<std::size_t>(b);
      out.value += c * vs[au] * vt[bu];
      gs += c * ds[au] * vt[bu];
      gt += c * vs[au] * dt[bu];
    }
  const double h = mesh.h(cell);
  out.gradient = {gs / h, gt / h};
  return out;
}

// ------------------------------------------------------------------ HpSpace

HpSpace::HpSpace(QuadMesh mesh, DegreeMap degrees, Problem problem)
    : mesh_(std::move(mesh)), degrees_(std::move(degrees)), problem_(std::move(problem))
{
  degrees_.extend_to(mesh_);
  for (CellId id : mesh_.active())
    if (degrees_[id] < 1 || degrees_[id] > max_degree)
      throw std::invalid_argument("degree must lie in [1, 7]");
  dofs_ = distribute_dofs(mesh_, degrees_);
  constraints_ = build_constraints(mesh_, degrees_, dofs_, problem_);
}

SolutionField HpSpace::interpolate(const std::function<double(double, double)>& f) const
{
  SolutionField v(static_cast<Eigen::Index>(dofs_.n_dofs));
  for (std::size_t i = 0; i < dofs_.n_dofs; ++i)
    v[static_cast<Eigen::Index>(i)] = f(dofs_.support_points[i][0], dofs_.support_points[i][1]);
  constraints_.distribute(v);
  return v;
}

SolutionField HpSpace::lift() const
{
  SolutionField v = SolutionField::Zero(static_cast<Eigen::Index>(dofs_.n_dofs));
  constraints_.distribute(v);
  return v;
}

PointValue HpSpace::evaluate(const SolutionField& coeffs, CellId cell, std::array<double, 2> ref) const
{
  return hpcrack::evaluate(mesh_, degrees_, dofs_, std::span<const double>(coeffs.data(), coeffs.size()), cell,
                           ref);
}

PointValue HpSpace::evaluate_at(const SolutionField& coeffs, double x, double y) const
{
  const auto loc = mesh_.locate(x, y);
  return evaluate(coeffs, loc.cell, loc.reference);
}

std::array<double, 2> HpSpace::map_to_physical(CellId cell, std::array<double, 2> ref) const
{
  const auto o = mesh_.origin(cell);
  const double h = mesh_.h(cell);
  return {o[0] + h * ref[0], o[1] + h * ref[1]};
}

}  // namespace hpcrack
