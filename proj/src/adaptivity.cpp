#include "hpcrack/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

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

std::array<double, 2> side_point(Side side, double t)
{
  switch (side) {
    case Side::left: return {0.0, t};
    case Side::right: return {1.0, t};
    case Side::bottom: return {t, 0.0};
    case Side::top: return {t, 1.0};
  }
  return {t, t};
}

Eigen::Vector2d outward_normal(Side side)
{
  switch (side) {
    case Side::left: return {-1.0, 0.0};
    case Side::right: return {1.0, 0.0};
    case Side::bottom: return {0.0, -1.0};
    case Side::top: return {0.0, 1.0};
  }
  return {0.0, 0.0};
}

Eigen::Vector2d flux(const Eigen::Vector2d& grad, const ModelParams& params)
{
  return psi1(std::hypot(grad.x(), grad.y()), params) * grad;
}

}  // namespace

void MarkingParams::validate() const
{
  if (!(theta_h > 0.0 && theta_h < 1.0 && theta_p > 0.0 && theta_p < 1.0))
    throw std::invalid_argument("theta_h and theta_p must lie in (0, 1)");
  if (!(theta_h + theta_p < 1.0))
    throw std::invalid_argument("theta_h + theta_p must be less than 1");
  if (!(tau_smooth >= 0.0))
    throw std::invalid_argument("tau_smooth must be non-negative");
  if (p_max < 1 || p_max > max_degree)
    throw std::invalid_argument("p_max must lie in [1, 7]");
}

ErrorIndicators kelly_indicators(const HpSpace& space, const ModelParams& params, const SolutionField& phi)
{
  const auto& mesh = space.mesh();
  std::vector<double> eta2(mesh.cells().size(), 0.0);

  auto face_piece = [&](CellId a, Side side_a, double t0, double t1, CellId b) {
    const Side side_b = opposite(side_a);
    const int pa = space.degree(a);
    const int pb = space.degree(b);
    const int pf = std::max(pa, pb);
    const double ha = mesh.h(a);
    const double hf = (t1 - t0) * ha;
    const auto oa = mesh.origin(a);
    const auto ob = mesh.origin(b);
    const double hb = mesh.h(b);
    const Eigen::Vector2d n = outward_normal(side_a);
    const auto& rule = gauss_1d(pf + 2);
    double integral = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double ta = t0 + (t1 - t0) * rule.points[q];
      const auto ra = side_point(side_a, ta);
      const double x = oa[0] + ha * ra[0];
      const double y = oa[1] + ha * ra[1];
      // Reference coordinates in b; the normal coordinate is pinned to the side.
      auto rb = std::array<double, 2>{(x - ob[0]) / hb, (y - ob[1]) / hb};
      const auto pin = side_point(side_b, 0.0);
      if (side_b == Side::left || side_b == Side::right)
        rb[0] = pin[0];
      else
        rb[1] = pin[1];
      const Eigen::Vector2d fa = flux(space.evaluate(phi, a, ra).gradient, params);
      const Eigen::Vector2d fb = flux(space.evaluate(phi, b, rb).gradient, params);
      const double jump = (fa - fb).dot(n);
      integral += rule.weights[q] * hf * jump * jump;
    }
    const double contribution = hf / (2.0 * pf) * integral;
    eta2[a.value] += contribution;
    eta2[b.value] += contribution;
  };

  for (const FaceRef& f : mesh.faces()) {
    if (f.kind == FaceRef::Kind::boundary)
      continue;
    if (dirichlet_part(mesh, f.owner, f.side, space.problem().slit) == DirichletPart::slit)
      continue;
    if (f.kind == FaceRef::Kind::same_level) {
      face_piece(f.owner, f.side, 0.0, 1.0, std::get<CellId>(f.neighbor));
    } else {
      const auto kids = std::get<std::array<CellId, 2>>(f.neighbor);
      face_piece(f.owner, f.side, 0.0, 0.5, kids[0]);
      face_piece(f.owner, f.side, 0.5, 1.0, kids[1]);
    }
  }

  ErrorIndicators out;
  out.eta.resize(eta2.size());
  double total = 0.0;
  for (std::size_t k = 0; k < eta2.size(); ++k) {
    out.eta[k] = std::sqrt(eta2[k]);
    total += eta2[k];
  }
  out.eta_total = std::sqrt(total);
  return out;
}

SmoothnessIndicators smoothness_indicators(const HpSpace& space, const SolutionField& phi,
                                           const std::vector<CellId>& cells)
{
  const auto& mesh = space.mesh();
  SmoothnessIndicators out;
  out.sigma.assign(mesh.cells().size(), 0.0);
  for (CellId id : cells) {
    const int p = space.degree(id);
    if (p < 2)
      continue;
    // Coefficients in the tensor basis of shifted Legendre polynomials;
    // p+1 Gauss points integrate u * L_i exactly.
    const int nq = p + 1;
    const auto& tab = tabulate(p, nq);
    const auto& rule = gauss_1d(nq);
    const auto& local = space.dofs().cell_dofs[id.value];

    std::vector<double> u(static_cast<std::size_t>(nq * nq), 0.0);
    for (int qj = 0; qj < nq; ++qj)
      for (int qi = 0; qi < nq; ++qi) {
        double v = 0.0;
        for (int b = 0; b <= p; ++b)
          for (int a = 0; a <= p; ++a)
            v += phi[local[static_cast<std::size_t>(a + (p + 1) * b)]] *
                 tab.values[static_cast<std::size_t>(qi)][static_cast<std::size_t>(a)] *
                 tab.values[static_cast<std::size_t>(qj)][static_cast<std::size_t>(b)];
        u[static_cast<std::size_t>(qi + nq * qj)] = v;
      }

    double top = 0.0;
    double nonconstant = 0.0;
    for (int j = 0; j <= p; ++j)
      for (int i = 0; i <= p; ++i) {
        double c = 0.0;
        for (int qj = 0; qj < nq; ++qj)
          for (int qi = 0; qi < nq; ++qi) {
            const double li = legendre(i, 2.0 * rule.points[static_cast<std::size_t>(qi)] - 1.0)[0];
            const double lj = legendre(j, 2.0 * rule.points[static_cast<std::size_t>(qj)] - 1.0)[0];
            c += rule.weights[static_cast<std::size_t>(qi)] * rule.weights[static_cast<std::size_t>(qj)] *
                 u[static_cast<std::size_t>(qi + nq * qj)] * li * lj;
          }
        // c = <u, L_i L_j>; |L_i L_j|^2 = 1 / ((2i+1)(2j+1)).
        const double energy = c * c * (2.0 * i + 1.0) * (2.0 * j + 1.0);
        if (i != 0 || j != 0)
          nonconstant += energy;
        if (std::max(i, j) > p - 1)
          top += energy;
      }
    const double h = mesh.h(id);
    const double denom = h * std::sqrt(nonconstant);
    out.sigma[id.value] = denom < 1e-14 ? 0.0 : std::sqrt(top / nonconstant);
  }
  return out;
}

std::vector<CellId> bulk_flag(const QuadMesh& mesh, const ErrorIndicators& eta, double fraction,
                              double tie_tolerance)
{
  std::vector<CellId> order = mesh.active();
  std::stable_sort(order.begin(), order.end(), [&eta](CellId a, CellId b) {
    if (eta[a] != eta[b])
      return eta[a] > eta[b];
    return a < b;
  });
  double total = 0.0;
  for (CellId id : order)
    total += eta[id] * eta[id];
  if (total <= 0.0)
    return {};
  const double target = fraction * fraction * total;
  std::vector<CellId> flagged;
  double acc = 0.0;
  std::size_t k = 0;
  for (; k < order.size() && acc < target; ++k) {
    acc += eta[order[k]] * eta[order[k]];
    flagged.push_back(order[k]);
  }
  const double last = eta[flagged.back()];
  for (; k < order.size() && eta[order[k]] >= last * (1.0 - tie_tolerance); ++k)
    flagged.push_back(order[k]);
  return flagged;
}

RefinementPlan mark(const HpSpace& space, const ErrorIndicators& eta, const SmoothnessIndicators& sigma,
                    const MarkingParams& params)
{
  params.validate();
  const auto& mesh = space.mesh();
  RefinementPlan plan;
  for (CellId id : bulk_flag(mesh, eta, params.theta_h + params.theta_p, params.tie_tolerance)) {
    const int p = space.degree(id);
    const bool can_p = p < params.p_max;
    const bool can_h = params.max_level < 0 || mesh.cell(id).level < params.max_level;
    const bool prefers_p = sigma[id] > params.tau_smooth;
    if (can_p && (prefers_p || !can_h))
      plan.p_set.insert(id);
    else if (can_h)
      plan.h_set.insert(id);
  }
  return plan;
}

std::pair<QuadMesh, DegreeMap> execute(const QuadMesh& mesh, const DegreeMap& degrees, const RefinementPlan& plan)
{
  DegreeMap next = degrees;
  for (CellId id : plan.p_set)
    next.set(id, degrees[id] + 1);
  QuadMesh refined = mesh.refine(plan.h_set);
  next.extend_to(refined);
  return {std::move(refined), std::move(next)};
}

SolutionField transfer(const HpSpace& old_space, const SolutionField& phi, const HpSpace& new_space)
{
  const auto& old_mesh = old_space.mesh();
  const auto& new_mesh = new_space.mesh();
  const auto& dofs = new_space.dofs();
  const std::size_t old_count = old_mesh.cells().size();

  SolutionField out = SolutionField::Zero(static_cast<Eigen::Index>(dofs.n_dofs));
  std::vector<bool> done(dofs.n_dofs, false);

  for (CellId id : new_mesh.active()) {
    CellId source = id;
    while (source.value >= old_count || !old_mesh.cell(source).active)
      source = *new_mesh.cell(source).parent;
    const auto o = old_mesh.origin(source);
    const double h = old_mesh.h(source);
    for (DofIndex dof : dofs.cell_dofs[id.value]) {
      if (done[dof])
        continue;
      const auto& pt = dofs.support_points[dof];
      out[dof] = old_space.evaluate(phi, source, {(pt[0] - o[0]) / h, (pt[1] - o[1]) / h}).value;
      done[dof] = true;
    }
  }
  for (std::size_t i = dofs.n_cell_dofs; i < dofs.n_dofs; ++i) {
    const auto& pt = dofs.support_points[i];
    out[static_cast<Eigen::Index>(i)] = old_space.evaluate_at(phi, pt[0], pt[1]).value;
  }
  new_space.constraints().distribute(out);
  return out;
}

}  // namespace hpcrack
