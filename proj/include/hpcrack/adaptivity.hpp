#pragma once

// ESTIMATE -> MARK -> REFINE: face-jump error indicators on the nonlinear
// flux, projection-based smoothness ratios, bulk marking split into h and p
// sets, and interpolation of the solution onto the refined space.

#include <set>
#include <utility>
#include <vector>

#include "hpcrack/constitutive.hpp"
#include "hpcrack/hp_space.hpp"

namespace hpcrack {

struct ErrorIndicators
{
  std::vector<double> eta;  // indexed by CellId, zero for inactive cells
  double eta_total = 0.0;

  [[nodiscard]] double operator[](CellId id) const { return eta.at(id.value); }
};

struct SmoothnessIndicators
{
  std::vector<double> sigma;  // indexed by CellId

  [[nodiscard]] double operator[](CellId id) const { return sigma.at(id.value); }
};

struct RefinementPlan
{
  std::set<CellId> h_set;
  std::set<CellId> p_set;
};

struct MarkingParams
{
  double theta_h = 0.2;
  double theta_p = 0.1;
  double tau_smooth = 0.15;
  int p_max = 7;
  /// Cells at this level are never h-refined; negative disables the cap.
  int max_level = 8;
  /// Cells whose indicator is within this relative distance of the last
  /// marked cell are marked too, so mirror-image cells are treated alike.
  double tie_tolerance = 1e-6;

  void validate() const;
};

/// eta_K^2 = sum over interior, non-slit faces F of K of
///   h_F / (2 p_F) * int_F [[Psi1(|grad u|) grad u . n]]^2 ds.
ErrorIndicators kelly_indicators(const HpSpace& space, const ModelParams& params, const SolutionField& phi);

/// sigma_K = |u - P_{p-1} u|_{L2(K)} / |u - P_0 u|_{L2(K)} with local L2
/// projections onto tensor polynomials; zero for p = 1 or (near) constant u.
SmoothnessIndicators smoothness_indicators(const HpSpace& space, const SolutionField& phi,
                                           const std::vector<CellId>& cells);

/// Smallest prefix of the cells sorted by eta (descending, ties by id) whose
/// squared sum reaches (theta_h + theta_p)^2 eta_total^2, routed to p when
/// sigma > tau_smooth and p < p_max, otherwise to h.
RefinementPlan mark(const HpSpace& space, const ErrorIndicators& eta, const SmoothnessIndicators& sigma,
                    const MarkingParams& params);

/// Cells whose eta reaches the bulk threshold, before routing.
std::vector<CellId> bulk_flag(const QuadMesh& mesh, const ErrorIndicators& eta, double fraction,
                              double tie_tolerance);

/// Applies the plan: p-set degrees go up by one, then h-set cells are split
/// (with closure); children inherit their parent's degree.
std::pair<QuadMesh, DegreeMap> execute(const QuadMesh& mesh, const DegreeMap& degrees, const RefinementPlan& plan);

/// Nodal interpolation of the old field onto the new space, constraints distributed.
SolutionField transfer(const HpSpace& old_space, const SolutionField& phi, const HpSpace& new_space);

}  // namespace hpcrack
