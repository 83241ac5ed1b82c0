#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "newton/newton_map.hpp"
#include "newton/rational_angle.hpp"

namespace newton {

/// Conformal coordinate data for one Fatou component of the root basins.
/// Immediate (fixed) components carry a local power series at the
/// superattracting center; preimage components evaluate through their image
/// component. The coordinate conjugates f to w -> w^degree.
struct BoettcherChart {
  int component = -1;
  cplx center;
  int degree = 1;        // d_B
  int branch_token = 0;  // which admissible normalization
  // immediate components only:
  std::vector<cplx> phi;     // Phi(center + zeta) as ascending series in zeta
  double zeta_radius = 0.0;  // validity radius in zeta
  double seed_abs = 0.0;     // |w| guaranteed invertible through the series
};

struct ChartOptions {
  int series_order = 12;
  double conjugacy_check = 1e-12;
  double ambiguity_ratio = 0.5;  // corrector-to-runner-up distance ratio triggering back-off
};

/// Registry of Fatou components reached by the construction, with lazy
/// discovery of preimage components, and the coordinate evaluation
/// primitives built on top of the charts.
class ChartAtlas {
 public:
  struct Component {
    int id = -1;
    cplx center;
    int degree = 1;  // local degree of f at the center = deg(f|_B)
    int image = -1;  // component id of f(B); == id iff immediate
    bool immediate = false;
    int root_index = -1;
    int depth = 0;  // steps to an immediate component
  };

  /// Builds charts for all immediate basins. Requires simple roots and the
  /// per-basin degrees (from basin-field critical accounting); throws
  /// MultipleRootUnsupported / OrbitEscapedComponent style errors.
  ChartAtlas(const NewtonMap& map, const std::vector<int>& immediate_degrees,
             ChartOptions opts = {});

  const NewtonMap& map() const { return *map_; }
  int component_count() const { return static_cast<int>(components_.size()); }
  const Component& component(int id) const { return components_.at(id); }
  const BoettcherChart& chart(int id) const { return charts_.at(id); }
  int immediate_component(int root_index) const;

  /// Preimage components of B, discovered on demand: one per preimage of
  /// the center of B, with degree equal to the fiber multiplicity.
  std::vector<int> preimage_components(int id);

  /// Finds the registered component whose center matches, or -1.
  int find_component_by_center(cplx center, double tol = 1e-7) const;

  /// Phi_B^{-1}(w) continued from a nearby known point: hint must satisfy
  /// Phi_B(hint) close to w. Throws BranchJump when the corrector cannot be
  /// trusted at this step size.
  cplx point_at(int comp, cplx w, cplx hint) const;

  /// Traces Phi_B^{-1} along a w-path with adaptive step refinement, seeded
  /// at the component center. Returns one z per path sample.
  std::vector<cplx> trace_w_path(int comp, const std::vector<cplx>& w_path) const;

  /// |Phi_B(z)| for z in the immediate component B (branch-free forward
  /// tower). Garbage for points outside B; callers must know membership.
  double abs_coord(int comp, cplx z) const;

  /// Full Phi_B(z) by marching from the center with branch continuity.
  cplx coord(int comp, cplx z) const;

  /// Phi_B(z) with the branch tower disambiguated by an approximate
  /// coordinate value (moduli and residuals are still computed from the
  /// orbit and the local series; the hint only selects among the discrete
  /// root branches).
  cplx coord_hinted(int comp, cplx z, cplx w_hint) const;

  /// Solve f(z) = y near the hint (damped Newton with the 1/z chart past
  /// the large-modulus threshold and a fiber separation audit).
  cplx pull_once(cplx y, cplx hint) const;

 private:
  struct Tower {
    cplx z0;
    std::vector<cplx> orbit;   // z, f(z), ..., first point in the series disk
    std::vector<cplx> values;  // Phi at each orbit point
  };

  Tower tower_at(int comp, cplx z, const Tower* hint) const;
  cplx series_eval(const BoettcherChart& c, cplx zeta) const;
  cplx series_invert(const BoettcherChart& c, cplx w) const;
  bool in_series_disk(const BoettcherChart& c, cplx z) const;

  const NewtonMap* map_;
  ChartOptions opts_;
  std::vector<Component> components_;
  std::map<int, BoettcherChart> charts_;
  std::map<int, std::vector<int>> preimages_;  // discovered preimage components
};

}  // namespace newton
