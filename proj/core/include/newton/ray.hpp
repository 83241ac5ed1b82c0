#pragma once

#include <map>
#include <string>

#include "newton/chart.hpp"

namespace newton {

struct RaySample {
  double log_potential;  // L = -log t, decreasing toward the landing end
  cplx point;
};

/// A traced internal ray: samples from the series zone outward, with landing
/// data certified by a Cauchy tail in the chordal metric.
struct InternalRay {
  int component = -1;
  Angle angle;
  int angle_preperiod = 0;  // steps of the angle orbit before its cycle
  int angle_period = 1;
  std::vector<RaySample> samples;
  SpherePoint landing;
  bool landed = false;
  double tail_diameter = 0.0;
  std::string landing_method;  // "tail", "snap", "polish"

  double potential(std::size_t i) const { return std::exp(-samples[i].log_potential); }
};

struct Sector {
  int component = -1;
  Angle from, to;  // counter-clockwise span
  double min_potential = 0.0;
};

struct RayOptions {
  int steps_per_level = 16;      // grid resolution per potential-power level
  double landing_window = 1e-4;  // trace at least to -log t below this
  double deep_limit = 1e-12;     // stop the grid below this -log t
  double landing_tol = 1e-6;     // chordal certification target
  double snap_tol = 3e-3;        // estimate-to-candidate chordal match
};

/// Traces internal rays of rational angle, image rays first (the angle orbit
/// under multiplication by the component degree), caching everything. Safe
/// to use from one thread; clone per worker for parallel tracing.
class RayTracer {
 public:
  RayTracer(ChartAtlas& atlas, RayOptions opts = {});

  /// Trace and cache (component, angle); throws ContinuationStalled or
  /// LandingUnresolved on numeric failure.
  const InternalRay& ray(int comp, Angle theta);

  /// Landing point; throws NotConverged when the tail did not certify.
  SpherePoint land(int comp, Angle theta);

  /// Exact ray point at log-potential L (computed, not interpolated).
  cplx ray_point(int comp, Angle theta, double log_potential);

  bool sector_contains(const Sector& s, cplx z) const;

  ChartAtlas& atlas() { return *atlas_; }
  const RayOptions& options() const { return opts_; }

  double base_log_potential(int comp) const;

 private:
  void trace_immediate_cycle(int comp, const std::vector<Angle>& cycle);
  void trace_lifted(int comp, Angle theta);
  void finish_landing(InternalRay& r);
  const std::vector<SpherePoint>& prepoles_to_depth(int depth);

  ChartAtlas* atlas_;
  RayOptions opts_;
  std::map<std::pair<int, std::int64_t>, InternalRay> cache_;
  std::vector<std::vector<SpherePoint>> prepole_levels_;
  static std::pair<int, std::int64_t> key(int comp, const Angle& a) {
    return {comp, (a.num << 21) | a.den};
  }
};

}  // namespace newton
