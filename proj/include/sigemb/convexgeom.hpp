#pragma once

#include <optional>

#include "sigemb/common.hpp"

namespace sigemb {

// Half-space { x : n . x <= c } with |n| = 1.
struct HalfSpace {
    RVec normal;
    double offset = 0.0;
};

// Bounded convex tile in R^k, k in {1,2}. k=1 tiles are intervals; k=2 tiles
// are convex polygons kept as a counterclockwise vertex cycle. The empty tile
// is a first-class value.
class Polytope {
  public:
    Polytope() = default;

    static Polytope empty(int k);
    static Polytope interval(double lo, double hi);
    static Polytope polygon(std::vector<RVec> ccw_vertices);
    static Polytope box(const Box& b);
    // Intersection of half-spaces clipped against `bound`. Throws if the
    // result still touches the bounding box (caller must pre-clip).
    static Polytope from_halfspaces(int k, const std::vector<HalfSpace>& hs, const Box& bound,
                                    bool allow_touch_bound = false);

    int dim() const { return k_; }
    bool is_empty() const { return empty_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<RVec>& vertices() const { return verts_; }

    double volume() const;     // length (k=1) or area (k=2)
    double perimeter() const;  // 2 endpoints -> 0-dim measure is count; k=2 edge length
    bool contains(const RVec& p, double tol = 1e-9) const;
    double boundary_distance(const RVec& p) const;  // distance to the boundary
    double distance(const RVec& p) const;           // 0 inside, else distance to set

    // Inward offset of every supporting half-space by r (exact for convex
    // sets). May come back empty.
    Polytope inner_parallel(double r) const;
    // Steiner formula for |W union boundary collar of width r|:
    // k=2: |W| + r * perimeter + pi r^2; k=1: length + 2r.
    double outer_volume(double r) const;
    // Outward half-space offset by r (circumscribes the true dilation).
    Polytope outer_parallel_hull(double r) const;
    Polytope clip(const Box& b) const;
    RVec centroid() const;
    double inradius_upper() const;  // distance from centroid to boundary

    std::vector<HalfSpace> halfspaces() const;

  private:
    int k_ = 0;
    bool empty_ = true;
    double lo_ = 0.0, hi_ = 0.0;   // k = 1
    std::vector<RVec> verts_;      // k = 2, ccw
    void canonicalize();
};

double hausdorff_distance(const Polytope& a, const Polytope& b);

// Smallest schedule value R with ((1+r/R)/(1-r/R))^k < c; for bounded convex
// W with nonempty R-interior this forces |W u boundary_r W| < c |Int_r W|.
double convex_comparison_radius(double c, double r, int k);

// Test-support: random convex polygon (k=2) or interval (k=1) in a box.
Polytope random_convex_body(Rng& rng, int k, double scale);

}  // namespace sigemb
