#pragma once

#include "sigemb/convexgeom.hpp"
#include "sigemb/dynsys.hpp"
#include "sigemb/tilingmap.hpp"

namespace sigemb {

// A windowed indexed tiling: level-1 tiles come from the marker bump, level-2
// tiles from the zero-score field. Boundary segments exclude pieces lying on
// the window frame (those are clipping artifacts, not tile boundary).
struct TilingSnapshot {
    int k = 1;
    int level = 1;
    Box window;
    double slice_height = 0.0;  // lifted slice offset used to build the cells
    std::vector<IndexedTile> tiles;
    std::vector<std::pair<RVec, RVec>> boundary;  // degenerate segments for k=1

    double boundary_dist(const RVec& p) const;
    const Polytope* tile_of(const GridPt& n) const;
    // index of the tile containing p (ties to the smallest index); nullptr if none
    const IndexedTile* locate(const RVec& p, double tol = 1e-9) const;
};

// Lifted-site description shared by both levels.
struct LiftedSite {
    GridPt index;
    double height = 1.0;  // 1/h or 1/score
};

// Voronoi cells of the lifted sites, sliced at `slice` and clipped to the
// window. Only sites within `site_radius` of a tile's index compete, which is
// sufficient when the radius dominates the containment bound.
std::vector<IndexedTile> sliced_voronoi(int k, const std::vector<LiftedSite>& sites,
                                        double slice, const Box& window, double site_radius);

// Level-1 tiles of the marker bump at the point x. Sites are the orbit hits
// {n : h(T^n x) > 0} in an enlarged window; errors out when some window point
// has no site within the covering radius.
TilingSnapshot level1_tiles(const TorusSystem& sys, const MarkerData& marker, const RVec& x,
                            const Box& window);

// Bump values at integer sites for a window (exposed for reuse).
std::vector<LiftedSite> marker_sites(const TorusSystem& sys, const MarkerData& marker,
                                     const RVec& x, const Box& enlarged);

// Zero-score field: per integer site n, the capped sum over certified zeros in
// the surrounding polydisc of plateau(z - n) * ramp(min singular value).
struct ZeroScoreEntry {
    CVec z;
    double plateau = 0.0;
    double ramp = 0.0;
    double nu = 0.0;
    bool marginal = false;  // near a ramp edge or uncertified: grid-sensitive
};
struct ScoreField {
    std::vector<GridPt> sites;
    std::vector<double> score;
    std::vector<std::vector<ZeroScoreEntry>> provenance;
    int flagged = 0;

    double at(const GridPt& n) const;
};

// The fixed C1 plateau/ramp pair (documented closed forms):
//   plateau(s; r1) = 1 on s<=r1, 0 on s>=2r1, smoothstep between, with
//   s = max_i |z_i - n_i|; ramp(t; L) = 0 on t<=1/L, 1 on t>=2/L, smoothstep.
double score_plateau(double s, double r1);
double score_ramp(double t, double L);

ScoreField score_field(const HoloMap& phi, const std::vector<GridPt>& sites,
                       const ThetaConstants& tc, const ZeroSearchOptions& opts = {});
ScoreField score_field_from_zeros(const std::vector<CertifiedZero>& zeros,
                                  const std::vector<GridPt>& sites, const ThetaConstants& tc);

// Level-2 tiles from a score field (lifted heights 1/score, slice at 0).
TilingSnapshot level2_tiles(const ScoreField& field, const Box& window);

// |collar of width r around level-1 boundaries within B_3R| / |B_{R/2}|,
// measured through the Steiner formula per tile.
double boundary_collar_density(const TilingSnapshot& snap, double big_r, double r);

}  // namespace sigemb
