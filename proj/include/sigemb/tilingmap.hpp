#pragma once

#include "sigemb/bandlimited.hpp"
#include "sigemb/convexgeom.hpp"
#include "sigemb/common.hpp"

namespace sigemb {

// Holomorphic map C^k -> C^k with a computable Jacobian.
struct HoloMap {
    virtual ~HoloMap() = default;
    virtual int dim() const = 0;
    virtual CVec value(const CVec& z) const = 0;
    virtual CMat jacobian(const CVec& z) const = 0;
};

struct ThetaMapAdapter : HoloMap {
    LatticeZeroMap map;
    int dim() const override { return map.k; }
    CVec value(const CVec& z) const override { return map.value(z); }
    CMat jacobian(const CVec& z) const override { return map.jacobian(z); }
};

// Reference map plus a vector of band-limited perturbation entries.
struct PerturbedMap : HoloMap {
    LatticeZeroMap base;
    std::vector<BLFunction> offset;  // one entry per coordinate
    int dim() const override { return base.k; }
    CVec value(const CVec& z) const override {
        CVec v = base.value(z);
        for (int i = 0; i < base.k; ++i) v[i] += offset[i].eval(z);
        return v;
    }
    CMat jacobian(const CVec& z) const override {
        CMat j = base.jacobian(z);
        for (int i = 0; i < base.k; ++i)
            for (int c = 0; c < base.k; ++c) j.at(i, c) += offset[i].partial(c, z);
        return j;
    }
};

// Smallest singular value of a k x k complex matrix.
double min_singular_value(const CMat& a);
// Independent route: sqrt of the smallest eigenvalue of A^H A.
double min_singular_value_eig(const CMat& a);

// Certified constants for the reference map: the disk radius r1 on which the
// diagonal derivative entries exceed 3/L, the persistence threshold (minimum
// of the analytic cap and a certified infimum of |Theta| off the zero disks,
// over the strip |Im z_i| <= 1), and the integral truncation radius E at
// which mollifier mass outside B_E costs less than half the threshold.
struct ThetaConstants {
    int k = 1;
    long long L = 2;
    std::vector<double> b;
    double r1 = 0.0;
    double analytic_cap = 0.0;
    double certified_inf = 0.0;
    double threshold = 0.0;  // min(analytic_cap, certified_inf)
    double strip_sup = 0.0;  // sup |Theta| over the strip
    double tail_radius = 0.0;  // E
    long long bnb_cells_r1 = 0;
    long long bnb_cells_inf = 0;
};

// Mollifier shape needed for tail arithmetic.
struct MollifierShape {
    double coeff = 1.0;  // |c| of the single tensor term
    double axis_b = 1.0;
    int m = 4;
    int k = 1;
    // bound for the integral of |chi(z - t)| over |t - Re z| > d, |Im z_i| <= im_height
    double tail_integral(double d, double im_height = 1.0) const;
    double full_integral_bound(double im_height = 1.0) const;
};

MollifierShape mollifier_shape(const BLFunction& chi);

ThetaConstants theta_constants(long long L, const std::vector<double>& b, int k,
                               const MollifierShape& chi, double rel_tol = 1e-2);

struct IndexedTile {
    GridPt index;
    Polytope tile;
};

// Quadrature-backed evaluator for z -> sum_n Theta(z - n) * integral over
// tile_n of chi(z - t) dt, truncated to tiles within tail-controlled range.
class TilingMap : public HoloMap {
  public:
    TilingMap() = default;
    TilingMap(LatticeZeroMap theta, BLFunction chi, std::vector<IndexedTile> tiles,
              double quad_budget, double im_height = 1.0);

    int dim() const override { return theta_.k; }
    CVec value(const CVec& z) const override;
    CMat jacobian(const CVec& z) const override;
    double truncation_tail() const { return trunc_tail_; }
    double quad_budget() const { return quad_budget_; }
    const std::vector<IndexedTile>& tiles() const { return tiles_; }
    const LatticeZeroMap& theta() const { return theta_; }
    // integral of chi(z - t) over one tile
    cplx tile_integral(const Polytope& w, const CVec& z) const;

    // checks cover/disjointness of the tiles against their window
    static void validate_tiling(const std::vector<IndexedTile>& tiles, const Box& window,
                                double area_tol = 1e-6);

  private:
    LatticeZeroMap theta_;
    BLFunction chi_;
    MollifierShape shape_;
    std::vector<IndexedTile> tiles_;
    double quad_budget_ = 1e-10;
    double im_height_ = 1.0;
    double trunc_radius_ = 0.0;
    double trunc_tail_ = 0.0;
};

struct CertifiedZero {
    CVec z;
    double residual = 0.0;
    double nu = 0.0;      // min singular value of the Jacobian
    double nu_alt = 0.0;  // independent eigen route
    bool certified = false;
    GridPt owner;  // index of the polydisc that produced it
};

struct ZeroSearchOptions {
    double newton_tol = 1e-12;
    double residual_cert = 1e-9;
    double nu_agreement = 1e-8;
    double dedupe_dist = 1e-6;
    int max_iter = 80;
    int starts_per_axis = 3;  // per real/imag direction
};

// Newton sweep over a polydisc of per-axis radius r around `center`;
// converged points are deduplicated and certified.
std::vector<CertifiedZero> find_zeros(const HoloMap& map, const CVec& center, double r,
                                      const ZeroSearchOptions& opts = {});

// Single damped-Newton run; empty when it diverges or leaves the region.
std::optional<CVec> newton_run(const HoloMap& map, CVec z, const ZeroSearchOptions& opts,
                               const CVec& center, double stay_radius);

// Zero-growth demonstration map: first entry sin(pi z1); second entry couples
// one polynomial factor per integer column so that column n carries exactly
// alpha_n prescribed zeros inside |w| < 1.
class ZeroGrowthMap : public HoloMap {
  public:
    ZeroGrowthMap(const std::vector<int>& alpha);
    int dim() const override { return 2; }
    CVec value(const CVec& z) const override;
    CMat jacobian(const CVec& z) const override;
    const std::vector<int>& alpha() const { return alpha_; }
    int taper_m() const { return taper_m_; }

  private:
    cplx column_fn(int n, cplx w) const;        // beta_n * taper(w) * poly_n(w)
    cplx column_fn_deriv(int n, cplx w) const;
    std::vector<int> alpha_;
    std::vector<double> beta_;
    int taper_m_ = 4;
};

struct ZeroCountRow {
    int n = 0;
    int found_in_column = 0;   // certified zeros of the form (n, w), |w| < 1
    int expected = 0;          // alpha_n
    long long cumulative = 0;  // certified zeros with |z| < n + 1
};

std::vector<ZeroCountRow> zero_growth_table(const std::vector<int>& alpha, int nmax);

}  // namespace sigemb
