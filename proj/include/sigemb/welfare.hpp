#pragma once

#include <map>

#include "sigemb/voronoi.hpp"

namespace sigemb {

// Fixed piecewise-linear shapes used by the allocation (documented so tables
// reproduce bit-for-bit):
//   need_ramp(d; L0)      = 3 on d <= L0, 0 on d >= L0 + 1, linear between
//   amplifier(t; l0)      = 2 l0 at t <= 0, 1 at t >= 1, linear between
//   threshold_unit(t)     = 0 on t <= 1, 1 on t >= 2, linear between
double need_ramp(double d, double l0_cut);
double cascade_amplifier(double t, std::size_t l0);
double threshold_unit(double t);

struct WeightParams {
    double capacity_share = 1.0;  // A: each tile may pay |Int_{L0} W| / A
    double need_radius = 1.0;     // L0
    double transfer_radius = 1.0; // R0: how far payments travel
};

// Full allocation record over a window: the enumeration, the raw transfer
// trace, the final budgets/needs, and the thresholded weights.
struct WeightTable {
    Box window;
    WeightParams params;
    std::vector<GridPt> order;  // m_1, m_2, ... sorted by (|m|, lex)
    std::vector<GridPt> sites;  // integer sites of the window
    std::vector<double> budget0, need0;          // u_0, v_0
    std::vector<double> budget_final, need_final;
    std::vector<std::map<std::size_t, double>> transfer;  // site -> {l -> omega_l}
    std::vector<std::map<GridPt, double>> weights;        // site n -> {m -> w_m(n)}

    std::size_t site_pos(const GridPt& n) const;
    bool has_site(const GridPt& n) const;
    double weight(const GridPt& n, const GridPt& m) const;
    int support_count(const GridPt& n) const;
    double transfer_total(std::size_t pos) const;
    double received_total(const GridPt& p) const;  // sum_l omega_l(p - m_l)
};

// u_0(n) = |Int_{L0} W(x,n)| / A over the snapshot's integer sites; zero for
// indices without a tile.
std::vector<double> tile_budgets(const TilingSnapshot& snap, const std::vector<GridPt>& sites,
                                 const WeightParams& wp);

// The greedy transfer recursion followed by the amplify/threshold cascade.
WeightTable allocate_weights(const TilingSnapshot& snap, const WeightParams& wp);
// Variant taking prepared budgets/needs directly (synthetic instances).
WeightTable allocate_weights_raw(const Box& window, const std::vector<GridPt>& sites,
                                 std::vector<double> budget0, std::vector<double> need0,
                                 const WeightParams& wp);

// w row from a raw transfer row through the backward cascade.
std::vector<double> cascade_row(const std::vector<double>& omegas);

// Smallest schedule radius R0 such that for every snapshot and every centered
// integer point u with the doubled ball inside the window,
//   A * sum_{|n-u|<=2R0} need(n) < sum_{|n-u|<=R0} |Int_{L0} W(x,n)|.
struct TransferRadiusResult {
    double r0 = 0.0;
    double worst_margin = 0.0;  // min over centers of rhs - lhs at the returned radius
};
TransferRadiusResult transfer_radius_search(const std::vector<TilingSnapshot>& snaps,
                                            double capacity_share, double need_radius,
                                            double schedule_base);

struct PropertyReport {
    bool ok = true;
    std::string detail;
};

// (3): strict support bound per tile.
PropertyReport check_support_bound(const WeightTable& t, const TilingSnapshot& snap);
// (4): every safe-interior integer point within need_radius of the boundary
// is rescued by a full weight within the transfer radius.
PropertyReport check_rescue(const WeightTable& t, const TilingSnapshot& snap);
// conservation identities of the raw recursion, exact to 1e-12.
PropertyReport check_conservation(const WeightTable& t);
// after each step, min(u_l(n), v_l(n + m_l)) = 0 within window reach.
PropertyReport check_greedy_step(const WeightTable& t);

}  // namespace sigemb
