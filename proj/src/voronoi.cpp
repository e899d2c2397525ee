#include "sigemb/voronoi.hpp"

#include <map>

namespace sigemb {

namespace {

double seg_dist(const RVec& p, const RVec& a, const RVec& b) {
    RVec ab = b - a;
    double len2 = ab.norm2();
    if (len2 < 1e-18) return (p - a).norm();
    double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

bool on_window_frame(const RVec& a, const RVec& b, const Box& w, double tol = 1e-7) {
    for (int i = 0; i < w.k; ++i) {
        for (double edge : {w.lo[i], w.hi[i]}) {
            if (std::fabs(a[i] - edge) < tol && std::fabs(b[i] - edge) < tol) return true;
        }
    }
    return false;
}

}  // namespace

double TilingSnapshot::boundary_dist(const RVec& p) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s : boundary) d = std::min(d, seg_dist(p, s.first, s.second));
    return d;
}

const Polytope* TilingSnapshot::tile_of(const GridPt& n) const {
    for (const auto& t : tiles)
        if (t.index == n) return &t.tile;
    return nullptr;
}

const IndexedTile* TilingSnapshot::locate(const RVec& p, double tol) const {
    const IndexedTile* best = nullptr;
    for (const auto& t : tiles) {
        if (t.tile.is_empty()) continue;
        if (!t.tile.contains(p, tol)) continue;
        if (!best || t.index < best->index) best = &t;
    }
    return best;
}

std::vector<IndexedTile> sliced_voronoi(int k, const std::vector<LiftedSite>& sites,
                                        double slice, const Box& window, double site_radius) {
    std::vector<IndexedTile> tiles;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const auto& own = sites[i];
        RVec own_pos = own.index.to_rvec();
        // skip sites whose cell cannot reach the window
        double reach = site_radius;
        bool near = true;
        for (int d = 0; d < k; ++d)
            if (own_pos[d] < window.lo[d] - reach || own_pos[d] > window.hi[d] + reach)
                near = false;
        if (!near) continue;
        std::vector<HalfSpace> hs;
        bool dominated = false;
        for (std::size_t j = 0; j < sites.size() && !dominated; ++j) {
            if (j == i) continue;
            const auto& other = sites[j];
            RVec op = other.index.to_rvec();
            if ((op - own_pos).norm() > 2.0 * site_radius) continue;
            // |u-n|^2 + (slice-hn)^2 <= |u-m|^2 + (slice-hm)^2 rearranged into
            // 2 u.(m-n) <= |m|^2-|n|^2 + (hn-hm)(2 slice - hn - hm)
            RVec normal = op - own_pos;
            double c = 0.5 * (op.norm2() - own_pos.norm2() +
                              (own.height - other.height) *
                                  (2.0 * slice - own.height - other.height));
            double nn = normal.norm();
            if (nn < 1e-12) {
                if (c < 0) dominated = true;  // coincident index, higher site wins
                continue;
            }
            hs.push_back({normal, c});
        }
        if (dominated) {
            tiles.push_back({own.index, Polytope::empty(k)});
            continue;
        }
        Polytope cell = Polytope::from_halfspaces(k, hs, window, /*allow_touch_bound=*/true);
        tiles.push_back({own.index, cell});
    }
    return tiles;
}

std::vector<LiftedSite> marker_sites(const TorusSystem& sys, const MarkerData& marker,
                                     const RVec& x, const Box& enlarged) {
    std::vector<LiftedSite> sites;
    // streamed enumeration: the enlarged window can be very wide and hits are
    // sparse, so never materialize the integer grid
    std::array<long long, 2> lo{}, hi{};
    for (int i = 0; i < sys.k; ++i) {
        lo[i] = static_cast<long long>(std::ceil(enlarged.lo[i]));
        hi[i] = static_cast<long long>(std::floor(enlarged.hi[i]));
    }
    if (sys.k == 1) {
        // the bump depends only on the orbit coordinate; step through it
        double pos = x[0] + static_cast<double>(lo[0]) * sys.alpha[0];
        pos -= std::floor(pos);
        double half = marker.width / 2.0;
        for (long long n = lo[0]; n <= hi[0]; ++n) {
            double d = std::min(pos, 1.0 - pos);
            if (d < half) {
                RVec p{pos};
                double h = marker.bump(sys, p);
                if (h > 0.0) sites.push_back({GridPt(1, n), 1.0 / h});
            }
            pos += sys.alpha[0];
            if (pos >= 1.0) pos -= 1.0;
        }
    } else {
        for (long long a = lo[0]; a <= hi[0]; ++a)
            for (long long b = lo[1]; b <= hi[1]; ++b) {
                GridPt n(2, a, b);
                double h = marker.bump(sys, sys.act(n, x));
                if (h > 0.0) sites.push_back({n, 1.0 / h});
            }
    }
    return sites;
}

TilingSnapshot level1_tiles(const TorusSystem& sys, const MarkerData& marker, const RVec& x,
                            const Box& window) {
    int k = sys.k;
    double m1 = static_cast<double>(marker.covering_m);
    double cover = m1 + std::sqrt(static_cast<double>(k));
    double site_radius = 2.0 * cover + marker.disjoint_m;
    Box enlarged = window;
    for (int i = 0; i < k; ++i) {
        enlarged.lo[i] -= site_radius + 1;
        enlarged.hi[i] += site_radius + 1;
    }
    auto sites = marker_sites(sys, marker, x, enlarged);
    require(!sites.empty(), "no marker sites in the enlarged window");

    // covering precondition: every window point has a site within the bound
    if (k == 1) {
        // exact gap check on the sorted site positions
        std::vector<double> pos;
        for (const auto& s : sites) pos.push_back(static_cast<double>(s.index[0]));
        std::sort(pos.begin(), pos.end());
        require(pos.front() <= window.lo[0] + cover && pos.back() >= window.hi[0] - cover,
                "marker covering violated at the window ends");
        for (std::size_t i = 1; i < pos.size(); ++i) {
            double mid_lo = std::max(pos[i - 1], window.lo[0]);
            double mid_hi = std::min(pos[i], window.hi[0]);
            if (mid_hi <= mid_lo) continue;
            require(pos[i] - pos[i - 1] <= 2.0 * cover + 1e-9,
                    "marker covering violated inside the window");
        }
    } else {
        for (const auto& n : grid_box(window)) {
            double best = 1e300;
            RVec p = n.to_rvec();
            for (const auto& s : sites) best = std::min(best, (s.index.to_rvec() - p).norm());
            require(best <= cover + 1e-9, "marker covering violated inside the window");
        }
    }

    TilingSnapshot snap;
    snap.k = k;
    snap.level = 1;
    snap.window = window;
    snap.slice_height = -marker.slice_height();
    snap.tiles = sliced_voronoi(k, sites, snap.slice_height, window, site_radius);

    for (const auto& t : snap.tiles) {
        if (t.tile.is_empty()) continue;
        if (k == 1) {
            for (double e : {t.tile.lo(), t.tile.hi()}) {
                if (std::fabs(e - window.lo[0]) < 1e-7 || std::fabs(e - window.hi[0]) < 1e-7)
                    continue;
                snap.boundary.push_back({RVec{e}, RVec{e}});
            }
        } else {
            const auto& v = t.tile.vertices();
            for (std::size_t i = 0; i < v.size(); ++i) {
                RVec a = v[i], b = v[(i + 1) % v.size()];
                if (!on_window_frame(a, b, window)) snap.boundary.push_back({a, b});
            }
        }
    }
    return snap;
}

double score_plateau(double s, double r1) {
    if (s <= r1) return 1.0;
    if (s >= 2.0 * r1) return 0.0;
    double t = (s - r1) / r1;
    return 1.0 - (3.0 * t * t - 2.0 * t * t * t);
}

double score_ramp(double t, double L) {
    double lo = 1.0 / L, hi = 2.0 / L;
    if (t <= lo) return 0.0;
    if (t >= hi) return 1.0;
    double u = (t - lo) / (hi - lo);
    return 3.0 * u * u - 2.0 * u * u * u;
}

double ScoreField::at(const GridPt& n) const {
    for (std::size_t i = 0; i < sites.size(); ++i)
        if (sites[i] == n) return score[i];
    return 0.0;
}

namespace {

ScoreField assemble_scores(const std::vector<std::vector<CertifiedZero>>& per_site,
                           const std::vector<GridPt>& sites, const ThetaConstants& tc) {
    ScoreField f;
    f.sites = sites;
    double Ld = static_cast<double>(tc.L);
    for (std::size_t i = 0; i < sites.size(); ++i) {
        RVec n = sites[i].to_rvec();
        double sum = 0.0;
        std::vector<ZeroScoreEntry> prov;
        for (const auto& z : per_site[i]) {
            ZeroScoreEntry e;
            e.z = z.z;
            e.nu = z.nu;
            double gauge = 0.0;
            for (int d = 0; d < tc.k; ++d)
                gauge = std::max(gauge, std::abs(z.z[d] - cplx(n[d], 0.0)));
            if (gauge > 2.0 * tc.r1) continue;
            if (!z.certified) {
                e.marginal = true;
                ++f.flagged;
                prov.push_back(e);
                continue;
            }
            if (z.nu < 1.0 / Ld) continue;  // below the retention floor
            e.plateau = score_plateau(gauge, tc.r1);
            e.ramp = score_ramp(z.nu, Ld);
            // ramp-edge sensitivity flag
            if (std::fabs(z.nu - 1.0 / Ld) < 1e-6 || std::fabs(z.nu - 2.0 / Ld) < 1e-6) {
                e.marginal = true;
                ++f.flagged;
            }
            sum += e.plateau * e.ramp;
            prov.push_back(e);
        }
        f.score.push_back(std::min(1.0, sum));
        f.provenance.push_back(std::move(prov));
    }
    return f;
}

}  // namespace

ScoreField score_field(const HoloMap& phi, const std::vector<GridPt>& sites,
                       const ThetaConstants& tc, const ZeroSearchOptions& opts) {
    std::vector<std::vector<CertifiedZero>> per_site;
    for (const auto& n : sites) {
        CVec c = CVec::from_real(n.to_rvec());
        per_site.push_back(find_zeros(phi, c, 2.0 * tc.r1, opts));
    }
    return assemble_scores(per_site, sites, tc);
}

ScoreField score_field_from_zeros(const std::vector<CertifiedZero>& zeros,
                                  const std::vector<GridPt>& sites, const ThetaConstants& tc) {
    std::vector<std::vector<CertifiedZero>> per_site(sites.size());
    std::map<GridPt, std::size_t> where;
    for (std::size_t i = 0; i < sites.size(); ++i) where[sites[i]] = i;
    for (const auto& z : zeros) {
        // a zero can score only at the integer site within 2 r1 < 1/2 per axis
        GridPt n(tc.k, 0, 0);
        n.k = tc.k;
        for (int d = 0; d < tc.k; ++d)
            n[d] = static_cast<long long>(std::llround(z.z[d].real()));
        auto it = where.find(n);
        if (it != where.end()) per_site[it->second].push_back(z);
    }
    return assemble_scores(per_site, sites, tc);
}

TilingSnapshot level2_tiles(const ScoreField& field, const Box& window) {
    int k = window.k;
    std::vector<LiftedSite> sites;
    for (std::size_t i = 0; i < field.sites.size(); ++i)
        if (field.score[i] > 0.0) sites.push_back({field.sites[i], 1.0 / field.score[i]});
    require(!sites.empty(), "no positive scores in the window");

    // containment reach: anchor sites are those of minimal lifted height; a
    // cell can only claim a point u when the owner is no farther than the
    // nearest anchor plus the anchor height
    double max_span = 0.0;
    {
        double h_min = 1e300;
        for (const auto& s : sites) h_min = std::min(h_min, s.height);
        std::vector<RVec> anchors;
        for (const auto& s : sites)
            if (s.height <= h_min + 1e-12) anchors.push_back(s.index.to_rvec());
        double best_gap = 0.0;
        if (k == 1) {
            std::vector<double> pos;
            for (const auto& p : anchors) pos.push_back(p[0]);
            std::sort(pos.begin(), pos.end());
            best_gap = std::max({pos.front() - window.lo[0], window.hi[0] - pos.back(), 0.0});
            for (std::size_t i = 1; i < pos.size(); ++i)
                best_gap = std::max(best_gap, 0.5 * (pos[i] - pos[i - 1]));
        } else {
            for (const auto& n : grid_box(window)) {
                double best = 1e300;
                RVec p = n.to_rvec();
                for (const auto& fpos : anchors) best = std::min(best, (fpos - p).norm());
                best_gap = std::max(best_gap, best);
            }
        }
        max_span = 2.0 * (best_gap + h_min) + 2.0 * std::sqrt(static_cast<double>(k)) + 2.0;
    }

    TilingSnapshot snap;
    snap.k = k;
    snap.level = 2;
    snap.window = window;
    snap.slice_height = 0.0;
    snap.tiles = sliced_voronoi(k, sites, 0.0, window, max_span);
    for (const auto& t : snap.tiles) {
        if (t.tile.is_empty()) continue;
        if (k == 1) {
            for (double e : {t.tile.lo(), t.tile.hi()}) {
                if (std::fabs(e - window.lo[0]) < 1e-7 || std::fabs(e - window.hi[0]) < 1e-7)
                    continue;
                snap.boundary.push_back({RVec{e}, RVec{e}});
            }
        } else {
            const auto& v = t.tile.vertices();
            for (std::size_t i = 0; i < v.size(); ++i) {
                RVec a = v[i], b = v[(i + 1) % v.size()];
                if (!on_window_frame(a, b, window)) snap.boundary.push_back({a, b});
            }
        }
    }
    return snap;
}

double boundary_collar_density(const TilingSnapshot& snap, double big_r, double r) {
    if (r <= 0.0) return 0.0;
    double collar = 0.0;
    for (const auto& t : snap.tiles) {
        if (t.tile.is_empty()) continue;
        if (t.index.norm() > 3.0 * big_r) continue;
        double outer = t.tile.outer_volume(r);
        double inner = t.tile.inner_parallel(r).volume();
        collar += outer - inner;
    }
    double denom = snap.k == 1 ? big_r : kPi * (big_r / 2.0) * (big_r / 2.0);
    return collar / denom;
}

}  // namespace sigemb
