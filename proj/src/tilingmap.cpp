#include "sigemb/tilingmap.hpp"

#include "sigemb/lattice.hpp"

#include <Eigen/Dense>
#include <queue>
#include <cstdio>
#include <cstdlib>

namespace sigemb {

double min_singular_value(const CMat& a) {
    Eigen::MatrixXcd m(a.n, a.n);
    for (int r = 0; r < a.n; ++r)
        for (int c = 0; c < a.n; ++c) m(r, c) = a.at(r, c);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(a.n - 1);
}

double min_singular_value_eig(const CMat& a) {
    Eigen::MatrixXcd m(a.n, a.n);
    for (int r = 0; r < a.n; ++r)
        for (int c = 0; c < a.n; ++c) m(r, c) = a.at(r, c);
    Eigen::MatrixXcd h = m.adjoint() * m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    double ev = es.eigenvalues()(0);
    return std::sqrt(std::max(0.0, ev));
}

double MollifierShape::tail_integral(double d, double im_height) const {
    double expo = std::exp(m * kPi * axis_b * im_height * k);
    double knee = 1.0 / (kPi * axis_b);
    double axis_full = 2.0 * knee * (1.0 + 1.0 / (m - 1.0));
    double w = d / std::sqrt(static_cast<double>(k));
    double axis_tail;
    if (w <= knee)
        axis_tail = axis_full;
    else
        axis_tail = 2.0 * std::pow(kPi * axis_b, -static_cast<double>(m)) *
                    std::pow(w, 1.0 - m) / (m - 1.0);
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        double prod = axis_tail;
        for (int j = 0; j < k; ++j)
            if (j != i) prod *= axis_full;
        total += prod;
    }
    return coeff * expo * total;
}

double MollifierShape::full_integral_bound(double im_height) const {
    double expo = std::exp(m * kPi * axis_b * im_height * k);
    double knee = 1.0 / (kPi * axis_b);
    double axis_full = 2.0 * knee * (1.0 + 1.0 / (m - 1.0));
    double prod = 1.0;
    for (int i = 0; i < k; ++i) prod *= axis_full;
    return coeff * expo * prod;
}

MollifierShape mollifier_shape(const BLFunction& chi) {
    auto ks = axis_kernels(chi);
    MollifierShape s;
    s.k = chi.dim();
    s.coeff = std::abs(chi.terms()[0].coeff);
    s.axis_b = ks[0].b;
    s.m = ks[0].m;
    for (const auto& a : ks) require(a.b == ks[0].b && a.m == ks[0].m, "anisotropic mollifier");
    return s;
}

namespace {

struct Cell {
    double x0, x1, y0, y1;
    double lower;
};
struct CellOrder {
    bool operator()(const Cell& a, const Cell& b) const { return a.lower > b.lower; }
};

// modulus of e^{i pi b z} sin(pi z / L) at z = x + i y
double entry_modulus(double b, double L, double x, double y) {
    double s = std::sin(kPi * x / L), sh = std::sinh(kPi * y / L);
    return std::exp(-kPi * b * y) * std::sqrt(s * s + sh * sh);
}

// largest |z| over the cell corners
double cell_zmax(const Cell& c) {
    double x = std::max(std::fabs(c.x0), std::fabs(c.x1));
    double y = std::max(std::fabs(c.y0), std::fabs(c.y1));
    return std::hypot(x, y);
}

double entry_lip(double b, double L, const Cell& c) {
    double ymax = std::max(std::fabs(c.y0), std::fabs(c.y1));
    double mc = std::cosh(kPi * ymax / L);
    // |sin w| <= min(cosh(Im w), sinh(|w|)): the second branch wins near zero
    double ms = std::min(mc, std::sinh(kPi * cell_zmax(c) / L));
    return kPi * std::exp(-kPi * b * c.y0) * (b * ms + mc / L);
}

// modulus of the diagonal derivative entry pi e^{i pi b z}(i b sin + cos/L)
double deriv_modulus(double b, double L, double x, double y) {
    cplx z(x, y);
    cplx h = cplx(0.0, b) * std::sin(kPi * z / L) + std::cos(kPi * z / L) / L;
    return kPi * std::exp(-kPi * b * y) * std::abs(h);
}

double deriv_lip(double b, double L, const Cell& c) {
    double ymax = std::max(std::fabs(c.y0), std::fabs(c.y1));
    double mc = std::cosh(kPi * ymax / L);
    double ms = std::min(mc, std::sinh(kPi * cell_zmax(c) / L));
    double h_bound = b * ms + mc / L;
    double hp_bound = (kPi / L) * (b * mc + ms / L);
    return kPi * (kPi * b * h_bound + hp_bound) * std::exp(-kPi * b * c.y0);
}

enum class DiskRule { ExcludeInside, RestrictToDisk, None };

struct BnbResult {
    double certified_lower = 0.0;
    double observed_min = std::numeric_limits<double>::infinity();
    long long cells = 0;
    bool converged = false;
};

// Branch-and-bound certified minimum of f over a rectangle, with an optional
// disk at the origin either carved out or used to restrict the domain.
// Stops early once the certified lower bound clears `pass_above` or the
// observed minimum drops below `fail_below` (when those are set).
template <typename F, typename LipF>
BnbResult certified_min(F&& f, LipF&& lip, const Cell& region, DiskRule rule, double disk_r,
                        double rel_tol, long long max_cells,
                        double pass_above = -1.0, double fail_below = -1.0,
                        double seed_min = std::numeric_limits<double>::infinity()) {
    auto inside_disk = [&](double x, double y) { return x * x + y * y <= disk_r * disk_r; };
    auto cell_all_inside = [&](const Cell& c) {
        return inside_disk(c.x0, c.y0) && inside_disk(c.x1, c.y0) && inside_disk(c.x0, c.y1) &&
               inside_disk(c.x1, c.y1);
    };
    auto cell_all_outside = [&](const Cell& c) {
        // rectangle misses the disk iff its closest point to the origin is out
        double cx = std::clamp(0.0, c.x0, c.x1);
        double cy = std::clamp(0.0, c.y0, c.y1);
        return cx * cx + cy * cy > disk_r * disk_r;
    };
    auto admissible_center = [&](const Cell& c, double& x, double& y) {
        x = 0.5 * (c.x0 + c.x1);
        y = 0.5 * (c.y0 + c.y1);
        if (rule == DiskRule::ExcludeInside && inside_disk(x, y)) return false;
        if (rule == DiskRule::RestrictToDisk && !inside_disk(x, y)) return false;
        return true;
    };

    std::priority_queue<Cell, std::vector<Cell>, CellOrder> queue;
    BnbResult res;
    res.observed_min = seed_min;
    auto push = [&](Cell c) {
        if (rule == DiskRule::ExcludeInside && cell_all_inside(c)) return;
        if (rule == DiskRule::RestrictToDisk && cell_all_outside(c)) return;
        double cx = 0.5 * (c.x0 + c.x1), cy = 0.5 * (c.y0 + c.y1);
        double half_diag = 0.5 * std::hypot(c.x1 - c.x0, c.y1 - c.y0);
        c.lower = std::max(0.0, f(cx, cy) - lip(c) * half_diag);
        double px, py;
        if (admissible_center(c, px, py)) res.observed_min = std::min(res.observed_min, f(px, py));
        queue.push(c);
        ++res.cells;
    };
    push(region);
    while (!queue.empty()) {
        Cell c = queue.top();
        if (pass_above > 0 && c.lower > pass_above) {
            res.certified_lower = c.lower;
            res.converged = true;
            return res;
        }
        if (fail_below > 0 && res.observed_min < fail_below) {
            res.certified_lower = c.lower;
            res.converged = true;
            return res;
        }
        if (c.lower >= (1.0 - rel_tol) * res.observed_min) {
            res.certified_lower = c.lower;
            res.converged = true;
            return res;
        }
        if (res.cells > max_cells) {
            if (std::getenv("SIGEMB_BNB_DEBUG"))
                std::fprintf(stderr, "bnb stuck: lower=%.6g obs=%.6g cell=[%.6g,%.6g]x[%.6g,%.6g]\n",
                             c.lower, res.observed_min, c.x0, c.x1, c.y0, c.y1);
            res.certified_lower = c.lower;
            res.converged = false;
            return res;
        }
        queue.pop();
        // bisect the longest side so cells stay near-square regardless of the
        // region's aspect ratio
        if (c.x1 - c.x0 >= c.y1 - c.y0) {
            double xm = 0.5 * (c.x0 + c.x1);
            push(Cell{c.x0, xm, c.y0, c.y1, 0});
            push(Cell{xm, c.x1, c.y0, c.y1, 0});
        } else {
            double ym = 0.5 * (c.y0 + c.y1);
            push(Cell{c.x0, c.x1, c.y0, ym, 0});
            push(Cell{c.x0, c.x1, ym, c.y1, 0});
        }
    }
    res.converged = true;
    res.certified_lower = res.observed_min;  // fully excluded region
    return res;
}

}  // namespace

ThetaConstants theta_constants(long long L, const std::vector<double>& b, int k,
                               const MollifierShape& chi, double rel_tol) {
    require(L > 1, "lattice spacing must exceed 1");
    ThetaConstants tc;
    tc.k = k;
    tc.L = L;
    tc.b = b;
    double Ld = static_cast<double>(L);
    double target = 3.0 / Ld;

    // r1 by bisection: certify that every diagonal derivative entry stays
    // above 3/L on the closed disk of radius r1
    auto disk_ok = [&](double r) {
        for (int i = 0; i < k; ++i) {
            Cell region{-r, r, -r, r, 0};
            auto res = certified_min([&](double x, double y) { return deriv_modulus(b[i], Ld, x, y); },
                                     [&](const Cell& c) { return deriv_lip(b[i], Ld, c); }, region,
                                     DiskRule::RestrictToDisk, r, 1e-3, 400000,
                                     target * (1.0 + 1e-9), target);
            tc.bnb_cells_r1 += res.cells;
            if (!(res.converged && res.certified_lower > target)) return false;
        }
        return true;
    };
    double lo = 0.0, hi = 0.25;
    if (disk_ok(hi)) {
        tc.r1 = hi * 0.999;
    } else {
        for (int it = 0; it < 30 && (hi - lo) > 1e-9 + 1e-3 * hi; ++it) {
            double mid = 0.5 * (lo + hi);
            if (mid <= 0) break;
            if (disk_ok(mid))
                lo = mid;
            else
                hi = mid;
        }
        require(lo > 0, "no disk radius certifies the derivative bound");
        tc.r1 = lo;
    }

    tc.analytic_cap = std::pow(0.75, k + 1) / (std::sqrt(static_cast<double>(k)) * Ld);

    // certified infimum of |Theta| over the strip minus the zero polydiscs;
    // per-axis reduction: |Theta(z)| >= entry modulus of an axis whose
    // coordinate escapes its disk, so the minimum over axes certifies
    double inf_all = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
        Cell region{0.0, Ld / 2.0, -1.0, 1.0, 0};
        // pre-seed the observed minimum along the disk boundary and the strip
        // edges, where the infimum lives; this prunes the far field quickly
        double seed = std::numeric_limits<double>::infinity();
        for (int g = 0; g < 720; ++g) {
            double ang = kPi * (g + 0.5) / 720.0 - kPi / 2.0;
            double x = tc.r1 * 1.0000001 * std::cos(ang);
            double y = tc.r1 * 1.0000001 * std::sin(ang);
            if (x >= 0) seed = std::min(seed, entry_modulus(b[i], Ld, x, y));
        }
        for (int g = 0; g <= 2000; ++g) {
            double x = Ld / 2.0 * g / 2000.0;
            seed = std::min(seed, entry_modulus(b[i], Ld, x, 1.0));
            seed = std::min(seed, entry_modulus(b[i], Ld, x, -1.0));
        }
        auto res = certified_min([&](double x, double y) { return entry_modulus(b[i], Ld, x, y); },
                                 [&](const Cell& c) { return entry_lip(b[i], Ld, c); }, region,
                                 DiskRule::ExcludeInside, tc.r1, std::max(rel_tol, 0.05), 4000000,
                                 -1.0, -1.0, seed);
        tc.bnb_cells_inf += res.cells;
        require(res.converged, "strip infimum certification did not converge");
        inf_all = std::min(inf_all, res.certified_lower);
    }
    tc.certified_inf = inf_all;
    tc.threshold = std::min(tc.analytic_cap, tc.certified_inf);
    require(tc.threshold > 0, "degenerate persistence threshold");

    double ssum = 0.0;
    for (int i = 0; i < k; ++i) ssum += std::exp(2.0 * kPi * b[i]);
    tc.strip_sup = std::sqrt(ssum) * std::cosh(kPi / Ld);

    // truncation radius: mollifier mass beyond E costs less than threshold/2
    double budget = 0.5 * tc.threshold / tc.strip_sup;
    double e = 1.0;
    int guard = 0;
    while (chi.tail_integral(e) >= budget) {
        e *= 2.0;
        require(++guard < 120, "tail radius search overflow");
    }
    double elo = e / 2.0, ehi = e;
    for (int it = 0; it < 40; ++it) {
        double mid = 0.5 * (elo + ehi);
        if (chi.tail_integral(mid) < budget)
            ehi = mid;
        else
            elo = mid;
    }
    tc.tail_radius = ehi;
    return tc;
}

TilingMap::TilingMap(LatticeZeroMap theta, BLFunction chi, std::vector<IndexedTile> tiles,
                     double quad_budget, double im_height)
    : theta_(std::move(theta)),
      chi_(std::move(chi)),
      tiles_(std::move(tiles)),
      quad_budget_(quad_budget),
      im_height_(im_height) {
    shape_ = mollifier_shape(chi_);
    double ssum = 0.0;
    for (int i = 0; i < theta_.k; ++i)
        ssum += std::exp(2.0 * kPi * theta_.b[i] * im_height_);
    double sup_theta = std::sqrt(ssum) * std::cosh(kPi * im_height_ / theta_.L);
    double d = 1.0;
    int guard = 0;
    while (shape_.tail_integral(d, im_height_) * sup_theta > quad_budget_) {
        d *= 1.5;
        require(++guard < 200, "tile truncation radius search overflow");
    }
    trunc_radius_ = d;
    trunc_tail_ = shape_.tail_integral(d, im_height_) * sup_theta;
}

void TilingMap::validate_tiling(const std::vector<IndexedTile>& tiles, const Box& window,
                                double area_tol) {
    double total = 0.0;
    for (const auto& t : tiles) {
        if (t.tile.is_empty()) continue;
        total += t.tile.clip(window).volume();
    }
    require(std::fabs(total - window.volume()) < area_tol * std::max(1.0, window.volume()),
            "tiles do not cover the window to tolerance");
    // pairwise interior disjointness via sampled containment
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        if (tiles[i].tile.is_empty()) continue;
        RVec c = tiles[i].tile.centroid();
        for (std::size_t j = 0; j < tiles.size(); ++j) {
            if (j == i || tiles[j].tile.is_empty()) continue;
            if (tiles[i].tile.boundary_distance(c) > 1e-7)
                require(!tiles[j].tile.contains(c, -1e-9),
                        "tile interiors overlap");
        }
    }
}

namespace {

// adaptive Gauss-Legendre on an interval for a complex integrand
template <typename F>
cplx quad_interval_adaptive(F&& f, double lo, double hi, double eps, int depth = 0) {
    auto gl_apply = [&](int n) {
        const auto& gl = gauss_legendre(n);
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        cplx s = 0.0;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i)
            s += gl.weights[i] * f(mid + half * gl.nodes[i]);
        return s * half;
    };
    cplx a = gl_apply(16), b = gl_apply(24);
    if (std::abs(a - b) <= eps || depth >= 24 || hi - lo < 1e-12) return b;
    double mid = 0.5 * (lo + hi);
    return quad_interval_adaptive(f, lo, mid, eps / 2, depth + 1) +
           quad_interval_adaptive(f, mid, hi, eps / 2, depth + 1);
}

// adaptive quadrature over a triangle via the collapsed-square rule
template <typename F>
cplx quad_triangle_adaptive(F&& f, const RVec& a, const RVec& b, const RVec& c, double eps,
                            int depth = 0) {
    auto rule = [&](int n) {
        const auto& gl = gauss_legendre(n);
        double area2 = std::fabs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
        cplx s = 0.0;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            double u = 0.5 * (gl.nodes[i] + 1.0);
            for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
                double v = 0.5 * (gl.nodes[j] + 1.0);
                RVec p(2);
                p[0] = a[0] + u * ((1 - v) * (b[0] - a[0]) + v * (c[0] - a[0]));
                p[1] = a[1] + u * ((1 - v) * (b[1] - a[1]) + v * (c[1] - a[1]));
                s += 0.25 * gl.weights[i] * gl.weights[j] * u * f(p);
            }
        }
        return s * area2;
    };
    cplx r1 = rule(6), r2 = rule(10);
    if (std::abs(r1 - r2) <= eps || depth >= 10) return r2;
    RVec ab{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    RVec bc{0.5 * (b[0] + c[0]), 0.5 * (b[1] + c[1])};
    RVec ca{0.5 * (c[0] + a[0]), 0.5 * (c[1] + a[1])};
    return quad_triangle_adaptive(f, a, ab, ca, eps / 4, depth + 1) +
           quad_triangle_adaptive(f, ab, b, bc, eps / 4, depth + 1) +
           quad_triangle_adaptive(f, ca, bc, c, eps / 4, depth + 1) +
           quad_triangle_adaptive(f, ab, bc, ca, eps / 4, depth + 1);
}

}  // namespace

cplx TilingMap::tile_integral(const Polytope& w, const CVec& z) const {
    if (w.is_empty()) return 0.0;
    if (dim() == 1) {
        auto f = [&](double t) { return chi_.eval(CVec{z[0] - t}); };
        double osc = 1.0 / shape_.axis_b;  // kernel oscillation scale
        double lo = w.lo(), hi = w.hi();
        double len = hi - lo;
        if (len <= 0) return 0.0;
        int panels = std::max(1, static_cast<int>(std::ceil(len / osc)));
        cplx total = 0.0;
        double eps = quad_budget_ / (panels + 1);
        for (int p = 0; p < panels; ++p) {
            double a = lo + len * p / panels, b2 = lo + len * (p + 1) / panels;
            total += quad_interval_adaptive(f, a, b2, eps);
        }
        return total;
    }
    // fan triangulation from the centroid
    const auto& verts = w.vertices();
    if (verts.size() < 3) return 0.0;
    RVec c = w.centroid();
    auto f = [&](const RVec& t) { return chi_.eval(CVec{z[0] - t[0], z[1] - t[1]}); };
    cplx total = 0.0;
    double eps = quad_budget_ / static_cast<double>(verts.size());
    for (std::size_t i = 0; i < verts.size(); ++i)
        total += quad_triangle_adaptive(f, c, verts[i], verts[(i + 1) % verts.size()], eps);
    return total;
}

CVec TilingMap::value(const CVec& z) const {
    CVec out(dim());
    RVec re = z.real();
    Box reach(re, re);
    for (int i = 0; i < dim(); ++i) {
        reach.lo[i] -= trunc_radius_;
        reach.hi[i] += trunc_radius_;
    }
    for (const auto& te : tiles_) {
        if (te.tile.is_empty()) continue;
        if (te.tile.distance(re) > trunc_radius_) continue;
        // the mollifier mass beyond the reach box is inside the recorded tail
        cplx integral = tile_integral(te.tile.clip(reach), z);
        if (std::abs(integral) == 0.0) continue;
        CVec shifted(dim());
        for (int i = 0; i < dim(); ++i)
            shifted[i] = z[i] - static_cast<double>(te.index[i]);
        CVec th = theta_.value(shifted);
        for (int i = 0; i < dim(); ++i) out[i] += th[i] * integral;
    }
    return out;
}

CMat TilingMap::jacobian(const CVec& z) const {
    CMat out(dim());
    RVec re = z.real();
    Box reach(re, re);
    for (int i = 0; i < dim(); ++i) {
        reach.lo[i] -= trunc_radius_;
        reach.hi[i] += trunc_radius_;
    }
    for (const auto& te : tiles_) {
        if (te.tile.is_empty()) continue;
        if (te.tile.distance(re) > trunc_radius_) continue;
        Polytope clipped = te.tile.clip(reach);
        if (clipped.is_empty()) continue;
        cplx integral = tile_integral(clipped, z);
        CVec shifted(dim());
        for (int i = 0; i < dim(); ++i)
            shifted[i] = z[i] - static_cast<double>(te.index[i]);
        // d/dz_j of the clipped tile integral
        CVec dintegral(dim());
        if (dim() == 1) {
            dintegral[0] = chi_.eval(CVec{z[0] - clipped.lo()}) -
                           chi_.eval(CVec{z[0] - clipped.hi()});
        } else {
            const auto& verts = clipped.vertices();
            for (std::size_t e = 0; e < verts.size(); ++e) {
                const RVec& a = verts[e];
                const RVec& b2 = verts[(e + 1) % verts.size()];
                RVec ev = b2 - a;
                double len = ev.norm();
                if (len < 1e-14) continue;
                RVec nrm{ev[1] / len, -ev[0] / len};  // outward for ccw
                auto fseg = [&](double s) {
                    RVec t = a + s * ev;
                    return chi_.eval(CVec{z[0] - t[0], z[1] - t[1]});
                };
                cplx seg = quad_interval_adaptive(fseg, 0.0, 1.0, quad_budget_ / verts.size());
                // d/dz_j chi(z - t) = -d/dt_j chi(z - t), so the divergence
                // form carries a sign against the outward normal
                dintegral[0] -= seg * len * nrm[0];
                dintegral[1] -= seg * len * nrm[1];
            }
        }
        for (int i = 0; i < dim(); ++i) {
            out.at(i, i) += theta_.entry_deriv(i, shifted[i]) * integral;
            for (int j = 0; j < dim(); ++j)
                out.at(i, j) += theta_.entry(i, shifted[i]) * dintegral[j];
        }
    }
    return out;
}

std::optional<CVec> newton_run(const HoloMap& map, CVec z, const ZeroSearchOptions& opts,
                               const CVec& center, double stay_radius) {
    int k = map.dim();
    CVec f = map.value(z);
    double fr = f.norm();
    for (int it = 0; it < opts.max_iter; ++it) {
        if (fr < opts.newton_tol) return z;
        CMat j = map.jacobian(z);
        CVec step(k);
        CVec rhs(k);
        for (int i = 0; i < k; ++i) rhs[i] = -f[i];
        if (!j.solve(rhs, step)) return std::nullopt;
        double t = 1.0;
        bool moved = false;
        for (int halving = 0; halving < 20; ++halving) {
            CVec cand(k);
            for (int i = 0; i < k; ++i) cand[i] = z[i] + t * step[i];
            CVec fc = map.value(cand);
            if (fc.norm() < fr) {
                z = cand;
                f = fc;
                fr = fc.norm();
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) return std::nullopt;
        // abandon runs that leave the search neighborhood
        double off = 0.0;
        for (int i = 0; i < k; ++i) off = std::max(off, std::abs(z[i] - center[i]));
        if (off > stay_radius) return std::nullopt;
    }
    return fr < opts.newton_tol ? std::optional<CVec>(z) : std::nullopt;
}

std::vector<CertifiedZero> find_zeros(const HoloMap& map, const CVec& center, double r,
                                      const ZeroSearchOptions& opts) {
    int k = map.dim();
    std::vector<CVec> starts;
    std::vector<double> offsets;
    int s = opts.starts_per_axis;
    for (int i = 0; i < s; ++i)
        offsets.push_back(s == 1 ? 0.0 : -0.6 * r + 1.2 * r * i / (s - 1));
    // grid over (Re, Im) per axis
    std::vector<CVec> grid = {CVec(k)};
    for (int axis = 0; axis < k; ++axis) {
        std::vector<CVec> next;
        for (const auto& g : grid)
            for (double re : offsets)
                for (double im : offsets) {
                    CVec h = g;
                    h[axis] = center[axis] + cplx(re, im);
                    next.push_back(h);
                }
        grid = std::move(next);
    }
    std::vector<CertifiedZero> zeros;
    for (const auto& z0 : grid) {
        auto zq = newton_run(map, z0, opts, center, 4.0 * r + 1.0);
        if (!zq) continue;
        CVec z = *zq;
        // polydisc membership
        bool inside = true;
        for (int i = 0; i < k; ++i)
            if (std::abs(z[i] - center[i]) > r) inside = false;
        if (!inside) continue;
        bool dup = false;
        for (const auto& w : zeros)
            if ((w.z - z).norm() < opts.dedupe_dist) dup = true;
        if (dup) continue;
        CertifiedZero cz;
        cz.z = z;
        cz.residual = map.value(z).norm();
        CMat j = map.jacobian(z);
        cz.nu = min_singular_value(j);
        cz.nu_alt = min_singular_value_eig(j);
        cz.certified = cz.residual < opts.residual_cert &&
                       std::fabs(cz.nu - cz.nu_alt) < opts.nu_agreement * std::max(1.0, cz.nu) &&
                       cz.nu > 0.0;
        zeros.push_back(cz);
    }
    std::sort(zeros.begin(), zeros.end(), [](const CertifiedZero& a, const CertifiedZero& b) {
        if (a.z[0].real() != b.z[0].real()) return a.z[0].real() < b.z[0].real();
        return a.z[0].imag() < b.z[0].imag();
    });
    return zeros;
}

ZeroGrowthMap::ZeroGrowthMap(const std::vector<int>& alpha) : alpha_(alpha) {
    require(!alpha.empty() && alpha.size() <= 5, "column list bounded at desk scale");
    int amax = 0;
    for (int a : alpha_) {
        require(a >= 0 && a <= 16, "column zero count bounded at desk scale");
        amax = std::max(amax, a);
    }
    taper_m_ = amax + 2;
    // scale each column so it stays below 2^-n on the real line
    for (std::size_t n = 0; n < alpha_.size(); ++n) {
        double sup = 0.0;
        for (int g = 0; g <= 40000; ++g) {
            double w = -200.0 + 0.01 * g;
            cplx p = alpha_[n] == 0 ? cplx(1.0, 0.0)
                                    : std::pow(cplx(w, 0), alpha_[n]) - std::pow(0.5, alpha_[n]);
            KernelFactor taper;
            taper.kind = KernelKind::SincPow;
            taper.b = 1.0 / taper_m_;
            taper.power = taper_m_;
            sup = std::max(sup, std::abs(taper.value(cplx(w, 0)) * p));
        }
        beta_.push_back(std::pow(0.5, static_cast<double>(n + 1)) / (1.05 * sup));
    }
}

cplx ZeroGrowthMap::column_fn(int n, cplx w) const {
    KernelFactor taper;
    taper.kind = KernelKind::SincPow;
    taper.b = 1.0 / taper_m_;
    taper.power = taper_m_;
    int a = alpha_[n - 1];
    cplx p = (a == 0) ? cplx(1.0, 0.0) : std::pow(w, a) - std::pow(0.5, a);
    return beta_[n - 1] * taper.value(w) * p;
}

cplx ZeroGrowthMap::column_fn_deriv(int n, cplx w) const {
    KernelFactor taper;
    taper.kind = KernelKind::SincPow;
    taper.b = 1.0 / taper_m_;
    taper.power = taper_m_;
    int a = alpha_[n - 1];
    cplx p = (a == 0) ? cplx(1.0, 0.0) : std::pow(w, a) - std::pow(0.5, a);
    cplx dp = (a == 0) ? cplx(0.0, 0.0) : static_cast<double>(a) * std::pow(w, a - 1);
    return beta_[n - 1] * (taper.deriv(w) * p + taper.value(w) * dp);
}

CVec ZeroGrowthMap::value(const CVec& z) const {
    CVec v(2);
    v[0] = std::sin(kPi * z[0]);
    KernelFactor broad;
    broad.kind = KernelKind::Sinc;
    broad.b = 1.0;
    cplx s = 0.0;
    for (std::size_t n = 1; n <= alpha_.size(); ++n)
        s += column_fn(static_cast<int>(n), z[1]) * broad.value(z[0] - static_cast<double>(n));
    v[1] = s;
    return v;
}

CMat ZeroGrowthMap::jacobian(const CVec& z) const {
    CMat j(2);
    j.at(0, 0) = kPi * std::cos(kPi * z[0]);
    j.at(0, 1) = 0.0;
    KernelFactor broad;
    broad.kind = KernelKind::Sinc;
    broad.b = 1.0;
    cplx d1 = 0.0, d2 = 0.0;
    for (std::size_t n = 1; n <= alpha_.size(); ++n) {
        double nn = static_cast<double>(n);
        d1 += column_fn(static_cast<int>(n), z[1]) * broad.deriv(z[0] - nn);
        d2 += column_fn_deriv(static_cast<int>(n), z[1]) * broad.value(z[0] - nn);
    }
    j.at(1, 0) = d1;
    j.at(1, 1) = d2;
    return j;
}

std::vector<ZeroCountRow> zero_growth_table(const std::vector<int>& alpha, int nmax) {
    require(nmax <= static_cast<int>(alpha.size()), "nmax exceeds the column list");
    ZeroGrowthMap map(alpha);
    ZeroSearchOptions opts;
    opts.starts_per_axis = 6;
    std::vector<ZeroCountRow> rows;
    std::vector<CVec> all;
    for (int n = 1; n <= nmax; ++n) {
        auto zs = find_zeros(map, CVec{cplx(n, 0), cplx(0, 0)}, 0.95, opts);
        ZeroCountRow row;
        row.n = n;
        row.expected = alpha[n - 1];
        for (const auto& z : zs) {
            if (!z.certified) continue;
            if (std::abs(z.z[0] - cplx(n, 0)) > 1e-6) continue;
            if (std::abs(z.z[1]) >= 1.0) continue;
            ++row.found_in_column;
            all.push_back(z.z);
        }
        long long cum = 0;
        for (const auto& z : all)
            if (z.norm() < n + 1.0) ++cum;
        row.cumulative = cum;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace sigemb
