#include "sigemb/suites.hpp"

#include <map>

#include "sigemb/interp.hpp"
#include "sigemb/simplicial.hpp"
#include "sigemb/tilingmap.hpp"
#include "sigemb/voronoi.hpp"
#include "sigemb/welfare.hpp"

namespace sigemb {

namespace {

void check(SuiteResult& r, bool ok, const std::string& what) {
    ++r.checks;
    if (!ok) {
        ++r.failures;
        r.notes.push_back(what);
    }
}

SeqOnSet random_patches(const InterpContext& ctx, Rng& rng, int n_patches, int span) {
    const LatticePair& lat = ctx.lattice;
    SeqOnSet out;
    double coarse = lat.coarse_factor(0) * lat.fine_step(0);
    double stride = span * coarse + ctx.r0 + 1.0;
    for (int pch = 0; pch < n_patches; ++pch) {
        double center = (pch - n_patches / 2.0) * stride + rng.uniform(0, coarse);
        long long base = static_cast<long long>(std::llround(center / lat.fine_step(0)));
        base += rng.uniform_int(0, static_cast<int>(lat.coarse_factor(0)) - 1);
        for (int j = 0; j < span; ++j) {
            out.sites.push_back(GridPt(1, base + j * lat.coarse_factor(0)));
            out.values.push_back(rng.uniform(-1, 1));
        }
    }
    return out;
}

InterpContext& shared_ctx() {
    static InterpContext ctx = InterpContext::make(LatticePair(1, {Rational(2, 3)}), 0.45, 4);
    return ctx;
}

SuiteResult suite_bandlimited(std::uint64_t seed) {
    SuiteResult r;
    r.name = "bandlimited";
    Rng rng(seed);
    // conjugate-symmetric sums are real on the axis
    BLFunction f(1);
    for (int j = 1; j <= 4; ++j) {
        cplx c(rng.uniform(-1, 1), rng.uniform(-1, 1));
        for (int sign : {+1, -1}) {
            Term t;
            t.coeff = 0.5 * (sign > 0 ? c : std::conj(c));
            t.shift = RVec{0.0};
            KernelFactor e;
            e.kind = KernelKind::Cexp;
            e.b = sign * 0.23 * j;
            t.factors.push_back(e);
            f.add_term(std::move(t));
        }
    }
    double worst = 0;
    for (int i = 0; i < 1000; ++i)
        worst = std::max(worst,
                         std::fabs(f.eval(CVec{cplx(rng.uniform(-40, 40), 0)}).imag()));
    check(r, worst < 1e-10, "real evaluation drifted off the axis");

    // reconstruction identity within the declared tail bound
    BLFunction g = make_interp_kernel(0.9, 4, 1);
    auto rec = sampling_reconstruct(g, {0.9}, Box::centered(1, 400.0), Box::centered(1, 8.0));
    double err = 0;
    for (int i = 0; i <= 100; ++i) {
        RVec t{-8.0 + 0.16 * i};
        err = std::max(err, std::fabs(g.eval_real(t) - rec.reconstruction.eval_real(t)));
    }
    check(r, err <= rec.tail_bound + 1e-9, "reconstruction exceeded its tail bound");

    // growth bound at random complex probes
    std::vector<CVec> probes;
    for (int i = 0; i < 200; ++i)
        probes.push_back(CVec{cplx(rng.uniform(-10, 10), rng.uniform(-2, 2))});
    auto e = sup_norm_estimate(g, Box::centered(1, 40.0));
    check(r, growth_check(g, e.upper(), probes).ok, "growth bound violated");
    return r;
}

SuiteResult suite_lattice(std::uint64_t seed) {
    SuiteResult r;
    r.name = "lattice";
    Rng rng(seed);
    auto& ctx = shared_ctx();
    auto u = random_patches(ctx, rng, 3, 4);
    check(r, is_admissible(ctx.lattice, u.sites, ctx.r0).ok, "patch set not admissible");
    // hereditary
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<GridPt> sub;
        for (const auto& p : u.sites)
            if (rng.uniform() < 0.5) sub.push_back(p);
        check(r, is_admissible(ctx.lattice, sub, ctx.r0).ok, "subset lost admissibility");
    }
    // translation invariance
    for (int trial = 0; trial < 100; ++trial) {
        GridPt n(1, rng.uniform_int(-30, 30));
        GridPt shift = ctx.lattice.integer_to_fine(n);
        std::vector<GridPt> moved;
        for (const auto& p : u.sites) moved.push_back(p + shift);
        check(r, is_admissible(ctx.lattice, moved, ctx.r0).ok, "translate lost admissibility");
    }
    return r;
}

SuiteResult suite_interp(std::uint64_t seed) {
    SuiteResult r;
    r.name = "interp";
    Rng rng(seed);
    auto& ctx = shared_ctx();
    for (int trial = 0; trial < 50; ++trial) {
        auto u = random_patches(ctx, rng, rng.uniform_int(1, 3), rng.uniform_int(2, 5));
        auto psi = make_interpolator(ctx, u);
        double worst = 0;
        for (std::size_t i = 0; i < u.sites.size(); ++i)
            worst = std::max(worst, std::fabs(psi.eval_real(ctx.lattice.to_real(u.sites[i])) -
                                              u.values[i]));
        check(r, worst < 1e-7, "interpolation property failed");
        double sup = u.sup_norm();
        bool bounded = true;
        for (int g = 0; g <= 60; ++g) {
            RVec t{-30.0 + g};
            if (std::fabs(psi.eval_real(t)) > 2 * ctx.k0 * sup + psi.tail_bound() + 1e-9)
                bounded = false;
        }
        check(r, bounded, "interpolator norm bound violated");
    }
    // equivariance of the mixed interpolator
    auto u = random_patches(ctx, rng, 2, 3);
    SiteField f;
    f.sites = u.sites;
    f.values = u.values;
    f.p.assign(u.sites.size(), 1.0);
    f.p[0] = 0.5;
    auto mix = make_mixed_interpolator(ctx, f, MixMode::Exact);
    GridPt shift = ctx.lattice.integer_to_fine(GridPt(1, 5));
    SiteField g = f;
    for (auto& s : g.sites) s = s + shift;
    auto mix2 = make_mixed_interpolator(ctx, g, MixMode::Exact);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        RVec t{rng.uniform(-15, 15)};
        worst = std::max(worst, std::fabs(mix2.eval_real(RVec{t[0] + 5.0}) - mix.eval_real(t)));
    }
    check(r, worst < 1e-7, "mixture equivariance failed");
    return r;
}

SuiteResult suite_convexgeom(std::uint64_t seed) {
    SuiteResult r;
    r.name = "convexgeom";
    Rng rng(seed);
    for (int trial = 0; trial < 30; ++trial) {
        auto w = random_convex_body(rng, 2, 3.0);
        double rad = rng.uniform(0.05, 0.5);
        auto round_trip = w.outer_parallel_hull(rad).inner_parallel(rad);
        bool contained = true;
        for (const auto& v : w.vertices())
            if (!round_trip.contains(v, 1e-9)) contained = false;
        check(r, contained, "outer-then-inner lost the body");
        auto in = w.inner_parallel(rad);
        if (!in.is_empty())
            for (const auto& v : in.vertices())
                check(r, w.boundary_distance(v) >= rad - 1e-9, "interior offset too shallow");
    }
    for (int trial = 0; trial < 30; ++trial) {
        auto a = random_convex_body(rng, 2, 2.0);
        auto b = random_convex_body(rng, 2, 2.0);
        auto c = random_convex_body(rng, 2, 2.0);
        check(r, hausdorff_distance(a, c) <=
                     hausdorff_distance(a, b) + hausdorff_distance(b, c) + 1e-9,
              "triangle inequality failed");
    }
    return r;
}

SuiteResult suite_dynsys(std::uint64_t seed) {
    SuiteResult r;
    r.name = "dynsys";
    Rng rng(seed);
    auto sys = TorusSystem::make({0.6180339887498949});
    auto md = build_marker(sys, 3);
    // translate disjointness
    for (int n = 1; n < md.disjoint_m; ++n)
        check(r, TorusSystem::circle_dist(n * sys.alpha[0], 0.0) >= md.width,
              "marker translates overlap");
    // signal band membership
    SignalSpec spec;
    spec.freqs = {GridPt(1, 1)};
    spec.coeffs = {cplx(0.3, 0.05)};
    spec.band = {1.3};
    EquivariantSignal f(sys, spec);
    for (int i = 0; i < 20; ++i) {
        RVec x{rng.uniform()};
        auto bl = f.to_blfunction(x);
        check(r, bl.freq_box().axis[0].abs_max() <= 1.3 / 2 + 1e-12, "signal left the band");
    }
    return r;
}

SuiteResult suite_tilingmap(std::uint64_t seed) {
    SuiteResult r;
    r.name = "tilingmap";
    Rng rng(seed);
    auto chi = make_mollifier(0.28, 8, 1);
    auto tc = theta_constants(16, {0.44}, 1, mollifier_shape(chi.chi));
    LatticeZeroMap th;
    th.k = 1;
    th.L = 16;
    th.b = {0.44};
    // persistence at random sub-threshold perturbations
    for (int trial = 0; trial < 10; ++trial) {
        PerturbedMap pm;
        pm.base = th;
        BLFunction off(1);
        double strip_budget = 0.9 * tc.threshold;
        for (int j = 0; j < 3; ++j) {
            Term t;
            double beta = rng.uniform(-0.5, 0.5);
            double amp = strip_budget / 3.0 / std::exp(kPi * std::fabs(beta));
            t.coeff = cplx(amp * rng.uniform(-1, 1), amp * rng.uniform(-1, 1));
            t.shift = RVec{rng.uniform(-4, 4)};
            KernelFactor e;
            e.kind = KernelKind::Cexp;
            e.b = beta;
            t.factors.push_back(e);
            off.add_term(std::move(t));
        }
        pm.offset.push_back(off);
        auto zs = find_zeros(pm, CVec{cplx(0, 0)}, 2 * tc.r1);
        bool found = false;
        for (const auto& z : zs)
            if (z.certified && std::abs(z.z[0]) <= tc.r1 * (1 + 1e-9) && z.nu > 2.0 / 16.0)
                found = true;
        check(r, found, "perturbed zero not certified in the inner polydisc");
    }
    // derivative consistency at random probes
    std::vector<IndexedTile> tiles;
    tiles.push_back({GridPt(1, 0), Polytope::interval(-80.0, 5.0)});
    tiles.push_back({GridPt(1, 1), Polytope::interval(5.0, 80.0)});
    TilingMap phi(th, chi.chi, tiles, 1e-10);
    for (int p = 0; p < 30; ++p) {
        CVec z{cplx(rng.uniform(-4, 4), rng.uniform(-0.2, 0.2))};
        double h = 1e-5;
        cplx num = (phi.value(CVec{z[0] + h})[0] - phi.value(CVec{z[0] - h})[0]) / (2 * h);
        cplx an = phi.jacobian(z).at(0, 0);
        check(r, std::abs(num - an) < 1e-6 * std::max(1.0, std::abs(an)),
              "map derivative mismatch");
    }
    return r;
}

SuiteResult suite_voronoi(std::uint64_t seed) {
    SuiteResult r;
    r.name = "voronoi";
    Rng rng(seed);
    auto sys = TorusSystem::make({0.6180339887498949});
    auto md = build_marker(sys, 3);
    for (int trial = 0; trial < 6; ++trial) {
        RVec x{rng.uniform()};
        GridPt n(1, rng.uniform_int(-5, 5));
        Box window = Box::centered(1, 16.0);
        auto base = level1_tiles(sys, md, x, window);
        Box w2{RVec{window.lo[0] - n[0]}, RVec{window.hi[0] - n[0]}};
        auto moved = level1_tiles(sys, md, sys.act(n, x), w2);
        for (const auto& t : base.tiles) {
            if (t.tile.is_empty()) continue;
            const Polytope* q = moved.tile_of(t.index - n);
            if (!q || q->is_empty()) {
                check(r, false, "equivariant tile missing");
                continue;
            }
            Polytope expect = Polytope::interval(t.tile.lo() - n[0], t.tile.hi() - n[0]);
            check(r, hausdorff_distance(*q, expect) < 1e-6, "equivariance drift");
        }
        // nonempty tiles only at bump > 1/2
        for (const auto& t : base.tiles) {
            if (t.tile.is_empty() || t.tile.volume() <= 0) continue;
            check(r, md.bump(sys, sys.act(t.index, x)) > 0.5, "weak site owns a tile");
        }
    }
    return r;
}

SuiteResult suite_welfare(std::uint64_t seed) {
    SuiteResult r;
    r.name = "welfare";
    Rng rng(seed);
    for (int trial = 0; trial < 20; ++trial) {
        Box window = Box::centered(1, 14.0);
        std::vector<GridPt> sites = grid_box(window);
        std::sort(sites.begin(), sites.end());
        std::vector<double> u0(sites.size(), 0.0), v0(sites.size(), 0.0);
        for (std::size_t i = 0; i < sites.size(); ++i) {
            if (rng.uniform() < 0.3) u0[i] = rng.uniform(0, 5);
            if (rng.uniform() < 0.3) v0[i] = rng.uniform(0, 3);
        }
        WeightParams wp{1.0, 2.0, rng.uniform(3.0, 6.0)};
        auto t = allocate_weights_raw(window, sites, u0, v0, wp);
        check(r, check_conservation(t).ok, "conservation broken");
        check(r, check_greedy_step(t).ok, "greedy-step invariant broken");
    }
    // cascade sparsity
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> row(rng.uniform_int(2, 24), 0.0);
        for (auto& x : row)
            if (rng.uniform() < 0.4) x = rng.uniform(0, 3);
        auto w = cascade_row(row);
        int live = 0, big = 0;
        for (std::size_t l = 0; l < row.size(); ++l) {
            if (w[l] > 0) ++live;
            if (row[l] > 1) ++big;
        }
        check(r, live <= 1 + big, "cascade sparsity violated");
    }
    return r;
}

SuiteResult suite_simplicial(std::uint64_t seed) {
    SuiteResult r;
    r.name = "simplicial";
    Rng rng(seed);
    // perturb/verify on a path into R^3 across seeds
    Complex path;
    path.verts = {{}, {}, {}, {}};
    path.maximal = {{0, 1}, {1, 2}, {2, 3}};
    PerturbInstance inst;
    inst.complex = path;
    inst.vertex_keys = {11, 22, 33, 44};
    inst.base_images.assign(4, {0, 0, 0});
    inst.coords = {0, 1, 2};
    for (int s = 0; s < 40; ++s) {
        auto res = generic_perturb_verify({inst}, 0.4, seed + s * 977 + 1, 1, 1e-12);
        check(r, res.ok, "jittered path failed to verify");
    }
    // perturbation size bookkeeping
    for (int v = 0; v < 4; ++v)
        for (int cdx = 0; cdx < 3; ++cdx)
            check(r, std::fabs(jitter_component(seed + 1, inst.vertex_keys[v], cdx, 0.4)) <= 0.4,
                  "jitter exceeded its budget");
    return r;
}

using SuiteFn = SuiteResult (*)(std::uint64_t);
const std::vector<std::pair<std::string, SuiteFn>>& registry() {
    static std::vector<std::pair<std::string, SuiteFn>> reg = {
        {"bandlimited", suite_bandlimited}, {"lattice", suite_lattice},
        {"interp", suite_interp},           {"convexgeom", suite_convexgeom},
        {"dynsys", suite_dynsys},           {"tilingmap", suite_tilingmap},
        {"voronoi", suite_voronoi},         {"welfare", suite_welfare},
        {"simplicial", suite_simplicial},
    };
    return reg;
}

}  // namespace

std::vector<std::string> suite_names() {
    std::vector<std::string> names;
    for (const auto& [n, fn] : registry()) names.push_back(n);
    return names;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
    for (const auto& [n, fn] : registry())
        if (n == name) return fn(seed);
    throw std::invalid_argument("unknown suite: " + name);
}

}  // namespace sigemb
