#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sigemb/interp.hpp"
#include "support/adm.hpp"

using namespace sigemb;
using test_support::random_admissible_values;

namespace {

InterpContext& shared_ctx() {
    static InterpContext ctx = InterpContext::make(LatticePair(1, {Rational(2, 3)}), 0.45, 4);
    return ctx;
}

}  // namespace

TEST_CASE("empty site list evaluates to zero") {
    auto& ctx = shared_ctx();
    SeqOnSet empty;
    CHECK(std::abs(phi_eval(ctx, empty, CVec{cplx(1.3, 0.2)}).value) == 0.0);
    auto interp = make_interpolator(ctx, empty);
    CHECK(std::abs(interp.eval(CVec{cplx(0.7, 0)})) == 0.0);
}

TEST_CASE("single site: value reproduced at the site") {
    auto& ctx = shared_ctx();
    SeqOnSet u;
    u.sites = {GridPt(1, 5)};
    u.values = {0.8125};
    RVec site = ctx.lattice.to_real(u.sites[0]);
    CHECK(phi_eval(ctx, u, CVec::from_real(site)).value.real() == doctest::Approx(0.8125).epsilon(1e-14));
    // S = id on a single site
    auto s = sampling_apply(ctx, u);
    CHECK(s.values[0] == doctest::Approx(0.8125).epsilon(1e-14));
}

TEST_CASE("sampling operator is the identity on coarse-lattice data") {
    auto& ctx = shared_ctx();
    SeqOnSet u;
    Rng rng(2);
    for (const auto& p : ctx.lattice.coarse_points_in_box(Box::centered(1, 20.0))) {
        u.sites.push_back(p);
        u.values.push_back(rng.uniform(-1, 1));
    }
    auto s = sampling_apply(ctx, u);
    for (std::size_t i = 0; i < u.values.size(); ++i)
        CHECK(s.values[i] == doctest::Approx(u.values[i]).epsilon(1e-13));
}

TEST_CASE("contraction bound on random admissible data") {
    auto& ctx = shared_ctx();
    Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        auto u = random_admissible_values(ctx, rng, 3, 4);
        REQUIRE(is_admissible(ctx.lattice, u.sites, ctx.r0).ok);
        auto s = sampling_apply(ctx, u);
        double diff = 0;
        for (std::size_t i = 0; i < u.values.size(); ++i)
            diff = std::max(diff, std::fabs(s.values[i] - u.values[i]));
        CHECK(diff <= 0.5 * u.sup_norm() + 1e-12);
    }
}

TEST_CASE("phi is bounded by k0 times the data") {
    auto& ctx = shared_ctx();
    Rng rng(11);
    auto u = random_admissible_values(ctx, rng, 3, 4);
    double sup = u.sup_norm();
    for (int g = 0; g <= 400; ++g) {
        RVec t{-40.0 + 80.0 * g / 400.0};
        CHECK(std::fabs(phi_eval(ctx, u, CVec::from_real(t)).value.real()) <=
              ctx.k0 * sup + 1e-9);
    }
}

TEST_CASE("interpolation property and norm bound") {
    auto& ctx = shared_ctx();
    Rng rng(13);
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto u = random_admissible_values(ctx, rng, rng.uniform_int(1, 4), rng.uniform_int(1, 5));
        auto psi = make_interpolator(ctx, u);
        for (std::size_t i = 0; i < u.sites.size(); ++i) {
            RVec site = ctx.lattice.to_real(u.sites[i]);
            worst = std::max(worst,
                             std::fabs(psi.eval_real(site) - u.values[i]));
        }
        // norm bound on a grid
        double sup = u.sup_norm();
        for (int g = 0; g <= 100; ++g) {
            RVec t{-30.0 + 60.0 * g / 100.0};
            CHECK(std::fabs(psi.eval_real(t)) <= 2.0 * ctx.k0 * sup + psi.tail_bound() + 1e-9);
        }
    }
    CHECK(worst < 1e-7);
}

TEST_CASE("interpolator is integer-shift equivariant") {
    auto& ctx = shared_ctx();
    Rng rng(17);
    auto u = random_admissible_values(ctx, rng, 3, 3);
    auto psi = make_interpolator(ctx, u);
    GridPt n(1, 4);
    GridPt shift = ctx.lattice.integer_to_fine(n);
    SeqOnSet v;
    for (std::size_t i = 0; i < u.sites.size(); ++i) {
        v.sites.push_back(u.sites[i] + shift);
        v.values.push_back(u.values[i]);
    }
    auto psi_shift = make_interpolator(ctx, v);
    for (int probe = 0; probe < 100; ++probe) {
        RVec t{rng.uniform(-20, 20)};
        RVec tn{t[0] + 4.0};
        CHECK(psi_shift.eval_real(tn) == doctest::Approx(psi.eval_real(t)).epsilon(1e-10));
    }
}

TEST_CASE("mixed interpolator: all-zero field gives zero") {
    auto& ctx = shared_ctx();
    SiteField f;
    for (int i = 0; i < 5; ++i) {
        f.sites.push_back(GridPt(1, 3 * i));
        f.p.push_back(0.0);
        f.values.push_back(1.0);
    }
    auto mix = make_mixed_interpolator(ctx, f, MixMode::Exact);
    for (double t = -5; t <= 5; t += 0.7) CHECK(std::fabs(mix.eval_real(RVec{t})) == 0.0);
}

TEST_CASE("mixed interpolator reproduces sure sites") {
    auto& ctx = shared_ctx();
    Rng rng(19);
    auto u = random_admissible_values(ctx, rng, 2, 4);
    SiteField f;
    f.sites = u.sites;
    f.values = u.values;
    f.p.assign(u.sites.size(), 1.0);
    // demote one site to probability 1/2
    f.p.back() = 0.5;
    auto mix = make_mixed_interpolator(ctx, f, MixMode::Exact);
    for (std::size_t i = 0; i + 1 < f.sites.size(); ++i) {
        RVec site = ctx.lattice.to_real(f.sites[i]);
        CHECK(mix.eval_real(site) == doctest::Approx(f.values[i]).epsilon(1e-7));
    }
}

TEST_CASE("two-atom mixture against the direct average") {
    auto& ctx = shared_ctx();
    Rng rng(23);
    auto u = random_admissible_values(ctx, rng, 2, 3);
    SiteField f;
    f.sites = u.sites;
    f.values = u.values;
    f.p.assign(u.sites.size(), 1.0);
    f.p[0] = 0.5;
    auto mix = make_mixed_interpolator(ctx, f, MixMode::Exact);

    // oracle: (psi with site 0) + (psi without) halved
    SeqOnSet with_all = u;
    SeqOnSet without;
    for (std::size_t i = 1; i < u.sites.size(); ++i) {
        without.sites.push_back(u.sites[i]);
        without.values.push_back(u.values[i]);
    }
    auto a = make_interpolator(ctx, with_all);
    auto b = make_interpolator(ctx, without);
    for (int probe = 0; probe < 50; ++probe) {
        RVec t{rng.uniform(-15, 15)};
        double oracle = 0.5 * a.eval_real(t) + 0.5 * b.eval_real(t);
        CHECK(mix.eval_real(t) == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("mixed interpolator boundedness") {
    auto& ctx = shared_ctx();
    Rng rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        auto u = random_admissible_values(ctx, rng, 2, 3);
        SiteField f;
        f.sites = u.sites;
        f.values = u.values;
        f.p.clear();
        for (std::size_t i = 0; i < u.sites.size(); ++i) {
            double roll = rng.uniform();
            f.p.push_back(roll < 0.4 ? 1.0 : (roll < 0.7 ? 0.0 : rng.uniform()));
        }
        // cap the fractional count for exact mode
        int frac = 0;
        for (double& p : f.p)
            if (p > 0 && p < 1 && ++frac > 8) p = 1.0;
        auto mix = make_mixed_interpolator(ctx, f, MixMode::Exact);
        double sup = 0;
        for (double v : f.values) sup = std::max(sup, std::fabs(v));
        for (int g = 0; g <= 40; ++g) {
            RVec t{-20.0 + g};
            CHECK(std::fabs(mix.eval_real(t)) <= 2.0 * ctx.k0 * sup + mix.tail + 1e-9);
        }
    }
}

TEST_CASE("mixed interpolator equivariance under integer shifts") {
    auto& ctx = shared_ctx();
    Rng rng(31);
    auto u = random_admissible_values(ctx, rng, 2, 3);
    SiteField f;
    f.sites = u.sites;
    f.values = u.values;
    f.p.assign(u.sites.size(), 1.0);
    f.p[0] = 0.3;
    auto mix = make_mixed_interpolator(ctx, f, MixMode::Exact);
    GridPt n(1, -3);
    GridPt shift = ctx.lattice.integer_to_fine(n);
    SiteField g;
    for (std::size_t i = 0; i < f.sites.size(); ++i) {
        g.sites.push_back(f.sites[i] + shift);
        g.p.push_back(f.p[i]);
        g.values.push_back(f.values[i]);
    }
    auto mix2 = make_mixed_interpolator(ctx, g, MixMode::Exact);
    for (int probe = 0; probe < 100; ++probe) {
        RVec t{rng.uniform(-12, 12)};
        CHECK(mix2.eval_real(RVec{t[0] - 3.0}) == doctest::Approx(mix.eval_real(t)).epsilon(1e-7));
    }
}

TEST_CASE("Monte Carlo mode is deterministic per seed") {
    auto& ctx = shared_ctx();
    Rng rng(37);
    auto u = random_admissible_values(ctx, rng, 2, 3);
    SiteField f;
    f.sites = u.sites;
    f.values = u.values;
    f.p.assign(u.sites.size(), 0.5);
    auto m1 = make_mixed_interpolator(ctx, f, MixMode::MonteCarlo, 42, 64);
    auto m2 = make_mixed_interpolator(ctx, f, MixMode::MonteCarlo, 42, 64);
    for (int probe = 0; probe < 20; ++probe) {
        RVec t{-10.0 + probe};
        CHECK(m1.eval_real(t) == m2.eval_real(t));
    }
}

TEST_CASE("exact mode rejects too many fractional sites") {
    auto& ctx = shared_ctx();
    SiteField f;
    for (int i = 0; i < 25; ++i) {
        f.sites.push_back(GridPt(1, 3 * i));
        f.p.push_back(0.5);
        f.values.push_back(0.1);
    }
    CHECK_THROWS(make_mixed_interpolator(ctx, f, MixMode::Exact));
}

TEST_CASE("truncation radius: monotone in tolerance and verified by doubling") {
    auto& ctx = shared_ctx();
    double r = 5.0;
    double r1 = truncation_radius(ctx, r, 1e-4);
    double r2 = truncation_radius(ctx, r, 5e-5);
    CHECK(std::isfinite(r1));
    CHECK(r2 >= r1);

    // window-doubling: computing with radius r1 vs 2 r1 moves values by < eps
    Rng rng(41);
    auto u = random_admissible_values(ctx, rng, 5, 5);
    auto psi = make_interpolator(ctx, u);
    for (int probe = 0; probe < 60; ++probe) {
        RVec t{rng.uniform(-r, r)};
        CVec z = CVec::from_real(t);
        cplx narrow = phi_eval(ctx, psi.coeffs(), z, r1).value;
        cplx wide = phi_eval(ctx, psi.coeffs(), z, 2 * r1).value;
        CHECK(std::abs(narrow - wide) < 1e-4);
    }
}

TEST_CASE("field continuity: agreement inside the truncation radius controls values") {
    auto& ctx = shared_ctx();
    double r = 4.0, eps = 1e-4;
    double rp = truncation_radius(ctx, r, eps);
    Rng rng(43);
    auto u = random_admissible_values(ctx, rng, 6, 5);
    SiteField f;
    f.sites = u.sites;
    f.values = u.values;
    f.p.clear();
    for (std::size_t i = 0; i < u.sites.size(); ++i) f.p.push_back(rng.uniform() < 0.5 ? 1.0 : 0.0);
    // g agrees with f on B_{rp}, differs outside
    SiteField g = f;
    for (std::size_t i = 0; i < g.sites.size(); ++i) {
        RVec x = ctx.lattice.to_real(g.sites[i]);
        if (x.norm() > rp) {
            g.values[i] = rng.uniform(-1, 1);
            g.p[i] = 1.0 - g.p[i];
        }
    }
    auto mf = make_mixed_interpolator(ctx, f, MixMode::Exact);
    auto mg = make_mixed_interpolator(ctx, g, MixMode::Exact);
    // values on B_r move by at most a few eps: the fields only differ beyond
    // rp, and the geometric inverse carries that influence inward no faster
    // than the kernel tail the radius was sized for
    for (int probe = 0; probe < 40; ++probe) {
        RVec t{rng.uniform(-r, r)};
        CHECK(std::fabs(mf.eval_real(t) - mg.eval_real(t)) < 4 * eps);
    }
}
