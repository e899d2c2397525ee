#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sigemb/tilingmap.hpp"

using namespace sigemb;

namespace {

// shared small configuration: k=1, L=16, band edge a=0.3, delta=0.28
struct Config {
    long long L = 16;
    std::vector<double> b{0.44};
    MollifierResult chi = make_mollifier(0.28, 8, 1);
    ThetaConstants tc = theta_constants(16, {0.44}, 1, mollifier_shape(chi.chi));
};
Config& cfg() {
    static Config c;
    return c;
}

LatticeZeroMap theta_of(const Config& c) {
    LatticeZeroMap t;
    t.k = 1;
    t.L = c.L;
    t.b = c.b;
    return t;
}

}  // namespace

TEST_CASE("smallest singular value: direct cases and eigen route") {
    CMat id(2);
    id.at(0, 0) = 1.0;
    id.at(1, 1) = 1.0;
    CHECK(min_singular_value(id) == doctest::Approx(1.0));
    CMat d(2);
    d.at(0, 0) = 2.0;
    d.at(1, 1) = 0.5;
    CHECK(min_singular_value(d) == doctest::Approx(0.5));
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        CMat a(2);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) a.at(r, c) = cplx(rng.uniform(-2, 2), rng.uniform(-2, 2));
        CHECK(std::fabs(min_singular_value(a) - min_singular_value_eig(a)) < 1e-9);
    }
}

TEST_CASE("theta constants: analytic cap and positive threshold") {
    // spec'd instance: L=8, k=1, b=1.5
    auto chi = make_mollifier(0.25, 8, 1);
    auto tc = theta_constants(8, {1.5}, 1, mollifier_shape(chi.chi));
    CHECK(tc.analytic_cap == doctest::Approx(9.0 / (16.0 * 8.0)).epsilon(1e-12));
    CHECK(tc.threshold > 0.0);
    CHECK(tc.r1 > 0.0);
    CHECK(tc.r1 < 0.25);
    // derivative entries certified above 3/L on the disk: spot check
    LatticeZeroMap th;
    th.k = 1;
    th.L = 8;
    th.b = {1.5};
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        double ang = rng.uniform(0, 2 * kPi), rr = tc.r1 * std::sqrt(rng.uniform());
        cplx z(rr * std::cos(ang), rr * std::sin(ang));
        CHECK(std::abs(th.entry_deriv(0, z)) > 3.0 / 8.0);
    }
    // the certified strip infimum is a true lower bound at random probes
    for (int i = 0; i < 4000; ++i) {
        cplx z(rng.uniform(-24.0, 24.0), rng.uniform(-1.0, 1.0));
        // skip points inside the excluded polydiscs
        double dist_re = std::fabs(z.real() - 8.0 * std::round(z.real() / 8.0));
        if (dist_re * dist_re + z.imag() * z.imag() <= tc.r1 * tc.r1) continue;
        CHECK(std::abs(th.entry(0, z)) >= tc.certified_inf - 1e-12);
    }
}

TEST_CASE("tail radius bounds the mollifier mass at probes") {
    auto& c = cfg();
    double budget = 0.5 * c.tc.threshold / c.tc.strip_sup;
    auto shape = mollifier_shape(c.chi.chi);
    CHECK(shape.tail_integral(c.tc.tail_radius) < budget);
    // numeric re-check at 10 probes: integral of |chi(z-t)| beyond the radius
    Rng rng(11);
    for (int p = 0; p < 10; ++p) {
        cplx z(rng.uniform(-4, 4), rng.uniform(-1, 1));
        double e = c.tc.tail_radius;
        double s = 0.0;
        double span = 4.0 * e;
        int n = 40000;
        for (int i = 0; i < n; ++i) {
            double t = z.real() + e + span * (i + 0.5) / n;
            s += std::abs(c.chi.chi.eval(CVec{z - t})) * (span / n);
            double t2 = z.real() - e - span * (i + 0.5) / n;
            s += std::abs(c.chi.chi.eval(CVec{z - t2})) * (span / n);
        }
        CHECK(c.tc.strip_sup * s < 0.5 * c.tc.threshold * 1.01);
    }
}

TEST_CASE("single huge tile: map matches the reference deep inside") {
    auto& c = cfg();
    double e = c.tc.tail_radius;
    double half = e + 6.0;
    std::vector<IndexedTile> tiles;
    tiles.push_back({GridPt(1, 0), Polytope::interval(-half, half)});
    TilingMap phi(theta_of(c), c.chi.chi, tiles, c.tc.threshold / 10.0);
    LatticeZeroMap th = theta_of(c);
    Rng rng(13);
    for (int p = 0; p < 12; ++p) {
        CVec z{cplx(rng.uniform(-4, 4), rng.uniform(-0.9, 0.9))};
        CVec diff = phi.value(z) - th.value(z);
        CHECK(diff.norm() < c.tc.threshold);
    }
}

TEST_CASE("map stays bounded by sqrt(k) K1 on the real line") {
    auto& c = cfg();
    // random interval tiling of a window
    Rng rng(17);
    double half = 40.0;
    std::vector<IndexedTile> tiles;
    double x = -half;
    int idx = -6;
    while (x < half) {
        double next = std::min(half, x + rng.uniform(2.0, 18.0));
        tiles.push_back({GridPt(1, idx++), Polytope::interval(x, next)});
        x = next;
    }
    TilingMap::validate_tiling(tiles, Box::centered(1, half));
    TilingMap phi(theta_of(c), c.chi.chi, tiles, 1e-8);
    double bound = std::sqrt(1.0) * c.chi.k1 + 10 * (1e-8 + phi.truncation_tail());
    for (int g = 0; g <= 200; ++g) {
        CVec z{cplx(-20.0 + 40.0 * g / 200.0, 0.0)};
        CHECK(phi.value(z).norm() <= bound + 1e-6);
    }
}

TEST_CASE("integer translation of the tiling shifts the map") {
    auto& c = cfg();
    std::vector<IndexedTile> tiles;
    tiles.push_back({GridPt(1, -2), Polytope::interval(-50.0, -3.0)});
    tiles.push_back({GridPt(1, 0), Polytope::interval(-3.0, 11.0)});
    tiles.push_back({GridPt(1, 1), Polytope::interval(11.0, 50.0)});
    long long m = 5;
    std::vector<IndexedTile> shifted;
    for (const auto& t : tiles)
        shifted.push_back({GridPt(1, t.index[0] - m),
                           Polytope::interval(t.tile.lo() - m, t.tile.hi() - m)});
    TilingMap phi(theta_of(c), c.chi.chi, tiles, 1e-9);
    TilingMap phi_shift(theta_of(c), c.chi.chi, shifted, 1e-9);
    Rng rng(19);
    for (int p = 0; p < 10; ++p) {
        CVec z{cplx(rng.uniform(-6, 6), rng.uniform(-0.4, 0.4))};
        CVec a = phi_shift.value(z);
        CVec b = phi.value(CVec{z[0] + static_cast<double>(m)});
        CHECK((a - b).norm() < 1e-7);
    }
}

TEST_CASE("jacobian matches central differences") {
    auto& c = cfg();
    std::vector<IndexedTile> tiles;
    tiles.push_back({GridPt(1, 0), Polytope::interval(-60.0, 4.5)});
    tiles.push_back({GridPt(1, 1), Polytope::interval(4.5, 60.0)});
    TilingMap phi(theta_of(c), c.chi.chi, tiles, 1e-10);
    Rng rng(23);
    for (int p = 0; p < 20; ++p) {
        CVec z{cplx(rng.uniform(-3, 6), rng.uniform(-0.3, 0.3))};
        double h = 1e-5;
        CVec up = phi.value(CVec{z[0] + h}), dn = phi.value(CVec{z[0] - h});
        cplx num = (up[0] - dn[0]) / (2 * h);
        cplx an = phi.jacobian(z).at(0, 0);
        CHECK(std::abs(num - an) < 1e-6 * std::max(1.0, std::abs(an)));
    }
}

TEST_CASE("reference map alone: one certified zero per polydisc") {
    auto& c = cfg();
    ThetaMapAdapter th;
    th.map = theta_of(c);
    for (long long n : {-1, 0, 1}) {
        auto zs = find_zeros(th, CVec{cplx(16.0 * n, 0)}, 2 * c.tc.r1);
        REQUIRE(zs.size() == 1);
        CHECK(zs[0].certified);
        CHECK(zs[0].residual < 1e-12);
        CHECK((zs[0].z - CVec{cplx(16.0 * n, 0)}).norm() < 1e-9);
        CHECK(zs[0].nu > 3.0 / 16.0);
    }
}

TEST_CASE("constant offset below the threshold keeps one zero, nu above 2/L") {
    auto& c = cfg();
    PerturbedMap pm;
    pm.base = theta_of(c);
    BLFunction off(1);
    Term t;
    t.coeff = 0.8 * c.tc.threshold;
    t.shift = RVec{0.0};
    KernelFactor kf;
    kf.kind = KernelKind::Const;
    t.factors.push_back(kf);
    off.add_term(std::move(t));
    pm.offset.push_back(off);
    auto zs = find_zeros(pm, CVec{cplx(0, 0)}, 2 * c.tc.r1);
    REQUIRE(zs.size() == 1);
    CHECK(zs[0].certified);
    // inside the r1 polydisc
    CHECK(std::abs(zs[0].z[0]) <= c.tc.r1 * (1 + 1e-9));
    CHECK(zs[0].nu > 2.0 / 16.0);
}

TEST_CASE("polydisc away from the zero set comes back empty") {
    auto& c = cfg();
    ThetaMapAdapter th;
    th.map = theta_of(c);
    auto zs = find_zeros(th, CVec{cplx(5.0, 0)}, 2 * c.tc.r1);
    CHECK(zs.empty());
}

TEST_CASE("zero growth table: prescribed counts per column") {
    auto rows = zero_growth_table({2, 4}, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].found_in_column >= 2);
    CHECK(rows[0].found_in_column == rows[0].expected);
    CHECK(rows[1].found_in_column == 4);
    CHECK(rows[0].cumulative >= 2);
    CHECK(rows[1].cumulative >= 6);

    auto none = zero_growth_table({0}, 1);
    CHECK(none[0].found_in_column == 0);
}

TEST_CASE("zero growth counts match a dense-start sweep") {
    std::vector<int> alpha{3};
    ZeroGrowthMap map(alpha);
    ZeroSearchOptions coarse;
    coarse.starts_per_axis = 6;
    auto a = find_zeros(map, CVec{cplx(1, 0), cplx(0, 0)}, 0.95, coarse);
    ZeroSearchOptions dense;
    dense.starts_per_axis = 9;
    auto b = find_zeros(map, CVec{cplx(1, 0), cplx(0, 0)}, 0.95, dense);
    int ca = 0, cb = 0;
    for (const auto& z : a)
        if (z.certified && std::abs(z.z[1]) < 1.0) ++ca;
    for (const auto& z : b)
        if (z.certified && std::abs(z.z[1]) < 1.0) ++cb;
    CHECK(ca == cb);
    CHECK(ca == 3);
}

TEST_CASE("two-dimensional map: bound, reference match, jacobian, zero") {
    auto chi = make_mollifier(0.28, 8, 2);
    auto tc = theta_constants(16, {0.44, 0.44}, 2, mollifier_shape(chi.chi));
    LatticeZeroMap th;
    th.k = 2;
    th.L = 16;
    th.b = {0.44, 0.44};
    double half = 24.0;
    // 2x2 box tiling of a moderate window
    std::vector<IndexedTile> tiles;
    tiles.push_back({GridPt(2, 0, 0), Polytope::box(Box{RVec{-half, -half}, RVec{0.0, 0.0}})});
    tiles.push_back({GridPt(2, 1, 0), Polytope::box(Box{RVec{0.0, -half}, RVec{half, 0.0}})});
    tiles.push_back({GridPt(2, 0, 1), Polytope::box(Box{RVec{-half, 0.0}, RVec{0.0, half}})});
    tiles.push_back({GridPt(2, 1, 1), Polytope::box(Box{RVec{0.0, 0.0}, RVec{half, half}})});
    TilingMap::validate_tiling(tiles, Box::centered(2, half));
    TilingMap phi(th, chi.chi, tiles, 1e-11);

    // bound on the real plane
    Rng rng(3);
    for (int g = 0; g < 25; ++g) {
        CVec z{cplx(rng.uniform(-6, 6), 0), cplx(rng.uniform(-6, 6), 0)};
        CHECK(phi.value(z).norm() <=
              std::sqrt(2.0) * chi.k1 + 10 * (1e-11 + phi.truncation_tail()) + 1e-6);
    }
    // single huge tile: the map tracks the reference deep inside
    {
        double big = tc.tail_radius + 8.0;
        std::vector<IndexedTile> one;
        one.push_back({GridPt(2, 0, 0), Polytope::box(Box::centered(2, big))});
        TilingMap single(th, chi.chi, one, tc.threshold / 10.0);
        CVec z{cplx(0.4, 0.15), cplx(-0.3, -0.2)};
        CVec diff = single.value(z) - th.value(z);
        CHECK(diff.norm() < tc.threshold);
    }
    // jacobian against central differences (step sized so quadrature noise
    // stays below the finite-difference scale)
    for (int p = 0; p < 4; ++p) {
        CVec z{cplx(rng.uniform(-3, 3), rng.uniform(-0.2, 0.2)),
               cplx(rng.uniform(-3, 3), rng.uniform(-0.2, 0.2))};
        CMat j = phi.jacobian(z);
        double h = 3e-4;
        for (int col = 0; col < 2; ++col) {
            CVec up = z, dn = z;
            up[col] += h;
            dn[col] -= h;
            CVec fu = phi.value(up), fd = phi.value(dn);
            for (int row = 0; row < 2; ++row) {
                cplx num = (fu[row] - fd[row]) / (2 * h);
                CHECK(std::abs(num - j.at(row, col)) <
                      1e-6 * std::max(1.0, std::abs(j.at(row, col))));
            }
        }
    }
    // reference-map zero search in two dimensions
    ThetaMapAdapter ad;
    ad.map = th;
    auto zs = find_zeros(ad, CVec{cplx(0, 0), cplx(0, 0)}, 2 * tc.r1);
    REQUIRE(zs.size() == 1);
    CHECK(zs[0].certified);
    CHECK(zs[0].nu > 3.0 / 16.0);
}
