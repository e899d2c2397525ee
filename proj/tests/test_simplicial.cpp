#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sigemb/simplicial.hpp"

using namespace sigemb;

TEST_CASE("subdivision doubles cycle vertices and preserves points") {
    Complex c = Complex::circle(8);
    std::vector<SimplexPoint> pts;
    Rng rng(3);
    std::vector<std::vector<double>> coords;
    for (int i = 0; i < 50; ++i) {
        SimplexPoint p;
        p.maximal_id = rng.uniform_int(0, 7);
        double t = rng.uniform();
        p.bary = {t, 1 - t};
        pts.push_back(p);
        // geometric location before subdivision
        const auto& s = c.maximal[p.maximal_id];
        coords.push_back({t * c.verts[s[0]][0] + (1 - t) * c.verts[s[1]][0],
                          t * c.verts[s[0]][1] + (1 - t) * c.verts[s[1]][1]});
    }
    Complex sub = barycentric_subdivide(c, &pts);
    CHECK(sub.vertex_count() == 16);
    CHECK(sub.maximal.size() == 16);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto loc = vertex_map_eval(sub, sub.verts, pts[i]);
        CHECK(std::fabs(loc[0] - coords[i][0]) < 1e-12);
        CHECK(std::fabs(loc[1] - coords[i][1]) < 1e-12);
    }
}

TEST_CASE("subdivision of a triangle relocates interior points exactly") {
    Complex tri = Complex::simplex(2);
    std::vector<SimplexPoint> pts;
    Rng rng(7);
    std::vector<std::vector<double>> coords;
    for (int i = 0; i < 50; ++i) {
        double a = rng.uniform(), b = rng.uniform(1e-6, 1.0 - a > 0 ? 1.0 - a : 1e-5);
        if (a + b >= 1.0) {
            a *= 0.4;
            b *= 0.4;
        }
        SimplexPoint p{0, {1.0 - a - b, a, b}};
        pts.push_back(p);
        coords.push_back(vertex_map_eval(tri, tri.verts, p));
    }
    Complex sub = barycentric_subdivide(tri, &pts);
    CHECK(sub.maximal.size() == 6);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (double w : pts[i].bary) CHECK(w >= -1e-12);
        auto loc = vertex_map_eval(sub, sub.verts, pts[i]);
        CHECK(std::fabs(loc[0] - coords[i][0]) < 1e-12);
        CHECK(std::fabs(loc[1] - coords[i][1]) < 1e-12);
    }
}

TEST_CASE("product counts: edges and cubes") {
    Complex edge = Complex::simplex(1);
    Complex sq = product_complex(edge, edge);
    CHECK(sq.vertex_count() == 4);
    CHECK(sq.maximal.size() == 2);  // two triangles
    Complex cube = product_complex(sq, edge);
    CHECK(cube.vertex_count() == 8);
    CHECK(cube.maximal.size() == 6);  // six tetrahedra
    Complex c1 = Complex::circle(5);
    Complex prod = product_complex(c1, edge);
    CHECK(prod.vertex_count() == 10);
}

TEST_CASE("product dimension cap") {
    Complex tet = Complex::simplex(4);
    CHECK_THROWS(product_complex(tet, tet));
}

TEST_CASE("cone evaluation: apex at zero, scale one is the base") {
    Complex base = Complex::circle(6);
    Complex cp = cone_complex(base);
    // images: F(apex) = 0, F(v) = some vector per base vertex
    std::vector<std::vector<double>> images;
    Rng rng(11);
    for (int v = 0; v < base.vertex_count(); ++v)
        images.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    images.push_back({0.0, 0.0, 0.0});  // apex
    for (int trial = 0; trial < 40; ++trial) {
        SimplexPoint bp;
        bp.maximal_id = rng.uniform_int(0, 5);
        double t = rng.uniform();
        bp.bary = {t, 1 - t};
        auto base_val = vertex_map_eval(base, images, bp);  // base ids match cone ids
        for (double scale : {0.0, 0.3, 1.0}) {
            auto v = vertex_map_eval(cp, images, cone_point(base, scale, bp));
            for (std::size_t d = 0; d < 3; ++d)
                CHECK(v[d] == doctest::Approx(scale * base_val[d]).epsilon(1e-12));
        }
        // homogeneity along the ray at two points
        auto v1 = vertex_map_eval(cp, images, cone_point(base, 0.25, bp));
        auto v2 = vertex_map_eval(cp, images, cone_point(base, 0.75, bp));
        for (std::size_t d = 0; d < 3; ++d) CHECK(std::fabs(3 * v1[d] - v2[d]) < 1e-12);
    }
}

TEST_CASE("approximation: constant map has zero error") {
    Complex c = Complex::circle(8);
    std::vector<ApproxSample> samples;
    Rng rng(13);
    for (int i = 0; i < 60; ++i) {
        SimplexPoint p;
        p.maximal_id = rng.uniform_int(0, 7);
        double t = rng.uniform();
        p.bary = {t, 1 - t};
        samples.push_back({p, {0.75, -0.25}, i});
    }
    auto res = approximate(c, samples, 1e-6);
    CHECK(res.achieved < 1e-14);
    CHECK(res.rounds == 0);
}

TEST_CASE("approximation: circle chart within tolerance") {
    // domain: 16-gon; samples carry the angle chart (cos, sin) of the chord
    // position; values are derived from the geometric location so the
    // ascending-vertex ordering of edges is respected automatically
    Complex c = Complex::circle(16);
    Rng rng(17);
    auto chord_point = [&](int e, double u) {
        SimplexPoint p{e, {u, 1 - u}};
        return p;
    };
    auto angle_of = [&](const SimplexPoint& p) {
        auto pos = vertex_map_eval(c, c.verts, p);
        return std::atan2(pos[1], pos[0]);
    };
    std::vector<ApproxSample> samples;
    std::vector<double> angles;
    for (int i = 0; i < 6000; ++i) {
        SimplexPoint p = chord_point(rng.uniform_int(0, 15), rng.uniform());
        double ang = angle_of(p);
        samples.push_back({p, {std::cos(ang), std::sin(ang)}, i});
        angles.push_back(ang);
    }
    double delta = 0.05;
    auto dist = [&](int a, int b) {
        double d = std::fabs(angles[a] - angles[b]);
        return std::min(d, 2 * kPi - d);
    };
    auto res = approximate(c, samples, delta, dist, 0.04);
    CHECK(res.achieved < delta);
    // held-out check: fresh samples against the built map
    int miss = 0;
    for (int i = 0; i < 1000; ++i) {
        SimplexPoint p = chord_point(rng.uniform_int(0, 15), rng.uniform());
        double ang = angle_of(p);
        std::vector<SimplexPoint> pt = {p};
        Complex cur = c;
        // relocate through the same subdivision rounds
        for (int r = 0; r < res.rounds; ++r) cur = barycentric_subdivide(cur, &pt);
        auto g = vertex_map_eval(res.complex, res.vertex_values, pt[0]);
        double err = std::max(std::fabs(g[0] - std::cos(ang)), std::fabs(g[1] - std::sin(ang)));
        // held-out points add one modulus of continuity on top of the sampled guarantee
        if (err >= 2 * delta) ++miss;
    }
    CHECK(miss == 0);
}

TEST_CASE("approximation rejects a modulus violation") {
    Complex c = Complex::circle(8);
    std::vector<ApproxSample> samples;
    SimplexPoint p0{0, {0.5, 0.5}};
    samples.push_back({p0, {0.0}, 0});
    samples.push_back({p0, {1.0}, 1});  // same location, wildly different values
    auto dist = [](int, int) { return 0.0; };
    CHECK_THROWS(approximate(c, samples, 0.1, dist, 0.01));
}

TEST_CASE("verification: affine dependence is caught") {
    Complex edge2(Complex::simplex(1));
    // two disjoint edges forced collinear and overlapping
    Complex c;
    c.verts = {{}, {}, {}, {}};
    c.maximal = {{0, 1}, {2, 3}};
    std::vector<std::vector<double>> collinear = {
        {0, 0, 0}, {1, 0, 0}, {0.5, 0, 0}, {1.5, 0, 0}};
    auto cert = verify_injective(c, collinear);
    CHECK(!cert.ok);
    std::vector<std::vector<double>> generic = {
        {0, 0, 0}, {1, 0, 0}, {0.5, 0.4, 0.1}, {1.5, -0.3, 0.8}};
    CHECK(verify_injective(c, generic).ok);
}

TEST_CASE("verification: shared-vertex crossing is caught by the cone gap") {
    // two triangles sharing vertex 0, second folded onto the first
    Complex c;
    c.verts = {{}, {}, {}, {}, {}};
    c.maximal = {{0, 1, 2}, {0, 3, 4}};
    std::vector<std::vector<double>> folded = {
        {0, 0}, {1, 0}, {0, 1}, {0.9, 0.1}, {0.1, 0.9}};  // second fan inside the first
    auto cert = verify_injective(c, folded);
    CHECK(!cert.ok);
    std::vector<std::vector<double>> apart = {
        {0, 0}, {1, 0}, {0, 1}, {-1, -0.1}, {-0.1, -1}};
    CHECK(verify_injective(c, apart).ok);
}

TEST_CASE("perturbation: a path complex into R^3 verifies on many seeds") {
    Complex path;
    path.verts = {{}, {}, {}, {}};
    path.maximal = {{0, 1}, {1, 2}, {2, 3}};  // dim 1 < 3/2... use coords of size 3
    PerturbInstance inst;
    inst.complex = path;
    inst.vertex_keys = {11, 22, 33, 44};
    inst.base_images = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}};  // degenerate base
    inst.coords = {0, 1, 2};
    int pass = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto r = generic_perturb_verify({inst}, 0.5, seed * 1000 + 1, 1, 1e-12);
        if (r.ok) ++pass;
    }
    CHECK(pass == 100);
}

TEST_CASE("perturbation: single vertex always verifies; eta zero fails on degenerate input") {
    Complex dot;
    dot.verts = {{}};
    dot.maximal = {{0}};
    PerturbInstance inst;
    inst.complex = dot;
    inst.vertex_keys = {7};
    inst.base_images = {{0.3, 0.4}};
    inst.coords = {0, 1};
    CHECK(generic_perturb_verify({inst}, 0.1, 5).ok);

    Complex two_edges;
    two_edges.verts = {{}, {}, {}, {}};
    two_edges.maximal = {{0, 1}, {2, 3}};
    PerturbInstance bad;
    bad.complex = two_edges;
    bad.vertex_keys = {1, 2, 3, 4};
    bad.base_images = {{0, 0, 0}, {1, 0, 0}, {0.5, 0, 0}, {1.5, 0, 0}};
    bad.coords = {0, 1, 2};
    auto r = generic_perturb_verify({bad}, 0.0, 9, 4);
    CHECK(!r.ok);  // zero jitter cannot fix collinear overlap
    auto r2 = generic_perturb_verify({bad}, 0.2, 9, 8);
    CHECK(r2.ok);
}

TEST_CASE("perturbation respects the dimension precondition") {
    Complex edge = Complex::simplex(1);
    PerturbInstance inst;
    inst.complex = edge;
    inst.vertex_keys = {1, 2};
    inst.base_images = {{0, 0}, {1, 1}};
    inst.coords = {0, 1};  // 2*1 = 2, not < 2
    CHECK_THROWS(generic_perturb_verify({inst}, 0.1, 3));
}

TEST_CASE("lazy product evaluation matches the materialized triangulation") {
    // two cone-over-edge factors; compare kuhn_product_eval with direct
    // evaluation through the materialized product complex
    Complex base = Complex::simplex(1);
    Complex cp = cone_complex(base);  // vertices 0,1 base + 2 apex
    Rng rng(23);
    std::vector<std::vector<double>> imgs_a, imgs_b;
    for (int v = 0; v < 3; ++v) {
        imgs_a.push_back({rng.uniform(-1, 1)});
        imgs_b.push_back({rng.uniform(-1, 1)});
    }
    Complex prod = product_complex(cp, cp);
    // product vertex (ia, jb) value: sum of the factor scalars
    std::vector<std::vector<double>> prod_imgs(prod.vertex_count());
    for (int jb = 0; jb < 3; ++jb)
        for (int ia = 0; ia < 3; ++ia) prod_imgs[jb * 3 + ia] = {imgs_a[ia][0] + imgs_b[jb][0]};

    for (int trial = 0; trial < 200; ++trial) {
        double t1 = rng.uniform(), s1 = rng.uniform();
        double t2 = rng.uniform(), s2 = rng.uniform();
        // factor points in the cone over the edge
        SimplexPoint bp1{0, {s1, 1 - s1}};
        SimplexPoint cp1 = cone_point(base, t1, bp1);
        SimplexPoint bp2{0, {s2, 1 - s2}};
        SimplexPoint cp2 = cone_point(base, t2, bp2);

        FactorPoint f1{{0, 1, 2}, cp1.bary, {101, 102, 103}};
        FactorPoint f2{{0, 1, 2}, cp2.bary, {201, 202, 203}};
        double lazy = kuhn_product_eval({f1, f2}, [&](const std::vector<int>& choice) {
            return imgs_a[choice[0]][0] + imgs_b[choice[1]][0];
        });
        // direct: affine in each factor separately (the vertex values are a
        // sum of per-factor functions, so any triangulation agrees)
        double direct = vertex_map_eval(cp, imgs_a, cp1)[0] + vertex_map_eval(cp, imgs_b, cp2)[0];
        CHECK(lazy == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("lazy jittered evaluation is deterministic and bounded") {
    Complex base = Complex::simplex(1);
    Rng rng(29);
    FactorPoint f1{{0, 1, 2}, {0.2, 0.3, 0.5}, {11, 12, 13}};
    FactorPoint f2{{0, 1, 2}, {0.6, 0.1, 0.3}, {21, 22, 23}};
    auto vv = [](const std::vector<int>&) { return 0.0; };
    double a = kuhn_product_eval_jittered({f1, f2}, vv, 42, 3, 0.01);
    double b = kuhn_product_eval_jittered({f1, f2}, vv, 42, 3, 0.01);
    CHECK(a == b);
    CHECK(std::fabs(a) <= 0.01 + 1e-15);
    double c = kuhn_product_eval_jittered({f1, f2}, vv, 43, 3, 0.01);
    CHECK(a != c);
}

TEST_CASE("injectivity survives on sampled pairs after verification") {
    // a verified instance separates random point pairs of its complex
    Complex path;
    path.verts = {{}, {}, {}};
    path.maximal = {{0, 1}, {1, 2}};
    PerturbInstance inst;
    inst.complex = path;
    inst.vertex_keys = {5, 6, 7};
    inst.base_images = {{0, 0, 0}, {0.5, 0, 0}, {1.0, 0, 0}};
    inst.coords = {0, 1, 2};
    auto r = generic_perturb_verify({inst}, 0.3, 77);
    REQUIRE(r.ok);
    std::vector<std::vector<double>> im(3);
    for (int v = 0; v < 3; ++v)
        for (int cidx : inst.coords)
            im[v].push_back(inst.base_images[v][cidx] +
                            jitter_component(r.seed_used, inst.vertex_keys[v], cidx, 0.3));
    Rng rng(31);
    double min_sep = 1e300;
    for (int trial = 0; trial < 10000; ++trial) {
        SimplexPoint p{rng.uniform_int(0, 1), {}};
        double t = rng.uniform();
        p.bary = {t, 1 - t};
        SimplexPoint q{rng.uniform_int(0, 1), {}};
        double u = rng.uniform();
        q.bary = {u, 1 - u};
        // geometric separation in the path parameter
        double pp = p.maximal_id + (1 - t), qq = q.maximal_id + (1 - u);
        if (std::fabs(pp - qq) < 1e-3) continue;
        auto ip = vertex_map_eval(path, im, p);
        auto iq = vertex_map_eval(path, im, q);
        double d = 0;
        for (int dd = 0; dd < 3; ++dd) d += (ip[dd] - iq[dd]) * (ip[dd] - iq[dd]);
        min_sep = std::min(min_sep, std::sqrt(d));
    }
    CHECK(min_sep > 0.0);
}
