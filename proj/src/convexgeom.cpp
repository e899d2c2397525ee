#include "sigemb/convexgeom.hpp"

namespace sigemb {

namespace {
constexpr double kGeomTol = 1e-12;

double cross2(const RVec& o, const RVec& a, const RVec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

double point_segment_distance(const RVec& p, const RVec& a, const RVec& b) {
    RVec ab = b - a;
    double len2 = ab.norm2();
    if (len2 < kGeomTol) return (p - a).norm();
    double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    RVec proj = a + t * ab;
    return (p - proj).norm();
}

// Clip a ccw polygon by n.x <= c (Sutherland-Hodgman step).
std::vector<RVec> clip_halfplane(const std::vector<RVec>& poly, const RVec& n, double c) {
    std::vector<RVec> out;
    std::size_t sz = poly.size();
    for (std::size_t i = 0; i < sz; ++i) {
        const RVec& cur = poly[i];
        const RVec& nxt = poly[(i + 1) % sz];
        double dc = n.dot(cur) - c;
        double dn = n.dot(nxt) - c;
        bool cin = dc <= kGeomTol, nin = dn <= kGeomTol;
        if (cin) out.push_back(cur);
        if (cin != nin) {
            double t = dc / (dc - dn);
            out.push_back(cur + t * (nxt - cur));
        }
    }
    return out;
}

std::vector<RVec> dedupe_cycle(std::vector<RVec> v) {
    std::vector<RVec> out;
    for (const auto& p : v) {
        if (!out.empty() && (p - out.back()).norm() < 1e-10) continue;
        out.push_back(p);
    }
    while (out.size() > 1 && (out.front() - out.back()).norm() < 1e-10) out.pop_back();
    return out;
}

}  // namespace

Polytope Polytope::empty(int k) {
    Polytope p;
    p.k_ = k;
    p.empty_ = true;
    return p;
}

Polytope Polytope::interval(double lo, double hi) {
    Polytope p;
    p.k_ = 1;
    if (hi < lo) {
        p.empty_ = true;
    } else {
        p.empty_ = false;
        p.lo_ = lo;
        p.hi_ = hi;
    }
    return p;
}

Polytope Polytope::polygon(std::vector<RVec> verts) {
    Polytope p;
    p.k_ = 2;
    p.verts_ = dedupe_cycle(std::move(verts));
    p.empty_ = p.verts_.empty();
    p.canonicalize();
    return p;
}

Polytope Polytope::box(const Box& b) {
    if (b.k == 1) return interval(b.lo[0], b.hi[0]);
    return polygon({RVec{b.lo[0], b.lo[1]}, RVec{b.hi[0], b.lo[1]}, RVec{b.hi[0], b.hi[1]},
                    RVec{b.lo[0], b.hi[1]}});
}

void Polytope::canonicalize() {
    if (k_ != 2 || empty_) return;
    if (verts_.size() >= 3) {
        double a = 0;
        for (std::size_t i = 0; i < verts_.size(); ++i) {
            const RVec& u = verts_[i];
            const RVec& v = verts_[(i + 1) % verts_.size()];
            a += u[0] * v[1] - v[0] * u[1];
        }
        if (a < 0) std::reverse(verts_.begin(), verts_.end());
    }
}

Polytope Polytope::from_halfspaces(int k, const std::vector<HalfSpace>& hs, const Box& bound,
                                   bool allow_touch_bound) {
    if (k == 1) {
        double lo = bound.lo[0], hi = bound.hi[0];
        for (const auto& h : hs) {
            double n = h.normal[0];
            if (std::fabs(n) < kGeomTol) {
                if (h.offset < -kGeomTol) return Polytope::empty(1);
                continue;
            }
            double x = h.offset / n;
            if (n > 0)
                hi = std::min(hi, x);
            else
                lo = std::max(lo, x);
        }
        if (hi < lo) return Polytope::empty(1);
        if (!allow_touch_bound)
            require(lo > bound.lo[0] + 1e-9 && hi < bound.hi[0] - 1e-9,
                    "half-space intersection is unbounded (touches the clip box)");
        return Polytope::interval(lo, hi);
    }
    std::vector<RVec> poly = {RVec{bound.lo[0], bound.lo[1]}, RVec{bound.hi[0], bound.lo[1]},
                              RVec{bound.hi[0], bound.hi[1]}, RVec{bound.lo[0], bound.hi[1]}};
    for (const auto& h : hs) {
        double nn = h.normal.norm();
        require(nn > kGeomTol, "degenerate half-space normal");
        RVec n = (1.0 / nn) * h.normal;
        poly = clip_halfplane(poly, n, h.offset / nn);
        if (poly.empty()) return Polytope::empty(2);
    }
    poly = dedupe_cycle(poly);
    if (poly.size() < 3) return Polytope::empty(2);
    if (!allow_touch_bound) {
        for (const auto& v : poly) {
            bool on_bound = false;
            for (int i = 0; i < 2; ++i)
                if (std::fabs(v[i] - bound.lo[i]) < 1e-9 || std::fabs(v[i] - bound.hi[i]) < 1e-9)
                    on_bound = true;
            require(!on_bound, "half-space intersection is unbounded (touches the clip box)");
        }
    }
    return Polytope::polygon(poly);
}

double Polytope::volume() const {
    if (empty_) return 0.0;
    if (k_ == 1) return hi_ - lo_;
    if (verts_.size() < 3) return 0.0;
    double a = 0;
    for (std::size_t i = 0; i < verts_.size(); ++i) {
        const RVec& u = verts_[i];
        const RVec& v = verts_[(i + 1) % verts_.size()];
        a += u[0] * v[1] - v[0] * u[1];
    }
    return 0.5 * std::fabs(a);
}

double Polytope::perimeter() const {
    if (empty_ || k_ == 1 || verts_.size() == 1) return 0.0;
    // a degenerate segment has boundary length twice its length
    if (verts_.size() == 2) return 2.0 * (verts_[1] - verts_[0]).norm();
    double s = 0;
    for (std::size_t i = 0; i < verts_.size(); ++i)
        s += (verts_[(i + 1) % verts_.size()] - verts_[i]).norm();
    return s;
}

bool Polytope::contains(const RVec& p, double tol) const {
    if (empty_) return false;
    if (k_ == 1) return p[0] >= lo_ - tol && p[0] <= hi_ + tol;
    if (verts_.size() == 1) return (p - verts_[0]).norm() <= tol;
    if (verts_.size() == 2) return point_segment_distance(p, verts_[0], verts_[1]) <= tol;
    for (std::size_t i = 0; i < verts_.size(); ++i) {
        if (cross2(verts_[i], verts_[(i + 1) % verts_.size()], p) < -tol) return false;
    }
    return true;
}

double Polytope::boundary_distance(const RVec& p) const {
    if (empty_) return std::numeric_limits<double>::infinity();
    if (k_ == 1) return std::min(std::fabs(p[0] - lo_), std::fabs(p[0] - hi_));
    if (verts_.size() <= 2) return distance(p);
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < verts_.size(); ++i)
        d = std::min(d, point_segment_distance(p, verts_[i], verts_[(i + 1) % verts_.size()]));
    return d;
}

double Polytope::distance(const RVec& p) const {
    if (empty_) return std::numeric_limits<double>::infinity();
    if (contains(p, 0.0)) return 0.0;
    return boundary_distance(p);
}

Polytope Polytope::inner_parallel(double r) const {
    if (empty_) return *this;
    if (k_ == 1) return interval(lo_ + r, hi_ - r);
    if (verts_.size() < 3) return Polytope::empty(2);
    std::vector<RVec> poly = verts_;
    std::vector<RVec> cur = verts_;
    for (std::size_t i = 0; i < verts_.size(); ++i) {
        const RVec& a = verts_[i];
        const RVec& b = verts_[(i + 1) % verts_.size()];
        RVec e = b - a;
        double len = e.norm();
        if (len < kGeomTol) continue;
        RVec n{e[1] / len, -e[0] / len};  // outward normal of a ccw edge
        double c = n.dot(a) - r;
        cur = clip_halfplane(cur, n, c);
        if (cur.empty()) return Polytope::empty(2);
    }
    cur = dedupe_cycle(cur);
    if (cur.size() < 3) return Polytope::empty(2);
    return Polytope::polygon(cur);
}

double Polytope::outer_volume(double r) const {
    if (empty_) return 0.0;
    if (k_ == 1) return (hi_ - lo_) + 2.0 * r;
    if (verts_.size() == 1) return kPi * r * r;
    return volume() + r * perimeter() + kPi * r * r;
}

Polytope Polytope::outer_parallel_hull(double r) const {
    if (empty_) return *this;
    if (k_ == 1) return interval(lo_ - r, hi_ + r);
    if (verts_.size() < 3) return *this;
    std::vector<HalfSpace> hs;
    for (std::size_t i = 0; i < verts_.size(); ++i) {
        const RVec& a = verts_[i];
        const RVec& b = verts_[(i + 1) % verts_.size()];
        RVec e = b - a;
        double len = e.norm();
        if (len < kGeomTol) continue;
        RVec n{e[1] / len, -e[0] / len};
        hs.push_back(HalfSpace{n, n.dot(a) + r});
    }
    double span = 0;
    for (const auto& v : verts_) span = std::max(span, v.norm());
    Box bound = Box::centered(2, span + 10.0 * r + 10.0);
    return from_halfspaces(2, hs, bound, true);
}

Polytope Polytope::clip(const Box& b) const {
    if (empty_) return *this;
    if (k_ == 1) return interval(std::max(lo_, b.lo[0]), std::min(hi_, b.hi[0]));
    std::vector<RVec> cur = verts_;
    if (cur.size() < 3) {
        for (const auto& v : cur)
            if (!b.contains(v)) return Polytope::empty(2);
        Polytope p;
        p.k_ = 2;
        p.verts_ = cur;
        p.empty_ = cur.empty();
        return p;
    }
    cur = clip_halfplane(cur, RVec{1, 0}, b.hi[0]);
    if (!cur.empty()) cur = clip_halfplane(cur, RVec{-1, 0}, -b.lo[0]);
    if (!cur.empty()) cur = clip_halfplane(cur, RVec{0, 1}, b.hi[1]);
    if (!cur.empty()) cur = clip_halfplane(cur, RVec{0, -1}, -b.lo[1]);
    cur = dedupe_cycle(cur);
    if (cur.size() < 3) return Polytope::empty(2);
    return Polytope::polygon(cur);
}

RVec Polytope::centroid() const {
    if (k_ == 1) return RVec{0.5 * (lo_ + hi_)};
    RVec c(2);
    if (verts_.empty()) return c;
    if (verts_.size() < 3 || volume() < 1e-14) {
        for (const auto& v : verts_) c += (1.0 / verts_.size()) * v;
        return c;
    }
    double a = 0;
    for (std::size_t i = 0; i < verts_.size(); ++i) {
        const RVec& u = verts_[i];
        const RVec& v = verts_[(i + 1) % verts_.size()];
        double w = u[0] * v[1] - v[0] * u[1];
        a += w;
        c[0] += (u[0] + v[0]) * w;
        c[1] += (u[1] + v[1]) * w;
    }
    c[0] /= 3.0 * a;
    c[1] /= 3.0 * a;
    return c;
}

double Polytope::inradius_upper() const {
    if (empty_) return 0.0;
    return boundary_distance(centroid());
}

std::vector<HalfSpace> Polytope::halfspaces() const {
    std::vector<HalfSpace> hs;
    if (empty_) return hs;
    if (k_ == 1) {
        hs.push_back({RVec{1.0}, hi_});
        hs.push_back({RVec{-1.0}, -lo_});
        return hs;
    }
    for (std::size_t i = 0; i < verts_.size(); ++i) {
        const RVec& a = verts_[i];
        const RVec& b = verts_[(i + 1) % verts_.size()];
        RVec e = b - a;
        double len = e.norm();
        if (len < kGeomTol) continue;
        RVec n{e[1] / len, -e[0] / len};
        hs.push_back({n, n.dot(a)});
    }
    return hs;
}

double hausdorff_distance(const Polytope& a, const Polytope& b) {
    require(!a.is_empty() && !b.is_empty(), "hausdorff distance of an empty tile");
    require(a.dim() == b.dim(), "dimension mismatch");
    auto one_sided = [](const Polytope& p, const Polytope& q) {
        double d = 0;
        if (p.dim() == 1) {
            d = std::max(q.distance(RVec{p.lo()}), q.distance(RVec{p.hi()}));
        } else {
            for (const auto& v : p.vertices()) d = std::max(d, q.distance(v));
        }
        return d;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

double convex_comparison_radius(double c, double r, int k) {
    require(c > 1.0, "comparison constant must exceed 1");
    require(r > 0.0, "collar width must be positive");
    double croot = std::pow(c, 1.0 / k);
    double xmax = (croot - 1.0) / (croot + 1.0);  // need r/R < xmax
    double min_radius = r / xmax;
    // geometric schedule: first power-of-two multiple of r past the bound
    double R = r;
    while (R <= min_radius) R *= 2.0;
    return R;
}

Polytope random_convex_body(Rng& rng, int k, double scale) {
    if (k == 1) {
        double a = rng.uniform(-scale, scale);
        double b = rng.uniform(-scale, scale);
        if (a > b) std::swap(a, b);
        return Polytope::interval(a, b - a < 0.1 ? b + 0.1 : b);
    }
    int n = rng.uniform_int(3, 9);
    std::vector<double> angles(n);
    for (auto& t : angles) t = rng.uniform(0, 2 * kPi);
    std::sort(angles.begin(), angles.end());
    std::vector<RVec> verts;
    double rad = scale * rng.uniform(0.3, 1.0);
    RVec center{rng.uniform(-scale, scale) * 0.3, rng.uniform(-scale, scale) * 0.3};
    for (double t : angles) {
        double rr = rad * rng.uniform(0.6, 1.0);
        verts.push_back(RVec{center[0] + rr * std::cos(t), center[1] + rr * std::sin(t)});
    }
    // convexify: repeated hull pass
    std::vector<RVec> hull;
    std::sort(verts.begin(), verts.end(),
              [](const RVec& a, const RVec& b) { return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]); });
    auto build = [&](bool lower) {
        std::vector<RVec> h;
        auto pts = verts;
        if (!lower) std::reverse(pts.begin(), pts.end());
        for (const auto& p : pts) {
            while (h.size() >= 2 && cross2(h[h.size() - 2], h[h.size() - 1], p) <= 0) h.pop_back();
            h.push_back(p);
        }
        return h;
    };
    auto lo = build(true), hi = build(false);
    hull = lo;
    hull.insert(hull.end(), hi.begin() + 1, hi.end() - (hi.size() > 1 ? 1 : 0));
    if (hull.size() < 3) return random_convex_body(rng, k, scale);
    return Polytope::polygon(hull);
}

}  // namespace sigemb
