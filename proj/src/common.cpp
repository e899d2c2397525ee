#include "sigemb/common.hpp"

#include <map>
#include <mutex>

namespace sigemb {

GaussLegendre::GaussLegendre(int n) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

const GaussLegendre& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, GaussLegendre(n)).first;
    return it->second;
}

std::vector<GridPt> grid_ball(int k, double radius) {
    std::vector<GridPt> pts;
    long long r = static_cast<long long>(std::floor(radius));
    if (k == 1) {
        for (long long a = -r; a <= r; ++a)
            if (std::fabs(static_cast<double>(a)) <= radius) pts.emplace_back(1, a);
    } else {
        for (long long a = -r; a <= r; ++a)
            for (long long b = -r; b <= r; ++b) {
                GridPt p(2, a, b);
                if (p.norm() <= radius) pts.push_back(p);
            }
    }
    std::sort(pts.begin(), pts.end(), [](const GridPt& a, const GridPt& b) {
        double na = a.norm(), nb = b.norm();
        if (na != nb) return na < nb;
        return a < b;
    });
    return pts;
}

std::vector<GridPt> grid_box(const Box& window) {
    std::vector<GridPt> pts;
    std::array<long long, 2> lo{}, hi{};
    for (int i = 0; i < window.k; ++i) {
        lo[i] = static_cast<long long>(std::ceil(window.lo[i] - 1e-12));
        hi[i] = static_cast<long long>(std::floor(window.hi[i] + 1e-12));
    }
    if (window.k == 1) {
        for (long long a = lo[0]; a <= hi[0]; ++a) pts.emplace_back(1, a);
    } else {
        for (long long a = lo[0]; a <= hi[0]; ++a)
            for (long long b = lo[1]; b <= hi[1]; ++b) pts.emplace_back(2, a, b);
    }
    return pts;
}

}  // namespace sigemb
