#include "sigemb/dynsys.hpp"

#include <set>

namespace sigemb {

TorusSystem TorusSystem::make(const std::vector<double>& alpha, double metric_scale,
                              int aperiodicity_check_n) {
    TorusSystem sys;
    sys.k = static_cast<int>(alpha.size());
    sys.alpha = alpha;
    sys.metric_scale = metric_scale;
    for (double a : alpha) {
        for (int n = 1; n <= aperiodicity_check_n; ++n) {
            double d = circle_dist(n * a, 0.0);
            require(d > 1e-6 / n || d > 1e-6,
                    "rotation angle too close to rational: aperiodicity check failed");
        }
    }
    return sys;
}

double orbit_dist(const TorusSystem& sys, const RVec& x, const RVec& y,
                  const std::vector<GridPt>& indices) {
    require(!indices.empty(), "orbit metric needs a nonempty index set");
    double d = 0;
    for (const auto& n : indices) d = std::max(d, sys.dist(sys.act(n, x), sys.act(n, y)));
    return d;
}

namespace {

// smallest orbit displacement (per axis min over axes of ||n alpha_i||) for
// 0 < |n| < m, where the disjointness of box translates needs per-axis escape
double min_escape(const TorusSystem& sys, int m) {
    // U cap T^-n U = empty iff some axis with n_i != 0 moves at least the box
    // width. For n with several nonzero axes the binding axis is the one with
    // the largest displacement, and that is always at least the single-axis
    // minimum, so the per-axis minima decide.
    double best = 1.0;
    for (int i = 0; i < sys.k; ++i) {
        for (long long n = 1; n < m; ++n)
            best = std::min(best, TorusSystem::circle_dist(n * sys.alpha[i], 0.0));
    }
    return best;
}

long long covering_radius_1d(const TorusSystem& sys, double f_halfwidth) {
    // orbit points n*alpha for |n| <= M; covered iff the max circular gap
    // between consecutive points is at most the plateau width 2*f_halfwidth
    for (long long M = 4;; M *= 2) {
        std::vector<double> pts;
        for (long long n = -M; n <= M; ++n) {
            double v = n * sys.alpha[0];
            pts.push_back(v - std::floor(v));
        }
        std::sort(pts.begin(), pts.end());
        double max_gap = 1.0 - pts.back() + pts.front();
        for (std::size_t i = 1; i < pts.size(); ++i)
            max_gap = std::max(max_gap, pts[i] - pts[i - 1]);
        if (max_gap <= 2.0 * f_halfwidth) {
            // shrink back to the smallest covering M by bisection
            long long lo = M / 2, hi = M;
            while (lo + 1 < hi) {
                long long mid = (lo + hi) / 2;
                std::vector<double> q;
                for (long long n = -mid; n <= mid; ++n) {
                    double v = n * sys.alpha[0];
                    q.push_back(v - std::floor(v));
                }
                std::sort(q.begin(), q.end());
                double g = 1.0 - q.back() + q.front();
                for (std::size_t i = 1; i < q.size(); ++i)
                    g = std::max(g, q[i] - q[i - 1]);
                if (g <= 2.0 * f_halfwidth)
                    hi = mid;
                else
                    lo = mid;
            }
            return hi;
        }
        require(M < (1ll << 26), "covering radius search exhausted");
    }
}

long long covering_radius_grid(const TorusSystem& sys, const MarkerData& md) {
    // grid pitch fine enough that bump plateau membership is stable
    double pitch = std::min(1e-3, md.width / 8.0);
    int n_grid = static_cast<int>(std::ceil(1.0 / pitch));
    for (long long M = 4;; M *= 2) {
        std::vector<GridPt> ns = grid_ball(sys.k, static_cast<double>(M) - 1);
        bool covered = true;
        for (int gx = 0; gx < n_grid && covered; ++gx)
            for (int gy = 0; gy < n_grid && covered; ++gy) {
                RVec x(sys.k);
                x[0] = (gx + 0.5) / n_grid;
                if (sys.k == 2) x[1] = (gy + 0.5) / n_grid;
                bool hit = false;
                for (const auto& n : ns) {
                    // x in T^n {bump=1}  <=>  bump(T^-n x) = 1
                    GridPt neg = n;
                    for (int i = 0; i < sys.k; ++i) neg[i] = -neg[i];
                    if (md.bump(sys, sys.act(neg, x)) >= 1.0) {
                        hit = true;
                        break;
                    }
                }
                if (!hit) covered = false;
                if (sys.k == 1) break;
            }
        if (covered) return M;
        require(M < (1 << 18), "covering radius search exhausted (grid)");
    }
}

}  // namespace

MarkerData build_marker(const TorusSystem& sys, int disjoint_m) {
    require(disjoint_m >= 2, "disjointness range must be at least 2");
    double esc = min_escape(sys, disjoint_m);
    double width = 0.8 * esc;
    require(width > 1e-6, "marker box width collapsed: range too large for this rotation");
    MarkerData md;
    md.disjoint_m = disjoint_m;
    md.width = width;
    if (sys.k == 1)
        md.covering_m = covering_radius_1d(sys, width / 4.0);
    else
        md.covering_m = covering_radius_grid(sys, md);
    require(md.covering_m >= disjoint_m, "covering radius below disjointness range");
    return md;
}

EquivariantSignal::EquivariantSignal(const TorusSystem& sys, SignalSpec spec)
    : sys_(sys), spec_(std::move(spec)) {
    require(spec_.freqs.size() == spec_.coeffs.size(), "spec size mismatch");
    require(static_cast<int>(spec_.band.size()) == sys_.k, "band size mismatch");
    sup_ = 0.0;
    lip_metric_ = 0.0;
    for (std::size_t j = 0; j < spec_.freqs.size(); ++j) {
        double freq_norm1 = 0.0;
        for (int i = 0; i < sys_.k; ++i) {
            double f = spec_.freqs[j][i] * sys_.alpha[i];
            require(std::fabs(f) <= spec_.band[i] / 2.0 + 1e-12,
                    "signal frequency outside the declared band");
            freq_norm1 += std::fabs(static_cast<double>(spec_.freqs[j][i]));
        }
        sup_ += std::abs(spec_.coeffs[j]);
        // |d/dx_i| of Re c e^{2 pi i j.x} is 2 pi |j_i c|; against the metric
        // (scale * max circle dist) the slope divides by the scale
        lip_metric_ += 2.0 * kPi * std::abs(spec_.coeffs[j]) * freq_norm1 / sys_.metric_scale;
    }
}

cplx EquivariantSignal::eval(const RVec& x, const CVec& t) const {
    // conjugate-symmetric holomorphic extension:
    //   (1/2) sum_j [ c_j e^{2 pi i j.x} e^{2 pi i (j o alpha).t}
    //               + conj(c_j) e^{-2 pi i j.x} e^{-2 pi i (j o alpha).t} ]
    cplx s = 0.0;
    for (std::size_t j = 0; j < spec_.freqs.size(); ++j) {
        double phase = 0.0;
        cplx expo = 0.0;
        for (int i = 0; i < sys_.k; ++i) {
            phase += spec_.freqs[j][i] * x[i];
            expo += 2.0 * kPi * spec_.freqs[j][i] * sys_.alpha[i] * t[i];
        }
        cplx base = spec_.coeffs[j] * std::exp(cplx(0.0, 2.0 * kPi * phase));
        s += 0.5 * (base * std::exp(cplx(0.0, 1.0) * expo) +
                    std::conj(base) * std::exp(cplx(0.0, -1.0) * expo));
    }
    return s;
}

BLFunction EquivariantSignal::to_blfunction(const RVec& x) const {
    BLFunction f(sys_.k);
    for (std::size_t j = 0; j < spec_.freqs.size(); ++j) {
        double phase = 0.0;
        for (int i = 0; i < sys_.k; ++i) phase += spec_.freqs[j][i] * x[i];
        cplx base = spec_.coeffs[j] * std::exp(cplx(0.0, 2.0 * kPi * phase));
        for (int sign : {+1, -1}) {
            Term t;
            t.coeff = 0.5 * (sign > 0 ? base : std::conj(base));
            t.shift = RVec(sys_.k);
            for (int i = 0; i < sys_.k; ++i) {
                KernelFactor kf;
                kf.kind = KernelKind::Cexp;
                kf.axis = i;
                kf.b = sign * 2.0 * spec_.freqs[j][i] * sys_.alpha[i];
                t.factors.push_back(kf);
            }
            f.add_term(std::move(t));
        }
    }
    return f;
}

}  // namespace sigemb
