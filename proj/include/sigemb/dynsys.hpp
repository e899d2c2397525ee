#pragma once

#include "sigemb/bandlimited.hpp"
#include "sigemb/common.hpp"

namespace sigemb {

// Torus rotation: T^n x = x + (n_1 alpha_1, ..., n_k alpha_k) mod 1. The
// metric is metric_scale * max of per-axis circle distances; the scale lets a
// demo normalize the diameter.
struct TorusSystem {
    int k = 1;
    std::vector<double> alpha;
    double metric_scale = 1.0;

    static TorusSystem make(const std::vector<double>& alpha, double metric_scale = 1.0,
                            int aperiodicity_check_n = 10000);

    RVec act(const GridPt& n, const RVec& x) const {
        RVec y(k);
        for (int i = 0; i < k; ++i) {
            double v = x[i] + static_cast<double>(n[i]) * alpha[i];
            y[i] = v - std::floor(v);
        }
        return y;
    }
    static double circle_dist(double a, double b) {
        double d = std::fabs(a - b);
        d -= std::floor(d);
        return std::min(d, 1.0 - d);
    }
    double dist(const RVec& x, const RVec& y) const {
        double d = 0;
        for (int i = 0; i < k; ++i) d = std::max(d, circle_dist(x[i], y[i]));
        return metric_scale * d;
    }
    double diameter() const { return metric_scale * 0.5; }
};

// Orbit metric over a finite index set.
double orbit_dist(const TorusSystem& sys, const RVec& x, const RVec& y,
                  const std::vector<GridPt>& indices);

// Marker data: open box U around 0 whose translates by 0 < |n| < disjoint_m
// miss it, a trapezoidal bump h supported in U with h = 1 on the middle half,
// and the covering radius within which the orbit of {h = 1} fills the torus.
struct MarkerData {
    int disjoint_m = 2;        // translate-disjointness range
    long long covering_m = 0;  // orbit covering radius for {h = 1}
    double width = 0.0;        // full width of U per axis
    double slice_height() const {
        double m1 = static_cast<double>(covering_m) + 1.0;
        // (covering radius + sqrt k)^2 lift height for the level-1 slice
        return (m1 + 1.4142135623730951) * (m1 + 1.4142135623730951);
    }

    // trapezoid bump: 1 on the middle half of U, 0 outside U
    double bump(const TorusSystem& sys, const RVec& x) const {
        double v = 1.0;
        for (int i = 0; i < sys.k; ++i) {
            double d = TorusSystem::circle_dist(x[i], 0.0);
            double half = width / 2.0, quarter = width / 4.0;
            double axis;
            if (d <= quarter)
                axis = 1.0;
            else if (d >= half)
                axis = 0.0;
            else
                axis = (half - d) / (half - quarter);
            v = std::min(v, axis);
        }
        return v;
    }
};

// Builds a marker for the given disjointness range. The box width is 80% of
// the smallest orbit displacement within the range; errors out when that
// collapses below 1e-6. The covering radius is certified by gap arithmetic
// (k=1: sorted orbit points) or a grid check (k=2).
MarkerData build_marker(const TorusSystem& sys, int disjoint_m);

// Equivariant band-limited input signal: x -> f(x) with
//   f(x)(t) = sum_j Re( c_j e^{2 pi i j.(x + t o alpha)} )
// realized as a conjugate-symmetric sum of complex exponentials; the j-th
// frequency vector must satisfy |j_i alpha_i| <= band_i / 2.
struct SignalSpec {
    std::vector<GridPt> freqs;     // multi-indices j (nonzero)
    std::vector<cplx> coeffs;      // c_j
    std::vector<double> band;      // per-axis band widths a_i
};

class EquivariantSignal {
  public:
    EquivariantSignal() = default;
    EquivariantSignal(const TorusSystem& sys, SignalSpec spec);

    // holomorphic evaluation of f(x) at complex time t
    cplx eval(const RVec& x, const CVec& t) const;
    double eval_real(const RVec& x, const RVec& t) const {
        return eval(x, CVec::from_real(t)).real();
    }
    BLFunction to_blfunction(const RVec& x) const;
    double sup_norm() const { return sup_; }
    // |f(x)(t) - f(y)(t)| <= lip * dist(x, y) / metric_scale... expressed
    // against the system metric directly:
    double modulus_vs_metric() const { return lip_metric_; }
    const SignalSpec& spec() const { return spec_; }
    int dim() const { return sys_.k; }

  private:
    TorusSystem sys_;
    SignalSpec spec_;
    double sup_ = 0.0;
    double lip_metric_ = 0.0;
};

}  // namespace sigemb
