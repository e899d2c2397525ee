#pragma once

#include <numeric>
#include <optional>

#include "sigemb/bandlimited.hpp"
#include "sigemb/common.hpp"

namespace sigemb {

struct Rational {
    long long num = 0, den = 1;
    Rational() = default;
    Rational(long long n, long long d) : num(n), den(d) { reduce(); }
    void reduce() {
        require(den != 0, "zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// The coarse lattice has per-axis step 1/rho_i = q_i/p_i (rho_i = p_i/q_i in
// lowest terms); the fine lattice, its closure under integer translation, has
// step 1/p_i. Fine-lattice points are carried as integer multiples of the
// fine step so membership tests are exact.
class LatticePair {
  public:
    LatticePair() = default;
    LatticePair(int k, const std::vector<Rational>& rho);

    int dim() const { return k_; }
    const Rational& rho(int axis) const { return rho_[axis]; }
    double fine_step(int axis) const { return 1.0 / static_cast<double>(rho_[axis].num); }
    long long fine_den(int axis) const { return rho_[axis].num; }
    // A fine point lies in the coarse lattice iff every coordinate index is
    // divisible by this factor.
    long long coarse_factor(int axis) const { return rho_[axis].den; }

    RVec to_real(const GridPt& p) const {
        RVec r(k_);
        for (int i = 0; i < k_; ++i) r[i] = static_cast<double>(p[i]) * fine_step(i);
        return r;
    }
    bool in_coarse(const GridPt& diff) const {
        for (int i = 0; i < k_; ++i)
            if (diff[i] % coarse_factor(i) != 0) return false;
        return true;
    }
    // Exact fine-lattice membership of an integer translate: n + fine = fine.
    GridPt integer_to_fine(const GridPt& n) const {
        GridPt r(k_, 0, 0);
        r.k = k_;
        for (int i = 0; i < k_; ++i) r[i] = n[i] * fine_den(i);
        return r;
    }

    std::vector<GridPt> fine_points_in_box(const Box& window) const;
    std::vector<GridPt> coarse_points_in_box(const Box& window) const;

  private:
    int k_ = 0;
    std::vector<Rational> rho_;
};

struct AdmissibleSet {
    LatticePair lattice;
    std::vector<GridPt> pts;  // fine-lattice indices
    double r0 = 0.0;
};

struct AdmissibilityReport {
    bool ok = true;
    GridPt bad_a, bad_b;  // violating pair when !ok
};

// Pairwise check: any two points either differ by a coarse vector or lie more
// than r0 apart. Bucketed by cells of size r0 so only nearby pairs compare.
AdmissibilityReport is_admissible(const LatticePair& lat, const std::vector<GridPt>& pts,
                                  double r0);

// Per-axis description of a separable power-decay kernel (the interpolation
// kernel is a tensor product of sinc powers).
struct AxisKernel {
    double b = 1.0;
    int m = 2;
    double env(double d) const {
        if (d <= 0) return 1.0;
        return std::min(1.0, std::pow(kPi * b * d, -static_cast<double>(m)));
    }
};
// Extracts the per-axis sinc-power structure from a single-term kernel.
std::vector<AxisKernel> axis_kernels(const BLFunction& kernel);

struct LatticeSumBound {
    double value = 0.0;  // upper bound
    double grid_part = 0.0;
    double tail_part = 0.0;
};

// Upper bound for sup_t sum over the fine lattice of |kernel(t - lambda)|.
// The kernel is separable, so the sup factorizes over axes; each axis is a
// grid max over one fundamental step refined until stable within tol, plus an
// analytic tail.
LatticeSumBound compute_k0(const BLFunction& kernel, const LatticePair& lat, double tol);

struct RadiusSearchResult {
    double r0 = 0.0;
    double achieved_sum = 0.0;  // certified upper bound on the excluded sum at r0
};

// Smallest schedule radius r (powers of two, then bisection) with
// sum_{lattice \ B_r} |kernel(lambda)| < 1/2, tail-bounded.
RadiusSearchResult compute_r0(const BLFunction& kernel, const LatticePair& lat);

// Certified upper bound on sum over fine-lattice points outside B_radius(t)
// of |kernel(t - lambda)|.
double lattice_tail_bound(const std::vector<AxisKernel>& ks, const LatticePair& lat,
                          double radius);

}  // namespace sigemb
