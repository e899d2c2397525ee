#pragma once

#include <optional>
#include <vector>

#include "sigemb/common.hpp"

namespace sigemb {

// Closed frequency interval [lo, hi] in cycles per unit length.
struct FreqInterval {
    double lo = 0.0, hi = 0.0;
    FreqInterval() = default;
    FreqInterval(double l, double h) : lo(l), hi(h) {}
    FreqInterval& operator+=(const FreqInterval& o) {  // Minkowski sum
        lo += o.lo;
        hi += o.hi;
        return *this;
    }
    void hull(const FreqInterval& o) {
        lo = std::min(lo, o.lo);
        hi = std::max(hi, o.hi);
    }
    double abs_max() const { return std::max(std::fabs(lo), std::fabs(hi)); }
};

// Conservative per-axis frequency support record.
struct FreqBox {
    int k = 0;
    std::array<FreqInterval, 2> axis{};
    FreqBox() = default;
    explicit FreqBox(int dim) : k(dim) {}
    // Euclidean radius of the farthest corner.
    double corner_radius() const {
        double s = 0;
        for (int i = 0; i < k; ++i) s += axis[i].abs_max() * axis[i].abs_max();
        return std::sqrt(s);
    }
    bool inside_box(const std::vector<double>& half_width, double tol = 1e-12) const {
        for (int i = 0; i < k; ++i)
            if (axis[i].lo < -half_width[i] - tol || axis[i].hi > half_width[i] + tol)
                return false;
        return true;
    }
};

enum class KernelKind { Sinc, SincPow, Sin, Cos, Cexp, Const };

// One separable 1-D factor. Arguments are pi-scaled:
//   Sinc     u -> sin(pi b u) / (pi b u)         support [-b/2, b/2]
//   SincPow  u -> sinc(b u)^m                    support [-m b/2, m b/2]
//   Sin      u -> sin(pi b u)                    support [-b/2, b/2]
//   Cos      u -> cos(pi b u)                    support [-b/2, b/2]
//   Cexp     u -> exp(i pi b u)                  support [ b/2,  b/2]
//   Const    u -> 1                              support [0, 0]
struct KernelFactor {
    KernelKind kind = KernelKind::Const;
    int axis = 0;
    double b = 1.0;
    int power = 1;  // SincPow only

    cplx value(cplx u) const;
    cplx deriv(cplx u) const;
    FreqInterval freq_support() const;
    double abs_bound_real() const { return 1.0; }  // all kinds are |.|<=1 on R
    // Real-axis decay envelope: |value(t)| <= min(1, coeff * |t|^-order).
    // order == 0 means no decay (coeff meaningless).
    int decay_order() const;
    double decay_coeff() const;
};

struct Term {
    cplx coeff;
    RVec shift;                        // per-axis shift s; argument is z_i - s_i
    std::vector<KernelFactor> factors; // possibly several factors per axis
};

// Finite sum of separable kernel terms with tracked (conservative) frequency
// support and a cached sup-norm upper bound.
class BLFunction {
  public:
    BLFunction() = default;
    explicit BLFunction(int k) : k_(k) {}

    int dim() const { return k_; }
    const std::vector<Term>& terms() const { return terms_; }
    void add_term(Term t);
    void append(const BLFunction& other);  // sum; support hull
    void scale(cplx c);

    cplx eval(const CVec& z) const;
    double eval_real(const RVec& t) const { return eval(CVec::from_real(t)).real(); }
    cplx partial(int axis, const CVec& z) const;

    const FreqBox& freq_box() const { return box_; }
    // Sum_j |c_j| * prod of factor bounds; a crude but valid sup bound on R^k.
    double sup_bound() const { return coeff_abs_sum_; }

    // Envelope of one term at per-axis distances d_i >= 0 from its shift.
    static double term_envelope(const Term& t, const RVec& dist);
    // True when every term decays (order >= 2) along every axis.
    bool decays_all_axes() const;

  private:
    int k_ = 0;
    std::vector<Term> terms_;
    FreqBox box_;
    double coeff_abs_sum_ = 0.0;
    bool box_init_ = false;
};

// prod_i sinc(b t_i)^m with b = tau / (m sqrt(k)); value 1 at 0 and frequency
// support inside the Euclidean ball of radius tau/2.
BLFunction make_interp_kernel(double tau, int m, int k);

struct MollifierResult {
    BLFunction chi;       // normalized so the integral over R^k is 1
    double k1;            // integral of |chi|
    double k1_error;      // quadrature error bound on k1
    double axis_b;        // per-axis sinc scale
    int m;
};

// Tensor sinc^m kernel with frequency support inside the ball of radius
// delta/8, normalized to unit integral. k1 is computed by two quadrature
// routes; the reported error bounds their disagreement plus tails.
MollifierResult make_mollifier(double delta, int m, int k);

// Vector evaluator z -> (exp(i pi b_i z_i) sin(pi z_i / L))_i with diagonal
// derivative. Vanishes on L Z^k; sup norm sqrt(k) on R^k.
struct LatticeZeroMap {
    int k = 1;
    long long L = 2;
    std::vector<double> b;

    cplx entry(int i, cplx zi) const;
    cplx entry_deriv(int i, cplx zi) const;
    CVec value(const CVec& z) const;
    CMat jacobian(const CVec& z) const;
    double sup_norm_real() const { return std::sqrt(static_cast<double>(k)); }
};

struct ReconstructionResult {
    BLFunction reconstruction;
    double tail_bound;     // neglected-sample bound, valid on the query box
    int samples_used;
    int taper_order;
};

// Truncated cardinal-series reconstruction of f from samples on the grid
// (b_1 n_1, ..., b_k n_k) within sample_window. Requires strict oversampling
// a_i b_i < 1 where [-a_i/2, a_i/2] covers f's frequency box. The kernel is a
// tapered sinc product (taper order m >= 2) so the neglected-tail bound on
// query_box is computable.
ReconstructionResult sampling_reconstruct(const BLFunction& f,
                                          const std::vector<double>& steps,
                                          const Box& sample_window,
                                          const Box& query_box,
                                          int taper_order = 4);

struct GrowthCheckResult {
    bool ok = true;
    double worst_ratio = 0.0;  // max |f(z)| / (sup * exp(pi sum a_i |y_i|))
    CVec witness;
};

// Checks |f(x+iy)| <= sup_norm * exp(pi sum a_i |y_i|) * (1 + tol) at the
// probe points, with a_i taken from the declared frequency box (a_i/2 =
// per-axis absolute maximum).
GrowthCheckResult growth_check(const BLFunction& f, double sup_norm,
                               const std::vector<CVec>& probes, double tol = 1e-9);

// Grid max over the window plus an analytic tail bound (tail valid when every
// term decays on every axis; otherwise the tail is sup_bound-based and the
// caller should use a window exploiting periodicity).
struct SupNormEstimate {
    double grid_max = 0.0;
    double tail_bound = 0.0;
    double upper() const { return std::max(grid_max, tail_bound); }
};
SupNormEstimate sup_norm_estimate(const BLFunction& f, const Box& window,
                                  int pts_per_axis = 512);

// Spectral-audit helpers: Blackman-Harris windowed FFT energy fractions.
// `samples` are equispaced over [-T, T] with a power-of-two count. Returns
// the energy fraction at frequencies |f| outside [band_lo, band_hi] (pass
// band_lo = 0 for a plain low-pass band).
double windowed_band_leak(const std::vector<double>& samples, double half_span,
                          double band_lo, double band_hi);

}  // namespace sigemb
