#pragma once

#include <functional>
#include <map>

#include "sigemb/lattice.hpp"

namespace sigemb {

// Shared constants for the interpolation tower: the kernel, its lattice-sum
// bound k0, and the pair-exclusion radius r0 that makes admissible sets work.
struct InterpContext {
    LatticePair lattice;
    BLFunction kernel;           // single-term tensor sinc power, value 1 at 0
    std::vector<AxisKernel> ks;  // per-axis structure of `kernel`
    double tau = 0.0;
    double k0 = 0.0;
    double r0 = 0.0;

    static InterpContext make(const LatticePair& lat, double tau, int m, double k0_tol = 1e-4);

    // |kernel(t - lambda)| summed over fine-lattice sites outside B_radius(t).
    double tail(double radius) const {
        return lattice_tail_bound(ks, lattice, radius);
    }
};

// Bounded values on a finite site list (fine-lattice indices).
struct SeqOnSet {
    std::vector<GridPt> sites;
    std::vector<double> values;
    double sup_norm() const {
        double s = 0;
        for (double v : values) s = std::max(s, std::fabs(v));
        return s;
    }
};

// One interpolation-kernel summand: kernel(t - site) * prod_i sinc(rho_i (t_i - site_i)).
// Vanishes on every other coarse translate of the site and is 1 at the site.
cplx site_kernel_eval(const InterpContext& ctx, const RVec& site, const CVec& z);

// phi evaluator: sum_site values[site] * site_kernel(z - site), truncated to
// sites within trunc_radius of Re z (pass +inf to keep all). Returns the value
// and a bound on the neglected part.
struct PhiEval {
    cplx value;
    double tail_bound;
};
PhiEval phi_eval(const InterpContext& ctx, const SeqOnSet& data, const CVec& z,
                 double trunc_radius = std::numeric_limits<double>::infinity());

// Sampling operator S(u) = phi(u) restricted to the sites.
SeqOnSet sampling_apply(const InterpContext& ctx, const SeqOnSet& u);

struct NeumannResult {
    SeqOnSet coeffs;       // approximate inverse image
    double tail_bound;     // geometric remainder ||u|| 2^-N
    int iterations;
    double contraction_estimate;  // empirical sup of ||(S-id)u||/||u|| seen
};

// Inverse through the geometric series sum_{n<=N} (id - S)^n u, stopping when
// the remainder bound ||u|| 2^-N falls below tol. Errors out if the empirical
// contraction exceeds 1/2 (broken admissibility or constants).
NeumannResult sampling_invert(const InterpContext& ctx, const SeqOnSet& u, double tol);

// Interpolator: evaluates phi at the inverted coefficients. Immutable.
class Interpolator {
  public:
    Interpolator() = default;
    Interpolator(const InterpContext* ctx, SeqOnSet coeffs, double neumann_tail);

    cplx eval(const CVec& z) const;
    double eval_real(const RVec& t) const { return eval(CVec::from_real(t)).real(); }
    double tail_bound() const { return tail_; }
    const SeqOnSet& coeffs() const { return coeffs_; }

  private:
    const InterpContext* ctx_ = nullptr;
    SeqOnSet coeffs_;
    double tail_ = 0.0;
};

// Builds the interpolator for values u on an admissible site list.
Interpolator make_interpolator(const InterpContext& ctx, const SeqOnSet& u, double tol = 1e-12);

// Inclusion-probability field on a finite site list.
struct SiteField {
    std::vector<GridPt> sites;
    std::vector<double> p;       // in [0,1]
    std::vector<double> values;  // u on the same sites
};

enum class MixMode { Exact, MonteCarlo };

struct MixedInterpolator {
    // exact mode: one interpolator per subset of the fractional sites
    std::vector<double> weights;
    std::vector<Interpolator> parts;
    // mixture collapsed onto the union site set (evaluation is linear in the
    // coefficients, so the expectation needs a single kernel pass)
    const InterpContext* ctx = nullptr;
    SeqOnSet mixed;
    double tail = 0.0;
    double std_error = 0.0;  // Monte Carlo only
    cplx eval(const CVec& z) const {
        if (ctx) return phi_eval(*ctx, mixed, z).value;
        cplx s = 0.0;
        for (std::size_t i = 0; i < parts.size(); ++i) s += weights[i] * parts[i].eval(z);
        return s;
    }
    double eval_real(const RVec& t) const { return eval(CVec::from_real(t)).real(); }
};

// Expected interpolator over random site subsets: sites with p=1 are always
// included, p=0 never, and fractional sites are enumerated exactly (up to 20)
// or sampled (seeded Monte Carlo).
MixedInterpolator make_mixed_interpolator(const InterpContext& ctx, const SiteField& field,
                                          MixMode mode, std::uint64_t seed = 0,
                                          int n_samples = 256, int max_fractional = 20);

// Window radius r' such that computations restricted to B_{r'}(t) differ from
// the full-lattice ideal by < eps on B_r: combines the kernel tail with the
// geometric factor carried by the inverted coefficients.
double truncation_radius(const InterpContext& ctx, double r, double eps);

}  // namespace sigemb
