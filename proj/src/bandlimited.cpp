#include "sigemb/bandlimited.hpp"

namespace sigemb {

namespace {

// sin(pi u)/(pi u) with a series branch near the removable singularity.
cplx csinc(cplx u) {
    cplx w = kPi * u;
    if (std::abs(w) < 1e-2) {
        cplx w2 = w * w;
        return 1.0 - w2 / 6.0 * (1.0 - w2 / 20.0 * (1.0 - w2 / 42.0));
    }
    return std::sin(w) / w;
}

// d/du sinc(u); the direct formula cancels catastrophically near 0.
cplx csinc_deriv(cplx u) {
    cplx w = kPi * u;
    if (std::abs(w) < 0.25) {
        cplx w2 = w * w;
        return -kPi * kPi * u / 3.0 *
               (1.0 - w2 / 10.0 * (1.0 - w2 / 28.0 * (1.0 - w2 / 54.0 * (1.0 - w2 / 88.0))));
    }
    return (std::cos(w) - csinc(u)) / u;
}

}  // namespace

cplx KernelFactor::value(cplx u) const {
    switch (kind) {
        case KernelKind::Sinc:
            return csinc(b * u);
        case KernelKind::SincPow: {
            cplx s = csinc(b * u);
            cplx r = 1.0;
            for (int i = 0; i < power; ++i) r *= s;
            return r;
        }
        case KernelKind::Sin:
            return std::sin(kPi * b * u);
        case KernelKind::Cos:
            return std::cos(kPi * b * u);
        case KernelKind::Cexp:
            return std::exp(cplx(0.0, kPi * b) * u);
        case KernelKind::Const:
            return 1.0;
    }
    return 0.0;
}

cplx KernelFactor::deriv(cplx u) const {
    switch (kind) {
        case KernelKind::Sinc:
            return b * csinc_deriv(b * u);
        case KernelKind::SincPow: {
            cplx s = csinc(b * u);
            cplx r = 1.0;
            for (int i = 0; i < power - 1; ++i) r *= s;
            return static_cast<double>(power) * r * b * csinc_deriv(b * u);
        }
        case KernelKind::Sin:
            return kPi * b * std::cos(kPi * b * u);
        case KernelKind::Cos:
            return -kPi * b * std::sin(kPi * b * u);
        case KernelKind::Cexp:
            return cplx(0.0, kPi * b) * std::exp(cplx(0.0, kPi * b) * u);
        case KernelKind::Const:
            return 0.0;
    }
    return 0.0;
}

FreqInterval KernelFactor::freq_support() const {
    switch (kind) {
        case KernelKind::Sinc:
            return {-b / 2.0, b / 2.0};
        case KernelKind::SincPow:
            return {-power * b / 2.0, power * b / 2.0};
        case KernelKind::Sin:
        case KernelKind::Cos:
            return {-b / 2.0, b / 2.0};
        case KernelKind::Cexp:
            return {b / 2.0, b / 2.0};
        case KernelKind::Const:
            return {0.0, 0.0};
    }
    return {0.0, 0.0};
}

int KernelFactor::decay_order() const {
    switch (kind) {
        case KernelKind::Sinc:
            return 1;
        case KernelKind::SincPow:
            return power;
        default:
            return 0;
    }
}

double KernelFactor::decay_coeff() const {
    switch (kind) {
        case KernelKind::Sinc:
            return 1.0 / (kPi * b);
        case KernelKind::SincPow:
            return std::pow(1.0 / (kPi * b), power);
        default:
            return 1.0;
    }
}

void BLFunction::add_term(Term t) {
    require(t.shift.n == k_, "term shift dimension mismatch");
    FreqBox tb(k_);
    double bound = std::abs(t.coeff);
    for (const auto& f : t.factors) {
        require(f.axis >= 0 && f.axis < k_, "factor axis out of range");
        tb.axis[f.axis] += f.freq_support();
        bound *= f.abs_bound_real();
    }
    if (!box_init_) {
        box_ = tb;
        box_init_ = true;
    } else {
        for (int i = 0; i < k_; ++i) box_.axis[i].hull(tb.axis[i]);
    }
    coeff_abs_sum_ += bound;
    terms_.push_back(std::move(t));
}

void BLFunction::append(const BLFunction& other) {
    require(other.k_ == k_, "dimension mismatch");
    for (const auto& t : other.terms_) add_term(t);
}

void BLFunction::scale(cplx c) {
    for (auto& t : terms_) t.coeff *= c;
    coeff_abs_sum_ *= std::abs(c);
}

cplx BLFunction::eval(const CVec& z) const {
    require(z.n == k_, "evaluation point dimension mismatch");
    cplx total = 0.0;
    for (const auto& t : terms_) {
        cplx prod = t.coeff;
        for (const auto& f : t.factors) prod *= f.value(z[f.axis] - t.shift[f.axis]);
        total += prod;
    }
    return total;
}

cplx BLFunction::partial(int axis, const CVec& z) const {
    cplx total = 0.0;
    for (const auto& t : terms_) {
        // product rule over the factors living on `axis`
        for (std::size_t d = 0; d < t.factors.size(); ++d) {
            if (t.factors[d].axis != axis) continue;
            cplx prod = t.coeff;
            for (std::size_t j = 0; j < t.factors.size(); ++j) {
                cplx u = z[t.factors[j].axis] - t.shift[t.factors[j].axis];
                prod *= (j == d) ? t.factors[j].deriv(u) : t.factors[j].value(u);
            }
            total += prod;
        }
    }
    return total;
}

double BLFunction::term_envelope(const Term& t, const RVec& dist) {
    double e = std::abs(t.coeff);
    for (int axis = 0; axis < dist.n; ++axis) {
        double axis_env = 1.0;
        for (const auto& f : t.factors) {
            if (f.axis != axis) continue;
            if (f.decay_order() == 0) continue;
            double d = std::max(dist[axis], 0.0);
            if (d <= 0.0) continue;
            axis_env *= std::min(1.0, f.decay_coeff() / std::pow(d, f.decay_order()));
        }
        e *= axis_env;
    }
    return e;
}

bool BLFunction::decays_all_axes() const {
    for (const auto& t : terms_)
        for (int axis = 0; axis < k_; ++axis) {
            int order = 0;
            for (const auto& f : t.factors)
                if (f.axis == axis) order += f.decay_order();
            if (order < 2) return false;
        }
    return true;
}

BLFunction make_interp_kernel(double tau, int m, int k) {
    require(tau > 0, "tau must be positive");
    require(m >= 2, "decay order below 2: lattice sums would not converge");
    double b = tau / (m * std::sqrt(static_cast<double>(k)));
    BLFunction f(k);
    Term t;
    t.coeff = 1.0;
    t.shift = RVec(k);
    for (int i = 0; i < k; ++i) {
        KernelFactor kf;
        kf.kind = KernelKind::SincPow;
        kf.axis = i;
        kf.b = b;
        kf.power = m;
        t.factors.push_back(kf);
    }
    f.add_term(std::move(t));
    return f;
}

namespace {

// integral over [x0, x1] of |sinc(b t)|^m (abs=true) or sinc(b t)^m
double integrate_sinc_pow(double b, int m, double x0, double x1, bool abs_val, int order) {
    const auto& gl = gauss_legendre(order);
    double mid = 0.5 * (x0 + x1), half = 0.5 * (x1 - x0);
    double s = 0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        double t = mid + half * gl.nodes[i];
        double v = csinc(cplx(b * t, 0.0)).real();
        double p = std::pow(std::fabs(v), m);
        if (!abs_val && (m % 2 == 1) && v < 0) p = -p;
        s += gl.weights[i] * p;
    }
    return s * half;
}

// Integrates (|)sinc(bt)^m(|) over [0, T], splitting panels at the zeros t=n/b.
double integrate_half_line(double b, int m, double T, bool abs_val, int order) {
    double s = 0;
    double step = 1.0 / b;
    double x = 0;
    while (x < T) {
        double x1 = std::min(x + step, T);
        s += integrate_sinc_pow(b, m, x, x1, abs_val, order);
        x = x1;
    }
    return s;
}

}  // namespace

MollifierResult make_mollifier(double delta, int m, int k) {
    require(delta > 0, "delta must be positive");
    require(m >= 2, "decay order below 2");
    double b = delta / (4.0 * m * std::sqrt(static_cast<double>(k)));

    // per-axis integral of sinc(bt)^m over R, two quadrature routes; the
    // cutoff T is chosen so the analytic tail is below 1e-11
    double T = std::pow(std::pow(kPi * b, -static_cast<double>(m)) / ((m - 1.0) * 1e-11),
                        1.0 / (m - 1.0));
    T = std::max(T, 10.0 / b);
    double i1 = 2.0 * integrate_half_line(b, m, T, false, 16);
    double i2 = 2.0 * integrate_half_line(b, m, 1.25 * T, false, 24);
    double tail = 2.0 * std::pow(kPi * b, -m) * std::pow(T, 1.0 - m) / (m - 1.0);
    double axis_integral = i2;
    double axis_err = std::fabs(i1 - i2) + tail;
    require(axis_err < 1e-8 * std::max(1.0, axis_integral),
            "mollifier normalization quadrature did not converge");

    double a1 = 2.0 * integrate_half_line(b, m, T, true, 16);
    double a2 = 2.0 * integrate_half_line(b, m, 1.25 * T, true, 24);
    double axis_abs = a2;
    double axis_abs_err = std::fabs(a1 - a2) + tail;

    double norm = std::pow(axis_integral, k);
    MollifierResult r;
    r.m = m;
    r.axis_b = b;
    BLFunction f(k);
    Term t;
    t.coeff = 1.0 / norm;
    t.shift = RVec(k);
    for (int i = 0; i < k; ++i) {
        KernelFactor kf;
        kf.kind = KernelKind::SincPow;
        kf.axis = i;
        kf.b = b;
        kf.power = m;
        t.factors.push_back(kf);
    }
    f.add_term(std::move(t));
    r.chi = std::move(f);
    r.k1 = std::pow(axis_abs / axis_integral, k);
    r.k1_error = k * (axis_abs_err / axis_integral + axis_err * axis_abs / (axis_integral * axis_integral)) *
                 std::pow(axis_abs / axis_integral, k - 1);
    return r;
}

cplx LatticeZeroMap::entry(int i, cplx zi) const {
    return std::exp(cplx(0.0, kPi * b[i]) * zi) * std::sin(kPi * zi / static_cast<double>(L));
}

cplx LatticeZeroMap::entry_deriv(int i, cplx zi) const {
    cplx e = std::exp(cplx(0.0, kPi * b[i]) * zi);
    double Ld = static_cast<double>(L);
    return kPi * e *
           (cplx(0.0, b[i]) * std::sin(kPi * zi / Ld) + std::cos(kPi * zi / Ld) / Ld);
}

CVec LatticeZeroMap::value(const CVec& z) const {
    CVec r(k);
    for (int i = 0; i < k; ++i) r[i] = entry(i, z[i]);
    return r;
}

CMat LatticeZeroMap::jacobian(const CVec& z) const {
    CMat j(k);
    for (int i = 0; i < k; ++i) j.at(i, i) = entry_deriv(i, z[i]);
    return j;
}

ReconstructionResult sampling_reconstruct(const BLFunction& f,
                                          const std::vector<double>& steps,
                                          const Box& sample_window,
                                          const Box& query_box,
                                          int taper_order) {
    int k = f.dim();
    require(static_cast<int>(steps.size()) == k, "steps size mismatch");
    require(taper_order >= 2, "taper order below 2");
    const FreqBox& fb = f.freq_box();

    std::vector<double> A(k), w(k);
    for (int i = 0; i < k; ++i) {
        A[i] = fb.axis[i].abs_max();                 // half-width of f's support
        double gap = 1.0 / steps[i] - 2.0 * A[i];    // guard band
        require(gap > 1e-9, "not strictly oversampled: a_i b_i < 1 required");
        w[i] = gap / taper_order;
    }

    // Sample grid indices covering the window.
    std::vector<std::array<long long, 2>> idx;
    std::array<long long, 2> lo{}, hi{};
    for (int i = 0; i < k; ++i) {
        lo[i] = static_cast<long long>(std::ceil(sample_window.lo[i] / steps[i]));
        hi[i] = static_cast<long long>(std::floor(sample_window.hi[i] / steps[i]));
    }
    if (k == 1) {
        for (long long a = lo[0]; a <= hi[0]; ++a) idx.push_back({a, 0});
    } else {
        for (long long a = lo[0]; a <= hi[0]; ++a)
            for (long long c = lo[1]; c <= hi[1]; ++c) idx.push_back({a, c});
    }

    BLFunction recon(k);
    for (const auto& id : idx) {
        RVec s(k);
        for (int i = 0; i < k; ++i) s[i] = id[i] * steps[i];
        double fv = f.eval_real(s);
        if (fv == 0.0) continue;
        Term t;
        t.coeff = fv;
        t.shift = s;
        for (int i = 0; i < k; ++i) {
            KernelFactor broad;
            broad.kind = KernelKind::Sinc;
            broad.axis = i;
            broad.b = 1.0 / steps[i];
            t.factors.push_back(broad);
            KernelFactor taper;
            taper.kind = KernelKind::SincPow;
            taper.axis = i;
            taper.b = w[i];
            taper.power = taper_order;
            t.factors.push_back(taper);
        }
        recon.add_term(std::move(t));
    }

    // Neglected-sample bound on the query box. Per axis, the kernel envelope
    // is min(1, c_i |t|^-(m+1)) with c_i = (steps_i/pi) (pi w_i)^-m.
    double sup = f.sup_bound();
    double tail = 0.0;
    double full_axis_bound = 1.0;
    std::vector<double> c(k), axis_full(k), axis_tail(k);
    for (int i = 0; i < k; ++i) {
        c[i] = (steps[i] / kPi) * std::pow(kPi * w[i], -static_cast<double>(taper_order));
        // distance from the query box to the nearest neglected sample
        double d = std::min(query_box.lo[i] - sample_window.lo[i],
                            sample_window.hi[i] - query_box.hi[i]);
        d = std::max(d, steps[i]);
        int mm = taper_order + 1;
        auto env = [&](double u) {
            return std::min(1.0, c[i] * std::pow(std::max(u, 1e-300), -mm));
        };
        axis_tail[i] = 2.0 * (env(d) + c[i] * std::pow(d, 1.0 - mm) / ((mm - 1.0) * steps[i]));
        // full-axis sum bound: 1 (center) + 2 * sum over n>=1 of env(n b)
        double s = 1.0;
        for (int n = 1; n <= 64; ++n) s += 2.0 * env(n * steps[i]);
        s += 2.0 * c[i] * std::pow(64.0 * steps[i], 1.0 - mm) / ((mm - 1.0) * steps[i]);
        axis_full[i] = s;
        full_axis_bound *= s;
    }
    for (int i = 0; i < k; ++i) {
        double prod = axis_tail[i];
        for (int j = 0; j < k; ++j)
            if (j != i) prod *= axis_full[j];
        tail += prod;
    }

    ReconstructionResult r;
    r.reconstruction = std::move(recon);
    r.tail_bound = sup * tail;
    r.samples_used = static_cast<int>(idx.size());
    r.taper_order = taper_order;
    return r;
}

GrowthCheckResult growth_check(const BLFunction& f, double sup_norm,
                               const std::vector<CVec>& probes, double tol) {
    const FreqBox& fb = f.freq_box();
    GrowthCheckResult r;
    for (const auto& z : probes) {
        double expo = 0.0;
        for (int i = 0; i < f.dim(); ++i)
            expo += 2.0 * fb.axis[i].abs_max() * std::fabs(z[i].imag());
        double allowed = sup_norm * std::exp(kPi * expo);
        double got = std::abs(f.eval(z));
        double ratio = got / allowed;
        if (ratio > r.worst_ratio) {
            r.worst_ratio = ratio;
            r.witness = z;
        }
    }
    r.ok = r.worst_ratio <= 1.0 + tol;
    return r;
}

namespace {

void fft_inplace(std::vector<cplx>& a) {
    std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        cplx wl = std::polar(1.0, -2.0 * kPi / static_cast<double>(len));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w = 1.0;
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx u = a[i + j], v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

}  // namespace

double windowed_band_leak(const std::vector<double>& samples, double half_span,
                          double band_lo, double band_hi) {
    std::size_t n = samples.size();
    require((n & (n - 1)) == 0 && n >= 8, "sample count must be a power of two");
    std::vector<cplx> s(n);
    const double a0 = 0.35875, a1 = 0.48829, a2 = 0.14128, a3 = 0.01168;
    for (std::size_t i = 0; i < n; ++i) {
        double u = 2.0 * kPi * (i + 0.5) / n;
        double w = a0 - a1 * std::cos(u) + a2 * std::cos(2 * u) - a3 * std::cos(3 * u);
        s[i] = samples[i] * w;
    }
    fft_inplace(s);
    double total = 0.0, outside = 0.0;
    double df = 1.0 / (2.0 * half_span);
    for (std::size_t k = 0; k < n; ++k) {
        double freq = (k <= n / 2) ? k * df : (static_cast<double>(k) - n) * df;
        double e = std::norm(s[k]);
        total += e;
        double af = std::fabs(freq);
        if (af < band_lo || af > band_hi) outside += e;
    }
    return total > 0 ? outside / total : 0.0;
}

SupNormEstimate sup_norm_estimate(const BLFunction& f, const Box& window, int pts_per_axis) {
    SupNormEstimate e;
    int k = f.dim();
    if (k == 1) {
        for (int i = 0; i < pts_per_axis; ++i) {
            RVec t{window.lo[0] + (window.hi[0] - window.lo[0]) * i / (pts_per_axis - 1.0)};
            e.grid_max = std::max(e.grid_max, std::fabs(f.eval_real(t)));
        }
    } else {
        int n = std::max(16, static_cast<int>(std::sqrt(static_cast<double>(pts_per_axis) * 32)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                RVec t(2);
                t[0] = window.lo[0] + (window.hi[0] - window.lo[0]) * i / (n - 1.0);
                t[1] = window.lo[1] + (window.hi[1] - window.lo[1]) * j / (n - 1.0);
                e.grid_max = std::max(e.grid_max, std::fabs(f.eval_real(t)));
            }
    }
    // Tail: any point outside the window leaves at least one axis outside.
    double tail = 0.0;
    for (const auto& t : f.terms()) {
        double worst = 0.0;
        for (int i = 0; i < k; ++i) {
            double gap = std::min(t.shift[i] - window.lo[i], window.hi[i] - t.shift[i]);
            RVec d(k);  // decay only credited on axis i
            d[i] = std::max(gap, 0.0);
            worst = std::max(worst, BLFunction::term_envelope(t, d));
        }
        tail += worst;
    }
    e.tail_bound = tail;
    return e;
}

}  // namespace sigemb
