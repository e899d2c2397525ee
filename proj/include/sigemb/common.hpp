#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigemb {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Small fixed-capacity real vector. Dimension k is 1 or 2 throughout the
// library; capacity 3 covers the lifted Voronoi coordinates (k+1).
struct RVec {
    int n = 0;
    std::array<double, 3> v{0.0, 0.0, 0.0};

    RVec() = default;
    explicit RVec(int dim) : n(dim) {}
    RVec(std::initializer_list<double> xs) {
        n = static_cast<int>(xs.size());
        int i = 0;
        for (double x : xs) v[i++] = x;
    }
    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }

    RVec& operator+=(const RVec& o) {
        for (int i = 0; i < n; ++i) v[i] += o.v[i];
        return *this;
    }
    RVec& operator-=(const RVec& o) {
        for (int i = 0; i < n; ++i) v[i] -= o.v[i];
        return *this;
    }
    friend RVec operator+(RVec a, const RVec& b) { return a += b; }
    friend RVec operator-(RVec a, const RVec& b) { return a -= b; }
    friend RVec operator*(double s, RVec a) {
        for (int i = 0; i < a.n; ++i) a.v[i] *= s;
        return a;
    }
    double dot(const RVec& o) const {
        double s = 0;
        for (int i = 0; i < n; ++i) s += v[i] * o.v[i];
        return s;
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
    double norm_inf() const {
        double s = 0;
        for (int i = 0; i < n; ++i) s = std::max(s, std::fabs(v[i]));
        return s;
    }
};

// Complex k-vector, k <= 2.
struct CVec {
    int n = 0;
    std::array<cplx, 2> v{};

    CVec() = default;
    explicit CVec(int dim) : n(dim) {}
    CVec(std::initializer_list<cplx> xs) {
        n = static_cast<int>(xs.size());
        int i = 0;
        for (cplx x : xs) v[i++] = x;
    }
    static CVec from_real(const RVec& r) {
        CVec z(r.n);
        for (int i = 0; i < r.n; ++i) z.v[i] = cplx(r[i], 0.0);
        return z;
    }
    cplx& operator[](int i) { return v[i]; }
    cplx operator[](int i) const { return v[i]; }

    RVec real() const {
        RVec r(n);
        for (int i = 0; i < n; ++i) r[i] = v[i].real();
        return r;
    }
    RVec imag() const {
        RVec r(n);
        for (int i = 0; i < n; ++i) r[i] = v[i].imag();
        return r;
    }
    friend CVec operator-(CVec a, const CVec& b) {
        for (int i = 0; i < a.n; ++i) a.v[i] -= b.v[i];
        return a;
    }
    friend CVec operator+(CVec a, const CVec& b) {
        for (int i = 0; i < a.n; ++i) a.v[i] += b.v[i];
        return a;
    }
    double norm() const {
        double s = 0;
        for (int i = 0; i < n; ++i) s += std::norm(v[i]);
        return std::sqrt(s);
    }
    double norm_inf() const {
        double s = 0;
        for (int i = 0; i < n; ++i) s = std::max(s, std::abs(v[i]));
        return s;
    }
};

// Dense complex k x k matrix, k <= 2.
struct CMat {
    int n = 0;
    std::array<cplx, 4> m{};

    CMat() = default;
    explicit CMat(int dim) : n(dim) {}
    cplx& at(int r, int c) { return m[r * n + c]; }
    cplx at(int r, int c) const { return m[r * n + c]; }

    CVec apply(const CVec& x) const {
        CVec y(n);
        for (int r = 0; r < n; ++r) {
            cplx s = 0;
            for (int c = 0; c < n; ++c) s += at(r, c) * x[c];
            y[r] = s;
        }
        return y;
    }
    // Solves A x = b by direct elimination (n <= 2).
    bool solve(const CVec& b, CVec& x) const {
        x = CVec(n);
        if (n == 1) {
            if (std::abs(m[0]) < 1e-300) return false;
            x[0] = b[0] / m[0];
            return true;
        }
        cplx det = at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
        if (std::abs(det) < 1e-300) return false;
        x[0] = (b[0] * at(1, 1) - b[1] * at(0, 1)) / det;
        x[1] = (at(0, 0) * b[1] - at(1, 0) * b[0]) / det;
        return true;
    }
};

// Axis-aligned box in R^k.
struct Box {
    int k = 0;
    RVec lo, hi;
    Box() = default;
    Box(const RVec& l, const RVec& h) : k(l.n), lo(l), hi(h) {}
    static Box centered(int k, double radius) {
        Box b;
        b.k = k;
        b.lo = RVec(k);
        b.hi = RVec(k);
        for (int i = 0; i < k; ++i) {
            b.lo[i] = -radius;
            b.hi[i] = radius;
        }
        return b;
    }
    bool contains(const RVec& p, double tol = 0.0) const {
        for (int i = 0; i < k; ++i)
            if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
        return true;
    }
    double volume() const {
        double v = 1;
        for (int i = 0; i < k; ++i) v *= std::max(0.0, hi[i] - lo[i]);
        return v;
    }
};

// Deterministic RNG wrapper. All randomness in the library flows through
// explicitly seeded instances of this type.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return dist_(eng_); }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int uniform_int(int a, int b) {
        std::uniform_int_distribution<int> d(a, b);
        return d(eng_);
    }
    double normal() {
        std::normal_distribution<double> d(0.0, 1.0);
        return d(eng_);
    }
    std::uint64_t raw() { return eng_(); }
    Rng fork(std::uint64_t stream) {
        std::uint64_t s = eng_();
        return Rng(s ^ (0x9E3779B97F4A7C15ull * (stream + 1)));
    }

  private:
    std::mt19937_64 eng_;
    std::uniform_real_distribution<double> dist_{0.0, 1.0};
};

// SplitMix-style hash, used for reproducible per-vertex jitter.
inline std::uint64_t hash_mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}
inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t x) {
    return hash_mix(h ^ (x + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2)));
}
// Uniform in [0,1) from a hash state.
inline double hash_uniform(std::uint64_t h) {
    return static_cast<double>(hash_mix(h) >> 11) * 0x1.0p-53;
}

// Gauss-Legendre nodes/weights on [-1,1], computed once per order by Newton
// iteration on the Legendre polynomial.
struct GaussLegendre {
    std::vector<double> nodes, weights;
    explicit GaussLegendre(int n);
};
const GaussLegendre& gauss_legendre(int n);

struct ValueWithError {
    double value = 0.0;
    double error = 0.0;
};

// Integer lattice point of Z^k (also reused for scaled-lattice indexing).
struct GridPt {
    int k = 0;
    std::array<long long, 2> c{0, 0};
    GridPt() = default;
    GridPt(int dim, long long a, long long b = 0) : k(dim) {
        c[0] = a;
        c[1] = b;
    }
    long long& operator[](int i) { return c[i]; }
    long long operator[](int i) const { return c[i]; }
    bool operator==(const GridPt& o) const { return k == o.k && c == o.c; }
    bool operator<(const GridPt& o) const { return c < o.c; }
    GridPt operator+(const GridPt& o) const {
        GridPt r = *this;
        for (int i = 0; i < k; ++i) r.c[i] += o.c[i];
        return r;
    }
    GridPt operator-(const GridPt& o) const {
        GridPt r = *this;
        for (int i = 0; i < k; ++i) r.c[i] -= o.c[i];
        return r;
    }
    RVec to_rvec() const {
        RVec r(k);
        for (int i = 0; i < k; ++i) r[i] = static_cast<double>(c[i]);
        return r;
    }
    double norm() const { return to_rvec().norm(); }
};

// All integer points of Z^k in the closed ball of the given radius around 0,
// sorted by (|m|, lexicographic). The order is the enumeration used by the
// weight allocation.
std::vector<GridPt> grid_ball(int k, double radius);

// Integer points of Z^k inside a box (inclusive bounds after rounding).
std::vector<GridPt> grid_box(const Box& window);

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

}  // namespace sigemb
