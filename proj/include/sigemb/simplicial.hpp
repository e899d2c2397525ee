#pragma once

#include <functional>
#include <string>

#include "sigemb/common.hpp"

namespace sigemb {

// Finite simplicial complex. Vertices may carry geometric coordinates (used
// for subdivision barycenters and for building input complexes); abstract
// complexes (cones, products) may leave them empty.
struct Complex {
    std::vector<std::vector<double>> verts;     // per-vertex coordinates (may be empty)
    std::vector<std::vector<int>> maximal;      // maximal simplices, ascending vertex ids

    int vertex_count() const { return static_cast<int>(verts.size()); }
    int dim() const {
        int d = -1;
        for (const auto& s : maximal) d = std::max(d, static_cast<int>(s.size()) - 1);
        return d;
    }

    // regular n-gon (cycle) with vertices on the unit circle
    static Complex circle(int n);
    // single d-simplex with standard-basis coordinates
    static Complex simplex(int d);
};

// point of a complex: maximal simplex id + barycentric weights over its
// (ascending-ordered) vertices
struct SimplexPoint {
    int maximal_id = 0;
    std::vector<double> bary;
};

// affine evaluation of per-vertex images at a point
std::vector<double> vertex_map_eval(const Complex& c,
                                    const std::vector<std::vector<double>>& images,
                                    const SimplexPoint& p);

// one round of barycentric subdivision; `points` are relocated in place
Complex barycentric_subdivide(const Complex& c, std::vector<SimplexPoint>* points = nullptr);

// Kuhn/staircase triangulation of the product of two complexes; vertex ids
// are a.vertex_count()*jb + ia... (row-major pairing), coordinates concatenate.
Complex product_complex(const Complex& a, const Complex& b, int max_dim = 6);
Complex product_complex(const std::vector<Complex>& factors, int max_dim = 6);

// cone: apex appended as the last vertex id; maximal simplices are the cones
// over the base's maximal simplices
Complex cone_complex(const Complex& base);
// cone point (scale t in [0,1], base point) as a point of cone_complex(base)
SimplexPoint cone_point(const Complex& base, double t, const SimplexPoint& base_pt);

// ---------------- approximation of sampled maps ----------------

struct ApproxSample {
    SimplexPoint at;                // image under the sampled quotient map
    std::vector<double> value;      // sampled target value
    int x_id = 0;                   // identity in the sampled source space
};

struct ApproxResult {
    Complex complex;                       // subdivided domain
    std::vector<SimplexPoint> relocated;   // samples after subdivision
    std::vector<std::vector<double>> vertex_values;
    int rounds = 0;
    double achieved = 0.0;  // max over samples of |f - g(pi(x))|_inf
};

// Subdivides until every open-star sample set has value diameter < delta,
// picks vertex values from star samples, and checks the conclusion on the
// sample. source_dist (when provided) verifies the modulus precondition:
// d(x,y) < eps implies |f(x)-f(y)|_inf < delta on the sample pairs.
ApproxResult approximate(const Complex& domain, std::vector<ApproxSample> samples, double delta,
                         std::function<double(int, int)> source_dist = nullptr,
                         double eps = 0.0, int max_rounds = 8);

// ---------------- generic perturbation / verification ----------------

// deterministic jitter component in [-eta, eta]
double jitter_component(std::uint64_t seed, std::uint64_t vertex_key, int coord, double eta);

struct EmbeddingCertificate {
    bool ok = true;
    double min_affine_sv = std::numeric_limits<double>::infinity();
    double min_pair_dist = std::numeric_limits<double>::infinity();
    double min_cone_gap = std::numeric_limits<double>::infinity();
    std::string failure;
};

// The three finite conditions: affine independence per maximal simplex,
// positive distance between disjoint maximal simplices, and positive cone
// separation at shared faces.
EmbeddingCertificate verify_injective(const Complex& c,
                                      const std::vector<std::vector<double>>& images,
                                      double margin = 1e-9);

struct PerturbInstance {
    Complex complex;
    std::vector<std::uint64_t> vertex_keys;        // global identities for jitter
    std::vector<std::vector<double>> base_images;  // full-dimension images
    std::vector<int> coords;                       // restricted coordinate set
};

struct PerturbResult {
    bool ok = false;
    std::uint64_t seed_used = 0;
    int attempts = 0;
    EmbeddingCertificate worst;
    std::string failure;
};

// Jitters all instances with a shared seed (retrying with fresh seeds) until
// every coordinate-restricted instance verifies. Checks the dimension
// precondition 2 dim < |coords| for each instance.
PerturbResult generic_perturb_verify(const std::vector<PerturbInstance>& instances, double eta,
                                     std::uint64_t seed, int max_attempts = 32,
                                     double margin = 1e-9);

// ---------------- lazy product evaluation ----------------

// carrier of one factor: ascending local vertex ids with weights
struct FactorPoint {
    std::vector<int> verts;
    std::vector<double> bary;
    std::vector<std::uint64_t> keys;  // global jitter keys, parallel to verts
};

// evaluation of a vertex-affine map on a Kuhn product simplex, given the
// value of the map at product vertices (choice = one local index per factor)
double kuhn_product_eval(
    const std::vector<FactorPoint>& factors,
    const std::function<double(const std::vector<int>& choice)>& vertex_value);

// same, returning also the jitter sum with the given seed/coord
double kuhn_product_eval_jittered(
    const std::vector<FactorPoint>& factors,
    const std::function<double(const std::vector<int>& choice)>& vertex_value,
    std::uint64_t seed, int coord, double eta);

}  // namespace sigemb
