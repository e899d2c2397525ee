#pragma once

#include "sigemb/dynsys.hpp"
#include "sigemb/interp.hpp"
#include "sigemb/simplicial.hpp"
#include "sigemb/voronoi.hpp"
#include "sigemb/welfare.hpp"

namespace sigemb {

enum class PipelineMode { Strict, Demo };

// User-facing configuration of the end-to-end run (JSON-loadable in the CLI).
struct PipelineConfig {
    int k = 1;
    std::vector<double> alpha{0.6180339887498949};
    double metric_scale = 2.0;  // diameter-1 torus metric

    // input signal: single-harmonic by default, |coeff| <= 1 - delta
    std::vector<GridPt> signal_freqs{GridPt(1, 1)};
    std::vector<cplx> signal_coeffs{cplx(0.2, 0.0)};

    double band_a = 1.3;
    double delta = 0.8;
    Rational rho{2, 3};
    double tau = 0.6;
    int interp_order = 6;     // interpolation kernel decay
    int mollifier_order = 12; // smoothing kernel decay

    long long L = 512;
    int N = 15;
    double c0 = 1.15;
    double capacity_share = 4.0;  // A
    double need_radius = 3.0;     // L0
    long long marker_range = 400000;  // M

    double probe_half = 32.0;
    int pool_size = 300;
    int n_pairs = 1000;
    std::uint64_t seed = 2026;
    PipelineMode mode = PipelineMode::Demo;

    // measurement knobs
    int calibration_points = 4;
    int junction_points = 2;
    double quad_budget_cap = 1e-10;
};

struct AuditLine {
    std::string name;
    bool measured = false;  // true: demo-mode measured consequence
    bool pass = false;
    double lhs = 0.0, rhs = 0.0;
    std::string note;
};

// Derived constants and the audit trail.
struct PipelineParams {
    PipelineConfig cfg;
    TorusSystem sys;
    EquivariantSignal input;
    LatticePair lattice;
    InterpContext interp;       // kernel, k0, r0
    MollifierResult mollifier;  // chi, k1
    ThetaConstants theta;
    MarkerData marker;

    double delta_prime = 0.0;
    double epsilon = 0.0;       // modulus radius
    double c1 = 0.0;
    double r2 = 0.0;
    double transfer_radius = 0.0;  // R0
    double transfer_margin = 0.0;
    long long big_r = 0;           // R (multiple of N)
    double max_tile_span = 0.0;
    double boundary_density = 0.0; // measured collar density
    double site_eval_radius = 0.0; // interpolation evaluation truncation
    double quad_budget = 0.0;
    double jitter_eta = 0.0;

    // domain complexes and the approximation map
    Complex p_complex;      // subdivided chart complex
    std::vector<std::vector<double>> f_on_p;  // vertex values of the sampled map
    int p_rounds = 0;
    Complex q_complex;      // chart complex for the direct embedding
    int counting_pass = 0, counting_fail = 0;
    double counting_min_pass_width = 0.0;

    std::vector<AuditLine> audit;
    bool all_required_pass = true;
};

PipelineParams choose_params(const PipelineConfig& cfg);

// Everything the pipeline derives from one base point.
struct PointState {
    RVec x;
    TilingSnapshot level1;
    std::vector<CertifiedZero> zeros;
    ScoreField scores;
    TilingSnapshot level2;
    WeightTable weights;
    SiteField field;        // inclusion probabilities p and values u on fine sites
    double field_sup = 0.0; // ||u||_inf
    MixedInterpolator interp_part;
    // cached samples on the probe grid
    std::vector<double> grid_t;
    std::vector<double> f_vals, g1_vals, g2_vals;
    int junction_tiles = 0;  // level-2 tiles away from the cube pattern
};

PointState build_point(const PipelineParams& pp, const RVec& x);

// g(x)(t) for one prepared point (g1 + g2 parts separately available)
double eval_g1(const PipelineParams& pp, const PointState& st, double t);
double eval_g2(const PipelineParams& pp, const PointState& st, double t);

struct PairRecord {
    int i = 0, j = 0;
    double dist = 0.0;
    double margin = 0.0;       // sup_t |g(x)(t) - g(y)(t)| over the probe grid
    std::string mechanism;     // tiling-differs / interior / rescued
};

struct EmbeddingReport {
    bool pass = false;
    double min_margin = 0.0;
    double error_budget = 0.0;
    double sup_g_minus_f = 0.0;
    double freq_inband_leak = 0.0;   // g1-band mass of the g2 component
    double freq_outband_leak = 0.0;  // mass outside both declared bands
    int pairs_checked = 0;
    int separated = 0;
    std::vector<PairRecord> pairs;
    std::vector<AuditLine> audit;
    double runtime_seconds = 0.0;
};

EmbeddingReport verify_embedding(const PipelineParams& pp, int pool_size, int n_pairs,
                                 std::uint64_t seed);

// Discretization of a band-limited function into D channel samples per
// integer site; the sampling-theorem round trip witnesses injectivity.
struct DiscreteSignal {
    int channels = 1;
    std::vector<GridPt> sites;
    std::vector<std::vector<double>> samples;
};
DiscreteSignal discretize(const BLFunction& f, int channels, const Box& window);

}  // namespace sigemb
