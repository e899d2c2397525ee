#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "sigemb/report_json.hpp"
#include "sigemb/suites.hpp"
#include "sigemb/tilingmap.hpp"
#include "sigemb/welfare.hpp"

using namespace sigemb;
namespace fs = std::filesystem;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::string filter;
    std::string mode;
    std::uint64_t seed = 2026;
    bool seed_set = false;
};

json load_config_json(const CliOptions& opt) {
    if (opt.config_path.empty()) return json::object();
    std::ifstream in(opt.config_path);
    if (!in) throw std::invalid_argument("cannot open config: " + opt.config_path);
    json j;
    in >> j;
    return j;
}

PipelineConfig load_pipeline_config(const CliOptions& opt) {
    PipelineConfig c = config_from_json(load_config_json(opt));
    if (opt.seed_set) c.seed = opt.seed;
    if (!opt.mode.empty())
        c.mode = opt.mode == "strict" ? PipelineMode::Strict : PipelineMode::Demo;
    return c;
}

void write_file(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
}

void write_manifest(const fs::path& dir, const json& config, std::uint64_t seed,
                    const json& extra = json::object()) {
    json m;
    m["tool"] = "sigembed";
    m["schema_version"] = 1;
    m["seed"] = seed;
    m["config"] = config;
    m["config_hash"] = std::hash<std::string>{}(config.dump());
    // wall-clock data lives only here so the report files stay reproducible
    m["generated_unix"] = static_cast<long long>(std::time(nullptr));
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    write_file(dir / "manifest.json", m.dump(2) + "\n");
}

int cmd_suite(const CliOptions& opt) {
    json cfg = load_config_json(opt);
    if (!cfg.empty()) config_from_json(cfg);  // schema validation: unknown keys reject
    fs::path dir(opt.out_dir);
    json suites = json::array();
    int failures = 0;
    for (const auto& name : suite_names()) {
        if (!opt.filter.empty() && name != opt.filter) continue;
        auto r = run_suite(name, opt.seed);
        failures += r.failures;
        suites.push_back(suite_to_json(r));
        std::cout << (r.ok() ? "PASS " : "FAIL ") << name << ": " << r.checks - r.failures
                  << "/" << r.checks << " checks\n";
    }
    if (suites.empty()) {
        std::cerr << "no suite matches filter '" << opt.filter << "'\n";
        return 2;
    }
    json summary{{"schema_version", 1}, {"suites", suites}, {"failures", failures}};
    write_file(dir / "suite_summary.json", summary.dump(2) + "\n");
    write_manifest(dir, cfg, opt.seed);
    return failures == 0 ? 0 : 1;
}

int demo_sampling(const CliOptions& opt) {
    // reconstruction error against the oversampling factor
    fs::path dir(opt.out_dir);
    std::ostringstream csv;
    csv << "oversampling_step,max_error,tail_bound,samples\n";
    BLFunction f = make_interp_kernel(0.9, 4, 1);
    for (double step : {0.5, 0.6, 0.7, 0.8, 0.9, 0.95}) {
        auto rec = sampling_reconstruct(f, {step}, Box::centered(1, 700.0),
                                        Box::centered(1, 10.0), 4);
        double worst = 0;
        for (int i = 0; i <= 200; ++i) {
            RVec t{-10.0 + 0.1 * i};
            worst = std::max(worst,
                             std::fabs(f.eval_real(t) - rec.reconstruction.eval_real(t)));
        }
        csv << step << "," << worst << "," << rec.tail_bound << "," << rec.samples_used << "\n";
    }
    write_file(dir / "sampling_error.csv", csv.str());
    write_manifest(dir, json::object(), opt.seed);
    std::cout << "wrote " << (dir / "sampling_error.csv") << "\n";
    return 0;
}

int demo_interp(const CliOptions& opt) {
    fs::path dir(opt.out_dir);
    auto ctx = InterpContext::make(LatticePair(1, {Rational(2, 3)}), 0.45, 4);
    Rng rng(opt.seed);
    std::ostringstream csv;
    csv << "trial,sites,contraction,interp_error,sup_ratio\n";
    for (int trial = 0; trial < 40; ++trial) {
        SeqOnSet u;
        double coarse = ctx.lattice.coarse_factor(0) * ctx.lattice.fine_step(0);
        double stride = 4 * coarse + ctx.r0 + 1.0;
        int patches = rng.uniform_int(1, 4);
        for (int p = 0; p < patches; ++p) {
            long long base = static_cast<long long>(
                std::llround(((p - patches / 2.0) * stride + rng.uniform(0, coarse)) /
                             ctx.lattice.fine_step(0)));
            base += rng.uniform_int(0, 2);
            for (int j = 0; j < 4; ++j) {
                u.sites.push_back(GridPt(1, base + 3 * j));
                u.values.push_back(rng.uniform(-1, 1));
            }
        }
        auto inv = sampling_invert(ctx, u, 1e-12);
        auto psi = make_interpolator(ctx, u);
        double ierr = 0, supv = 0;
        for (std::size_t i = 0; i < u.sites.size(); ++i)
            ierr = std::max(ierr, std::fabs(psi.eval_real(ctx.lattice.to_real(u.sites[i])) -
                                            u.values[i]));
        for (int g = 0; g <= 100; ++g)
            supv = std::max(supv, std::fabs(psi.eval_real(RVec{-40.0 + 0.8 * g})));
        csv << trial << "," << u.sites.size() << "," << inv.contraction_estimate << "," << ierr
            << "," << supv / (2 * ctx.k0 * u.sup_norm()) << "\n";
    }
    write_file(dir / "interp_quality.csv", csv.str());
    write_manifest(dir, json::object(), opt.seed);
    std::cout << "wrote " << (dir / "interp_quality.csv") << "\n";
    return 0;
}

int demo_tiling(const CliOptions& opt) {
    fs::path dir(opt.out_dir);
    Rng rng(opt.seed);
    auto chi = make_mollifier(0.28, 8, 1);
    auto tc = theta_constants(16, {0.44}, 1, mollifier_shape(chi.chi));
    LatticeZeroMap th;
    th.k = 1;
    th.L = 16;
    th.b = {0.44};
    double half = 120.0;
    std::vector<IndexedTile> tiles;
    double x = -half;
    int idx = -4;
    while (x < half) {
        double next = std::min(half, x + rng.uniform(20.0, 90.0));
        tiles.push_back({GridPt(1, idx++), Polytope::interval(x, next)});
        x = next;
    }
    TilingMap phi(th, chi.chi, tiles, tc.threshold / 10.0);
    json j;
    j["schema_version"] = 1;
    j["threshold"] = tc.threshold;
    j["inner_radius"] = tc.r1;
    j["tail_radius"] = tc.tail_radius;
    json jt = json::array();
    for (const auto& t : tiles) jt.push_back({{"index", t.index[0]}, {"lo", t.tile.lo()}, {"hi", t.tile.hi()}});
    j["tiles"] = jt;
    double grid_max = 0;
    for (int g = 0; g <= 2000; ++g) {
        CVec z{cplx(-100.0 + 0.1 * g, 0)};
        grid_max = std::max(grid_max, phi.value(z).norm());
    }
    j["grid_max"] = grid_max;
    j["k1_bound"] = chi.k1;
    json zeros = json::array();
    for (long long n = -96; n <= 96; n += 16) {
        auto zs = find_zeros(phi, CVec{cplx(static_cast<double>(n), 0)}, 2 * tc.r1);
        for (const auto& z : zs)
            zeros.push_back({{"re", z.z[0].real()},
                             {"im", z.z[0].imag()},
                             {"residual", z.residual},
                             {"nu", z.nu},
                             {"certified", z.certified}});
    }
    j["zeros"] = zeros;
    write_file(dir / "tiling_map.json", j.dump(2) + "\n");
    write_manifest(dir, json::object(), opt.seed);
    std::cout << "wrote " << (dir / "tiling_map.json") << "\n";
    return 0;
}

int demo_bezout(const CliOptions& opt, const std::vector<int>& alpha) {
    fs::path dir(opt.out_dir);
    auto rows = zero_growth_table(alpha, static_cast<int>(alpha.size()));
    std::ostringstream csv;
    csv << "n,prescribed,found,cumulative_in_ball\n";
    for (const auto& r : rows)
        csv << r.n << "," << r.expected << "," << r.found_in_column << "," << r.cumulative << "\n";
    write_file(dir / "zero_counts.csv", csv.str());
    json cfg;
    cfg["alpha"] = alpha;
    write_manifest(dir, cfg, opt.seed);
    std::cout << csv.str();
    return 0;
}

int demo_welfare(const CliOptions& opt) {
    fs::path dir(opt.out_dir);
    // cube snapshot allocation with the full trace
    long long L = 16;
    TilingSnapshot s;
    s.k = 1;
    s.level = 2;
    s.window = Box::centered(1, 70.0);
    for (long long n = -64; n <= 64; n += L) {
        s.tiles.push_back({GridPt(1, n), Polytope::interval(std::max(n - L / 2.0, -70.0),
                                                            std::min(n + L / 2.0, 70.0))});
        for (double e : {n - L / 2.0, n + L / 2.0})
            if (e > -70 + 1e-9 && e < 70 - 1e-9) s.boundary.push_back({RVec{e}, RVec{e}});
    }
    auto trr = transfer_radius_search({s}, 0.25, 2.0, 16.0);
    WeightParams wp{0.25, 2.0, trr.r0};
    auto t = allocate_weights(s, wp);
    json j;
    j["schema_version"] = 1;
    j["transfer_radius"] = trr.r0;
    j["margin"] = trr.worst_margin;
    j["support_ok"] = check_support_bound(t, s).ok;
    j["rescue_ok"] = check_rescue(t, s).ok;
    j["conservation_ok"] = check_conservation(t).ok;
    json rows = json::array();
    for (std::size_t i = 0; i < t.sites.size(); ++i) {
        if (t.transfer[i].empty()) continue;
        json transfers = json::array();
        for (const auto& [l, pay] : t.transfer[i])
            transfers.push_back({{"step", l}, {"target", t.sites[i][0] + t.order[l][0]},
                                 {"amount", pay}});
        json weights = json::array();
        for (const auto& [m, w] : t.weights[i])
            weights.push_back({{"offset", m[0]}, {"weight", w}});
        rows.push_back({{"site", t.sites[i][0]},
                        {"budget", t.budget0[i]},
                        {"transfers", transfers},
                        {"weights", weights}});
    }
    j["allocation"] = rows;
    write_file(dir / "weight_table.json", j.dump(2) + "\n");
    write_manifest(dir, json::object(), opt.seed);
    std::cout << "wrote " << (dir / "weight_table.json") << "\n";
    return 0;
}

int demo_embed(const CliOptions& opt) {
    fs::path dir(opt.out_dir);
    PipelineConfig c = load_pipeline_config(opt);
    auto pp = choose_params(c);
    auto rep = verify_embedding(pp, c.pool_size, c.n_pairs, c.seed);
    write_file(dir / "report.json", report_to_json(rep).dump(2) + "\n");
    std::ostringstream csv;
    csv << "i,j,dist,margin,mechanism\n";
    for (const auto& p : rep.pairs)
        csv << p.i << "," << p.j << "," << p.dist << "," << p.margin << "," << p.mechanism
            << "\n";
    write_file(dir / "pairs.csv", csv.str());
    // tiling geometry of one sample point
    auto st = build_point(pp, RVec{0.371});
    json tiles = json::array();
    for (const auto& t : st.level2.tiles) {
        if (t.tile.is_empty()) continue;
        tiles.push_back({{"index", t.index[0]}, {"lo", t.tile.lo()}, {"hi", t.tile.hi()}});
    }
    json geo{{"schema_version", 1}, {"level2_tiles", tiles}};
    write_file(dir / "tiles.json", geo.dump(2) + "\n");
    write_manifest(dir, config_to_json(c), c.seed,
                   json{{"runtime_seconds", rep.runtime_seconds}});
    std::cout << (rep.pass ? "PASS" : "FAIL") << " embed demo: " << rep.separated << "/"
              << rep.pairs_checked << " pairs separated, min margin " << rep.min_margin
              << ", budget " << rep.error_budget << ", runtime " << rep.runtime_seconds
              << " s\n";
    return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"band-limited embedding toolkit"};
    app.require_subcommand(1);
    CliOptions opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opt.config_path, "JSON run configuration");
        cmd->add_option("--out", opt.out_dir, "output directory");
        cmd->add_option("--seed", opt.seed, "master seed")->each([&](const std::string&) {
            opt.seed_set = true;
        });
        cmd->add_option("--mode", opt.mode, "strict|demo")
            ->check(CLI::IsMember({"strict", "demo"}));
    };

    auto* suite = app.add_subcommand("suite", "run the module property suites");
    add_common(suite);
    suite->add_option("--filter", opt.filter, "run a single module suite");

    auto* demo = app.add_subcommand("demo", "run a named demo and emit artifacts");
    add_common(demo);
    std::string demo_name;
    std::vector<int> alpha{2, 4};
    demo->add_option("name", demo_name, "interp|sampling|tiling|bezout|welfare|embed")
        ->required()
        ->check(CLI::IsMember({"interp", "sampling", "tiling", "bezout", "welfare", "embed"}));
    demo->add_option("--alpha", alpha, "prescribed zero counts for the bezout demo");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (suite->parsed()) return cmd_suite(opt);
        if (demo->parsed()) {
            if (demo_name == "sampling") return demo_sampling(opt);
            if (demo_name == "interp") return demo_interp(opt);
            if (demo_name == "tiling") return demo_tiling(opt);
            if (demo_name == "bezout") return demo_bezout(opt, alpha);
            if (demo_name == "welfare") return demo_welfare(opt);
            if (demo_name == "embed") return demo_embed(opt);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
