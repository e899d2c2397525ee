#include "sigemb/report_json.hpp"

namespace sigemb {

namespace {

std::string kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::Sinc: return "sinc";
        case KernelKind::SincPow: return "sinc_pow";
        case KernelKind::Sin: return "sin";
        case KernelKind::Cos: return "cos";
        case KernelKind::Cexp: return "cexp";
        case KernelKind::Const: return "const";
    }
    return "const";
}

KernelKind kind_from_name(const std::string& s) {
    if (s == "sinc") return KernelKind::Sinc;
    if (s == "sinc_pow") return KernelKind::SincPow;
    if (s == "sin") return KernelKind::Sin;
    if (s == "cos") return KernelKind::Cos;
    if (s == "cexp") return KernelKind::Cexp;
    if (s == "const") return KernelKind::Const;
    throw std::invalid_argument("unknown kernel kind: " + s);
}

}  // namespace

json blfunction_to_json(const BLFunction& f) {
    json terms = json::array();
    for (const auto& t : f.terms()) {
        json jt;
        jt["coeff"] = {t.coeff.real(), t.coeff.imag()};
        json shift = json::array();
        for (int i = 0; i < f.dim(); ++i) shift.push_back(t.shift[i]);
        jt["shift"] = shift;
        json factors = json::array();
        for (const auto& kf : t.factors) {
            json jf;
            jf["kind"] = kind_name(kf.kind);
            jf["axis"] = kf.axis;
            jf["b"] = kf.b;
            if (kf.kind == KernelKind::SincPow) jf["power"] = kf.power;
            factors.push_back(jf);
        }
        jt["factors"] = factors;
        terms.push_back(jt);
    }
    return json{{"dim", f.dim()}, {"terms", terms}};
}

BLFunction blfunction_from_json(const json& j) {
    BLFunction f(j.at("dim").get<int>());
    for (const auto& jt : j.at("terms")) {
        Term t;
        auto c = jt.at("coeff");
        t.coeff = cplx(c.at(0).get<double>(), c.at(1).get<double>());
        t.shift = RVec(f.dim());
        for (int i = 0; i < f.dim(); ++i) t.shift[i] = jt.at("shift").at(i).get<double>();
        for (const auto& jf : jt.at("factors")) {
            KernelFactor kf;
            kf.kind = kind_from_name(jf.at("kind").get<std::string>());
            kf.axis = jf.at("axis").get<int>();
            kf.b = jf.at("b").get<double>();
            if (jf.contains("power")) kf.power = jf.at("power").get<int>();
            t.factors.push_back(kf);
        }
        f.add_term(std::move(t));
    }
    return f;
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    static const std::vector<std::string> known = {
        "alpha",        "metric_scale",   "signal_freqs", "signal_coeffs",
        "band_a",       "delta",          "rho",          "tau",
        "interp_order", "mollifier_order", "L",           "N",
        "c0",           "capacity_share", "need_radius",  "marker_range",
        "probe_half",   "pool_size",      "n_pairs",      "seed",
        "mode",         "calibration_points", "junction_points", "quad_budget_cap"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw std::invalid_argument("unknown config key: " + it.key());
    }
    if (j.contains("alpha")) {
        c.alpha.clear();
        for (const auto& a : j["alpha"]) c.alpha.push_back(a.get<double>());
        c.k = static_cast<int>(c.alpha.size());
    }
    if (j.contains("metric_scale")) c.metric_scale = j["metric_scale"].get<double>();
    if (j.contains("signal_freqs")) {
        c.signal_freqs.clear();
        for (const auto& f : j["signal_freqs"]) c.signal_freqs.push_back(GridPt(1, f.get<long long>()));
    }
    if (j.contains("signal_coeffs")) {
        c.signal_coeffs.clear();
        for (const auto& v : j["signal_coeffs"])
            c.signal_coeffs.push_back(cplx(v.at(0).get<double>(), v.at(1).get<double>()));
    }
    if (j.contains("band_a")) c.band_a = j["band_a"].get<double>();
    if (j.contains("delta")) c.delta = j["delta"].get<double>();
    if (j.contains("rho"))
        c.rho = Rational(j["rho"].at(0).get<long long>(), j["rho"].at(1).get<long long>());
    if (j.contains("tau")) c.tau = j["tau"].get<double>();
    if (j.contains("interp_order")) c.interp_order = j["interp_order"].get<int>();
    if (j.contains("mollifier_order")) c.mollifier_order = j["mollifier_order"].get<int>();
    if (j.contains("L")) c.L = j["L"].get<long long>();
    if (j.contains("N")) c.N = j["N"].get<int>();
    if (j.contains("c0")) c.c0 = j["c0"].get<double>();
    if (j.contains("capacity_share")) c.capacity_share = j["capacity_share"].get<double>();
    if (j.contains("need_radius")) c.need_radius = j["need_radius"].get<double>();
    if (j.contains("marker_range")) c.marker_range = j["marker_range"].get<long long>();
    if (j.contains("probe_half")) c.probe_half = j["probe_half"].get<double>();
    if (j.contains("pool_size")) c.pool_size = j["pool_size"].get<int>();
    if (j.contains("n_pairs")) c.n_pairs = j["n_pairs"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("mode")) {
        std::string m = j["mode"].get<std::string>();
        if (m == "strict")
            c.mode = PipelineMode::Strict;
        else if (m == "demo")
            c.mode = PipelineMode::Demo;
        else
            throw std::invalid_argument("mode must be strict or demo");
    }
    if (j.contains("calibration_points")) c.calibration_points = j["calibration_points"].get<int>();
    if (j.contains("junction_points")) c.junction_points = j["junction_points"].get<int>();
    if (j.contains("quad_budget_cap")) c.quad_budget_cap = j["quad_budget_cap"].get<double>();
    return c;
}

json config_to_json(const PipelineConfig& c) {
    json j;
    j["alpha"] = c.alpha;
    j["metric_scale"] = c.metric_scale;
    json freqs = json::array();
    for (const auto& f : c.signal_freqs) freqs.push_back(f[0]);
    j["signal_freqs"] = freqs;
    json coeffs = json::array();
    for (const auto& v : c.signal_coeffs) coeffs.push_back({v.real(), v.imag()});
    j["signal_coeffs"] = coeffs;
    j["band_a"] = c.band_a;
    j["delta"] = c.delta;
    j["rho"] = {c.rho.num, c.rho.den};
    j["tau"] = c.tau;
    j["interp_order"] = c.interp_order;
    j["mollifier_order"] = c.mollifier_order;
    j["L"] = c.L;
    j["N"] = c.N;
    j["c0"] = c.c0;
    j["capacity_share"] = c.capacity_share;
    j["need_radius"] = c.need_radius;
    j["marker_range"] = c.marker_range;
    j["probe_half"] = c.probe_half;
    j["pool_size"] = c.pool_size;
    j["n_pairs"] = c.n_pairs;
    j["seed"] = c.seed;
    j["mode"] = c.mode == PipelineMode::Strict ? "strict" : "demo";
    j["calibration_points"] = c.calibration_points;
    j["junction_points"] = c.junction_points;
    j["quad_budget_cap"] = c.quad_budget_cap;
    return j;
}

json audit_to_json(const std::vector<AuditLine>& audit) {
    json lines = json::array();
    for (const auto& l : audit) {
        lines.push_back({{"name", l.name},
                         {"measured", l.measured},
                         {"pass", l.pass},
                         {"lhs", l.lhs},
                         {"rhs", l.rhs},
                         {"note", l.note}});
    }
    return lines;
}

json report_to_json(const EmbeddingReport& rep) {
    json j;
    j["schema_version"] = 1;
    j["pass"] = rep.pass;
    j["pairs_checked"] = rep.pairs_checked;
    j["separated"] = rep.separated;
    j["min_margin"] = rep.min_margin;
    j["error_budget"] = rep.error_budget;
    j["sup_g_minus_f"] = rep.sup_g_minus_f;
    j["freq_inband_leak"] = rep.freq_inband_leak;
    j["freq_outband_leak"] = rep.freq_outband_leak;
    j["audit"] = audit_to_json(rep.audit);
    json pairs = json::array();
    for (const auto& p : rep.pairs)
        pairs.push_back({{"i", p.i},
                         {"j", p.j},
                         {"dist", p.dist},
                         {"margin", p.margin},
                         {"mechanism", p.mechanism}});
    j["pairs"] = pairs;
    return j;
}

json suite_to_json(const SuiteResult& r) {
    return json{{"name", r.name}, {"checks", r.checks}, {"failures", r.failures},
                {"notes", r.notes}};
}

}  // namespace sigemb
