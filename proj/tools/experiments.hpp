// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The phit Authors

// Named experiments for the phit tool. Each takes a JSON config and returns
// the artifacts to write; a failed numeric invariant is reported in
// `violation` (the artifacts are still written).

#pragma once

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "phit/phit.hpp"

namespace phit::cli {

using nlohmann::json;

struct Artifact {
    std::string extension;  // "csv", "json", "grid", "coef"
    std::string contents;
};

struct Result {
    std::vector<Artifact> artifacts;
    std::string summary;
    std::string violation;  // empty when every checked invariant held
};

/// One generator per experiment; batteries draw their seeds from it.
class SeedStream {
public:
    explicit SeedStream(std::uint64_t seed) : rng_(seed) {}
    std::uint64_t next() { return rng_(); }

private:
    std::mt19937_64 rng_;
};

// ---------------------------------------------------------- config access ----

template <typename T>
T get(const json& cfg, const std::string& key, const T& fallback) {
    if (!cfg.contains(key) || cfg.at(key).is_null()) return fallback;
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception&) {
        throw ContractError("config: '" + key + "' has the wrong type");
    }
}

inline std::pair<int, int> int_pair(const json& cfg, const std::string& key, std::pair<int, int> fallback) {
    if (!cfg.contains(key)) return fallback;
    const auto& v = cfg.at(key);
    require(v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer(),
            "config: '" + key + "' must be two integers");
    return {v[0].get<int>(), v[1].get<int>()};
}

inline GridSpec grid_of(const json& cfg, GridSpec fallback) {
    const auto [ell, g] = int_pair(cfg, "grid", {fallback.ell, fallback.g});
    GridSpec s{get<int>(cfg, "n", fallback.n), ell, g};
    s.validate();
    return s;
}

inline SpaceParams space_of(const json& cfg, const SpaceParams& fallback) {
    if (!cfg.contains("space")) return fallback;
    const auto& v = cfg.at("space");
    std::string text;
    if (v.is_string()) {
        text = v.get<std::string>();
    } else {
        require(v.is_array(), "config: 'space' must be \"s,p1,...,q\" or an array");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) text += ',';
            text += v[i].is_string() ? v[i].get<std::string>() : io::format_number(v[i].get<double>());
        }
    }
    return parse_space(text);
}

/// "dual" (default admissible profile and its dual), "meyer", an object with
/// "constants", or a serialized pair {"phi", "psi"}.
inline WaveletPair pair_of(const json& cfg, int n) {
    const json p = cfg.value("pair", json("dual"));
    if (p.is_string()) {
        const auto kind = p.get<std::string>();
        if (kind == "dual") return make_dual(make_admissible(default_constants(), n));
        if (kind == "meyer") {
            require(n == 1, "pair: the Meyer wavelet is one-dimensional");
            const auto m = make_meyer();
            return pair_profiles(m, m);
        }
        return pair_from_json(json::parse(io::read_file(kind)));
    }
    require(p.is_object(), "config: 'pair' must be a string or an object");
    if (p.contains("phi")) return pair_from_json(p);
    const auto c = p.value("constants", json(default_constants())).get<AdmissibilityConstants>();
    c.validate();
    return make_dual(make_admissible(c, n));
}

inline CoefficientWindow window_of(const json& cfg, const GridSpec& spec, const WaveletPair& pair) {
    auto w = default_window(spec, pair);
    if (cfg.contains("levels")) {
        const auto [lo, hi] = int_pair(cfg, "levels", {w.nu_min, w.nu_max});
        w = CoefficientWindow::full(spec, lo, hi);
    }
    return w;
}

inline std::string fmt(double v) { return io::format_number(v); }

inline std::string describe_failure(const std::string& invariant, double value) {
    return invariant + " violated (value " + fmt(value) + ")";
}

// ------------------------------------------------------------ experiments ----

inline Result build_frame(const json& cfg, SeedStream&) {
    const int n = get<int>(cfg, "n", 1);
    const auto pair = pair_of(cfg, n);
    const double dev = check_reconstruction(pair, log_spaced_frequencies(n, 1e-3, 1e3, 200));
    const double tol = get<double>(cfg, "tolerance", 1e-10);
    json report = {{"pair", pair_to_json(pair)}, {"samples", 200}, {"max_deviation", dev}, {"tolerance", tol}};
    Result r{{{"json", report.dump(2) + "\n"}}, "reconstruction deviation " + fmt(dev), {}};
    if (!(dev <= tol)) r.violation = describe_failure("reconstruction identity deviation <= " + fmt(tol), dev);
    return r;
}

inline Result analyze_experiment(const json& cfg, SeedStream& seeds) {
    GridFunction f;
    if (cfg.contains("input")) {
        f = io::load_grid_function(cfg.at("input").get<std::string>());
    } else {
        const auto spec = grid_of(cfg, GridSpec{1, 4, 4});
        const auto pair = pair_of(cfg, spec.n);
        const auto [lo, hi] = covered_band(pair, window_of(cfg, spec, pair));
        f = random_annulus(spec, seeds.next(), lo, hi, true);
    }
    const auto pair = pair_of(cfg, f.spec().n);
    const auto w = window_of(cfg, f.spec(), pair);
    const auto a = analyze(f, pair.phi, w);
    json report = {{"levels", {w.nu_min, w.nu_max}},
                   {"coefficients", a.total()},
                   {"max_abs", a.max_abs()},
                   {"input_l2", f.l2_norm()}};
    return {{{"coef", io::encode(a)}, {"json", report.dump(2) + "\n"}},
            std::to_string(a.total()) + " coefficients on levels " + std::to_string(w.nu_min) + ".." +
                std::to_string(w.nu_max),
            {}};
}

inline Result synthesize_experiment(const json& cfg, SeedStream& seeds) {
    CoefficientField a;
    if (cfg.contains("input")) {
        a = io::load_coefficient_field(cfg.at("input").get<std::string>());
    } else {
        const auto spec = grid_of(cfg, GridSpec{1, 4, 4});
        a = random_field(spec, window_of(cfg, spec, pair_of(cfg, spec.n)), seeds.next());
    }
    const auto pair = pair_of(cfg, a.n());
    const auto order = EnumerationStrategy::parse(get<std::string>(cfg, "order", "ascending"), seeds.next());
    const auto f = synthesize(a, pair.psi, a.spec(), order);
    json report = {{"order", get<std::string>(cfg, "order", "ascending")}, {"l2", f.l2_norm()}};
    return {{{"grid", io::encode(f)}, {"json", report.dump(2) + "\n"}}, "synthesized l2 norm " + fmt(f.l2_norm()), {}};
}

inline Result roundtrip_experiment(const json& cfg, SeedStream& seeds) {
    const auto spec = grid_of(cfg, GridSpec{1, 4, 4});
    const auto pair = pair_of(cfg, spec.n);
    const auto w = window_of(cfg, spec, pair);
    const auto [lo, hi] = covered_band(pair, w);
    const int count = get<int>(cfg, "count", 10);
    require(count >= 1, "roundtrip: count >= 1");
    const std::string order = get<std::string>(cfg, "order", "spectral");
    require(order == "spectral" || order == "direct", "roundtrip: order is spectral or direct");
    const auto path = order == "direct" ? SynthesisPath::direct : SynthesisPath::spectral;
    io::CsvTable t({"index", "seed", "error"});
    double worst = 0;
    for (int i = 0; i < count; ++i) {
        const auto seed = seeds.next();
        const double e = roundtrip_error(random_annulus(spec, seed, lo, hi, i % 2 == 0), pair, w, path);
        worst = std::max(worst, e);
        t.row({std::to_string(i), std::to_string(seed), fmt(e)});
    }
    Result r{{{"csv", t.str()}}, "worst relative error " + fmt(worst), {}};
    if (!(worst <= 1e-6)) r.violation = describe_failure("roundtrip relative L2 error <= 1e-6", worst);
    return r;
}

inline Result norms_experiment(const json& cfg, SeedStream& seeds) {
    const auto sp = space_of(cfg, SpaceParams{0.0, {2.0}, 2.0});
    std::vector<GridFunction> fs;
    if (cfg.contains("input")) {
        fs.push_back(io::load_grid_function(cfg.at("input").get<std::string>()));
    } else {
        const auto spec = grid_of(cfg, sp.n() == 1 ? GridSpec{1, 5, 4} : GridSpec{2, 3, 3});
        fs = norm_battery(spec, 0, 3, get<int>(cfg, "count", 8), seeds.next());
    }
    require(fs.front().spec().n == sp.n(), "norms: one exponent per dimension of the grid");
    const auto pair = pair_of(cfg, sp.n());
    const auto w = window_of(cfg, fs.front().spec(), pair);
    io::CsvTable t({"object", "norm", "value"});
    RatioInterval iv;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const auto id = std::to_string(i);
        const double tl = tl_norm(fs[i], pair.phi, sp, {w.nu_min, w.nu_max});
        const double seq = seq_norm(analyze(fs[i], pair.phi, w), sp);
        std::vector<double> mag(fs[i].size());
        for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(fs[i][k]);
        t.row({id, "mixed_lp", fmt(mixed_norm(fs[i].spec(), mag, sp.p))});
        t.row({id, "tl", fmt(tl)});
        t.row({id, "seq", fmt(seq)});
        t.row({id, "seq_over_tl", fmt(seq / tl)});
        if (tl > 0 && seq > 0) iv.add(seq / tl);
    }
    return {{{"csv", t.str()}}, "seq/tl ratios in [" + fmt(iv.lo) + ", " + fmt(iv.hi) + "]", {}};
}

inline Result maximal_experiment(const json& cfg, SeedStream& seeds) {
    const std::string probe = get<std::string>(cfg, "probe", "fs");
    auto steps = get<std::vector<int>>(cfg, "resolutions", {0, 1, 2});
    require(!steps.empty() && steps.front() == 0, "maximal-check: resolutions start at 0 (the base grid)");
    for (std::size_t i = 1; i < steps.size(); ++i)
        require(steps[i] > steps[i - 1], "maximal-check: resolutions increasing");
    const double growth = get<double>(cfg, "max_growth", 1.10);
    std::vector<double> ratios;
    GridSpec base;
    if (probe == "fs") {
        base = grid_of(cfg, GridSpec{2, 2, 3});
        std::vector<GridFunction> fam;
        const int count = get<int>(cfg, "count", 8);
        for (int s = 0; s < count; ++s) fam.push_back(random_cube_band(base, seeds.next(), 4.0 + s, true));
        const auto p = get<std::vector<double>>(cfg, "p", std::vector<double>(static_cast<std::size_t>(base.n), 2.0));
        const double q = get<double>(cfg, "q", 2.0), t = get<double>(cfg, "t", 0.75);
        for (int step : steps) {
            std::vector<GridFunction> fine;
            for (const auto& f : fam) fine.push_back(spectral_resample(f, GridSpec{base.n, base.ell, base.g + step}));
            ratios.push_back(fs_inequality_probe(fine, p, q, t));
        }
    } else if (probe == "peetre") {
        base = grid_of(cfg, GridSpec{1, 5, 2});
        const int nu = get<int>(cfg, "nu", 2);
        const double t = get<double>(cfg, "t", 0.5);
        const double tau = get<double>(cfg, "tau", base.n / t);
        const auto f = random_cube_band(base, seeds.next(), std::ldexp(1.0, nu), true);
        for (int step : steps)
            ratios.push_back(peetre_probe(spectral_resample(f, GridSpec{base.n, base.ell, base.g + step}), nu, tau, t,
                                          PeetreMode::bandlimited));
    } else if (probe == "star") {
        base = grid_of(cfg, GridSpec{2, 2, 3});
        const int mu = get<int>(cfg, "mu", 2), nu = get<int>(cfg, "nu", 0);
        const double t = get<double>(cfg, "t", 0.7);
        const double tau = get<double>(cfg, "tau", base.n / t + 0.5);
        const auto a = random_field(base, CoefficientWindow::full(base, mu, mu), seeds.next());
        for (int step : steps) {
            CoefficientField fine(GridSpec{base.n, base.ell, base.g + step}, a.window());
            fine.level(mu) = a.level(mu);
            ratios.push_back(star_inequality_probe(fine, mu, nu, tau, t).ratio);
        }
    } else {
        throw ContractError("maximal-check: probe is fs, peetre or star (got '" + probe + "')");
    }
    io::CsvTable t({"resolution", "points_per_axis", "ratio", "growth"});
    double worst = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const double gr = ratios[i] / ratios[0];
        worst = std::max(worst, gr);
        t.row({std::to_string(steps[i]), std::to_string(base.points_per_axis() << steps[i]), fmt(ratios[i]), fmt(gr)});
    }
    Result r{{{"csv", t.str()}}, probe + " ratios, worst growth " + fmt(worst), {}};
    if (!std::isfinite(ratios[0])) r.violation = "maximal-check: finite ratio on the base grid violated";
    else if (worst > growth)
        r.violation = describe_failure("maximal-check: ratio growth <= " + fmt(growth) + " under refinement", worst);
    return r;
}

inline TestDistribution distribution_of(const json& cfg) {
    const std::string dist = get<std::string>(cfg, "dist", "delta");
    const int n = get<int>(cfg, "n", 1);
    if (dist == "delta") {
        const auto loc = get<std::vector<double>>(cfg, "location", {0.0, 0.0});
        require(loc.size() == 2, "lp-decay: location has two entries");
        const auto der = get<std::vector<int>>(cfg, "derivative", {0, 0});
        require(der.size() == 2, "lp-decay: derivative has two entries");
        return TestDistribution::point_mass(n, {loc[0], loc[1]}, 1.0, {der[0], der[1]});
    }
    if (dist == "file") {
        require(cfg.contains("input"), "lp-decay: dist = file needs 'input'");
        const std::string model = get<std::string>(cfg, "model", "compact");
        require(model == "compact" || model == "periodic", "lp-decay: model is compact or periodic");
        return TestDistribution::grid_function(io::load_grid_function(cfg.at("input").get<std::string>()),
                                               model == "compact" ? GridModel::compact : GridModel::periodic);
    }
    throw ContractError("lp-decay: dist is delta or file (got '" + dist + "')");
}

inline Result lp_decay_experiment(const json& cfg, SeedStream&) {
    const auto f = distribution_of(cfg);
    const int n = f.dim();
    const int m = get<int>(cfg, "m", 0);
    const auto [lo, hi] = int_pair(cfg, "N_range", {1, 8});
    TestFunction psi{n};
    if (cfg.contains("psi")) {
        const auto& p = cfg.at("psi");
        const auto c = p.value("center", std::vector<double>{0.4, 0.0});
        require(c.size() == 2, "lp-decay: psi center has two entries");
        psi.center = {c[0], c[1]};
        psi.sigma = p.value("sigma", 1.0);
        psi.derivative = p.value("derivative", 0);
    }
    std::optional<CoefficientPerturbation> perturb;
    if (cfg.contains("perturb")) perturb = CoefficientPerturbation{{m, 0}, cfg.at("perturb").get<double>()};
    const LpEngine engine(combined_profile(pair_of(cfg, n)));
    const auto fit = remainder_decay_slope(f, engine, psi, m, lo, hi, perturb);
    io::CsvTable t({"N", "abs_pairing", "fitted_slope"});
    for (const auto& row : fit.rows) t.row({fmt(row.scale), fmt(row.magnitude), fmt(fit.slope)});
    Result r{{{"csv", t.str()}}, fit.describe(), {}};
    if (!perturb && !fit.contract_met())
        r.violation = describe_failure("lp-decay: slope <= -" + fmt(fit.contract_exponent) + " + 0.3", fit.slope);
    return r;
}

inline SpectralProfile gaussian_of(const json& cfg, const std::string& key, int n, int order) {
    const json p = cfg.value(key, json::object());
    return make_gaussian(n, p.value("order", order), p.value("scale", 1.0));
}

inline Result decay_check_experiment(const json& cfg, SeedStream&) {
    const auto variant = decay_variant_from_string(get<std::string>(cfg, "variant", "base"));
    const int n = get<int>(cfg, "n", 1);
    const int N = get<int>(cfg, "N", 4), M = get<int>(cfg, "M", 1);
    const auto [lo, hi] = int_pair(cfg, "sweep", {2, 8});
    const auto psi = gaussian_of(cfg, "psi", n, variant == DecayVariant::psi_moments ? M + 1 : 0);
    const auto phi = gaussian_of(cfg, "phi", n, variant == DecayVariant::phi_moments ? M + 1 : 0);
    const auto sw = decay_sweep(psi, phi, variant, N, M, lo, hi);
    io::CsvTable t({"separation", "measured", "bound", "ratio"});
    for (const auto& row : sw.rows)
        t.row({std::to_string(row.separation), fmt(row.check.measured), fmt(row.check.bound), fmt(row.check.ratio())});
    Result r{{{"csv", t.str()}},
             to_string(variant) + " slope " + fmt(sw.slope) + " (expected " + fmt(sw.expected) + "), max ratio " +
                 fmt(sw.max_ratio),
             {}};
    if (sw.max_ratio > 1 + 1e-9) r.violation = describe_failure("decay-check: measured/bound <= 1", sw.max_ratio);
    else if (hi - lo >= 6 && std::abs(sw.slope - sw.expected) > 0.3)
        r.violation = describe_failure("decay-check: slope within 0.3 of " + fmt(sw.expected), sw.slope);
    return r;
}

inline Result meyer_check(const json& cfg, SeedStream&) {
    const int jm = get<int>(cfg, "j_max", 4), km = get<int>(cfg, "k_max", 16);
    MeyerGram gram(make_meyer());
    double worst = 0;
    for (int j1 = -jm; j1 <= jm; ++j1)
        for (int k1 = -km; k1 <= km; ++k1)
            for (int j2 = -jm; j2 <= jm; ++j2)
                for (int k2 = -km; k2 <= km; ++k2) {
                    const cplx want = (j1 == j2 && k1 == k2) ? 1.0 : 0.0;
                    worst = std::max(worst, std::abs(gram(j1, k1, j2, k2) - want));
                }
    const double tol = get<double>(cfg, "tolerance", 1e-7);
    json report = {{"j_max", jm}, {"k_max", km}, {"max_deviation", worst}, {"tolerance", tol}};
    Result r{{{"json", report.dump(2) + "\n"}}, "max Gram deviation " + fmt(worst), {}};
    if (!(worst <= tol)) r.violation = describe_failure("meyer-check: Gram deviation <= " + fmt(tol), worst);
    return r;
}

inline Result embedding_experiment_cli(const json& cfg, SeedStream& seeds) {
    const auto kind = embedding_kind_from_string(get<std::string>(cfg, "kind", "theta_scaling"));
    const auto sp = space_of(cfg, SpaceParams{1.0, {2.0}, 2.0});
    EmbeddingConfig ec;
    if (cfg.contains("grid")) ec.grid = grid_of(cfg, default_embedding_grid(kind, sp.n()));
    ec.dilate_grid = get<bool>(cfg, "dilate_grid", true);
    ec.battery = get<int>(cfg, "count", 20);
    ec.seed = seeds.next();
    if (cfg.contains("source")) {
        auto src = space_of(json{{"space", cfg.at("source")}}, sp);
        ec.source = src;
    }
    const auto tab = embedding_experiment(kind, sp, int_pair(cfg, "k_range", {1, 5}), ec);
    io::CsvTable t({"k", "value", "fitted_slope", "expected"});
    for (const auto& row : tab.rows) t.row({std::to_string(row.k), fmt(row.value), fmt(tab.slope), fmt(tab.expected)});
    Result r{{{"csv", t.str()}}, to_string(kind) + " slope " + fmt(tab.slope) + " (expected " + fmt(tab.expected) + ")",
             {}};
    if (kind != EmbeddingKind::sobolev_ratio && std::abs(tab.slope - tab.expected) > 0.05)
        r.violation = describe_failure("embedding: slope within 0.05 of " + fmt(tab.expected), tab.slope);
    return r;
}

using Experiment = std::function<Result(const json&, SeedStream&)>;

inline const std::map<std::string, Experiment>& experiments() {
    static const std::map<std::string, Experiment> table{
        {"build-frame", build_frame},
        {"analyze", analyze_experiment},
        {"synthesize", synthesize_experiment},
        {"roundtrip", roundtrip_experiment},
        {"norms", norms_experiment},
        {"maximal-check", maximal_experiment},
        {"lp-decay", lp_decay_experiment},
        {"decay-check", decay_check_experiment},
        {"meyer-check", meyer_check},
        {"embedding-sharpness", embedding_experiment_cli},
    };
    return table;
}

}  // namespace phit::cli
