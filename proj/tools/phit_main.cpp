// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The phit Authors

// phit: batch runner for the named experiments.
//
//   phit run --config cfg.json [--out DIR] [--seed S] [--threads T]
//   phit roundtrip --grid 4,4 --count 20
//
// Outputs go to DIR (default $PHIT_OUT_DIR, then ./phit-out) as
// <experiment>-<config hash>.<ext>. Exit status: 0 ok, 1 a checked
// invariant failed, 2 bad input or a violated precondition.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "experiments.hpp"

namespace {

using phit::cli::json;

struct Flag {
    const char* name;
    const char* help;
};

const std::map<std::string, std::vector<Flag>>& subcommand_flags() {
    static const Flag n{"--n", "dimension (1 or 2)"}, grid{"--grid", "ell,g: box [-2^ell, 2^ell), spacing 2^-g"},
        pair{"--pair", "dual | meyer | path to a pair JSON"}, levels{"--levels", "nu_min,nu_max"},
        input{"--input", "input file"}, count{"--count", "battery size"},
        order{"--order", "enumeration order or synthesis path"}, space{"--space", "s,p1,...,pn,q (q may be inf)"};
    static const std::map<std::string, std::vector<Flag>> table{
        {"build-frame", {n, pair, {"--tolerance", "reconstruction tolerance"}}},
        {"analyze", {n, grid, pair, levels, input}},
        {"synthesize", {n, grid, pair, levels, input, order}},
        {"roundtrip", {n, grid, pair, levels, count, {"--order", "spectral | direct"}}},
        {"norms", {space, grid, pair, levels, input, count}},
        {"maximal-check",
         {{"--probe", "fs | peetre | star"}, {"--resolutions", "doubling steps, starting at 0"}, n, grid, count}},
        {"lp-decay",
         {{"--dist", "delta | file"}, input, {"--model", "compact | periodic (dist = file)"}, {"--m", "Taylor degree"},
          {"--N-range", "N_lo,N_hi"}, {"--perturb", "added to the degree-m Taylor coefficient"},
          {"--location", "x1,x2 of the point mass"}, {"--derivative", "a1,a2 of the point mass"}, pair}},
        {"decay-check",
         {{"--variant", "base | psi-moments | phi-moments"}, {"--sweep", "min_sep,max_sep"}, {"--N", "weight exponent"},
          {"--M", "moment order"}, n}},
        {"meyer-check", {{"--j-max", "largest |j|"}, {"--k-max", "largest |k|"}}},
        {"embedding-sharpness",
         {{"--kind", "theta_scaling | rho_scaling | sobolev_ratio"}, space, {"--k-range", "k_lo,k_hi"}, grid, count}},
    };
    return table;
}

std::string key_of(const std::string& flag) {
    std::string k = flag.substr(2);
    for (auto& c : k)
        if (c == '-') c = '_';
    return k;
}

// JSON literal, else a comma list of numbers, else the raw string.
json parse_value(const std::string& s) {
    auto j = json::parse(s, nullptr, false);
    if (!j.is_discarded()) return j;
    if (s.find(',') != std::string::npos) {
        json arr = json::array();
        std::stringstream ss(s);
        std::string part;
        bool numeric = true;
        while (std::getline(ss, part, ',')) {
            auto v = json::parse(part, nullptr, false);
            if (v.is_discarded() || !v.is_number()) {
                numeric = false;
                break;
            }
            arr.push_back(v);
        }
        if (numeric) return arr;
    }
    return s;
}

std::filesystem::path output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("PHIT_OUT_DIR"); env && *env) return env;
    return "phit-out";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phit: phi-transform experiments on periodic grids"};
    std::string config_path, out_flag;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    app.add_option("--config", config_path, "JSON config naming an experiment")->check(CLI::ExistingFile);
    app.add_option("--out", out_flag, "output directory (default $PHIT_OUT_DIR, then ./phit-out)");
    app.add_option("--seed", seed, "overrides the config seed");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.require_subcommand(0, 1);

    auto* run = app.add_subcommand("run", "run the experiment named in --config");
    run->fallthrough();
    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, flags] : subcommand_flags()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->fallthrough();
        for (const auto& f : flags) sub->add_option(f.name, values[name][key_of(f.name)], f.help);
        subs[name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "phit: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        json cfg = json::object();
        if (!config_path.empty()) {
            try {
                cfg = json::parse(phit::io::read_file(config_path));
            } catch (const json::exception& e) {
                throw phit::ContractError(std::string("config: ") + e.what());
            }
            phit::require(cfg.is_object(), "config: top level must be an object");
        }
        std::string name;
        for (const auto& [n, sub] : subs)
            if (sub->parsed()) name = n;
        if (name.empty()) {
            if (!run->parsed() && config_path.empty()) {
                std::cerr << app.help();
                return 2;
            }
            phit::require(cfg.contains("experiment"), "config: 'experiment' is required for run");
            name = cfg.at("experiment").get<std::string>();
        } else {
            phit::require(!cfg.contains("experiment") || cfg.at("experiment") == name,
                          "config: experiment does not match the subcommand");
            for (const auto* opt : subs[name]->get_options())
                if (opt->count() > 0 && opt->get_name().rfind("--", 0) == 0)
                    cfg[key_of(opt->get_name())] = parse_value(values[name][key_of(opt->get_name())]);
        }
        const auto& table = phit::cli::experiments();
        const auto it = table.find(name);
        if (it == table.end()) {
            std::cerr << "phit: unknown experiment '" << name << "'; known:";
            for (const auto& [n, e] : table) std::cerr << ' ' << n;
            std::cerr << "\n" << app.help();
            return 2;
        }
        cfg["experiment"] = name;
        if (seed) cfg["seed"] = *seed;
        if (!cfg.contains("seed")) cfg["seed"] = 1;
        phit::set_threads(threads);

        phit::cli::SeedStream seeds(cfg.at("seed").get<std::uint64_t>());
        const auto result = it->second(cfg, seeds);

        const auto dir = output_dir(out_flag);
        const std::string stem = name + "-" + phit::io::config_hash(cfg);
        phit::io::atomic_write(dir / (stem + ".config.json"), cfg.dump(2) + "\n");
        std::cout << name << ": " << result.summary << "\n";
        for (const auto& a : result.artifacts) {
            const auto path = dir / (stem + "." + a.extension);
            phit::io::atomic_write(path, a.contents);
            std::cout << path.string() << "\n";
        }
        if (!result.violation.empty()) {
            std::cerr << "phit: FAILED " << result.violation << "\n";
            return 1;
        }
        return 0;
    } catch (const phit::ContractError& e) {
        std::cerr << "phit: error: " << e.what() << "\n";
    } catch (const phit::io::FormatError& e) {
        std::cerr << "phit: error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "phit: error: " << e.what() << "\n";
    }
    return 2;
}
