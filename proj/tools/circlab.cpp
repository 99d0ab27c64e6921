// circlab: batch driver for the circle-incidence experiments.
//
// Each subcommand runs one experiment over its parameter grid and writes
// data.csv (gnuplot-ready columns), summary.json (assertions + measured
// constants) and a MANIFEST of content hashes into --out. Exit codes:
// 0 = all assertions pass, 2 = an assertion failed, 3 = bad config/usage.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "incidence/experiments.hpp"
#include "incidence/families.hpp"
#include "incidence/pyth.hpp"
#include "incidence/serialize.hpp"

using incidence::experiments::ConfigError;
using incidence::experiments::ExperimentConfig;

namespace {

int export_triples(int64_t c_max, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << "a,b,c,family,alpha,beta,j\n";
    for (const auto& t : incidence::pyth::enumerate_primitive_triples(c_max)) {
        const auto rep = incidence::pyth::represent_triple(t);
        const char* fam = rep.family == incidence::pyth::TripleRepresentation::Family::HalfSquares
                              ? "HalfSquares"
                          : rep.family == incidence::pyth::TripleRepresentation::Family::PowerFirst
                              ? "PowerFirst"
                              : "PowerSecond";
        out << t.a << "," << t.b << "," << t.c << "," << fam << "," << rep.alpha << "," << rep.beta
            << "," << rep.j << "\n";
    }
    return 0;
}

int export_family(const std::string& kind, int64_t n, double delta, uint64_t seed,
                  const std::string& path) {
    incidence::families::CircleFamily fam;
    if (kind == "lattice") {
        fam = incidence::families::lattice_family(n);
    } else if (kind == "knapp") {
        fam = incidence::families::knapp_family(delta);
    } else if (kind == "net") {
        fam = incidence::families::delta_net_family(delta, incidence::families::unit_box(),
                                                    incidence::families::NetMode::FullSeparation, seed);
    } else {
        throw ConfigError("unknown family kind: " + kind + " (use lattice|knapp|net)");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << incidence::serialize::family_to_jsonl(fam);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"circle incidence experiment driver"};
    app.require_subcommand(0, 1);
    app.fallthrough(); // global flags may follow the subcommand

    std::string config_path;
    std::string out_dir = "out";
    int workers = 1;
    uint64_t seed_override = 0;

    app.add_option("--config", config_path, "JSON config file (overrides subcommand defaults)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "worker thread count (results are identical for any value)");
    auto* seed_opt = app.add_option("--seed", seed_override, "override the experiment's seed parameter");

    auto* list_cmd = app.add_subcommand("list", "list available experiments");

    int64_t triples_cmax = 100;
    std::string triples_path = "triples.csv";
    auto* triples_cmd = app.add_subcommand("export-triples", "primitive triples as CSV");
    triples_cmd->add_option("--cmax", triples_cmax, "largest hypotenuse");
    triples_cmd->add_option("--file", triples_path, "output CSV path");

    std::string fam_kind = "lattice", fam_path = "family.jsonl";
    int64_t fam_n = 16;
    double fam_delta = 1.0 / 64;
    uint64_t fam_seed = 1;
    auto* family_cmd = app.add_subcommand("export-family", "circle family as JSONL");
    family_cmd->add_option("--kind", fam_kind, "lattice|knapp|net");
    family_cmd->add_option("--n", fam_n, "lattice N");
    family_cmd->add_option("--delta", fam_delta, "scale for knapp/net");
    family_cmd->add_option("--family-seed", fam_seed, "net seed");
    family_cmd->add_option("--file", fam_path, "output JSONL path");

    std::vector<CLI::App*> subs;
    for (const auto& name : incidence::experiments::experiment_names())
        subs.push_back(app.add_subcommand(name, "run the " + name + " experiment"));

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) {
            for (const auto& name : incidence::experiments::experiment_names())
                std::cout << name << "\n";
            return 0;
        }
        if (triples_cmd->parsed()) return export_triples(triples_cmax, triples_path);
        if (family_cmd->parsed()) return export_family(fam_kind, fam_n, fam_delta, fam_seed, fam_path);

        ExperimentConfig cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path, std::ios::binary);
            if (!in) throw ConfigError("cannot open config file: " + config_path);
            std::ostringstream buf;
            buf << in.rdbuf();
            cfg = incidence::experiments::parse_config(buf.str());
        } else {
            std::string chosen;
            for (size_t i = 0; i < subs.size(); ++i)
                if (subs[i]->parsed()) chosen = incidence::experiments::experiment_names()[i];
            if (chosen.empty())
                throw ConfigError("no experiment selected: pass a subcommand or --config");
            cfg.experiment = chosen;
            cfg.params = incidence::experiments::default_params(chosen);
        }
        if (seed_opt->count() > 0) cfg.params["seed"] = seed_override;

        const int code = incidence::experiments::run_to_dir(cfg, out_dir, workers);
        std::cout << cfg.experiment << ": " << (code == 0 ? "PASS" : "FAIL") << " (results in "
                  << out_dir << ")\n";
        return code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
