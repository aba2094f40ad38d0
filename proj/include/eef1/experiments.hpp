#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "eef1/harness.hpp"
#include "eef1/io_util.hpp"
#include "eef1/neural/bag.hpp"

namespace eef1 {

// Monte-Carlo experiment sweeps:
//   exp1 - resource kinds (uniform goods / chores / mixed) at fixed n
//   exp2 - value distributions (gaussian / lognormal / exponential) at fixed n
//   exp3 - scalability across n on uniform goods
// Each (algorithm, distribution, n) panel becomes one CSV swept over m, plus
// a JSON summary for the whole run.
struct ExperimentConfig {
    std::string kind;  // exp1 | exp2 | exp3
    int n = 10;
    std::vector<int> n_list = {7, 12, 14};  // exp3
    std::vector<int> m_grid;                // defaults per experiment when empty
    std::uint64_t samples = 10000;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::optional<std::string> bag_manifest;
    int threads = 1;
};

struct ExperimentOutput {
    std::vector<std::string> files;  // all files written, summary last
};

namespace detail {

inline Allocator bag_allocator(const std::string& manifest_path) {
    auto bag = std::make_shared<neural::BaggedModel>(neural::load_bag(manifest_path));
    return {"nn", [bag](const Instance& inst) { return neural::bag_predict(*bag, inst); }};
}

// RR family: plain RR on single-sign supports, D-RR on mixed ones.
inline Allocator rr_family(Dist kind) {
    if (dist_is_goods(kind) || dist_is_chores(kind)) return rr_allocator();
    return drr_allocator();
}

inline std::vector<Allocator> panel_allocators(Dist kind, const std::optional<Allocator>& nn) {
    std::vector<Allocator> algs{muw_allocator(), rr_family(kind)};
    if (dist_is_goods(kind)) algs.push_back(crr_allocator());
    if (nn) algs.push_back(*nn);
    return algs;
}

}  // namespace detail

inline ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
    if (cfg.kind != "exp1" && cfg.kind != "exp2" && cfg.kind != "exp3")
        throw std::invalid_argument("unknown experiment kind: " + cfg.kind);
    if (cfg.out_dir.empty()) throw std::invalid_argument("experiment requires an output directory");

    std::optional<Allocator> nn;
    if (cfg.bag_manifest) nn = detail::bag_allocator(*cfg.bag_manifest);

    std::vector<Dist> dists;
    std::vector<int> agent_counts;
    if (cfg.kind == "exp1") {
        dists = {Dist::UniformGoods, Dist::UniformChores, Dist::UniformMixed};
        agent_counts = {cfg.n};
    } else if (cfg.kind == "exp2") {
        dists = {Dist::Gaussian, Dist::Lognormal, Dist::Exponential};
        agent_counts = {cfg.n};
    } else {
        dists = {Dist::UniformGoods};
        agent_counts = cfg.n_list;
    }
    std::vector<int> m_grid = cfg.m_grid.empty() ? make_grid(20, 150, 10) : cfg.m_grid;

    ExperimentOutput output;
    nlohmann::json summary;
    summary["experiment"] = cfg.kind;
    summary["samples"] = cfg.samples;
    summary["seed"] = cfg.seed;
    summary["panels"] = nlohmann::json::array();

    for (int n : agent_counts) {
        for (Dist dist : dists) {
            DistributionSpec spec{dist, cfg.seed};
            for (const Allocator& alg : detail::panel_allocators(dist, nn)) {
                const std::string csv_path =
                    cfg.out_dir + "/" + cfg.kind + "_" + alg.name + "_" + dist_name(dist) + "_n" + std::to_string(n) +
                    ".csv";
                CsvWriter csv(csv_path);
                csv.row({"alg", "n", "m", "dist", "alpha_ef1", "beta_sw", "samples", "seed"});
                nlohmann::json panel;
                panel["alg"] = alg.name;
                panel["n"] = n;
                panel["dist"] = dist_name(dist);
                panel["file"] = csv_path;
                panel["rows"] = nlohmann::json::array();
                for (int m : m_grid) {
                    MetricsReport r = evaluate(alg, spec, n, m, cfg.samples, cfg.threads);
                    csv.row({alg.name, std::to_string(n), std::to_string(m), dist_name(dist),
                             format_double(r.alpha_ef1), format_double(r.beta_sw), std::to_string(cfg.samples),
                             std::to_string(cfg.seed)});
                    nlohmann::json row{{"m", m},
                                       {"alpha_ef1", r.alpha_ef1},
                                       {"alpha_ef", r.alpha_ef},
                                       {"beta_sw", r.beta_sw},
                                       {"mean_sw_alg", r.mean_sw_alg},
                                       {"mean_sw_muw", r.mean_sw_muw}};
                    if (r.alpha_efx) row["alpha_efx"] = *r.alpha_efx;
                    panel["rows"].push_back(row);
                }
                summary["panels"].push_back(panel);
                output.files.push_back(csv_path);
            }
        }
    }

    const std::string summary_path = cfg.out_dir + "/" + cfg.kind + "_summary.json";
    std::ofstream out(summary_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + summary_path);
    out << summary.dump(2) << '\n';
    output.files.push_back(summary_path);
    return output;
}

}  // namespace eef1
