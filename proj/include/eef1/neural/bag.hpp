#pragma once

#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "eef1/baselines.hpp"
#include "eef1/fairness.hpp"
#include "eef1/neural/model_io.hpp"
#include "eef1/neural/network.hpp"

namespace eef1::neural {

// Models trained with different lambda values land in different local
// optima; the bag keeps all of them and lets the fairest efficient
// candidate win per instance.
struct BaggedModel {
    std::vector<NetworkParams> members;
};

inline const std::vector<double>& default_lambda_grid() {
    static const std::vector<double> grid{0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
    return grid;
}

// Candidate selection: among EF1 candidates take the max welfare one
// (tie: lowest index); if none is EF1, take the minimum ef1 penalty
// (tie: max welfare, then lowest index).
inline std::size_t select_allocation(const Instance& inst, const std::vector<Allocation>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("select_allocation: no candidates");
    std::size_t best = candidates.size();
    double best_sw = -std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
        if (!check_ef1(inst, candidates[idx])) continue;
        double sw = social_welfare(inst, candidates[idx]);
        if (best == candidates.size() || sw > best_sw) {
            best = idx;
            best_sw = sw;
        }
    }
    if (best != candidates.size()) return best;

    double best_pen = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
        double pen = ef1_penalty(inst, to_fractional(candidates[idx], inst.n));
        double sw = social_welfare(inst, candidates[idx]);
        if (pen < best_pen || (pen == best_pen && sw > best_sw)) {
            best = idx;
            best_pen = pen;
            best_sw = sw;
        }
    }
    return best;
}

inline Allocation bag_predict(const BaggedModel& bag, const Instance& inst) {
    if (bag.members.empty()) throw std::invalid_argument("bag_predict: empty bag");
    std::vector<Allocation> candidates;
    candidates.reserve(bag.members.size());
    for (const NetworkParams& member : bag.members) candidates.push_back(discretize(forward(member, inst)));
    return candidates[select_allocation(inst, candidates)];
}

// Bag manifest: JSON listing member model files (paths relative to the
// manifest's directory) and their lambdas.
inline void save_bag_manifest(const std::string& path, const std::vector<std::string>& model_paths,
                              const std::vector<double>& lambdas) {
    if (model_paths.size() != lambdas.size())
        throw std::invalid_argument("save_bag_manifest: paths/lambdas size mismatch");
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t i = 0; i < model_paths.size(); ++i)
        members.push_back({{"path", model_paths[i]}, {"lambda", lambdas[i]}});
    nlohmann::json doc{{"members", members}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << doc.dump(2) << '\n';
}

inline BaggedModel load_bag(const std::string& manifest_path) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open bag manifest: " + manifest_path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.contains("members"))
        throw std::runtime_error("malformed bag manifest: " + manifest_path);

    std::string dir;
    if (auto slash = manifest_path.find_last_of('/'); slash != std::string::npos)
        dir = manifest_path.substr(0, slash + 1);

    std::vector<std::string> missing;
    BaggedModel bag;
    for (const auto& member : doc.at("members")) {
        std::string rel = member.at("path").get<std::string>();
        std::string full = rel.starts_with('/') ? rel : dir + rel;
        std::ifstream probe(full, std::ios::binary);
        if (!probe) {
            missing.push_back(full);
            continue;
        }
        probe.close();
        bag.members.push_back(load_model(full));
    }
    if (!missing.empty()) {
        std::string msg = "bag manifest references missing model files:";
        for (const std::string& path : missing) msg += " " + path;
        throw std::runtime_error(msg);
    }
    if (bag.members.empty()) throw std::runtime_error("bag manifest lists no members: " + manifest_path);
    return bag;
}

}  // namespace eef1::neural
