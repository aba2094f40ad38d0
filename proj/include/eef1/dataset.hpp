#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "eef1/core.hpp"

namespace eef1 {

// Dataset files are JSON lines, one instance per line:
//   {"n": 2, "m": 3, "v": [row-major doubles]}
// nlohmann::json prints doubles with the shortest representation that
// round-trips, so written files reload bit-exactly.

inline nlohmann::json instance_to_json(const Instance& inst) {
    return nlohmann::json{{"n", inst.n}, {"m", inst.m}, {"v", inst.v}};
}

inline Instance instance_from_json(const nlohmann::json& j) {
    int n = j.at("n").get<int>();
    int m = j.at("m").get<int>();
    std::vector<double> v = j.at("v").get<std::vector<double>>();
    return Instance(n, m, std::move(v));
}

inline void write_dataset(const std::string& path, const std::vector<Instance>& instances) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const Instance& inst : instances) out << instance_to_json(inst).dump() << '\n';
}

inline std::vector<Instance> read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::vector<Instance> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed JSON line");
        out.push_back(instance_from_json(j));
    }
    return out;
}

}  // namespace eef1
