// eef1lab: command-line front door for the fair-division laboratory.
//
// Subcommands: gen, baseline, oracle, train, bag-train, eval, converge,
// experiment. Every run writes its outputs under --out together with a
// <command>_manifest.json recording the full flag set, seed, code version,
// output paths and wall-clock. With --threads 1 all outputs are
// byte-reproducible from the manifest's flags.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eef1/baselines.hpp"
#include "eef1/core.hpp"
#include "eef1/dataset.hpp"
#include "eef1/experiments.hpp"
#include "eef1/fairness.hpp"
#include "eef1/harness.hpp"
#include "eef1/io_util.hpp"
#include "eef1/neural/bag.hpp"
#include "eef1/neural/model_io.hpp"
#include "eef1/neural/train.hpp"
#include "eef1/oracle.hpp"
#include "eef1/parallel.hpp"
#include "eef1/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    int agents = 2;
    int items = 4;
    std::string dist = "uniform-goods";
    std::uint64_t samples = 100;
    std::uint64_t seed = 0;
    std::string out = "out";
    int threads = eef1::threads_from_env(1);
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_instance_shape = true) {
    if (with_instance_shape) {
        cmd->add_option("--agents", opts.agents, "number of agents n")->check(CLI::PositiveNumber);
        cmd->add_option("--items", opts.items, "number of items m")->check(CLI::PositiveNumber);
        cmd->add_option("--dist", opts.dist, "valuation distribution")
            ->check(CLI::IsMember({"uniform-goods", "uniform-chores", "uniform-mixed", "gaussian", "lognormal",
                                   "exponential"}));
    }
    cmd->add_option("--samples", opts.samples, "number of instances")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", opts.seed, "base RNG seed");
    cmd->add_option("--out", opts.out, "output directory");
    cmd->add_option("--threads", opts.threads, "worker threads (1 = bit-deterministic)")->check(CLI::PositiveNumber);
}

struct TrainOpts {
    double lambda = 1.0;
    int epochs = 100;
    int batch = 256;
    double lr = 0.001;
    double temperature = 0.01;
    int series = 3;
    int convs_per_series = 4;
    int hidden = 32;
    std::string envy_mode = "ef";
};

void add_train(CLI::App* cmd, TrainOpts& opts, bool with_lambda = true) {
    if (with_lambda) cmd->add_option("--lambda", opts.lambda, "fairness multiplier")->check(CLI::NonNegativeNumber);
    cmd->add_option("--epochs", opts.epochs, "training epochs")->check(CLI::NonNegativeNumber);
    cmd->add_option("--batch", opts.batch, "mini-batch size")->check(CLI::PositiveNumber);
    cmd->add_option("--lr", opts.lr, "Adam learning rate")->check(CLI::PositiveNumber);
    cmd->add_option("--temperature", opts.temperature, "softmax temperature")->check(CLI::PositiveNumber);
    cmd->add_option("--series", opts.series, "Conv-UpConv series count")->check(CLI::PositiveNumber);
    cmd->add_option("--convs-per-series", opts.convs_per_series, "convolutions per series")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--hidden", opts.hidden, "hidden channels")->check(CLI::PositiveNumber);
    cmd->add_option("--envy-mode", opts.envy_mode, "envy term in the loss")->check(CLI::IsMember({"ef", "ef1"}));
}

eef1::neural::ArchConfig arch_from(const TrainOpts& t) {
    eef1::neural::ArchConfig arch;
    arch.series = t.series;
    arch.convs_per_series = t.convs_per_series;
    arch.hidden_channels = t.hidden;
    arch.temperature = t.temperature;
    return arch;
}

eef1::neural::TrainConfig train_config_from(const TrainOpts& t, const CommonOpts& c) {
    eef1::neural::TrainConfig cfg;
    cfg.learning_rate = t.lr;
    cfg.batch_size = t.batch;
    cfg.epochs = t.epochs;
    cfg.lambda = t.lambda;
    cfg.envy_mode = eef1::neural::envy_mode_from_name(t.envy_mode);
    cfg.seed = c.seed;
    return cfg;
}

// Every run is recorded; outputs listed here are the byte-reproducible
// artifacts (the manifest itself carries wall-clock and is not one).
class Manifest {
public:
    Manifest(std::string command, const CommonOpts& common) : command_(std::move(command)) {
        start_ = std::chrono::steady_clock::now();
        flags_["seed"] = common.seed;
        flags_["out"] = common.out;
        flags_["threads"] = common.threads;
        flags_["samples"] = common.samples;
        seed_ = common.seed;
        out_dir_ = common.out;
    }

    void flag(const std::string& key, const json& value) { flags_[key] = value; }
    void output(const std::string& path) { outputs_.push_back(path); }

    void write() const {
        const auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_);
        json doc{{"command", command_},     {"flags", flags_},     {"seed", seed_},
                 {"version", eef1::kVersion}, {"outputs", outputs_}, {"wall_clock_ms", elapsed.count()}};
        const std::string path = out_dir_ + "/" + command_ + "_manifest.json";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + path);
        out << doc.dump(2) << '\n';
    }

private:
    std::string command_;
    json flags_ = json::object();
    std::vector<std::string> outputs_;
    std::uint64_t seed_ = 0;
    std::string out_dir_;
    std::chrono::steady_clock::time_point start_;
};

std::vector<eef1::Instance> materialize(const CommonOpts& c, const std::string& data_file) {
    if (!data_file.empty()) return eef1::read_dataset(data_file);
    eef1::DistributionSpec spec{eef1::dist_from_name(c.dist), c.seed};
    std::vector<eef1::Instance> out(c.samples);
    eef1::parallel_for(c.samples, c.threads,
                       [&](std::size_t k) { out[k] = eef1::sample_instance(spec, c.agents, c.items, k); });
    return out;
}

eef1::Allocator allocator_by_name(const std::string& name, const std::string& models_dir) {
    if (name == "muw") return eef1::muw_allocator();
    if (name == "rr") return eef1::rr_allocator();
    if (name == "drr") return eef1::drr_allocator();
    if (name == "crr") return eef1::crr_allocator();
    if (name == "bag") {
        if (models_dir.empty()) throw std::runtime_error("--alg bag requires --models-dir");
        auto bag = std::make_shared<eef1::neural::BaggedModel>(eef1::neural::load_bag(models_dir + "/bag.json"));
        return {"nn", [bag](const eef1::Instance& inst) { return eef1::neural::bag_predict(*bag, inst); }};
    }
    throw std::runtime_error("unknown algorithm: " + name);
}

json metrics_to_json(const eef1::MetricsReport& r) {
    json j{{"alpha_ef1", r.alpha_ef1},     {"alpha_ef", r.alpha_ef},       {"beta_sw", r.beta_sw},
           {"mean_sw_alg", r.mean_sw_alg}, {"mean_sw_muw", r.mean_sw_muw}, {"samples", r.samples}};
    if (r.alpha_efx) j["alpha_efx"] = *r.alpha_efx;
    return j;
}

void write_json(const std::string& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << doc.dump(2) << '\n';
}

int cmd_gen(const CommonOpts& c) {
    fs::create_directories(c.out);
    Manifest manifest("gen", c);
    manifest.flag("agents", c.agents);
    manifest.flag("items", c.items);
    manifest.flag("dist", c.dist);

    std::vector<eef1::Instance> batch = materialize(c, "");
    const std::string path = c.out + "/dataset.jsonl";
    eef1::write_dataset(path, batch);
    manifest.output(path);
    manifest.write();
    std::cout << "wrote " << batch.size() << " instances to " << path << "\n";
    return 0;
}

int cmd_baseline(const CommonOpts& c, const std::string& alg_name, const std::string& data_file) {
    fs::create_directories(c.out);
    Manifest manifest("baseline", c);
    manifest.flag("alg", alg_name);
    manifest.flag("data", data_file);
    manifest.flag("agents", c.agents);
    manifest.flag("items", c.items);
    manifest.flag("dist", c.dist);

    eef1::Allocator alg = allocator_by_name(alg_name, "");
    std::vector<eef1::Instance> batch = materialize(c, data_file);

    struct Row {
        eef1::Allocation alloc;
        double sw = 0.0;
        bool ef1 = false;
        std::string error;
    };
    std::vector<Row> rows(batch.size());
    eef1::parallel_for(batch.size(), c.threads, [&](std::size_t k) {
        try {
            rows[k].alloc = alg.run(batch[k]);
            rows[k].sw = eef1::social_welfare(batch[k], rows[k].alloc);
            rows[k].ef1 = eef1::check_ef1(batch[k], rows[k].alloc);
        } catch (const std::exception& e) {
            rows[k].error = e.what();
        }
    });

    const std::string path = c.out + "/allocations.jsonl";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    std::uint64_t ef1_count = 0;
    double sw_sum = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (!rows[k].error.empty()) throw std::runtime_error(alg.name + ": " + rows[k].error);
        out << json{{"index", k}, {"assign", rows[k].alloc.assign}, {"sw", rows[k].sw}, {"ef1", rows[k].ef1}}.dump()
            << '\n';
        ef1_count += rows[k].ef1;
        sw_sum += rows[k].sw;
    }
    out.close();
    manifest.output(path);

    const std::string summary_path = c.out + "/baseline_summary.json";
    write_json(summary_path, json{{"alg", alg.name},
                                  {"samples", rows.size()},
                                  {"alpha_ef1", static_cast<double>(ef1_count) / rows.size()},
                                  {"mean_sw", sw_sum / rows.size()}});
    manifest.output(summary_path);
    manifest.write();
    std::cout << "alpha_ef1 " << static_cast<double>(ef1_count) / rows.size() << " over " << rows.size()
              << " instances\n";
    return 0;
}

int cmd_oracle(const CommonOpts& c, std::uint64_t cap) {
    fs::create_directories(c.out);
    Manifest manifest("oracle", c);
    manifest.flag("agents", c.agents);
    manifest.flag("items", c.items);
    manifest.flag("dist", c.dist);
    manifest.flag("cap", cap);

    std::vector<eef1::Instance> batch = materialize(c, "");
    std::vector<eef1::OracleResult> results(batch.size());
    std::vector<std::string> errors(batch.size());
    eef1::parallel_for(batch.size(), c.threads, [&](std::size_t k) {
        try {
            results[k] = eef1::exact_eef1(batch[k], cap);
        } catch (const std::exception& e) {
            errors[k] = e.what();
        }
    });

    const std::string path = c.out + "/oracle.jsonl";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    double rate_sum = 0.0;
    for (std::size_t k = 0; k < results.size(); ++k) {
        if (!errors[k].empty()) throw std::runtime_error(errors[k]);
        const eef1::OracleResult& r = results[k];
        out << json{{"index", k},
                    {"assign", r.best->assign},
                    {"welfare", r.welfare},
                    {"ef1_count", r.ef1_count},
                    {"total", r.total}}
                   .dump()
            << '\n';
        rate_sum += static_cast<double>(r.ef1_count) / static_cast<double>(r.total);
    }
    out.close();
    manifest.output(path);

    const std::string summary_path = c.out + "/oracle_summary.json";
    write_json(summary_path, json{{"samples", results.size()}, {"mean_ef1_rate", rate_sum / results.size()}});
    manifest.output(summary_path);
    manifest.write();
    std::cout << "mean exact EF1 rate " << rate_sum / results.size() << "\n";
    return 0;
}

int cmd_train(const CommonOpts& c, const TrainOpts& t, const std::string& data_file) {
    fs::create_directories(c.out);
    Manifest manifest("train", c);
    manifest.flag("agents", c.agents);
    manifest.flag("items", c.items);
    manifest.flag("dist", c.dist);
    manifest.flag("data", data_file);
    manifest.flag("lambda", t.lambda);
    manifest.flag("epochs", t.epochs);
    manifest.flag("batch", t.batch);
    manifest.flag("lr", t.lr);
    manifest.flag("temperature", t.temperature);
    manifest.flag("series", t.series);
    manifest.flag("convs_per_series", t.convs_per_series);
    manifest.flag("hidden", t.hidden);
    manifest.flag("envy_mode", t.envy_mode);

    std::vector<eef1::Instance> data = materialize(c, data_file);
    eef1::neural::TrainConfig cfg = train_config_from(t, c);
    std::vector<double> losses;
    cfg.on_epoch = [&](int epoch, double loss) {
        losses.push_back(loss);
        if ((epoch + 1) % 10 == 0) std::cout << "epoch " << epoch + 1 << " loss " << loss << "\n";
    };
    eef1::neural::NetworkParams params = eef1::neural::train(data, arch_from(t), cfg);

    eef1::neural::TrainingMeta meta;
    meta.learning_rate = cfg.learning_rate;
    meta.beta1 = cfg.beta1;
    meta.beta2 = cfg.beta2;
    meta.epsilon = cfg.epsilon;
    const std::string model_path = c.out + "/model.bin";
    eef1::neural::save_model(params, model_path, meta);
    manifest.output(model_path);

    const std::string summary_path = c.out + "/train_summary.json";
    write_json(summary_path,
               json{{"lambda", t.lambda}, {"epochs", t.epochs}, {"epoch_loss", losses}, {"model", "model.bin"}});
    manifest.output(summary_path);
    manifest.write();
    std::cout << "saved " << model_path << "\n";
    return 0;
}

int cmd_bag_train(const CommonOpts& c, const TrainOpts& t, const std::string& lambdas_csv,
                  const std::string& data_file) {
    fs::create_directories(c.out);
    Manifest manifest("bag-train", c);
    manifest.flag("agents", c.agents);
    manifest.flag("items", c.items);
    manifest.flag("dist", c.dist);
    manifest.flag("data", data_file);
    manifest.flag("lambdas", lambdas_csv);
    manifest.flag("epochs", t.epochs);
    manifest.flag("batch", t.batch);
    manifest.flag("lr", t.lr);
    manifest.flag("temperature", t.temperature);
    manifest.flag("series", t.series);
    manifest.flag("convs_per_series", t.convs_per_series);
    manifest.flag("hidden", t.hidden);
    manifest.flag("envy_mode", t.envy_mode);

    std::vector<double> lambdas;
    if (lambdas_csv.empty()) {
        lambdas = eef1::neural::default_lambda_grid();
    } else {
        std::size_t pos = 0;
        while (pos < lambdas_csv.size()) {
            std::size_t comma = lambdas_csv.find(',', pos);
            if (comma == std::string::npos) comma = lambdas_csv.size();
            lambdas.push_back(std::stod(lambdas_csv.substr(pos, comma - pos)));
            pos = comma + 1;
        }
    }

    std::vector<eef1::Instance> data = materialize(c, data_file);
    std::vector<std::string> names(lambdas.size());
    std::vector<std::string> errors(lambdas.size());

    // members train independently on member-index-derived seeds
    eef1::parallel_for(lambdas.size(), c.threads, [&](std::size_t member) {
        try {
            eef1::neural::TrainConfig cfg = train_config_from(t, c);
            cfg.lambda = lambdas[member];
            cfg.seed = eef1::rng::stream_seed(c.seed, member);
            eef1::neural::NetworkParams params = eef1::neural::train(data, arch_from(t), cfg);
            eef1::neural::TrainingMeta meta;
            meta.learning_rate = cfg.learning_rate;
            names[member] = "model_" + std::to_string(member) + ".bin";
            eef1::neural::save_model(params, c.out + "/" + names[member], meta);
        } catch (const std::exception& e) {
            errors[member] = e.what();
        }
    });
    for (const std::string& err : errors)
        if (!err.empty()) throw std::runtime_error(err);

    for (const std::string& name : names) manifest.output(c.out + "/" + name);
    const std::string bag_path = c.out + "/bag.json";
    eef1::neural::save_bag_manifest(bag_path, names, lambdas);
    manifest.output(bag_path);
    manifest.write();
    std::cout << "trained " << lambdas.size() << " members; bag manifest " << bag_path << "\n";
    return 0;
}

int cmd_eval(const CommonOpts& c, const std::string& alg_name, const std::string& models_dir) {
    fs::create_directories(c.out);
    Manifest manifest("eval", c);
    manifest.flag("alg", alg_name);
    manifest.flag("agents", c.agents);
    manifest.flag("items", c.items);
    manifest.flag("dist", c.dist);
    manifest.flag("models_dir", models_dir);

    eef1::Allocator alg = allocator_by_name(alg_name, models_dir);
    eef1::DistributionSpec spec{eef1::dist_from_name(c.dist), c.seed};
    eef1::MetricsReport r = eef1::evaluate(alg, spec, c.agents, c.items, c.samples, c.threads);

    const std::string csv_path =
        c.out + "/eval_" + alg.name + "_" + c.dist + "_n" + std::to_string(c.agents) + ".csv";
    eef1::CsvWriter csv(csv_path);
    csv.row({"alg", "n", "m", "dist", "alpha_ef1", "beta_sw", "samples", "seed"});
    csv.row({alg.name, std::to_string(c.agents), std::to_string(c.items), c.dist, eef1::format_double(r.alpha_ef1),
             eef1::format_double(r.beta_sw), std::to_string(c.samples), std::to_string(c.seed)});
    manifest.output(csv_path);

    const std::string summary_path = c.out + "/eval_summary.json";
    write_json(summary_path, metrics_to_json(r));
    manifest.output(summary_path);
    manifest.write();
    std::cout << "alpha_ef1 " << r.alpha_ef1 << " beta_sw " << r.beta_sw << "\n";
    return 0;
}

int cmd_converge(const CommonOpts& c, const std::string& alg_name, const std::string& models_dir, int m_start,
                 int m_stop, int m_step, double alpha_min, std::optional<double> beta_min,
                 std::optional<double> beta_max) {
    fs::create_directories(c.out);
    Manifest manifest("converge", c);
    manifest.flag("alg", alg_name);
    manifest.flag("agents", c.agents);
    manifest.flag("dist", c.dist);
    manifest.flag("m_start", m_start);
    manifest.flag("m_stop", m_stop);
    manifest.flag("m_step", m_step);
    manifest.flag("alpha_min", alpha_min);

    eef1::Allocator alg = allocator_by_name(alg_name, models_dir);
    eef1::DistributionSpec spec{eef1::dist_from_name(c.dist), c.seed};
    eef1::ConvergenceThresholds thresholds = eef1::ConvergenceThresholds::for_dist(spec.kind);
    thresholds.alpha_min = alpha_min;
    if (beta_min) {
        thresholds.beta_min = *beta_min;
        manifest.flag("beta_min", *beta_min);
    }
    if (beta_max) {
        thresholds.beta_max = *beta_max;
        manifest.flag("beta_max", *beta_max);
    }

    eef1::ConvergenceResult r = eef1::find_m_star(alg, spec, c.agents, eef1::make_grid(m_start, m_stop, m_step),
                                                  c.samples, thresholds, c.threads);

    const std::string csv_path =
        c.out + "/converge_" + alg.name + "_" + c.dist + "_n" + std::to_string(c.agents) + ".csv";
    eef1::CsvWriter csv(csv_path);
    csv.row({"alg", "n", "m", "dist", "alpha_ef1", "beta_sw", "samples", "seed"});
    for (const auto& [m, report] : r.grid)
        csv.row({alg.name, std::to_string(c.agents), std::to_string(m), c.dist,
                 eef1::format_double(report.alpha_ef1), eef1::format_double(report.beta_sw),
                 std::to_string(c.samples), std::to_string(c.seed)});
    manifest.output(csv_path);

    json summary{{"alg", alg.name}, {"n", c.agents}, {"dist", c.dist}, {"samples", c.samples}};
    if (r.m_star)
        summary["m_star"] = *r.m_star;
    else
        summary["m_star"] = nullptr;
    const std::string summary_path = c.out + "/converge_summary.json";
    write_json(summary_path, summary);
    manifest.output(summary_path);
    manifest.write();
    if (r.m_star)
        std::cout << "m_star " << *r.m_star << "\n";
    else
        std::cout << "condition not satisfied on the grid\n";
    return 0;
}

int cmd_experiment(const CommonOpts& c, const std::string& kind, const std::vector<int>& n_list, int m_start,
                   int m_stop, int m_step, const std::string& models_dir) {
    fs::create_directories(c.out);
    Manifest manifest("experiment", c);
    manifest.flag("kind", kind);
    manifest.flag("agents", c.agents);
    manifest.flag("n_list", n_list);
    manifest.flag("m_start", m_start);
    manifest.flag("m_stop", m_stop);
    manifest.flag("m_step", m_step);
    manifest.flag("models_dir", models_dir);

    eef1::ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.n = c.agents;
    if (!n_list.empty()) cfg.n_list = n_list;
    if (m_stop > 0) cfg.m_grid = eef1::make_grid(m_start, m_stop, m_step);
    cfg.samples = c.samples;
    cfg.seed = c.seed;
    cfg.out_dir = c.out;
    if (!models_dir.empty()) cfg.bag_manifest = models_dir + "/bag.json";
    cfg.threads = c.threads;

    eef1::ExperimentOutput out = eef1::run_experiment(cfg);
    for (const std::string& f : out.files) manifest.output(f);
    manifest.write();
    std::cout << "wrote " << out.files.size() << " files under " << c.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"eef1lab: fair-division laboratory (EF1 allocation algorithms, exact oracle, neural allocator)"};
    app.require_subcommand(1);

    CommonOpts common;
    TrainOpts train_opts;
    std::string alg = "muw";
    std::string data_file;
    std::string models_dir;
    std::string lambdas_csv;
    std::uint64_t oracle_cap = eef1::kDefaultOracleCap;
    int m_start = 10, m_stop = 0, m_step = 10;
    double alpha_min = 0.99;
    std::optional<double> beta_min, beta_max;
    std::vector<int> n_list;
    std::string exp_kind = "exp1";

    CLI::App* gen = app.add_subcommand("gen", "emit a JSONL dataset of sampled instances");
    add_common(gen, common);

    CLI::App* baseline = app.add_subcommand("baseline", "run a classical allocator over a dataset or sampler");
    add_common(baseline, common);
    baseline->add_option("--alg", alg, "muw|rr|drr|crr")->check(CLI::IsMember({"muw", "rr", "drr", "crr"}));
    baseline->add_option("--data", data_file, "JSONL dataset path (overrides the sampler)");

    CLI::App* oracle = app.add_subcommand("oracle", "exact EEF1 enumeration on tiny instances");
    add_common(oracle, common);
    oracle->add_option("--cap", oracle_cap, "maximum n^m to enumerate");

    CLI::App* train = app.add_subcommand("train", "train a single allocator network");
    add_common(train, common);
    add_train(train, train_opts);
    train->add_option("--data", data_file, "JSONL dataset path (overrides the sampler)");

    CLI::App* bag_train = app.add_subcommand("bag-train", "train a bag of networks over a lambda grid");
    add_common(bag_train, common);
    add_train(bag_train, train_opts, false);
    bag_train->add_option("--lambdas", lambdas_csv, "comma-separated lambda grid (default 7 values in [0.1,2])");
    bag_train->add_option("--data", data_file, "JSONL dataset path (overrides the sampler)");

    CLI::App* eval = app.add_subcommand("eval", "Monte-Carlo metrics for an allocator or bag");
    add_common(eval, common);
    eval->add_option("--alg", alg, "muw|rr|drr|crr|bag")->check(CLI::IsMember({"muw", "rr", "drr", "crr", "bag"}));
    eval->add_option("--models-dir", models_dir, "directory holding bag.json and member models");

    CLI::App* converge = app.add_subcommand("converge", "search the smallest m meeting convergence thresholds");
    add_common(converge, common);
    converge->add_option("--alg", alg, "muw|rr|drr|crr|bag")
        ->check(CLI::IsMember({"muw", "rr", "drr", "crr", "bag"}));
    converge->add_option("--models-dir", models_dir, "directory holding bag.json and member models");
    converge->add_option("--m-start", m_start, "grid start")->check(CLI::PositiveNumber);
    converge->add_option("--m-stop", m_stop, "grid stop (inclusive)")->check(CLI::PositiveNumber);
    converge->add_option("--m-step", m_step, "grid step")->check(CLI::PositiveNumber);
    converge->add_option("--alpha-min", alpha_min, "EF1 rate threshold");
    converge->add_option("--beta-min", beta_min, "beta lower threshold (default 0.99 for goods)");
    converge->add_option("--beta-max", beta_max, "beta upper threshold (default 1.02 for chores)");

    CLI::App* experiment = app.add_subcommand("experiment", "run exp1|exp2|exp3 sweeps and emit CSV panels");
    add_common(experiment, common);
    experiment->add_option("--kind", exp_kind, "exp1|exp2|exp3")->check(CLI::IsMember({"exp1", "exp2", "exp3"}));
    experiment->add_option("--n-list", n_list, "agent counts for exp3");
    experiment->add_option("--m-start", m_start, "m grid start")->check(CLI::PositiveNumber);
    experiment->add_option("--m-stop", m_stop, "m grid stop (0 = default grid)");
    experiment->add_option("--m-step", m_step, "m grid step")->check(CLI::PositiveNumber);
    experiment->add_option("--models-dir", models_dir, "directory holding bag.json for NN panels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_gen(common);
        if (baseline->parsed()) return cmd_baseline(common, alg, data_file);
        if (oracle->parsed()) return cmd_oracle(common, oracle_cap);
        if (train->parsed()) return cmd_train(common, train_opts, data_file);
        if (bag_train->parsed()) return cmd_bag_train(common, train_opts, lambdas_csv, data_file);
        if (eval->parsed()) return cmd_eval(common, alg, models_dir);
        if (converge->parsed()) {
            if (m_stop <= 0) throw std::runtime_error("converge requires --m-stop");
            return cmd_converge(common, alg, models_dir, m_start, m_stop, m_step, alpha_min, beta_min, beta_max);
        }
        if (experiment->parsed())
            return cmd_experiment(common, exp_kind, n_list, m_start, m_stop, m_step, models_dir);
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", {{"message", e.what()}}}}.dump() << "\n";
        return 1;
    }
    return 2;
}
