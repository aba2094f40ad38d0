#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "eef1/core.hpp"
#include "eef1/neural/bag.hpp"
#include "eef1/neural/model_io.hpp"
#include "eef1/neural/train.hpp"

using namespace eef1;
using neural::ArchConfig;
using neural::ModelIoError;

namespace {

std::filesystem::path temp_file(const char* name) { return std::filesystem::temp_directory_path() / name; }

neural::NetworkParams make_params() {
    ArchConfig arch;
    arch.series = 1;
    arch.convs_per_series = 2;
    arch.hidden_channels = 6;
    arch.temperature = 0.05;
    neural::NetworkParams params = neural::xavier_init<float>(arch, 31);
    params.lambda = 0.75;
    return params;
}

std::vector<char> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::vector<char>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void spit(const std::filesystem::path& path, const std::vector<char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST(ModelIo, RoundTripIsBitExact) {
    auto path = temp_file("eef1_model_roundtrip.bin");
    neural::NetworkParams params = make_params();
    neural::save_model(params, path.string());
    neural::NetworkParams loaded = neural::load_model(path.string());
    std::filesystem::remove(path);

    EXPECT_EQ(loaded.arch, params.arch);
    EXPECT_DOUBLE_EQ(loaded.lambda, params.lambda);
    ASSERT_EQ(loaded.layers.size(), params.layers.size());
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        EXPECT_EQ(loaded.layers[l].w.data, params.layers[l].w.data);
        EXPECT_EQ(loaded.layers[l].bias, params.layers[l].bias);
    }

    Instance probe = sample_instance({Dist::UniformGoods, 300}, 6, 10);
    EXPECT_EQ(neural::forward(params, probe).p, neural::forward(loaded, probe).p);
}

TEST(ModelIo, TrainingMetaSurvives) {
    auto path = temp_file("eef1_model_meta.bin");
    neural::TrainingMeta meta;
    meta.learning_rate = 0.002;
    meta.beta1 = 0.85;
    neural::save_model(make_params(), path.string(), meta);
    neural::TrainingMeta got;
    neural::load_model(path.string(), &got);
    std::filesystem::remove(path);
    EXPECT_DOUBLE_EQ(got.learning_rate, 0.002);
    EXPECT_DOUBLE_EQ(got.beta1, 0.85);
    EXPECT_DOUBLE_EQ(got.beta2, 0.999);
}

TEST(ModelIo, TruncatedFileFailsChecksum) {
    auto path = temp_file("eef1_model_trunc.bin");
    neural::save_model(make_params(), path.string());
    std::vector<char> bytes = slurp(path);
    bytes.resize(bytes.size() - 10);
    spit(path, bytes);
    try {
        neural::load_model(path.string());
        FAIL() << "expected checksum error";
    } catch (const ModelIoError& e) {
        EXPECT_EQ(e.kind, ModelIoError::Kind::BadChecksum);
    }
    std::filesystem::remove(path);
}

TEST(ModelIo, CorruptedByteFailsChecksum) {
    auto path = temp_file("eef1_model_corrupt.bin");
    neural::save_model(make_params(), path.string());
    std::vector<char> bytes = slurp(path);
    bytes[bytes.size() / 2] ^= 0x40;
    spit(path, bytes);
    try {
        neural::load_model(path.string());
        FAIL() << "expected checksum error";
    } catch (const ModelIoError& e) {
        EXPECT_EQ(e.kind, ModelIoError::Kind::BadChecksum);
    }
    std::filesystem::remove(path);
}

TEST(ModelIo, BadMagicRejected) {
    auto path = temp_file("eef1_model_magic.bin");
    neural::save_model(make_params(), path.string());
    std::vector<char> bytes = slurp(path);
    bytes[0] = 'X';
    spit(path, bytes);
    try {
        neural::load_model(path.string());
        FAIL() << "expected magic error";
    } catch (const ModelIoError& e) {
        EXPECT_EQ(e.kind, ModelIoError::Kind::BadMagic);
    }
    std::filesystem::remove(path);
}

TEST(ModelIo, VersionBumpRejected) {
    auto path = temp_file("eef1_model_version.bin");
    neural::save_model(make_params(), path.string());
    std::vector<char> bytes = slurp(path);
    bytes[4] = 2;  // version field follows the magic
    spit(path, bytes);
    try {
        neural::load_model(path.string());
        FAIL() << "expected version error";
    } catch (const ModelIoError& e) {
        EXPECT_EQ(e.kind, ModelIoError::Kind::BadVersion);
        EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST(ModelIo, MissingFileIsIoError) {
    try {
        neural::load_model("/nonexistent/eef1_model.bin");
        FAIL() << "expected io error";
    } catch (const ModelIoError& e) {
        EXPECT_EQ(e.kind, ModelIoError::Kind::Io);
    }
}

TEST(BagIo, ManifestRoundTrip) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "eef1_bag_test";
    fs::create_directories(dir);

    std::vector<std::string> names;
    std::vector<double> lambdas{0.1, 1.0};
    for (double lambda : lambdas) {
        neural::NetworkParams params = make_params();
        params.lambda = lambda;
        std::string name = "model_" + std::to_string(lambda) + ".bin";
        neural::save_model(params, (dir / name).string());
        names.push_back(name);
    }
    neural::save_bag_manifest((dir / "bag.json").string(), names, lambdas);

    neural::BaggedModel bag = neural::load_bag((dir / "bag.json").string());
    ASSERT_EQ(bag.members.size(), 2u);
    EXPECT_DOUBLE_EQ(bag.members[0].lambda, 0.1);
    EXPECT_DOUBLE_EQ(bag.members[1].lambda, 1.0);
    fs::remove_all(dir);
}

TEST(BagIo, MissingMemberListsPath) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "eef1_bag_missing";
    fs::create_directories(dir);
    neural::save_bag_manifest((dir / "bag.json").string(), {"ghost.bin"}, {0.5});
    try {
        neural::load_bag((dir / "bag.json").string());
        FAIL() << "expected missing-model error";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("ghost.bin"), std::string::npos);
    }
    fs::remove_all(dir);
}
