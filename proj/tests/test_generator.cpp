#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ledfit/generator.hpp"
#include "ledfit/newton.hpp"

using namespace ledfit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(GenerateInstance, DrawsLieOnGeneratorGrids) {
    Rng rng(71);
    for (int trial = 0; trial < 100; ++trial) {
        const ArtificialInstance inst = generate_instance(rng);
        for (int k = 0; k < kTerms; ++k) {
            EXPECT_NEAR(inst.grid_truth.a[k] * 1000.0, std::round(inst.grid_truth.a[k] * 1000.0), 1e-9);
            EXPECT_NEAR(inst.grid_truth.b[k] * 100.0, std::round(inst.grid_truth.b[k] * 100.0), 1e-6);
            EXPECT_NEAR(inst.grid_truth.c[k] * 10.0, std::round(inst.grid_truth.c[k] * 10.0), 1e-9);
            EXPECT_GE(inst.grid_truth.b[k], 0.0);
            EXPECT_LE(inst.grid_truth.b[k], 90.0);
            EXPECT_LE(inst.grid_truth.c[k], 10.0);
        }
    }
}

TEST(GenerateInstance, ZeroErrorByConstruction) {
    Rng rng(72);
    for (int trial = 0; trial < 100; ++trial) {
        const ArtificialInstance inst = generate_instance(rng);
        EXPECT_LT(rms(inst.truth, inst.samples), 1e-10);
        EXPECT_EQ(inst.samples.size(), 91u);
        EXPECT_GT(inst.samples.i_max, 0.0);
    }
}

TEST(GenerateInstance, NewtonFromTruthStaysAtFloor) {
    Rng rng(73);
    for (int trial = 0; trial < 20; ++trial) {
        const ArtificialInstance inst = generate_instance(rng);
        const FitResult fit = newton_optimize(inst.truth, inst.samples);
        EXPECT_LE(fit.rms, 1e-10);
    }
}

TEST(GenerateDataset, ReproducibleFromMasterSeed) {
    const auto a = generate_dataset(100, 424242);
    const auto b = generate_dataset(100, 424242);
    ASSERT_EQ(a.size(), 100u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].seed, b[i].seed);
        for (std::size_t j = 0; j < 91; ++j)
            EXPECT_EQ(a[i].samples.candela[j], b[i].samples.candela[j]);
    }
}

TEST(GenerateDataset, EmptyDatasetWritesHeaderOnlyManifest) {
    const fs::path dir = fs::temp_directory_path() / "ledfit_test_empty";
    fs::remove_all(dir);
    write_dataset(dir, {});
    const std::string manifest = slurp(dir / "manifest.csv");
    EXPECT_NE(manifest.find("index,seed"), std::string::npos);
    std::istringstream in(manifest);
    std::string line;
    int data_rows = 0;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#' && line.rfind("index,", 0) != 0) ++data_rows;
    EXPECT_EQ(data_rows, 0);
    fs::remove_all(dir);
}

TEST(GenerateDataset, RegenerationIsByteIdentical) {
    const fs::path d1 = fs::temp_directory_path() / "ledfit_test_ds1";
    const fs::path d2 = fs::temp_directory_path() / "ledfit_test_ds2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    const auto ds = generate_dataset(5, 99);
    write_dataset(d1, ds, {}, 99);
    write_dataset(d2, generate_dataset(5, 99), {}, 99);
    for (int i = 0; i < 5; ++i) {
        const std::string name = instance_file_name(i);
        EXPECT_EQ(slurp(d1 / name), slurp(d2 / name)) << name;
    }
    EXPECT_EQ(slurp(d1 / "manifest.csv"), slurp(d2 / "manifest.csv"));
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST(GenerateDataset, FilesSurviveRoundTripWithinRoundingFloor) {
    const fs::path dir = fs::temp_directory_path() / "ledfit_test_rt";
    fs::remove_all(dir);
    const auto ds = generate_dataset(20, 1234);
    write_dataset(dir, ds, {}, 1234);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::ifstream in(dir / instance_file_name(i));
        const IntensitySamples back = extract_plane(parse_ies(in), 0);
        // full-precision serialization: bit-exact recovery
        for (std::size_t j = 0; j < 91; ++j)
            EXPECT_EQ(back.candela[j], ds[i].samples.candela[j]);
        EXPECT_LT(rmsp(ds[i].truth, back), 1e-3);
    }
    fs::remove_all(dir);
}

TEST(GenerateDataset, ManifestRecordsUsableTruth) {
    const fs::path dir = fs::temp_directory_path() / "ledfit_test_manifest";
    fs::remove_all(dir);
    const auto ds = generate_dataset(3, 5150);
    write_dataset(dir, ds, {}, 5150);
    const auto table = csv::read_table_file((dir / "manifest.csv").string());
    ASSERT_EQ(table.rows.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& row = table.rows[i];
        ModelParams truth;
        for (int k = 0; k < kTerms; ++k) {
            truth.a[k] = csv::parse_double(row[table.column("a" + std::to_string(k + 1))]);
            truth.b[k] = csv::parse_double(row[table.column("b" + std::to_string(k + 1))]);
            truth.c[k] = csv::parse_double(row[table.column("c" + std::to_string(k + 1))]);
        }
        std::ifstream in(dir / row[table.column("file")]);
        const IntensitySamples s = extract_plane(parse_ies(in), 0);
        EXPECT_LT(rmsp(truth, s), 1e-3);
    }
    fs::remove_all(dir);
}

}  // namespace
