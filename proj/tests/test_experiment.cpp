#include <gtest/gtest.h>

#include <sstream>

#include "ledfit/experiment.hpp"
#include "ledfit/generator.hpp"

using namespace ledfit;

namespace {

std::vector<NamedInstance> small_dataset(std::size_t n, std::uint64_t seed) {
    std::vector<NamedInstance> out;
    const auto ds = generate_dataset(n, seed);
    for (std::size_t i = 0; i < ds.size(); ++i)
        out.push_back({instance_file_name(i), ds[i].samples});
    return out;
}

TEST(RunSuite, OneRecordPerCell) {
    const auto instances = small_dataset(3, 901);
    const auto configs = table1_configs(0.0005);
    const auto records = run_suite(configs, instances, 17, 2);
    ASSERT_EQ(records.size(), configs.size() * instances.size());
    for (std::size_t ci = 0; ci < configs.size(); ++ci)
        for (std::size_t ii = 0; ii < instances.size(); ++ii) {
            const RunRecord& r = records[ci * instances.size() + ii];
            EXPECT_EQ(r.config_name, configs[ci].name);
            EXPECT_EQ(r.instance_id, instances[ii].id);
            EXPECT_GE(r.best_rmsp, 0.0);
        }
}

TEST(RunSuite, ThreadCountDoesNotChangeResults) {
    const auto instances = small_dataset(2, 902);
    std::vector<AlgorithmConfig> configs = {table1_configs(0.0005)[0], table1_configs(0.0005)[2]};
    const auto serial = run_suite(configs, instances, 23, 1);
    const auto parallel = run_suite(configs, instances, 23, 4);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(serial[i].best_rmsp, parallel[i].best_rmsp);  // bitwise
        EXPECT_EQ(serial[i].evaluations, parallel[i].evaluations);
        EXPECT_EQ(serial[i].seed, parallel[i].seed);
    }
}

TEST(RunSuite, RerunIsIdentical) {
    const auto instances = small_dataset(2, 903);
    std::vector<AlgorithmConfig> configs = {table1_configs(0.0005)[1]};
    const auto a = run_suite(configs, instances, 5, 2);
    const auto b = run_suite(configs, instances, 5, 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].best_rmsp, b[i].best_rmsp);
        for (int j = 0; j < kParamCount; ++j)
            EXPECT_EQ(a[i].best_params.component(j), b[i].best_params.component(j));
    }
}

TEST(Records, CsvRoundTrip) {
    const auto instances = small_dataset(2, 904);
    std::vector<AlgorithmConfig> configs = {table1_configs(0.0005)[0]};
    const auto records = run_suite(configs, instances, 31, 2);

    std::ostringstream out;
    RecordWriteOptions opts;
    opts.seed = 31;
    opts.command = "test";
    write_records(out, records, opts);

    std::istringstream in(out.str());
    const auto table = csv::read_table(in);
    const auto back = read_records(table);
    ASSERT_EQ(back.size(), records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        EXPECT_EQ(back[i].config_name, records[i].config_name);
        EXPECT_EQ(back[i].instance_id, records[i].instance_id);
        EXPECT_EQ(back[i].best_rmsp, records[i].best_rmsp);  // 17 significant digits round-trip
    }
}

TEST(Records, DefaultOutputHasNoTimestampOrTiming) {
    std::ostringstream out;
    write_records(out, {}, {});
    EXPECT_EQ(out.str().find("generated"), std::string::npos);
    EXPECT_EQ(out.str().find("wall_seconds"), std::string::npos);
}

TEST(Csv, LenientNumberParsing) {
    EXPECT_DOUBLE_EQ(csv::parse_double("27,996"), 27.996);   // decimal comma normalized
    EXPECT_DOUBLE_EQ(csv::parse_double(" 45.8986 "), 45.8986);
    EXPECT_THROW(csv::parse_double("abc"), std::runtime_error);
}

TEST(Csv, QuotedFieldsSplit) {
    const auto f = csv::split_line("a,\"27,996\",c");
    ASSERT_EQ(f.size(), 3u);
    EXPECT_EQ(f[1], "27,996");
}

}  // namespace
