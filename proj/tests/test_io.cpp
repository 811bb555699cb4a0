#include <gtest/gtest.h>

#include <sstream>

#include "carma_hawkes/errors.hpp"
#include "carma_hawkes/io.hpp"
#include "carma_hawkes/replicate.hpp"
#include "support/reference_models.hpp"

using namespace carma_hawkes;
using namespace carma_hawkes::testing;
using nlohmann::json;

TEST(SpecJson, UnivariateRoundTrip) {
    const ModelSpec spec = carma31_spec();
    const json doc = to_json(spec);
    EXPECT_EQ(doc["type"], "univariate");
    EXPECT_EQ(doc["b"].size(), 2u);  // padding stripped
    const ModelSpec back = parse_model_spec(doc);
    EXPECT_EQ(spec_hash(back), spec_hash(spec));
}

TEST(SpecJson, BivariateRoundTrip) {
    for (const auto& spec : {bivariate_mod2_spec(), bivariate_mod3_spec()}) {
        const ModelSpec s = spec;
        EXPECT_EQ(spec_hash(parse_model_spec(to_json(s))), spec_hash(s));
    }
}

TEST(SpecJson, SchemaErrors) {
    EXPECT_THROW(parse_model_spec(json::parse(R"({"mu":0.3,"a":[3],"b":[1]})")), FormatError);
    EXPECT_THROW(parse_model_spec(json::parse(R"({"type":"trivariate"})")), FormatError);
    EXPECT_THROW(parse_model_spec(json::parse(R"({"type":"univariate","mu":"x","a":[3],"b":[1]})")), FormatError);
    EXPECT_THROW(parse_model_spec(json::parse(R"({"type":"univariate","mu":0.3,"a":[3],"b":[1,2]})")), InvalidSpec);
    EXPECT_THROW(parse_model_spec(json::parse(R"({"type":"univariate","mu":-1,"a":[3],"b":[1]})")), InvalidSpec);
}

TEST(EventsCsv, RoundTripAtFifteenDigits) {
    const EventLog log = simulate(make_model(bivariate_mod2_spec()), 50.0, 4);
    std::stringstream buf;
    write_events_csv(buf, log);
    EXPECT_EQ(buf.str().substr(0, 10), "time,mark\n");
    const EventLog back = read_events_csv(buf);
    ASSERT_EQ(back.size(), log.size());
    EXPECT_EQ(back.marks, log.marks);
    for (std::size_t i = 0; i < log.size(); ++i) {
        EXPECT_NEAR(back.times[i], log.times[i], 1e-14 * std::max(1.0, log.times[i]));
    }
    // A second pass is a fixed point.
    std::stringstream again;
    write_events_csv(again, back);
    std::stringstream first;
    write_events_csv(first, log);
    EXPECT_EQ(again.str(), first.str());
}

TEST(EventsCsv, MalformedInput) {
    std::istringstream no_header("1.0,1\n");
    EXPECT_THROW(read_events_csv(no_header), FormatError);
    std::istringstream bad_mark("time,mark\n1.0,x\n");
    EXPECT_THROW(read_events_csv(bad_mark), FormatError);
    std::istringstream bad_time("time,mark\nabc,1\n");
    EXPECT_THROW(read_events_csv(bad_time), FormatError);
}

TEST(Metadata, RoundTrip) {
    RunMetadata m;
    m.seed = 12345678901234ULL;
    m.horizon = 1000.0;
    m.proposed = 20;
    m.accepted = 7;
    m.wall_time_seconds = 0.5;
    m.spec_hash = 0xfedcba9876543210ULL;
    m.components = 2;
    const json doc = to_json(m);
    EXPECT_NEAR(doc["acceptance_ratio"].get<double>(), 0.35, 1e-15);
    const RunMetadata back = metadata_from_json(doc);
    EXPECT_EQ(back.seed, m.seed);
    EXPECT_EQ(back.horizon, m.horizon);
    EXPECT_EQ(back.proposed, m.proposed);
    EXPECT_EQ(back.accepted, m.accepted);
    EXPECT_EQ(back.spec_hash, m.spec_hash);
    EXPECT_EQ(back.components, 2);
}

TEST(Hash, HexRoundTrip) {
    for (std::uint64_t h : {0ULL, 1ULL, 0xffffffffffffffffULL, 0x0123456789abcdefULL}) {
        EXPECT_EQ(hex_to_hash(hash_to_hex(h)), h);
    }
    EXPECT_THROW(hex_to_hash("xyz"), FormatError);
}

TEST(Reports, DiagnosticsJsonUsesNullForMissing) {
    DiagnosticsReport r;
    ComponentReport c;
    c.residual_mean = std::nan("");
    r.components.push_back(c);
    const json doc = to_json(r);
    EXPECT_TRUE(doc["components"][0]["ks_p_value"].is_null());
    EXPECT_TRUE(doc["components"][0]["residual_mean"].is_null());
}

TEST(Reports, TraceCsvHeader) {
    std::vector<IntensitySample> s(1);
    std::ostringstream uni;
    write_trace_csv(uni, s, 1);
    EXPECT_EQ(uni.str().substr(0, uni.str().find('\n')), "time,lambda,lambda_bar");
    std::ostringstream bi;
    write_trace_csv(bi, s, 2);
    EXPECT_EQ(bi.str().substr(0, bi.str().find('\n')), "time,lambda_1,lambda_2,lambda_bar");
}
