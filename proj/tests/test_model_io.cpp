#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ladder/error.hpp"
#include "ladder/ladder_exact.hpp"
#include "ladder/model_io.hpp"

using namespace ladder;
using nlohmann::json;

TEST(ParseProbability, NumbersAndStrings) {
    EXPECT_EQ(parse_probability(json(0.25)), 0.25);
    EXPECT_EQ(parse_probability(json("0.125")), 0.125);
    EXPECT_EQ(parse_probability(json("1e-3")), 1e-3);
    EXPECT_EQ(parse_probability(json("0.1")), 0.1);
    EXPECT_THROW(parse_probability(json("0.1x")), DomainError);
    EXPECT_THROW(parse_probability(json("")), DomainError);
    EXPECT_THROW(parse_probability(json("inf")), DomainError);
    EXPECT_THROW(parse_probability(json::array()), DomainError);
}

TEST(ModelFromJson, LatticeIndexMap) {
    auto m = model_from_json(json::parse(R"({"kind":"lattice","mass":{"-1":"0.5","1":"0.5"}})"));
    EXPECT_EQ(m.lo, -1);
    ASSERT_EQ(m.mass.size(), 3u);
    EXPECT_EQ(m.mass[1], 0.0);
    EXPECT_EQ(model_hash(m), model_hash(make_symmetric_pm1()));
}

TEST(ModelFromJson, LatticeArrayWithLo) {
    auto m = model_from_json(json::parse(R"({"kind":"lattice","span":0.5,"lo":-2,"mass":[0.15,0.3,0.15,0.2,0.2],"drift":0.25})"));
    EXPECT_EQ(m.span, 0.5);
    EXPECT_EQ(m.lo, -2);
    EXPECT_EQ(m.drift, 0.25);
}

TEST(ModelFromJson, OtherKinds) {
    auto pb = model_from_json(json::parse(R"({"kind":"pbiased","a":"0.2"})"));
    EXPECT_TRUE(pb.pre_drifted);
    EXPECT_EQ(pb.drift, 0.2);
    EXPECT_EQ(model_from_json(json::parse(R"({"kind":"pm1"})")).mass.size(), 3u);
    EXPECT_EQ(model_from_json(json::parse(R"({"kind":"gaussian"})")).kind, ModelKind::GaussianUnit);
    EXPECT_TRUE(model_from_json(json::parse(R"({"kind":"gaussian","span":0.05})")).is_lattice());
    auto p = model_from_json(json::parse(R"({"kind":"pareto","t":3.5,"scale":0.1,"x_max":200})"));
    EXPECT_EQ(p.kind, ModelKind::ParetoTail);
    EXPECT_EQ(p.hi(), 200);
}

TEST(ModelFromJson, Errors) {
    EXPECT_THROW(model_from_json(json::parse(R"({"mass":[1]})")), DomainError);
    EXPECT_THROW(model_from_json(json::parse(R"({"kind":"cauchy"})")), DomainError);
    EXPECT_THROW(model_from_json(json::parse(R"({"kind":"lattice"})")), DomainError);
    EXPECT_THROW(model_from_json(json::parse(R"({"kind":"lattice","mass":{"a":"1"}})")), DomainError);
    EXPECT_THROW(model_from_json(json::parse(R"({"kind":"lattice","mass":{"-1":"0.5","1":"0.4"}})")), DomainError);
    EXPECT_THROW(model_from_json(json::parse(R"({"kind":"pareto","t":3.5,"scale":0.1,"x_max":20.5})")), DomainError);
    EXPECT_THROW(model_from_json(json::parse(R"({"kind":"pbiased"})")), DomainError);
}

TEST(ModelToJson, RoundTripKeepsHash) {
    for (const auto& m : {make_symmetric_pm1(), make_symmetric_pm1(0.1), make_pbiased(0.2),
                          make_lattice(1.0, -2, {0.15, 0.3, 0.15, 0.2, 0.2}), make_pareto(3.5, 0.1, 300)}) {
        auto back = model_from_json(model_to_json(m));
        EXPECT_EQ(model_hash(back), model_hash(m)) << m.name;
        EXPECT_EQ(back.drift, m.drift);
    }
}

TEST(LoadModel, FileAndErrors) {
    std::string path = ::testing::TempDir() + "model_io_test.json";
    {
        std::ofstream out(path);
        out << R"({"kind":"pbiased","a":0.1})";
    }
    EXPECT_EQ(load_model(path).drift, 0.1);
    {
        std::ofstream out(path);
        out << "{not json";
    }
    EXPECT_THROW(load_model(path), DomainError);
    std::remove(path.c_str());
    EXPECT_THROW(load_model(path), DomainError);
}

TEST(Csv, QuotingAndPrecision) {
    std::ostringstream os;
    CsvWriter w(os, {"a", "b", "c"});
    w.cell(0.1).cell(42LL).cell(std::string("x,\"y\""));
    w.end_row();
    EXPECT_EQ(os.str(), "a,b,c\n0.10000000000000001,42,\"x,\"\"y\"\"\"\n");
    EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}
