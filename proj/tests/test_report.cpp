#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "pvl/error.hpp"
#include "pvl/report.hpp"

using namespace pvl;

namespace {

std::vector<IdentityReport> sample()
{
    IdentityReport a;
    a.identity = "hyperplane";
    a.params = {{"xi_0", 0.6}, {"xi_1", 0.8}};
    a.notes = {{"seed", "7"}};
    a.lhs = -0.123456789012345678;
    a.rhs = -0.123456789;
    a.scale_floor = 1e-12;
    a.hypothesis = {1e-15, 1.0, 0.25};
    a.tolerance = 1e-3;
    finalize(a);

    IdentityReport b;
    b.identity = "global";
    b.lhs = 1.0;
    b.rhs = 2.0;
    b.tolerance = 1e-3;
    b.status = Status::HypothesisViolated;
    finalize(b);
    return {a, b};
}

} // namespace

TEST(Report, JsonRoundTrip)
{
    const auto reports = sample();
    const std::map<std::string, std::string> meta{{"generator", "generic"}, {"seed", "7"}};
    const auto text = reports_to_json(reports, meta);
    std::map<std::string, std::string> back_meta;
    const auto back = reports_from_json(text, &back_meta);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back_meta, meta);
    EXPECT_EQ(back[0].identity, "hyperplane");
    EXPECT_EQ(back[0].lhs, reports[0].lhs);
    EXPECT_EQ(back[0].params, reports[0].params);
    EXPECT_EQ(back[0].notes, reports[0].notes);
    EXPECT_EQ(back[0].hypothesis.tail_fraction, 0.25);
    EXPECT_EQ(back[1].status, Status::HypothesisViolated);
    EXPECT_EQ(reports_to_json(back, back_meta), text);
}

TEST(Report, SchemaAndSummary)
{
    const auto text = reports_to_json(sample());
    EXPECT_NE(text.find("\"schema\": 1"), std::string::npos);
    EXPECT_NE(text.find("\"hypothesis_violated\": 1"), std::string::npos);
    const auto s = summarize(sample());
    EXPECT_EQ(s.pass, 1);
    EXPECT_EQ(s.hypothesis_violated, 1);
    EXPECT_EQ(s.total(), 2);
}

TEST(Report, RejectsMalformedInput)
{
    for (const char* bad : {"{", "[]", R"({"schema": 2, "reports": []})", R"({"schema": 1, "reports": [{"lhs": "x"}]})"}) {
        try {
            (void)reports_from_json(bad);
            FAIL() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::Format);
        }
    }
}

TEST(Report, NanIsWrittenAsNull)
{
    auto reports = sample();
    reports[0].residual_rel = std::numeric_limits<double>::quiet_NaN();
    const auto text = reports_to_json(reports);
    EXPECT_NE(text.find("\"residual_rel\": null"), std::string::npos);
    EXPECT_TRUE(std::isnan(reports_from_json(text)[0].residual_rel));
}

TEST(Report, CsvRows)
{
    const auto csv = reports_to_csv(sample());
    const auto header = csv.substr(0, csv.find('\n'));
    EXPECT_EQ(header, "identity,params,lhs,rhs,residual_abs,residual_rel,moment_isotropy,support_margin,"
                      "tail_fraction,status,tolerance");
    EXPECT_NE(csv.find("xi_0=0.59999999999999998;xi_1=0.80000000000000004"), std::string::npos);
    EXPECT_NE(csv.find(",hypothesis-violated,"), std::string::npos);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
