#include <algorithm>
#include <gtest/gtest.h>

#include <json.hpp>

#include "qkdnet/report.hpp"

using namespace qkdnet;

TEST(Report, NumberFormat) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_number(1234567890.0), "1.23456789e+09");
  EXPECT_EQ(format_number(std::optional<double>{}), "");
}

TEST(Report, CsvHeaderAndEmptyFields) {
  SessionMetrics m;
  m.key_length = 10;
  m.qber_z = 0.125;
  const auto csv = render_metrics({{{{"trial", "0"}}, m}}, OutputFormat::csv);
  const auto nl = csv.find('\n');
  const std::string header = csv.substr(0, nl);
  EXPECT_EQ(header.rfind("trial,key_length,key_bits,", 0), 0u);
  const std::string row = csv.substr(nl + 1);
  // qber_x and qber_upstream are absent: empty fields.
  EXPECT_EQ(row.rfind("0,10,0,0,0.125,,,", 0), 0u) << row;
  std::size_t commas_h = std::count(header.begin(), header.end(), ',');
  std::size_t commas_r = std::count(row.begin(), row.end(), ',');
  EXPECT_EQ(commas_h, commas_r);
}

TEST(Report, JsonUsesNullForAbsent) {
  SessionMetrics m;
  m.pns_alarm = true;
  const auto j = nlohmann::json::parse(render_metrics({{{{"trial", "2"}}, m}}, OutputFormat::json));
  const auto& row = j.at("rows").at(0);
  EXPECT_EQ(row.at("trial"), "2");
  EXPECT_TRUE(row.at("metrics").at("qber_z").is_null());
  EXPECT_EQ(row.at("metrics").at("pns_alarm"), true);
  EXPECT_EQ(row.at("metrics").size(), metrics_columns().size());
}

TEST(Report, PoissonTable) {
  const auto rows = poisson_table({0.0, 0.05}, 2);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].multi_given_nonempty);
  EXPECT_EQ(rows[0].pmf, (std::vector<double>{1.0, 0.0, 0.0}));
  const auto csv = render_poisson_table(rows, OutputFormat::csv);
  EXPECT_EQ(csv,
            "mu,p0,p1,p2,p_multi_given_nonempty,mu_over_2\n"
            "0,1,0,0,,0\n"
            "0.05,0.951229425,0.0475614712,0.00118903678,0.0247916753,0.025\n");
}

TEST(Report, FormatNames) {
  EXPECT_EQ(parse_output_format("json"), OutputFormat::json);
  EXPECT_FALSE(parse_output_format("xml"));
}
