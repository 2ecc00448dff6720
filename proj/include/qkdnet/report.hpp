#pragma once

// Machine-readable output. CSV uses '.' decimals, no thousands separators and
// 9 significant digits; absent values are empty fields. JSON carries the same
// fields with absent values as null.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qkdnet/metrics.hpp"

namespace qkdnet {

enum class OutputFormat { csv, json };

std::optional<OutputFormat> parse_output_format(std::string_view name);

/// "%.9g" in the C locale; empty for nullopt.
std::string format_number(double v);
std::string format_number(std::optional<double> v);

/// SessionMetrics column names in output order.
const std::vector<std::string>& metrics_columns();

/// One labeled row of metrics: (name, value) prefix columns plus metrics.
struct MetricsRow {
  std::vector<std::pair<std::string, std::string>> labels;
  SessionMetrics metrics;
};

std::string render_metrics(const std::vector<MetricsRow>& rows, OutputFormat format);

struct PoissonRow {
  double mu = 0.0;
  std::vector<double> pmf;  ///< P(0, mu) .. P(nmax, mu)
  std::optional<double> multi_given_nonempty;
  double half_mu = 0.0;
};

std::vector<PoissonRow> poisson_table(const std::vector<double>& mus, int nmax);

std::string render_poisson_table(const std::vector<PoissonRow>& rows, OutputFormat format);

}  // namespace qkdnet
