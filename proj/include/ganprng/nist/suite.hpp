#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ganprng/bitstream.hpp"
#include "ganprng/errors.hpp"
#include "ganprng/nist/tests.hpp"

namespace ganprng::nist {

/// Instance p-values are judged non-uniform when the 10-bin chi-squared
/// p-value P_T drops below this, the official suite's default.
constexpr double kUniformityAlpha = 0.0001;

struct SuiteConfig {
  std::uint64_t bits_per_instance = 1'000'000;
  std::size_t instances_per_test = 10;
  double alpha = 0.01;
  std::size_t block_frequency_block_length = 128;
  std::size_t serial_pattern_length = 16;
  std::size_t approximate_entropy_pattern_length = 10;

  /// Scaled-down configuration for desk-scale runs on 10^5-bit instances.
  /// The serial pattern length shrinks with the instance size so the
  /// chi-squared approximation stays valid.
  static SuiteConfig desk() {
    SuiteConfig cfg;
    cfg.bits_per_instance = 100'000;
    cfg.serial_pattern_length = 8;
    return cfg;
  }

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw InvalidInput("suite: alpha must be in (0, 1)");
    }
    if (instances_per_test == 0) {
      throw InvalidInput("suite: instances_per_test must be positive");
    }
    if (bits_per_instance < 1000) {
      throw InvalidInput("suite: bits_per_instance must be at least 1000");
    }
    const auto log2n = static_cast<std::size_t>(
        std::floor(std::log2(static_cast<double>(bits_per_instance))));
    if (serial_pattern_length < 2 || serial_pattern_length + 2 > log2n) {
      throw InvalidInput("suite: serial pattern length out of range for instance size");
    }
    if (approximate_entropy_pattern_length < 1 ||
        approximate_entropy_pattern_length + 5 > log2n) {
      throw InvalidInput("suite: approximate entropy pattern length out of range");
    }
    if (block_frequency_block_length < 2 ||
        block_frequency_block_length > bits_per_instance) {
      throw InvalidInput("suite: block frequency block length out of range");
    }
  }

  bool operator==(const SuiteConfig&) const = default;
};

/// Minimum passing proportion for m instances at significance alpha:
/// p_hat - 3*sqrt(p_hat*(1-p_hat)/m) with p_hat = 1 - alpha.
inline double proportion_threshold(std::size_t m, double alpha) {
  if (m == 0) throw InvalidInput("proportion_threshold: m must be positive");
  const double p_hat = 1.0 - alpha;
  return p_hat - 3.0 * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(m));
}

/// Uniformity p-value P_T of a set of instance p-values: chi-squared over
/// ten equal bins of [0, 1], P_T = igamc(9/2, chi^2/2). A p-value of
/// exactly 1.0 lands in the top bin.
inline double uniformity_pvalue(std::span<const double> pvalues) {
  if (pvalues.empty()) throw InvalidInput("uniformity_pvalue: no p-values");
  std::array<std::uint64_t, 10> bins{};
  for (double p : pvalues) {
    const auto b = std::min<std::size_t>(9, static_cast<std::size_t>(p * 10.0));
    ++bins[b];
  }
  const double expected = static_cast<double>(pvalues.size()) / 10.0;
  double chi2 = 0.0;
  for (std::uint64_t f : bins) {
    const double d = static_cast<double>(f) - expected;
    chi2 += d * d / expected;
  }
  return igamc(4.5, chi2 / 2.0);
}

/// Aggregated verdicts for one test statistic stream across all instances.
struct TestSummary {
  std::string name;
  std::string family;  // groups the two cusum modes / serial statistics
  std::vector<TestInstanceResult> instances;
  std::size_t pass_count = 0;
  double proportion = 0.0;
  double proportion_threshold = 0.0;
  std::size_t min_pass_formula = 0;  // ceil(threshold * m), what the formula implies
  std::size_t min_pass_floor = 0;    // floor(threshold * m), the widely quoted figure
  bool proportion_pass = false;
  double uniformity_p = 0.0;
  bool uniformity_pass = false;
  bool test_pass = false;  // proportion AND uniformity
};

/// Whole-suite report mirroring the reference tool's final analysis:
/// per-test instance p-values plus proportion and uniformity verdicts,
/// and the aggregate failure counters.
struct SuiteReport {
  SuiteConfig config;
  std::vector<TestSummary> tests;
  std::size_t total_tests = 0;        // T
  std::size_t total_instances = 0;    // T_I
  std::size_t failed_instances = 0;   // F_I
  double failed_instance_pct = 0.0;   // F_I%
  std::size_t failed_uniformity = 0;  // F_p
  std::size_t failed_tests = 0;       // F_T: proportion or uniformity failed
  double failed_test_pct = 0.0;       // F_%

  /// Distinct test families with at least one failing statistic stream.
  std::vector<std::string> failed_families() const {
    std::vector<std::string> out;
    for (const auto& t : tests) {
      if (!t.test_pass &&
          std::find(out.begin(), out.end(), t.family) == out.end()) {
        out.push_back(t.family);
      }
    }
    return out;
  }
};

namespace detail {

inline TestSummary summarize(std::string name, std::string family,
                             std::vector<TestInstanceResult> instances,
                             double alpha) {
  TestSummary s;
  s.name = std::move(name);
  s.family = std::move(family);
  s.instances = std::move(instances);
  const std::size_t m = s.instances.size();
  std::vector<double> pvalues;
  pvalues.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    s.instances[i].instance_index = i;
    pvalues.push_back(s.instances[i].p_value);
    if (s.instances[i].pass) ++s.pass_count;
  }
  s.proportion = static_cast<double>(s.pass_count) / static_cast<double>(m);
  s.proportion_threshold = nist::proportion_threshold(m, alpha);
  const double scaled = s.proportion_threshold * static_cast<double>(m);
  s.min_pass_formula = static_cast<std::size_t>(std::ceil(scaled));
  s.min_pass_floor = static_cast<std::size_t>(std::floor(scaled));
  s.proportion_pass = s.proportion >= s.proportion_threshold;
  s.uniformity_p = uniformity_pvalue(pvalues);
  s.uniformity_pass = s.uniformity_p >= kUniformityAlpha;
  s.test_pass = s.proportion_pass && s.uniformity_pass;
  return s;
}

}  // namespace detail

/// Runs every configured test on consecutive non-overlapping instance
/// blocks of the stream and aggregates the verdicts. The stream must hold
/// at least instances_per_test * bits_per_instance bits.
inline SuiteReport run_suite(const BitStream& stream, const SuiteConfig& cfg) {
  cfg.validate();
  const std::uint64_t required =
      cfg.bits_per_instance * static_cast<std::uint64_t>(cfg.instances_per_test);
  if (stream.bit_count() < required) {
    throw InvalidInput("run_suite: need " + std::to_string(required) +
                       " bits (" + std::to_string(cfg.instances_per_test) +
                       " instances of " + std::to_string(cfg.bits_per_instance) +
                       "), have " + std::to_string(stream.bit_count()));
  }

  // One instance-result vector per statistic stream, in report order.
  struct Stream {
    std::string name;
    std::string family;
    std::vector<TestInstanceResult> results;
  };
  std::vector<Stream> streams = {
      {"monobit", "monobit", {}},
      {"block_frequency", "block_frequency", {}},
      {"runs", "runs", {}},
      {"longest_run", "longest_run", {}},
      {"cusum_forward", "cumulative_sums", {}},
      {"cusum_reverse", "cumulative_sums", {}},
      {"serial_delta1", "serial", {}},
      {"serial_delta2", "serial", {}},
      {"approximate_entropy", "approximate_entropy", {}},
      {"dft_spectral", "dft_spectral", {}},
  };

  const auto all = stream.view();
  for (std::size_t i = 0; i < cfg.instances_per_test; ++i) {
    const BitView block = all.subspan(i * cfg.bits_per_instance,
                                      cfg.bits_per_instance);
    streams[0].results.push_back(monobit(block, cfg.alpha));
    streams[1].results.push_back(
        block_frequency(block, cfg.block_frequency_block_length, cfg.alpha));
    streams[2].results.push_back(runs(block, cfg.alpha));
    streams[3].results.push_back(longest_run_of_ones(block, cfg.alpha));
    streams[4].results.push_back(
        cumulative_sums(block, CusumMode::forward, cfg.alpha));
    streams[5].results.push_back(
        cumulative_sums(block, CusumMode::reverse, cfg.alpha));
    auto [s1, s2] = serial(block, cfg.serial_pattern_length, cfg.alpha);
    streams[6].results.push_back(std::move(s1));
    streams[7].results.push_back(std::move(s2));
    streams[8].results.push_back(approximate_entropy(
        block, cfg.approximate_entropy_pattern_length, cfg.alpha));
    streams[9].results.push_back(dft_spectral(block, cfg.alpha));
  }

  SuiteReport report;
  report.config = cfg;
  for (auto& s : streams) {
    report.tests.push_back(detail::summarize(std::move(s.name),
                                             std::move(s.family),
                                             std::move(s.results), cfg.alpha));
  }
  report.total_tests = report.tests.size();
  for (const auto& t : report.tests) {
    report.total_instances += t.instances.size();
    report.failed_instances += t.instances.size() - t.pass_count;
    if (!t.uniformity_pass) ++report.failed_uniformity;
    if (!t.test_pass) ++report.failed_tests;
  }
  report.failed_instance_pct = 100.0 * static_cast<double>(report.failed_instances) /
                               static_cast<double>(report.total_instances);
  report.failed_test_pct = 100.0 * static_cast<double>(report.failed_tests) /
                           static_cast<double>(report.total_tests);
  return report;
}

// --- JSON and text serialization ------------------------------------------

inline nlohmann::json to_json(const SuiteConfig& cfg) {
  return {{"bits_per_instance", cfg.bits_per_instance},
          {"instances_per_test", cfg.instances_per_test},
          {"alpha", cfg.alpha},
          {"block_frequency_block_length", cfg.block_frequency_block_length},
          {"serial_pattern_length", cfg.serial_pattern_length},
          {"approximate_entropy_pattern_length",
           cfg.approximate_entropy_pattern_length}};
}

inline SuiteConfig suite_config_from_json(const nlohmann::json& j) {
  SuiteConfig cfg;
  cfg.bits_per_instance = j.at("bits_per_instance").get<std::uint64_t>();
  cfg.instances_per_test = j.at("instances_per_test").get<std::size_t>();
  cfg.alpha = j.at("alpha").get<double>();
  cfg.block_frequency_block_length =
      j.at("block_frequency_block_length").get<std::size_t>();
  cfg.serial_pattern_length = j.at("serial_pattern_length").get<std::size_t>();
  cfg.approximate_entropy_pattern_length =
      j.at("approximate_entropy_pattern_length").get<std::size_t>();
  return cfg;
}

inline nlohmann::json to_json(const SuiteReport& report) {
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& t : report.tests) {
    nlohmann::json pvalues = nlohmann::json::array();
    nlohmann::json statistics = nlohmann::json::array();
    for (const auto& inst : t.instances) {
      pvalues.push_back(inst.p_value);
      statistics.push_back(inst.statistic);
    }
    tests.push_back({{"name", t.name},
                     {"family", t.family},
                     {"p_values", pvalues},
                     {"statistics", statistics},
                     {"pass_count", t.pass_count},
                     {"proportion", t.proportion},
                     {"proportion_threshold", t.proportion_threshold},
                     {"min_pass_formula", t.min_pass_formula},
                     {"min_pass_floor", t.min_pass_floor},
                     {"proportion_pass", t.proportion_pass},
                     {"uniformity_p", t.uniformity_p},
                     {"uniformity_pass", t.uniformity_pass},
                     {"test_pass", t.test_pass}});
  }
  return {{"suite_config", to_json(report.config)},
          {"tests", tests},
          {"aggregates",
           {{"T", report.total_tests},
            {"T_I", report.total_instances},
            {"F_I", report.failed_instances},
            {"F_I_pct", report.failed_instance_pct},
            {"F_p", report.failed_uniformity},
            {"F_T", report.failed_tests},
            {"F_pct", report.failed_test_pct}}}};
}

inline SuiteReport suite_report_from_json(const nlohmann::json& j) {
  SuiteReport report;
  report.config = suite_config_from_json(j.at("suite_config"));
  for (const auto& tj : j.at("tests")) {
    TestSummary t;
    t.name = tj.at("name").get<std::string>();
    t.family = tj.at("family").get<std::string>();
    const auto& pvalues = tj.at("p_values");
    const auto& statistics = tj.at("statistics");
    for (std::size_t i = 0; i < pvalues.size(); ++i) {
      TestInstanceResult inst;
      inst.test_name = t.name;
      inst.instance_index = i;
      inst.p_value = pvalues[i].get<double>();
      inst.statistic = statistics[i].get<double>();
      inst.pass = inst.p_value >= report.config.alpha;
      t.instances.push_back(std::move(inst));
    }
    t.pass_count = tj.at("pass_count").get<std::size_t>();
    t.proportion = tj.at("proportion").get<double>();
    t.proportion_threshold = tj.at("proportion_threshold").get<double>();
    t.min_pass_formula = tj.at("min_pass_formula").get<std::size_t>();
    t.min_pass_floor = tj.at("min_pass_floor").get<std::size_t>();
    t.proportion_pass = tj.at("proportion_pass").get<bool>();
    t.uniformity_p = tj.at("uniformity_p").get<double>();
    t.uniformity_pass = tj.at("uniformity_pass").get<bool>();
    t.test_pass = tj.at("test_pass").get<bool>();
    report.tests.push_back(std::move(t));
  }
  const auto& agg = j.at("aggregates");
  report.total_tests = agg.at("T").get<std::size_t>();
  report.total_instances = agg.at("T_I").get<std::size_t>();
  report.failed_instances = agg.at("F_I").get<std::size_t>();
  report.failed_instance_pct = agg.at("F_I_pct").get<double>();
  report.failed_uniformity = agg.at("F_p").get<std::size_t>();
  report.failed_tests = agg.at("F_T").get<std::size_t>();
  report.failed_test_pct = agg.at("F_pct").get<double>();
  return report;
}

/// Human-readable table with one row per statistic stream and the
/// aggregate counters underneath.
inline std::string report_table(const SuiteReport& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-22s %6s %6s %12s %12s %8s\n", "test",
                "pass", "of", "proportion", "uniformity", "verdict");
  out += line;
  for (const auto& t : report.tests) {
    std::snprintf(line, sizeof(line), "%-22s %6zu %6zu %12.4f %12.6f %8s\n",
                  t.name.c_str(), t.pass_count, t.instances.size(),
                  t.proportion, t.uniformity_p,
                  t.test_pass ? "pass" : "FAIL");
    out += line;
  }
  std::snprintf(line, sizeof(line),
                "T=%zu T_I=%zu F_I=%zu F_I%%=%.1f F_p=%zu F_T=%zu F_%%=%.1f\n",
                report.total_tests, report.total_instances,
                report.failed_instances, report.failed_instance_pct,
                report.failed_uniformity, report.failed_tests,
                report.failed_test_pct);
  out += line;
  return out;
}

/// Before/after deltas of the aggregate failure metrics.
struct ReportDelta {
  double delta_failed_instance_pct;  // dF_I%
  double delta_failed_uniformity;    // dF_p
  double delta_failed_tests;         // dF_T
  double delta_failed_test_pct;      // dF_%
};

/// Compares two reports produced under identical suite configurations.
inline ReportDelta compare_reports(const SuiteReport& before,
                                   const SuiteReport& after) {
  if (!(before.config == after.config)) {
    throw InvalidInput("compare_reports: suite configurations differ");
  }
  return ReportDelta{
      after.failed_instance_pct - before.failed_instance_pct,
      static_cast<double>(after.failed_uniformity) -
          static_cast<double>(before.failed_uniformity),
      static_cast<double>(after.failed_tests) -
          static_cast<double>(before.failed_tests),
      after.failed_test_pct - before.failed_test_pct,
  };
}

inline nlohmann::json to_json(const ReportDelta& d) {
  return {{"delta_F_I_pct", d.delta_failed_instance_pct},
          {"delta_F_p", d.delta_failed_uniformity},
          {"delta_F_T", d.delta_failed_tests},
          {"delta_F_pct", d.delta_failed_test_pct}};
}

}  // namespace ganprng::nist
