#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ganprng/errors.hpp"
#include "ganprng/nist/special.hpp"

namespace ganprng::nist {

using BitView = std::span<const std::uint8_t>;

/// Outcome of one statistical test applied to one fixed-length bit block.
/// pass is exactly p_value >= alpha.
struct TestInstanceResult {
  std::string test_name;
  std::size_t instance_index = 0;
  double statistic = 0.0;
  double p_value = 0.0;
  bool pass = false;
};

namespace detail {

inline TestInstanceResult make_result(std::string name, double statistic,
                                      double p, double alpha) {
  p = std::clamp(p, 0.0, 1.0);
  return TestInstanceResult{std::move(name), 0, statistic, p, p >= alpha};
}

inline std::uint64_t count_ones(BitView bits) {
  std::uint64_t n = 0;
  for (std::uint8_t b : bits) n += b;
  return n;
}

/// Number of runs: maximal blocks of identical bits.
inline std::uint64_t count_runs(BitView bits) {
  if (bits.empty()) return 0;
  std::uint64_t v = 1;
  for (std::size_t i = 0; i + 1 < bits.size(); ++i) {
    if (bits[i] != bits[i + 1]) ++v;
  }
  return v;
}

/// Longest run of ones in the view.
inline std::uint64_t longest_ones_run(BitView bits) {
  std::uint64_t best = 0, cur = 0;
  for (std::uint8_t b : bits) {
    cur = b ? cur + 1 : 0;
    best = std::max(best, cur);
  }
  return best;
}

/// Maximum |partial sum| of the +/-1 walk; reverse walks the bits
/// back to front.
inline std::uint64_t max_cusum_excursion(BitView bits, bool reverse) {
  std::int64_t sum = 0, best = 0;
  const std::size_t n = bits.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t b = bits[reverse ? n - 1 - i : i];
    sum += b ? 1 : -1;
    best = std::max(best, std::abs(sum));
  }
  return static_cast<std::uint64_t>(best);
}

/// Overlapping m-bit pattern counts with cyclic wraparound; counts sum
/// to n. m = 0 yields the single empty pattern counted n times.
inline std::vector<std::uint64_t> pattern_counts(BitView bits, std::size_t m) {
  const std::size_t n = bits.size();
  if (m > 24) throw InvalidInput("pattern length too large");
  if (m > 0 && n < m) throw InvalidInput("pattern length exceeds input length");
  std::vector<std::uint64_t> counts(std::size_t{1} << m, 0);
  if (m == 0) {
    counts[0] = n;
    return counts;
  }
  const std::uint32_t mask = (std::uint32_t{1} << m) - 1;
  std::uint32_t value = 0;
  for (std::size_t i = 0; i < m; ++i) value = (value << 1) | bits[i];
  for (std::size_t i = 0; i < n; ++i) {
    ++counts[value];
    value = ((value << 1) | bits[(i + m) % n]) & mask;
  }
  return counts;
}

/// psi^2 statistic of the serial test: (2^m / n) * sum(c_i^2) - n over
/// cyclic overlapping m-bit pattern counts. Zero for m = 0.
inline double psi_squared(BitView bits, std::size_t m) {
  const double n = static_cast<double>(bits.size());
  const auto counts = pattern_counts(bits, m);
  double sum_sq = 0.0;
  for (std::uint64_t c : counts) {
    sum_sq += static_cast<double>(c) * static_cast<double>(c);
  }
  return std::ldexp(1.0, static_cast<int>(m)) / n * sum_sq - n;
}

/// phi statistic of the approximate entropy test:
/// sum_i pi_i * ln(pi_i) over cyclic overlapping m-bit pattern frequencies.
inline double phi_stat(BitView bits, std::size_t m) {
  const double n = static_cast<double>(bits.size());
  const auto counts = pattern_counts(bits, m);
  double phi = 0.0;
  for (std::uint64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    phi += p * std::log(p);
  }
  return phi;
}

/// Magnitudes of the first floor(n/2) DFT coefficients of the +/-1
/// mapped sequence. The transform itself is FFTW's; plan construction is
/// serialized because the FFTW planner is not thread-safe.
inline std::vector<double> dft_magnitudes(BitView bits) {
  static std::mutex planner_mutex;
  const std::size_t n = bits.size();
  std::vector<double> in(n);
  for (std::size_t i = 0; i < n; ++i) in[i] = bits[i] ? 1.0 : -1.0;
  std::vector<fftw_complex> out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(),
                                FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw EnvironmentError("FFTW plan creation failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
  std::vector<double> mags(n / 2);
  for (std::size_t k = 0; k < mags.size(); ++k) {
    mags[k] = std::hypot(out[k][0], out[k][1]);
  }
  return mags;
}

}  // namespace detail

/// Frequency (monobit) test: S = sum(2b - 1), p = erfc(|S| / sqrt(2n)).
/// The proportion of ones should be near one half.
inline TestInstanceResult monobit(BitView bits, double alpha = 0.01) {
  if (bits.empty()) throw InvalidInput("monobit: empty stream");
  const double n = static_cast<double>(bits.size());
  const double s = 2.0 * static_cast<double>(detail::count_ones(bits)) - n;
  const double p = erfc(std::abs(s) / std::sqrt(2.0 * n));
  return detail::make_result("monobit", s, p, alpha);
}

/// Frequency within a block: ones proportion per M-bit block,
/// chi^2 = 4M * sum((pi_i - 1/2)^2), p = igamc(N/2, chi^2/2).
inline TestInstanceResult block_frequency(BitView bits, std::size_t block_length,
                                          double alpha = 0.01) {
  if (block_length < 2) throw InvalidInput("block_frequency: block length must be >= 2");
  if (block_length > bits.size()) {
    throw InvalidInput("block_frequency: block length exceeds input length");
  }
  const std::size_t n_blocks = bits.size() / block_length;
  double sum = 0.0;
  for (std::size_t i = 0; i < n_blocks; ++i) {
    const std::uint64_t ones =
        detail::count_ones(bits.subspan(i * block_length, block_length));
    const double pi = static_cast<double>(ones) / static_cast<double>(block_length);
    sum += (pi - 0.5) * (pi - 0.5);
  }
  const double chi2 = 4.0 * static_cast<double>(block_length) * sum;
  const double p = igamc(static_cast<double>(n_blocks) / 2.0, chi2 / 2.0);
  return detail::make_result("block_frequency", chi2, p, alpha);
}

/// Runs test: total number of maximal same-bit runs V against its
/// expectation under randomness. Requires the monobit prerequisite
/// |pi - 1/2| < 2/sqrt(n); when it fails the p-value is 0 by convention.
inline TestInstanceResult runs(BitView bits, double alpha = 0.01) {
  if (bits.empty()) throw InvalidInput("runs: empty stream");
  const double n = static_cast<double>(bits.size());
  const double pi = static_cast<double>(detail::count_ones(bits)) / n;
  if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) {
    return detail::make_result("runs", 0.0, 0.0, alpha);
  }
  const double v = static_cast<double>(detail::count_runs(bits));
  const double prod = pi * (1.0 - pi);
  const double p =
      erfc(std::abs(v - 2.0 * n * prod) / (2.0 * std::sqrt(2.0 * n) * prod));
  return detail::make_result("runs", v, p, alpha);
}

/// Longest run of ones in M-bit blocks, compared with the tabulated
/// category distribution. Block length follows the standard regimes:
/// M = 8 for n < 6272, M = 128 for n < 750000, M = 10^4 above.
inline TestInstanceResult longest_run_of_ones(BitView bits, double alpha = 0.01) {
  const std::size_t n = bits.size();
  if (n < 128) throw InvalidInput("longest_run_of_ones: need at least 128 bits");
  std::size_t m;
  std::size_t v_min;
  std::vector<double> pi;
  if (n < 6272) {
    m = 8;
    v_min = 1;
    pi = {0.21484375, 0.3671875, 0.23046875, 0.1875};
  } else if (n < 750000) {
    m = 128;
    v_min = 4;
    pi = {0.1174035788, 0.242955959, 0.249363483,
          0.17517706,   0.102701071, 0.112398847};
  } else {
    m = 10000;
    v_min = 10;
    pi = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
  }
  const std::size_t k = pi.size() - 1;  // degrees of freedom
  const std::size_t n_blocks = n / m;
  std::vector<std::uint64_t> nu(pi.size(), 0);
  for (std::size_t i = 0; i < n_blocks; ++i) {
    const std::uint64_t run = detail::longest_ones_run(bits.subspan(i * m, m));
    const std::size_t category =
        run <= v_min ? 0 : std::min(run - v_min, static_cast<std::uint64_t>(k));
    ++nu[category];
  }
  double chi2 = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    const double expected = static_cast<double>(n_blocks) * pi[i];
    const double d = static_cast<double>(nu[i]) - expected;
    chi2 += d * d / expected;
  }
  const double p = igamc(static_cast<double>(k) / 2.0, chi2 / 2.0);
  return detail::make_result("longest_run", chi2, p, alpha);
}

enum class CusumMode { forward, reverse };

/// Cumulative sums test: maximal excursion z of the +/-1 random walk
/// (walked back to front in reverse mode), with the two-sided
/// normal-CDF summation p-value. Summation indices range over the
/// integers within the real-valued bounds of the reference formula.
inline TestInstanceResult cumulative_sums(BitView bits, CusumMode mode,
                                          double alpha = 0.01) {
  if (bits.empty()) throw InvalidInput("cumulative_sums: empty stream");
  const double n = static_cast<double>(bits.size());
  const double z = static_cast<double>(
      detail::max_cusum_excursion(bits, mode == CusumMode::reverse));
  const double sqrt_n = std::sqrt(n);
  double sum1 = 0.0;
  {
    const auto lo = static_cast<std::int64_t>(std::ceil((-n / z + 1.0) / 4.0));
    const auto hi = static_cast<std::int64_t>(std::floor((n / z - 1.0) / 4.0));
    for (std::int64_t k = lo; k <= hi; ++k) {
      const double kk = static_cast<double>(k);
      sum1 += normal_cdf((4.0 * kk + 1.0) * z / sqrt_n) -
              normal_cdf((4.0 * kk - 1.0) * z / sqrt_n);
    }
  }
  double sum2 = 0.0;
  {
    const auto lo = static_cast<std::int64_t>(std::ceil((-n / z - 3.0) / 4.0));
    const auto hi = static_cast<std::int64_t>(std::floor((n / z - 1.0) / 4.0));
    for (std::int64_t k = lo; k <= hi; ++k) {
      const double kk = static_cast<double>(k);
      sum2 += normal_cdf((4.0 * kk + 3.0) * z / sqrt_n) -
              normal_cdf((4.0 * kk + 1.0) * z / sqrt_n);
    }
  }
  const std::string name =
      mode == CusumMode::forward ? "cusum_forward" : "cusum_reverse";
  return detail::make_result(name, z, 1.0 - sum1 + sum2, alpha);
}

/// Serial test: overlapping m-, (m-1)- and (m-2)-bit pattern frequencies
/// with cyclic wraparound. Yields two p-values, for the first and second
/// psi^2 differences.
inline std::pair<TestInstanceResult, TestInstanceResult> serial(
    BitView bits, std::size_t m, double alpha = 0.01) {
  if (m < 2) throw InvalidInput("serial: m must be >= 2");
  if (bits.size() < m) throw InvalidInput("serial: m too large for input length");
  const double psi_m = detail::psi_squared(bits, m);
  const double psi_m1 = detail::psi_squared(bits, m - 1);
  const double psi_m2 = detail::psi_squared(bits, m - 2);
  const double del1 = psi_m - psi_m1;
  const double del2 = psi_m - 2.0 * psi_m1 + psi_m2;
  const double p1 = igamc(std::ldexp(1.0, static_cast<int>(m) - 2), del1 / 2.0);
  const double p2 = igamc(std::ldexp(1.0, static_cast<int>(m) - 3), del2 / 2.0);
  return {detail::make_result("serial_delta1", del1, p1, alpha),
          detail::make_result("serial_delta2", del2, p2, alpha)};
}

/// Approximate entropy test: ApEn(m) = phi(m) - phi(m+1) compared with
/// the ln 2 expected for a random source; chi^2 = 2n(ln 2 - ApEn).
inline TestInstanceResult approximate_entropy(BitView bits, std::size_t m,
                                              double alpha = 0.01) {
  if (m < 1) throw InvalidInput("approximate_entropy: m must be >= 1");
  if (bits.size() < m + 1) {
    throw InvalidInput("approximate_entropy: m too large for input length");
  }
  const double n = static_cast<double>(bits.size());
  const double apen = detail::phi_stat(bits, m) - detail::phi_stat(bits, m + 1);
  const double chi2 = std::max(0.0, 2.0 * n * (std::numbers::ln2 - apen));
  const double p = igamc(std::ldexp(1.0, static_cast<int>(m) - 1), chi2 / 2.0);
  TestInstanceResult r = detail::make_result("approximate_entropy", apen, p, alpha);
  return r;
}

/// Discrete Fourier transform (spectral) test: the fraction of DFT peaks
/// below the 95% threshold T = sqrt(n ln(1/0.05)) should be 0.95.
inline TestInstanceResult dft_spectral(BitView bits, double alpha = 0.01) {
  const std::size_t n = bits.size();
  if (n < 2) throw InvalidInput("dft_spectral: need at least 2 bits");
  const auto mags = detail::dft_magnitudes(bits);
  const double threshold =
      std::sqrt(static_cast<double>(n) * std::log(1.0 / 0.05));
  std::size_t n1 = 0;
  for (double mag : mags) {
    if (mag < threshold) ++n1;
  }
  const double nn = static_cast<double>(n);
  const double n0 = 0.95 * nn / 2.0;
  const double d = (static_cast<double>(n1) - n0) /
                   std::sqrt(nn * 0.95 * 0.05 / 4.0);
  const double p = erfc(std::abs(d) / std::sqrt(2.0));
  return detail::make_result("dft_spectral", d, p, alpha);
}

}  // namespace ganprng::nist
