#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "dlab/haar_field.hpp"
#include "dlab/pointset.hpp"

namespace dlab {

class CounterRng;

// Random coefficients on every rectangle with |R| >= 2^-n (d = 2).
HaarExpansion random_expansion_upto(int n, int d, CounterRng& rng);
// Random +-1 coefficients on every rectangle with |R| = 2^-n.
HaarExpansion random_sign_hyperbolic(int n, int d, CounterRng& rng);

// f_r = sum sgn(alpha(R)) h_R over the shape; zero coefficients give zero signs.
RFunction sign_function(const HaarExpansion& H, const ShapeVector& r);

struct TemlyakovReport {
  int n = 0;
  double pairing = 0;    // <H, Psi>
  double predicted = 0;  // 2^(-n-1) sum_{|R|=2^-n} |alpha(R)|
  double mean = 0;
  double min_value = 0;
};

GridFunction temlyakov_psi(const HaarExpansion& H, int n, std::int64_t cap = kDefaultCellCap);
TemlyakovReport temlyakov_dual(const HaarExpansion& H, int n, std::int64_t cap = kDefaultCellCap);

struct SchmidtReport {
  std::size_t N = 0;
  int n = 0;
  double alpha = 0;
  double pairing = 0;           // <D_N, Psi>
  double constant_term = 0;     // <D_N, 1>
  double main_term = 0;         // alpha sum_r <D_N, f_r>
  double tail = 0;              // pairing - constant_term - main_term
  double main_lower_bound = 0;  // alpha |H_n| 2^(-2d-4)
  double tail_bound = 0;        // 4 n alpha^2
  double mean = 0;
  double min_value = 0;
};

SchmidtReport schmidt_dual(const PointSet& A, double alpha, int n = -1, std::int64_t cap = kDefaultCellCap);

struct HalaszComplexReport {
  int n = 0;
  double pairing = 0;  // <D_N, Im Psi>
  double sup_modulus = 0;
  double modulus_bound = 0;  // (1 + a^2/n)^(|H_n|/2)
};

HalaszComplexReport halasz_complex_dual(const PointSet& A, double a, int n = -1,
                                        std::int64_t cap = kDefaultCellCap);

struct HalaszSineReport {
  int n = 0;
  double pairing = 0;  // <D_N, sin((a/sqrt n) sum f_r)>
  double normalized = 0;
  double sup = 0;
};

HalaszSineReport halasz_sine_dual(const PointSet& A, double a, int n = -1, std::int64_t cap = kDefaultCellCap);

// Number of words of length len over an alphabet of m letters in which each of
// a fixed set of v letters occurs an odd number of times and every other letter
// an even number of times.
double parity_word_count(int len, int v, int m);

struct ExpansionCheck {
  double residual = 0;          // odd power against the exact G_v combination
  double closed_form_residual = 0;  // against (2k+1)! 2^-v n^((2k+1-v)/2) G_v
  double sine_residual = 0;     // sin(t sum f) against its finite G_v expansion
  std::vector<double> coefficients;          // exact coefficient of G_v, v = 0..2k+1
  std::vector<double> closed_form_coefficients;  // closed-form coefficient of G_v
};

// (sum_{r in H_n} f_r)^(2k+1) for random r-functions in d = 2, checked on the grid.
ExpansionCheck expansion_check(int n, int k, std::uint64_t seed, double t = 0.5,
                               std::int64_t cap = kDefaultCellCap);

struct BeckParameters {
  int n = 6;
  int q = 3;
  double a = 0.25;
  double b = 0.25;
  double rho() const;
  double rho_tilde() const;
};

// Contiguous split of first coordinates 0..n into q blocks.
std::vector<std::pair<int, int>> beck_blocks(int n, int q);
// Block index of each shape in hyperbolic_index(n, 3).
std::vector<int> beck_block_of(int n, int q);

struct BeckDecomposition {
  BeckParameters params;
  GridFunction psi;
  std::vector<std::vector<std::int32_t>> sd;   // sd[k]: sum of strongly distinct k-products
  std::vector<std::vector<std::int32_t>> nsd;  // nsd[k]: the remaining k-products
  std::vector<std::vector<std::int32_t>> block_sum;  // F_t
  std::size_t sd_tuples = 0;
  std::size_t nsd_tuples = 0;

  GridFunction psi_sd() const;
  GridFunction psi_not() const;
  GridFunction sd_part(int k) const;  // rho_tilde^k sd[k]
};

// r-functions given in hyperbolic_index(n, 3) order.
BeckDecomposition beck_short_riesz(const std::vector<RFunction>& f, const BeckParameters& p,
                                   std::int64_t cap = kDefaultCellCap);

struct BeckStats {
  double residual = 0;  // sup |Psi - 1 - Psi_sd - Psi_not|
  double mean = 0;
  double negative_measure = 0;
  double l1 = 0;
  double l2 = 0;
  double pairing_sd1 = 0;          // <H, Psi_sd_1> on the grid
  double pairing_sd1_formula = 0;  // rho_tilde 2^-n sum |alpha|
  std::vector<std::vector<double>> block_moments;  // ||rho F_t||_p / sqrt p
};

BeckStats beck_stats(const BeckDecomposition& D, const HaarExpansion& H, int p_max = 4);

struct BeckLedger {
  std::size_t N = 0;
  int n = 0;
  double main = 0;    // <D_N, Psi_sd_1>
  double second = 0;  // |<D_N, Psi_sd_2>|
  double higher = 0;  // sum_{k>=3} |<D_N, Psi_sd_k>|
  double pairing_sd = 0;
  double pairing_not = 0;
  double ratio = 0;  // (second + higher) / main
};

BeckLedger beck_discrepancy_ledger(const PointSet& A, const BeckParameters& p, std::int64_t cap = kDefaultCellCap);

struct SmallBallReport {
  int n = 0;
  int d = 0;
  double lhs = 0;  // 2^-n sum |alpha(R)|
  double rhs = 0;  // || sum alpha h_R ||_inf
  double trivial_ratio = 0;        // lhs / (n^((d-1)/2) rhs)
  double trivial_ratio_exact = 0;  // lhs / (sqrt|H_n| rhs)
  double conjectured_ratio = 0;    // lhs / (n^((d-2)/2) rhs)
};

// Exact sup of |sum alpha h_R| for expansions of depth <= n.
double hyperbolic_sup(const HaarExpansion& H, int n, std::int64_t cap = kDefaultCellCap);

SmallBallReport smallball_report(const HaarExpansion& H, int n, std::int64_t cap = kDefaultCellCap);

enum class SignMode { Random, AllOnes };

struct SmallBallSummary {
  int n = 0;
  int d = 0;
  std::size_t trials = 0;
  double mean_sup = 0;
  double max_trivial_ratio = 0;
  double max_trivial_ratio_exact = 0;
  double mean_conjectured_ratio = 0;
};

// Trial t uses stream t of the seed.
SmallBallSummary smallball_experiment(int n, int d, std::size_t trials, SignMode mode, std::uint64_t seed,
                                      std::int64_t cap = kDefaultCellCap);

}  // namespace dlab
