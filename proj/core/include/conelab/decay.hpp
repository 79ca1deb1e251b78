#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace conelab {

// Nonnegative nonincreasing sequence.  `scale` says what index j stands for:
// Q(4^j) for the decay iteration, Q(2^j) for the Theta machinery.
enum class DyadicScale { four, two };

struct MonotoneSeq {
  std::vector<double> values;
  DyadicScale scale = DyadicScale::four;
  bool verified_monotone = false;

  // Sets verified_monotone; false on any increase or negative entry.
  bool verify();
  std::size_t size() const { return values.size(); }
  double operator[](std::size_t j) const { return values[j]; }
};

// Q(2^j) from Q(4^i): even entries copied, odd entries the geometric mean of
// their neighbours (any value in between keeps monotonicity).
MonotoneSeq dyadic_from_quartic(const MonotoneSeq& q4);
// Q(4^i) = Q(2^{2i}).
MonotoneSeq quartic_from_dyadic(const MonotoneSeq& q2);

// Theta_j for j >= first, with the relation Theta^{2+mu} <= C_mu (Q_{j-1} - Q_{j+3}).
struct ThetaSeq {
  std::vector<double> values;  // values[i] is Theta_{first + i}
  std::size_t first = 1;
  double mu = 0.1, c_mu = 1.0;

  std::size_t last() const { return first + values.size() - 1; }
  double at(std::size_t j) const { return values.at(j - first); }
};

struct Inequality {
  std::string name;
  std::int64_t index = 0;
  double lhs = 0.0, rhs = 0.0;
  bool holds() const;  // lhs <= rhs up to a relative 1e-12
};

class DecayError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Lower bound C(alpha, C') for a^{alpha-1} - b^{alpha-1} under
// 0 < a < b <= 1 and a^{2-alpha} <= C'(b - a).  Split at b = 2a:
//   b >= 2a:  a^{alpha-1}(1 - 2^{alpha-1}) >= 1 - 2^{alpha-1}
//   b <  2a:  (1-alpha)(b-a) b^{alpha-2} >= (1-alpha) 2^{alpha-2} / C'
double alg_constant(double alpha, double c_prime);

struct AlgResult {
  double lhs = 0.0;        // a^{alpha-1} - b^{alpha-1}
  double bound = 0.0;      // alg_constant(alpha, C')
  double naive = 0.0;      // (1-alpha)/C', not a valid bound in general
  bool wide_branch = false;  // b >= 2a
  bool holds() const { return lhs >= bound * (1.0 - 1e-12); }
};
// Throws DecayError on precondition violations.
AlgResult alg_lemma(double a, double b, double alpha, double c_prime);

struct AlgGridReport {
  std::size_t points = 0, failures = 0;
  std::size_t naive_failures = 0;  // points where (1-alpha)/C' is not a lower bound
  double min_margin = 0.0;         // min lhs / bound
};
// a, b, alpha on `per_axis` points each; C' on `per_axis` multiples (>= 1)
// of the smallest admissible value, so every point meets the hypothesis.
AlgGridReport alg_lemma_grid(int per_axis = 10);

// Q_double^{2-alpha} <= C (Q_half - Q_double)
bool o3_step(double q_half, double q_double, double alpha, double c);

// Q_{j+1} with equality in the recursion: x^{2-alpha} = C'(Q_j - x).
double extremal_next(double q, double alpha, double c_prime);
MonotoneSeq extremal_sequence(double q0, double alpha, double c_prime, std::size_t count);

struct DecayCertificate {
  bool issued = false;
  std::string failure;
  std::int64_t failing_index = -1;

  double alpha = 0.0, beta = 0.0;
  double c_prime = 0.0;
  double c = 0.0;        // alg constant: Q_{j+1}^{alpha-1} - Q_j^{alpha-1} >= c
  double c_bound = 0.0;  // Q_{j2+1} <= c_bound (j2 - j1)^{-1-beta}
  double c_log = 0.0;    // Q(s) <= c_log / log(s/r)^{1+beta}, r = 4^{j1}
  std::size_t j1 = 0, j2 = 0;
  double fitted_exponent = 0.0;  // log-log slope of Q over the last decade
  std::size_t checked = 0;
  std::vector<Inequality> checks;

  bool recheck() const;
};

// Q indexed by powers of 4.  Checks the recursion on [j1, j2], the alg
// bound at each step, the telescoped sum and the power and log forms.
DecayCertificate iterate_decay(const MonotoneSeq& seq, double alpha, double c_prime, std::size_t j1,
                               std::size_t j2);

struct SeriesResult {
  double bound = 0.0;        // C k (beta+1)/(beta+1-nu) m^{nu-1-beta}
  double partial_sum = 0.0;  // sum_{j=m}^{J} (a_j - a_{j+k}) j^nu
  double tail_bound = 0.0;   // same lemma bound from J+1 on
  std::size_t last = 0;      // J
  bool holds() const { return partial_sum <= bound * (1.0 + 1e-12); }
};
// a is evaluated at j >= 1; envelope a_j <= c j^{-1-beta}.
SeriesResult series_lemma(const std::function<double(std::size_t)>& a, double c, double beta, std::size_t k,
                          double nu, std::size_t m, std::size_t last = 1000000);
// Finite sequence (index 0 unused); sums as far as a_{j+k} is stored.
SeriesResult series_lemma(const MonotoneSeq& a, double c, double beta, std::size_t k, double nu, std::size_t m);

// Largest Theta consistent with the relation, for j in [1, size - 4].
ThetaSeq theta_from_Q(const MonotoneSeq& q, double mu, double c_mu);

struct Exponents {
  double mu = 0.0, gamma = 0.0;
  double nu = 0.0;        // gamma (2 + mu)
  double beta_bar = 0.0;  // (1 + beta - nu) / (2 + mu)
};
// Throws DecayError naming the violated constraint(s).
Exponents check_exponents(double beta, double mu, double gamma);
// Grid mu in [0.01, 1], gamma in (1/2, 1), step 1e-3; first pair with the
// largest beta_bar.  With mu given only gamma is searched.
Exponents search_exponents(double beta, std::optional<double> mu = std::nullopt);

struct ThetaSumCertificate {
  bool issued = false;
  std::string failure;
  std::int64_t failing_index = -1;

  Exponents exps;
  double beta = 0.0;
  double c_decay = 0.0;  // Q_j <= c_decay j^{-1-beta}
  double holder_zeta = 0.0;
  double c_bar = 0.0;
  std::size_t j1 = 0;
  double bound = 0.0;  // c_bar j1^{-beta_bar}
  double direct = 0.0; // sum of Theta from j1
  std::vector<Inequality> checks;

  bool recheck() const;
};

// Q indexed by powers of 2.  If c_decay is not given the smallest envelope
// constant on the stored range is used.
ThetaSumCertificate sum_theta(const MonotoneSeq& q, const ThetaSeq& theta, double beta, std::size_t j1,
                              std::optional<double> gamma = std::nullopt,
                              std::optional<double> c_decay = std::nullopt);

// 3 sum_{j1}^{j2} Theta_j; j2 = -1 runs to the end.
double cauchy_annuli(const ThetaSeq& theta, std::size_t j1, std::int64_t j2 = -1);

// Rescaled annuli as points of a metric space (pairwise distances given),
// with comparison cones between consecutive ones.
struct AnnulusChain {
  std::vector<std::vector<double>> dist;       // d(A_i, A_j)
  std::vector<double> to_cone, next_to_cone;  // d(A_j, C_j), d(A_{j+1}, C_j)
  std::size_t first = 1;                      // index of dist row 0
};
AnnulusChain synthetic_annuli(const ThetaSeq& theta, std::uint64_t seed, int dim = 3);

struct ChainReport {
  bool ok = false;
  std::vector<Inequality> checks;
  double sup_distance = 0.0, bound = 0.0;
};
ChainReport verify_annulus_chain(const AnnulusChain& chain, const ThetaSeq& theta);

// Scales r = 2^j R, j = 0..m+3.  closeness[j] is the distance of the annulus
// at scale j to the fixed cone, in the same scale-invariant units as delta.
struct AbstractInstance {
  std::string name;
  double alpha = 0.5, c_prime = 1.0;
  double mu = 0.1, c_mu = 1.0;
  std::optional<double> gamma;
  double delta = 0.1, eps = 0.0;
  std::size_t j1 = 1, m = 1;
  double a_half = 0.0;  // A(R/2)
  std::vector<double> A, Q, theta, closeness;
};

struct BootstrapStep {
  std::string name;
  std::int64_t scale = -1;
  double lhs = 0.0, rhs = 0.0;
  bool ok = false;
};

struct EffectiveCertificate {
  bool issued = false;
  std::string failed_step;
  std::int64_t failing_scale = -1;

  double delta = 0.0, eps = 0.0;
  double beta = 0.0, beta_bar = 0.0, c_bar = 0.0;
  std::size_t j1 = 0, m = 0;
  double closeness_bound = 0.0;  // every scale in (R, 2^m R) is this close
  double c_log = 0.0;            // sup d(A_i, A_j), i,j >= jbar  <=  c_log log(2^jbar)^{-beta_bar}
  std::vector<double> tail_sums;  // sum_{j >= jbar} Theta_j, jbar = j1..m
  std::vector<BootstrapStep> steps;
};

EffectiveCertificate bootstrap_uniqueness(const AbstractInstance& inst);

// Instance built from an extremal sequence; constants are chosen so that
// all hypotheses hold.
AbstractInstance forward_instance(double alpha = 0.5, std::size_t m = 400);
AbstractInstance exact_cone_instance(std::size_t m = 64);
// Broken copies of forward_instance: seed closeness, A-drop, Theta relation.
struct Adversary {
  AbstractInstance inst;
  std::string expected_step;
  std::int64_t expected_scale = -1;
};
std::vector<Adversary> adversarial_instances();

std::string to_json(const MonotoneSeq& s);
std::string to_json(const ThetaSeq& t);
// `full` includes every checked inequality.
std::string to_json(const DecayCertificate& c, bool full = false);
std::string to_json(const ThetaSumCertificate& c, bool full = false);
std::string to_json(const EffectiveCertificate& c, bool full = false);
// j, Q_j, Theta_j, bound_j
std::string decay_table_csv(const MonotoneSeq& q, const ThetaSeq& theta, const ThetaSumCertificate& c);

}  // namespace conelab
