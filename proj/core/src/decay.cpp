#include "conelab/decay.hpp"

#include <boost/math/special_functions/zeta.hpp>
#include <boost/math/tools/roots.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

namespace conelab {

namespace {

constexpr double kRelSlack = 1e-12;

bool le(double lhs, double rhs) { return lhs <= rhs + kRelSlack * std::max(std::fabs(lhs), std::fabs(rhs)); }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double beta_of(double alpha) { return alpha / (1.0 - alpha); }

}  // namespace

bool Inequality::holds() const { return le(lhs, rhs); }

bool MonotoneSeq::verify() {
  verified_monotone = true;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!(values[j] >= 0.0) || (j > 0 && values[j] > values[j - 1])) {
      verified_monotone = false;
      break;
    }
  }
  return verified_monotone;
}

MonotoneSeq dyadic_from_quartic(const MonotoneSeq& q4) {
  MonotoneSeq out;
  out.scale = DyadicScale::two;
  if (q4.size() == 0) return out;
  out.values.reserve(2 * q4.size() - 1);
  for (std::size_t i = 0; i < q4.size(); ++i) {
    out.values.push_back(q4[i]);
    if (i + 1 < q4.size()) out.values.push_back(std::sqrt(q4[i] * q4[i + 1]));
  }
  out.verify();
  return out;
}

MonotoneSeq quartic_from_dyadic(const MonotoneSeq& q2) {
  MonotoneSeq out;
  out.scale = DyadicScale::four;
  for (std::size_t j = 0; j < q2.size(); j += 2) out.values.push_back(q2[j]);
  out.verify();
  return out;
}

// ---------------------------------------------------------------------------
// Algebraic lemma

double alg_constant(double alpha, double c_prime) {
  return (1.0 - alpha) *
         std::min((1.0 - std::pow(2.0, alpha - 1.0)) / (1.0 - alpha), std::pow(2.0, alpha - 2.0) / c_prime);
}

AlgResult alg_lemma(double a, double b, double alpha, double c_prime) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DecayError("alg_lemma: alpha must lie in (0,1)");
  if (!(c_prime > 0.0)) throw DecayError("alg_lemma: C' must be positive");
  if (!(a > 0.0 && a < b && b <= 1.0)) throw DecayError("alg_lemma: need 0 < a < b <= 1");
  if (!le(std::pow(a, 2.0 - alpha), c_prime * (b - a)))
    throw DecayError("alg_lemma: hypothesis a^{2-alpha} <= C'(b-a) fails");
  AlgResult r;
  r.lhs = std::pow(a, alpha - 1.0) - std::pow(b, alpha - 1.0);
  r.bound = alg_constant(alpha, c_prime);
  r.naive = (1.0 - alpha) / c_prime;
  r.wide_branch = b >= 2.0 * a;
  return r;
}

AlgGridReport alg_lemma_grid(int per_axis) {
  AlgGridReport rep;
  rep.min_margin = INFINITY;
  const int n = per_axis;
  const double mults[] = {1.0, 1.5, 2.0, 4.0, 8.0, 16.0, 64.0, 256.0, 1e3, 1e4};
  for (int ia = 0; ia < n; ++ia) {
    // a from 1e-4 to 0.95, log spaced
    const double a = 1e-4 * std::pow(0.95 / 1e-4, double(ia) / (n - 1));
    for (int ib = 0; ib < n; ++ib) {
      const double b = ib + 1 == n ? 1.0 : a + (1.0 - a) * double(ib + 1) / n;
      for (int ial = 0; ial < n; ++ial) {
        const double alpha = 0.05 + 0.9 * double(ial) / (n - 1);
        const double cmin = std::pow(a, 2.0 - alpha) / (b - a);
        for (int ic = 0; ic < n; ++ic) {
          const double mult = ic < 10 ? mults[ic] : std::pow(10.0, ic - 5);
          const AlgResult r = alg_lemma(a, b, alpha, cmin * mult);
          ++rep.points;
          if (!r.holds()) ++rep.failures;
          if (r.lhs < r.naive) ++rep.naive_failures;
          rep.min_margin = std::min(rep.min_margin, r.lhs / r.bound);
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Decay iteration

bool o3_step(double q_half, double q_double, double alpha, double c) {
  return le(std::pow(q_double, 2.0 - alpha), c * (q_half - q_double));
}

double extremal_next(double q, double alpha, double c_prime) {
  if (q <= 0.0) return 0.0;
  auto f = [&](double x) { return std::pow(x, 2.0 - alpha) - c_prime * (q - x); };
  boost::uintmax_t iters = 200;
  auto [lo, hi] = boost::math::tools::toms748_solve(f, 0.0, q, -c_prime * q, std::pow(q, 2.0 - alpha),
                                                    boost::math::tools::eps_tolerance<double>(52), iters);
  (void)hi;
  // f(lo) <= 0, so the recursion holds at lo in floating point as well
  while (lo > 0.0 && f(lo) > 0.0) lo = std::nextafter(lo, 0.0);
  return lo;
}

MonotoneSeq extremal_sequence(double q0, double alpha, double c_prime, std::size_t count) {
  MonotoneSeq s;
  s.values.reserve(count);
  double q = q0;
  for (std::size_t j = 0; j < count; ++j) {
    s.values.push_back(q);
    q = extremal_next(q, alpha, c_prime);
  }
  s.verify();
  return s;
}

bool DecayCertificate::recheck() const {
  if (std::fabs(beta - beta_of(alpha)) > 1e-14 * std::max(1.0, beta)) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Inequality& q) { return q.holds(); });
}

DecayCertificate iterate_decay(const MonotoneSeq& seq_in, double alpha, double c_prime, std::size_t j1,
                               std::size_t j2) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DecayError("iterate_decay: alpha must lie in (0,1)");
  if (!(c_prime > 0.0)) throw DecayError("iterate_decay: C' must be positive");
  if (!(j1 < j2) || j2 + 1 >= seq_in.size()) throw DecayError("iterate_decay: index range outside the sequence");

  DecayCertificate c;
  c.alpha = alpha;
  c.beta = beta_of(alpha);
  c.c_prime = c_prime;
  c.c = alg_constant(alpha, c_prime);
  c.c_bound = std::pow(c.c, -(1.0 + c.beta));
  c.c_log = c.c_bound * std::pow(3.0 * std::log(4.0), 1.0 + c.beta);
  c.j1 = j1;
  c.j2 = j2;

  MonotoneSeq seq = seq_in;
  auto refuse = [&](const std::string& why, std::int64_t j) {
    c.issued = false;
    c.failure = why;
    c.failing_index = j;
    return c;
  };
  if (!seq.verify()) {
    for (std::size_t j = 1; j < seq.size(); ++j)
      if (!(seq[j] >= 0.0) || seq[j] > seq[j - 1]) return refuse("monotone", std::int64_t(j));
    return refuse("monotone", 0);
  }
  for (std::size_t j = j1; j <= j2 + 1; ++j)
    if (!(seq[j] > 0.0 && seq[j] <= 1.0)) return refuse("range", std::int64_t(j));

  auto add = [&](const char* name, std::size_t j, double lhs, double rhs) {
    c.checks.push_back({name, std::int64_t(j), lhs, rhs});
    ++c.checked;
    return c.checks.back().holds();
  };
  const double am1 = alpha - 1.0;
  for (std::size_t j = j1; j <= j2; ++j) {
    if (!add("recursion", j, std::pow(seq[j + 1], 2.0 - alpha), c_prime * (seq[j] - seq[j + 1])))
      return refuse("recursion", std::int64_t(j));
    if (!add("alg", j, c.c, std::pow(seq[j + 1], am1) - std::pow(seq[j], am1))) return refuse("alg", std::int64_t(j));
  }
  const double base = std::pow(seq[j1 + 1], am1);
  for (std::size_t k = j1 + 1; k <= j2; ++k) {
    const double steps = double(k - j1);
    if (!add("telescope", k, base + c.c * steps, std::pow(seq[k + 1], am1))) return refuse("telescope", std::int64_t(k));
    if (!add("power", k, seq[k + 1], c.c_bound * std::pow(steps, -(1.0 + c.beta))))
      return refuse("power", std::int64_t(k));
    // worst s in [4^{k+1}, 4^{k+2}): Q(s) <= Q_{k+1}, log(s/r) < (k+2-j1) log 4
    if (!add("log", k, seq[k + 1], c.c_log * std::pow((steps + 2.0) * std::log(4.0), -(1.0 + c.beta))))
      return refuse("log", std::int64_t(k));
  }

  // slope of log Q against log j over the last decade of the range
  const std::size_t lo = std::max<std::size_t>(j1 + 1, (j2 + 1) / 10);
  if (j2 + 1 > lo + 1) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t j = lo; j <= j2 + 1; ++j) {
      const double x = std::log(double(j)), y = std::log(seq[j]);
      sx += x, sy += y, sxx += x * x, sxy += x * y, ++cnt;
    }
    c.fitted_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  }
  c.issued = true;
  return c;
}

// ---------------------------------------------------------------------------
// Series lemma

namespace {

void series_pre(double beta, double nu, std::size_t m) {
  if (!(beta > 0.0)) throw DecayError("series_lemma: beta must be positive");
  if (!(nu >= 1.0 && nu < 1.0 + beta)) throw DecayError("series_lemma: nu must lie in [1, 1+beta)");
  if (m < 1) throw DecayError("series_lemma: m must be positive");
}

double series_bound(double c, double beta, std::size_t k, double nu, double m) {
  return c * double(k) * (beta + 1.0) / (beta + 1.0 - nu) * std::pow(m, nu - 1.0 - beta);
}

}  // namespace

SeriesResult series_lemma(const std::function<double(std::size_t)>& a, double c, double beta, std::size_t k,
                          double nu, std::size_t m, std::size_t last) {
  series_pre(beta, nu, m);
  SeriesResult r;
  r.bound = series_bound(c, beta, k, nu, double(m));
  r.last = std::max(last, m);
  long double s = 0.0L;
  if (k > 0)
    for (std::size_t j = m; j <= r.last; ++j)
      s += (long double)(a(j) - a(j + k)) * std::pow((long double)j, (long double)nu);
  r.partial_sum = double(s);
  r.tail_bound = series_bound(c, beta, k, nu, double(r.last + 1));
  return r;
}

SeriesResult series_lemma(const MonotoneSeq& a, double c, double beta, std::size_t k, double nu, std::size_t m) {
  series_pre(beta, nu, m);
  if (a.size() < m + k + 1) throw DecayError("series_lemma: sequence too short");
  SeriesResult r;
  r.bound = series_bound(c, beta, k, nu, double(m));
  r.last = a.size() - 1 - k;
  long double s = 0.0L;
  if (k > 0)
    for (std::size_t j = m; j <= r.last; ++j)
      s += (long double)(a[j] - a[j + k]) * std::pow((long double)j, (long double)nu);
  r.partial_sum = double(s);
  r.tail_bound = series_bound(c, beta, k, nu, double(r.last + 1));
  return r;
}

// ---------------------------------------------------------------------------
// Theta

ThetaSeq theta_from_Q(const MonotoneSeq& q, double mu, double c_mu) {
  if (q.size() < 5) throw DecayError("theta_from_Q: need Q_0..Q_4 at least");
  if (!(mu > 0.0) || !(c_mu >= 0.0)) throw DecayError("theta_from_Q: need mu > 0, C_mu >= 0");
  ThetaSeq t;
  t.first = 1;
  t.mu = mu;
  t.c_mu = c_mu;
  for (std::size_t j = 1; j + 3 < q.size(); ++j)
    t.values.push_back(std::pow(c_mu * std::max(0.0, q[j - 1] - q[j + 3]), 1.0 / (2.0 + mu)));
  return t;
}

Exponents check_exponents(double beta, double mu, double gamma) {
  std::string bad;
  if (!(mu > 0.0)) bad += " mu > 0;";
  if (!(gamma > 0.0)) bad += " gamma > 0;";
  if (!((2.0 + mu) * gamma / (1.0 + mu) > 1.0)) bad += " (2+mu) gamma / (1+mu) > 1 (Holder series summable);";
  if (!(gamma * (2.0 + mu) < 1.0 + beta)) bad += " gamma (2+mu) < 1 + beta (series lemma range);";
  if (!bad.empty()) throw DecayError("infeasible exponents: violated" + bad);
  Exponents e;
  e.mu = mu;
  e.gamma = gamma;
  e.nu = gamma * (2.0 + mu);
  e.beta_bar = (1.0 + beta - e.nu) / (2.0 + mu);
  return e;
}

Exponents search_exponents(double beta, std::optional<double> mu) {
  Exponents best;
  bool found = false;
  auto consider = [&](double m, double g) {
    if (!((2.0 + m) * g / (1.0 + m) > 1.0) || !(g * (2.0 + m) < 1.0 + beta)) return;
    const double bb = (1.0 + beta - g * (2.0 + m)) / (2.0 + m);
    if (!found || bb > best.beta_bar) {
      best = {m, g, g * (2.0 + m), bb};
      found = true;
    }
  };
  // gamma = 0.501 .. 0.999
  if (mu) {
    for (int ig = 501; ig <= 999; ++ig) consider(*mu, ig * 1e-3);
  } else {
    for (int im = 10; im <= 1000; ++im)
      for (int ig = 501; ig <= 999; ++ig) consider(im * 1e-3, ig * 1e-3);
  }
  if (!found)
    throw DecayError("infeasible exponents: no grid point has (2+mu) gamma/(1+mu) > 1 and gamma (2+mu) < 1+beta "
                     "(needs mu < beta), beta = " +
                     fmt("%.6g", beta));
  return best;
}

bool ThetaSumCertificate::recheck() const {
  return std::all_of(checks.begin(), checks.end(), [](const Inequality& q) { return q.holds(); });
}

ThetaSumCertificate sum_theta(const MonotoneSeq& q_in, const ThetaSeq& theta, double beta, std::size_t j1,
                              std::optional<double> gamma, std::optional<double> c_decay) {
  ThetaSumCertificate c;
  c.beta = beta;
  c.j1 = j1;
  c.exps = gamma ? check_exponents(beta, theta.mu, *gamma) : search_exponents(beta, theta.mu);
  const Exponents& e = c.exps;
  const double mu = theta.mu;

  auto refuse = [&](const std::string& why, std::int64_t j) {
    c.issued = false;
    c.failure = why;
    c.failing_index = j;
    return c;
  };
  MonotoneSeq q = q_in;
  if (!q.verify()) return refuse("monotone", 0);
  if (theta.values.empty() || theta.first < 1 || theta.last() + 3 >= q.size())
    throw DecayError("sum_theta: Theta range not covered by Q");
  if (j1 < theta.first || j1 > theta.last()) throw DecayError("sum_theta: j1 outside the Theta range");

  auto add = [&](const char* name, std::size_t j, double lhs, double rhs) {
    c.checks.push_back({name, std::int64_t(j), lhs, rhs});
    return c.checks.back().holds();
  };

  for (std::size_t j = theta.first; j <= theta.last(); ++j)
    if (!add("theta_relation", j, std::pow(theta.at(j), 2.0 + mu), theta.c_mu * (q[j - 1] - q[j + 3])))
      return refuse("theta_relation", std::int64_t(j));

  double cd = 0.0;
  if (c_decay) {
    cd = *c_decay;
  } else {
    for (std::size_t j = 1; j < q.size(); ++j) cd = std::max(cd, q[j] * std::pow(double(j), 1.0 + beta));
  }
  c.c_decay = cd;
  for (std::size_t j = 1; j < q.size(); ++j)
    if (!add("decay", j, q[j], cd * std::pow(double(j), -(1.0 + beta)))) return refuse("decay", std::int64_t(j));

  // a_j = Q_{j-1}: a_1 = Q_0, a_j <= cd (j-1)^{-1-beta} <= cd 2^{1+beta} j^{-1-beta} for j >= 2
  const double ca = std::max(cd * std::pow(2.0, 1.0 + beta), q[0]);
  const double series = series_bound(ca, beta, 4, e.nu, double(j1));
  c.holder_zeta = boost::math::zeta(e.nu / (1.0 + mu));
  c.c_bar = std::pow(theta.c_mu * ca * 4.0 * (beta + 1.0) / (beta + 1.0 - e.nu), 1.0 / (2.0 + mu)) *
            std::pow(c.holder_zeta, (1.0 + mu) / (2.0 + mu));
  c.bound = c.c_bar * std::pow(double(j1), -e.beta_bar);

  long double weighted = 0.0L, qdiff = 0.0L, direct = 0.0L;
  for (std::size_t j = j1; j <= theta.last(); ++j) {
    const long double w = std::pow((long double)j, (long double)e.nu);
    weighted += std::pow((long double)theta.at(j), 2.0L + mu) * w;
    qdiff += (long double)(q[j - 1] - q[j + 3]) * w;
    direct += theta.at(j);
  }
  c.direct = double(direct);
  if (!add("series", j1, double(qdiff), series)) return refuse("series", std::int64_t(j1));
  if (!add("relation_sum", j1, double(weighted), theta.c_mu * double(qdiff))) return refuse("relation_sum", std::int64_t(j1));
  const double holder =
      std::pow(double(weighted), 1.0 / (2.0 + mu)) * std::pow(c.holder_zeta, (1.0 + mu) / (2.0 + mu));
  if (!add("holder", j1, c.direct, holder)) return refuse("holder", std::int64_t(j1));
  if (!add("theta_sum", j1, c.direct, c.bound)) return refuse("theta_sum", std::int64_t(j1));

  // every later starting index as well
  long double tail = 0.0L;
  std::vector<double> tails(theta.last() - j1 + 1);
  for (std::size_t j = theta.last() + 1; j-- > j1;) {
    tail += theta.at(j);
    tails[j - j1] = double(tail);
  }
  for (std::size_t j = j1; j <= theta.last(); ++j)
    if (!add("theta_tail", j, tails[j - j1], c.c_bar * std::pow(double(j), -e.beta_bar)))
      return refuse("theta_tail", std::int64_t(j));

  c.issued = true;
  return c;
}

// ---------------------------------------------------------------------------
// Annuli

double cauchy_annuli(const ThetaSeq& theta, std::size_t j1, std::int64_t j2) {
  if (theta.values.empty()) return 0.0;
  const std::size_t last = j2 < 0 ? theta.last() : std::min<std::size_t>(std::size_t(j2), theta.last());
  long double s = 0.0L;
  for (std::size_t j = std::max(j1, theta.first); j <= last; ++j) s += theta.at(j);
  return 3.0 * double(s);
}

namespace {

struct Rng {
  std::mt19937_64 g;
  explicit Rng(std::uint64_t seed) : g(seed) {}
  // raw bits only, so results do not depend on the library's distributions
  double uniform() { return double(g() >> 11) * 0x1.0p-53; }
  std::vector<double> direction(int dim) {
    std::vector<double> v(dim);
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (double& x : v) {
        x = 2.0 * uniform() - 1.0;
        n2 += x * x;
      }
    } while (n2 > 1.0 || n2 < 1e-12);
    for (double& x : v) x /= std::sqrt(n2);
    return v;
  }
};

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

AnnulusChain synthetic_annuli(const ThetaSeq& theta, std::uint64_t seed, int dim) {
  Rng rng(seed);
  AnnulusChain ch;
  ch.first = theta.first;
  const std::size_t n = theta.values.size();
  std::vector<std::vector<double>> pts(n + 1, std::vector<double>(dim));
  for (double& x : pts[0]) x = rng.uniform();
  for (std::size_t i = 0; i < n; ++i) {
    const double th = theta.values[i];
    std::vector<double> cone = pts[i];
    auto u = rng.direction(dim);
    const double r1 = 2.0 * th * rng.uniform();
    for (int d = 0; d < dim; ++d) cone[d] += r1 * u[d];
    auto v = rng.direction(dim);
    const double r2 = th * rng.uniform();
    for (int d = 0; d < dim; ++d) pts[i + 1][d] = cone[d] + r2 * v[d];
    ch.to_cone.push_back(dist(pts[i], cone));
    ch.next_to_cone.push_back(dist(pts[i + 1], cone));
  }
  ch.dist.assign(n + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j <= n; ++j) ch.dist[i][j] = dist(pts[i], pts[j]);
  return ch;
}

ChainReport verify_annulus_chain(const AnnulusChain& ch, const ThetaSeq& theta) {
  ChainReport rep;
  const std::size_t n = theta.values.size();
  if (ch.dist.size() != n + 1 || ch.to_cone.size() != n || ch.next_to_cone.size() != n)
    throw DecayError("verify_annulus_chain: chain and Theta sizes differ");
  // distances come from O(1) coordinates, so allow roundoff at that scale
  double diam = 0.0;
  for (const auto& row : ch.dist)
    for (double d : row) diam = std::max(diam, d);
  const double floor = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, diam);
  auto add = [&](const char* name, std::size_t j, double lhs, double rhs) {
    rep.checks.push_back({name, std::int64_t(j), lhs, rhs + floor});
  };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = ch.first + i;
    const double th = theta.values[i];
    add("to_cone", j, ch.to_cone[i], 2.0 * th);
    add("next_to_cone", j, ch.next_to_cone[i], th);
    add("consecutive", j, ch.dist[i][i + 1], ch.to_cone[i] + ch.next_to_cone[i]);
    add("consecutive_theta", j, ch.dist[i][i + 1], 3.0 * th);
  }
  // every pair against 3 sum of Theta between them; one row per start index
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + theta.values[i];
  for (std::size_t i = 0; i <= n; ++i) {
    double worst_gap = -INFINITY, lhs = 0.0, rhs = 0.0;
    for (std::size_t k = i + 1; k <= n; ++k) {
      const double b = 3.0 * (prefix[k] - prefix[i]);
      if (ch.dist[i][k] - b > worst_gap) worst_gap = ch.dist[i][k] - b, lhs = ch.dist[i][k], rhs = b;
      rep.sup_distance = std::max(rep.sup_distance, ch.dist[i][k]);
    }
    if (i < n) add("pairwise", ch.first + i, lhs, rhs);
  }
  rep.bound = 3.0 * prefix[n];
  add("sup", ch.first, rep.sup_distance, rep.bound);
  rep.ok = std::all_of(rep.checks.begin(), rep.checks.end(), [](const Inequality& q) { return q.holds(); });
  return rep;
}

// ---------------------------------------------------------------------------
// Bootstrap

EffectiveCertificate bootstrap_uniqueness(const AbstractInstance& in) {
  EffectiveCertificate c;
  c.delta = in.delta;
  c.eps = in.eps;
  c.j1 = in.j1;
  c.m = in.m;
  c.beta = beta_of(in.alpha);

  auto step = [&](const std::string& name, std::int64_t scale, double lhs, double rhs, bool ok) {
    c.steps.push_back({name, scale, lhs, rhs, ok});
    if (!ok) {
      c.issued = false;
      c.failed_step = name;
      c.failing_scale = scale;
    }
    return ok;
  };
  const std::size_t m = in.m, j1 = in.j1;
  const double d100 = in.delta / 100.0;

  const bool shaped = in.A.size() >= m + 4 && in.Q.size() >= m + 4 && in.theta.size() >= m + 1 &&
                      in.closeness.size() >= m + 1 && j1 >= 1 && j1 < m && in.delta > 0.0 && in.eps > 0.0 &&
                      in.alpha > 0.0 && in.alpha < 1.0;
  if (!step("shape", -1, 0, 0, shaped)) return c;

  // monotonicity is checked, never assumed
  if (!step("monotone_A", -1, in.A[0], in.a_half, in.A[0] <= in.a_half)) return c;
  for (std::size_t j = 1; j < m + 4; ++j)
    if (in.A[j] > in.A[j - 1]) return step("monotone_A", std::int64_t(j), in.A[j], in.A[j - 1], false), c;
  for (std::size_t j = 0; j < m + 4; ++j)
    if (!(in.Q[j] >= 0.0) || (j > 0 && in.Q[j] > in.Q[j - 1]))
      return step("monotone_Q", std::int64_t(j), in.Q[j], j ? in.Q[j - 1] : 0.0, false), c;
  step("monotone", -1, 0, 0, true);

  MonotoneSeq q2;
  q2.scale = DyadicScale::two;
  q2.values.assign(in.Q.begin(), in.Q.begin() + std::ptrdiff_t(m + 4));
  q2.verify();

  ThetaSeq theta;
  theta.first = 1;
  theta.mu = in.mu;
  theta.c_mu = in.c_mu;
  theta.values.assign(in.theta.begin() + 1, in.theta.begin() + std::ptrdiff_t(m + 1));

  for (std::size_t j = 1; j <= m; ++j) {
    const double lhs = std::pow(in.theta[j], 2.0 + in.mu), rhs = in.c_mu * (in.Q[j - 1] - in.Q[j + 3]);
    if (!le(lhs, rhs)) return step("theta_relation", std::int64_t(j), lhs, rhs, false), c;
  }
  step("theta_relation", -1, 0, 0, true);

  // o3 at r = 2 * 4^i, i.e. Q(4^{i+1}) against Q(4^i)
  const MonotoneSeq q4 = quartic_from_dyadic(q2);
  for (std::size_t i = 0; i + 1 < q4.size(); ++i) {
    const double lhs = std::pow(q4[i + 1], 2.0 - in.alpha), rhs = in.c_prime * (q4[i] - q4[i + 1]);
    if (!le(lhs, rhs)) return step("recursion", std::int64_t(2 * i + 1), lhs, rhs, false), c;
  }
  step("recursion", -1, 0, 0, true);

  double c_decay = 0.0;
  std::size_t positive = 0;
  while (positive < q4.size() && q4[positive] > 0.0) ++positive;
  if (q4[0] > 1.0) return step("decay", 0, q4[0], 1.0, false), c;
  if (positive >= 3) {
    MonotoneSeq pre;
    pre.values.assign(q4.values.begin(), q4.values.begin() + std::ptrdiff_t(positive));
    const DecayCertificate dc = iterate_decay(pre, in.alpha, in.c_prime, 0, positive - 2);
    if (!dc.issued) return step("decay", 2 * dc.failing_index, 0, 0, false), c;
    // Q(2^j) <= Q(4^{floor(j/2)}) <= c_bound (j/8)^{-1-beta} for j >= 4
    c_decay = std::max(dc.c_bound * std::pow(8.0, 1.0 + c.beta), q2[0] * std::pow(4.0, 1.0 + c.beta));
  } else if (positive > 0) {
    c_decay = q2[0] * std::pow(double(q2.size()), 1.0 + c.beta);
  }
  step("decay", -1, c_decay, 0, true);

  ThetaSumCertificate ts;
  try {
    ts = sum_theta(q2, theta, c.beta, j1, in.gamma, c_decay);
  } catch (const DecayError& e) {
    return step("theta_sum", std::int64_t(j1), 0, 0, false), c;
  }
  if (!ts.issued) return step("theta_sum", ts.failing_index, 0, 0, false), c;
  c.c_bar = ts.c_bar;
  c.beta_bar = ts.exps.beta_bar;
  step("theta_sum", std::int64_t(j1), ts.direct, ts.bound, true);

  if (!step("choose_j1", std::int64_t(j1), ts.bound, d100, ts.bound < d100)) return c;

  // A(r/2) - A(8r) < eps must force Theta_r < delta/100
  for (std::size_t j = 1; j <= m; ++j)
    if (in.A[j - 1] - in.A[j + 3] < in.eps && !(in.theta[j] < d100))
      return step("choose_eps", std::int64_t(j), in.theta[j], d100, false), c;
  step("choose_eps", -1, 0, 0, true);

  for (std::size_t j = 0; j <= j1; ++j)
    if (!(in.closeness[j] < d100)) return step("hypothesis_A", std::int64_t(j), in.closeness[j], d100, false), c;
  step("hypothesis_A", -1, 0, 0, true);

  if (!(in.a_half - in.A[m + 3] < in.eps)) {
    std::size_t j = 0;
    while (j < m + 3 && in.a_half - in.A[j] < in.eps) ++j;
    return step("hypothesis_B", std::int64_t(j), in.a_half - in.A[j], in.eps, false), c;
  }
  step("hypothesis_B", -1, in.a_half - in.A[m + 3], in.eps, true);

  // induction over k: closeness delta_k on (R, 2^k R) extends one scale
  double delta_k = d100;
  long double run = 0.0L;
  for (std::size_t k = j1; k + 1 <= m; ++k) {
    if (!step("budget", std::int64_t(k), delta_k, in.delta / 2.0, delta_k <= in.delta / 2.0)) return c;
    const double drop = in.A[k - 1] - in.A[k + 3];
    if (!step("scale_drop", std::int64_t(k), drop, in.eps, drop < in.eps && in.theta[k] < d100)) return c;
    if (!step("extend", std::int64_t(k), delta_k + 3.0 * in.theta[k], in.delta, delta_k + 3.0 * in.theta[k] < in.delta))
      return c;
    run += in.theta[k];
    const double next = d100 + 3.0 * double(run);
    if (!step("induction", std::int64_t(k + 1), next, 4.0 * d100, next <= 4.0 * d100)) return c;
    if (!step("oracle", std::int64_t(k + 1), in.closeness[k + 1], next, le(in.closeness[k + 1], next))) return c;
    delta_k = next;
  }
  c.closeness_bound = 4.0 * d100;

  long double tail = 0.0L;
  c.tail_sums.assign(m - j1 + 1, 0.0);
  for (std::size_t j = m + 1; j-- > j1;) {
    tail += in.theta[j];
    c.tail_sums[j - j1] = double(tail);
  }
  for (std::size_t j = j1; j <= m; ++j) {
    const double rhs = c.c_bar * std::pow(double(j), -c.beta_bar);
    if (!le(c.tail_sums[j - j1], rhs)) return step("effective", std::int64_t(j), c.tail_sums[j - j1], rhs, false), c;
  }
  c.c_log = 3.0 * c.c_bar * std::pow(std::log(2.0), c.beta_bar);
  step("effective", -1, c.tail_sums.front(), c.c_bar * std::pow(double(j1), -c.beta_bar), true);
  c.issued = true;
  return c;
}

AbstractInstance forward_instance(double alpha, std::size_t m) {
  AbstractInstance in;
  in.name = "forward";
  in.alpha = alpha;
  in.c_prime = 1.0;
  in.mu = 0.1;
  in.delta = 0.1;
  in.j1 = 32;
  in.m = m;
  const double beta = beta_of(alpha);
  in.gamma = (1.0 + in.mu + 0.2 * (beta - in.mu)) / (2.0 + in.mu);

  const std::size_t n4 = (m + 3) / 2 + 2;
  const MonotoneSeq q4 = extremal_sequence(1.0, alpha, in.c_prime, n4);
  const MonotoneSeq q2 = dyadic_from_quartic(q4);
  in.Q.assign(q2.values.begin(), q2.values.begin() + std::ptrdiff_t(m + 4));

  // C_mu so that c_bar j1^{-beta_bar} is half of delta/100
  const DecayCertificate dc = iterate_decay(q4, alpha, in.c_prime, 0, n4 - 2);
  const double c_decay = std::max(dc.c_bound * std::pow(8.0, 1.0 + beta), in.Q[0] * std::pow(4.0, 1.0 + beta));
  MonotoneSeq qm;
  qm.values = in.Q;
  qm.scale = DyadicScale::two;
  ThetaSeq unit = theta_from_Q(qm, in.mu, 1.0);
  unit.values.resize(m);
  const ThetaSumCertificate ts1 = sum_theta(qm, unit, beta, in.j1, in.gamma, c_decay);
  in.c_mu = std::pow(0.5 * (in.delta / 100.0) / ts1.bound, 2.0 + in.mu);

  in.theta.assign(m + 1, 0.0);
  for (std::size_t j = 1; j <= m; ++j)
    in.theta[j] = 0.5 * std::pow(in.c_mu * (in.Q[j - 1] - in.Q[j + 3]), 1.0 / (2.0 + in.mu));
  in.theta[0] = in.theta[1];

  in.a_half = 2.0;
  in.A.resize(m + 4);
  for (std::size_t j = 0; j < m + 4; ++j) in.A[j] = 1.0 + in.Q[j];
  in.eps = 1.5 * (in.a_half - in.A[m + 3]);

  in.closeness.assign(m + 1, in.delta / 400.0);
  long double run = 0.0L;
  for (std::size_t j = in.j1 + 1; j <= m; ++j) {
    run += in.theta[j - 1];
    in.closeness[j] = in.delta / 400.0 + 1.5 * double(run);
  }
  return in;
}

AbstractInstance exact_cone_instance(std::size_t m) {
  AbstractInstance in;
  in.name = "exact-cone";
  in.alpha = 0.5;
  in.c_prime = 1.0;
  in.mu = 0.1;
  in.gamma = 0.6;
  in.delta = 0.1;
  in.eps = 1e-3;
  in.j1 = 4;
  in.m = m;
  in.a_half = 1.0;
  in.A.assign(m + 4, 1.0);
  in.Q.assign(m + 4, 0.0);
  in.theta.assign(m + 1, 0.0);
  in.closeness.assign(m + 1, 0.0);
  return in;
}

std::vector<Adversary> adversarial_instances() {
  const AbstractInstance base = forward_instance();
  std::vector<Adversary> out;

  Adversary seed{base, "hypothesis_A", std::int64_t(base.j1 / 2)};
  seed.inst.name = "seed-closeness";
  seed.inst.closeness[base.j1 / 2] = base.delta / 50.0;
  out.push_back(seed);

  Adversary drop{base, "hypothesis_B", 100};
  drop.inst.name = "area-drop";
  for (std::size_t j = 100; j < drop.inst.A.size(); ++j) drop.inst.A[j] -= 2.0 * base.eps;
  out.push_back(drop);

  Adversary rel{base, "theta_relation", 150};
  rel.inst.name = "theta-relation";
  rel.inst.theta[150] = 2.0 * std::pow(base.c_mu * (base.Q[149] - base.Q[153]), 1.0 / (2.0 + base.mu));
  out.push_back(rel);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using ojson = nlohmann::ordered_json;

ojson checks_json(const std::vector<Inequality>& v) {
  ojson a = ojson::array();
  for (const auto& q : v) a.push_back({{"name", q.name}, {"index", q.index}, {"lhs", q.lhs}, {"rhs", q.rhs}});
  return a;
}

}  // namespace

std::string to_json(const MonotoneSeq& s) {
  ojson j{{"scale", s.scale == DyadicScale::four ? "4^j" : "2^j"},
          {"verified_monotone", s.verified_monotone},
          {"values", s.values}};
  return j.dump(1);
}

std::string to_json(const ThetaSeq& t) {
  ojson j{{"first", t.first}, {"mu", t.mu}, {"c_mu", t.c_mu}, {"values", t.values}};
  return j.dump(1);
}

std::string to_json(const DecayCertificate& c, bool full) {
  ojson j{{"issued", c.issued},        {"failure", c.failure}, {"failing_index", c.failing_index},
          {"alpha", c.alpha},          {"beta", c.beta},       {"c_prime", c.c_prime},
          {"c", c.c},                  {"c_bound", c.c_bound}, {"c_log", c.c_log},
          {"j1", c.j1},                {"j2", c.j2},           {"fitted_exponent", c.fitted_exponent},
          {"checked", c.checked}};
  if (full) j["checks"] = checks_json(c.checks);
  return j.dump(1);
}

std::string to_json(const ThetaSumCertificate& c, bool full) {
  ojson j{{"issued", c.issued},
          {"failure", c.failure},
          {"failing_index", c.failing_index},
          {"mu", c.exps.mu},
          {"gamma", c.exps.gamma},
          {"nu", c.exps.nu},
          {"beta", c.beta},
          {"beta_bar", c.exps.beta_bar},
          {"c_decay", c.c_decay},
          {"holder_zeta", c.holder_zeta},
          {"c_bar", c.c_bar},
          {"j1", c.j1},
          {"bound", c.bound},
          {"direct", c.direct},
          {"checked", c.checks.size()}};
  if (full) j["checks"] = checks_json(c.checks);
  return j.dump(1);
}

std::string to_json(const EffectiveCertificate& c, bool full) {
  ojson steps = ojson::array();
  for (const auto& s : c.steps)
    if (full || s.scale < 0 || !s.ok)
      steps.push_back({{"name", s.name}, {"scale", s.scale}, {"lhs", s.lhs}, {"rhs", s.rhs}, {"ok", s.ok}});
  ojson j{{"issued", c.issued},
          {"failed_step", c.failed_step},
          {"failing_scale", c.failing_scale},
          {"delta", c.delta},
          {"eps", c.eps},
          {"beta", c.beta},
          {"beta_bar", c.beta_bar},
          {"c_bar", c.c_bar},
          {"j1", c.j1},
          {"m", c.m},
          {"closeness_bound", c.closeness_bound},
          {"c_log", c.c_log},
          {"steps", steps}};
  if (full) j["tail_sums"] = c.tail_sums;
  return j.dump(1);
}

std::string decay_table_csv(const MonotoneSeq& q, const ThetaSeq& theta, const ThetaSumCertificate& c) {
  std::ostringstream os;
  os << "j,Q,theta,q_envelope,theta_tail_bound\n";
  char buf[160];
  for (std::size_t j = 0; j < q.size(); ++j) {
    const bool has_theta = !theta.values.empty() && j >= theta.first && j <= theta.last();
    std::string th = has_theta ? fmt("%.17g", theta.at(j)) : "";
    std::string env = j >= 1 ? fmt("%.17g", c.c_decay * std::pow(double(j), -(1.0 + c.beta))) : "";
    std::string tb = has_theta && j >= c.j1 ? fmt("%.17g", c.c_bar * std::pow(double(j), -c.exps.beta_bar)) : "";
    std::snprintf(buf, sizeof buf, "%zu,%.17g,", j, q[j]);
    os << buf << th << ',' << env << ',' << tb << '\n';
  }
  return os.str();
}

}  // namespace conelab
