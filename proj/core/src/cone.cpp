#include "conelab/cone.hpp"

#include "conelab/fd.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace conelab {

namespace {

namespace ode = boost::numeric::odeint;
using State1 = std::array<double, 1>;
using State2 = std::array<double, 2>;

constexpr double kOdeTol = 1e-14;

auto stepper() { return ode::make_controlled<ode::runge_kutta_fehlberg78<State2>>(kOdeTol, kOdeTol); }
auto stepper1() { return ode::make_controlled<ode::runge_kutta_fehlberg78<State1>>(kOdeTol, kOdeTol); }

double log_cosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// Quantities at s from b alone.
struct Radial {
  double f, df, ddf, b, b1, b2, x, dx;
};

Radial radial(const WarpedModel& m, double s, double b) {
  Radial r;
  r.f = m.f(s);
  r.df = m.df(s);
  r.ddf = m.ddf(s);
  r.b = b;
  r.x = b / r.f;
  r.b1 = std::pow(r.x, m.n - 1);
  r.dx = (r.b1 - r.x * r.df) / r.f;
  r.b2 = (m.n - 1) * std::pow(r.x, m.n - 2) * r.dx;
  return r;
}

// |Hess b^2 - (Lap b^2 / n) g|^2 times b^{-n} times the level area density.
double q_integrand(const WarpedModel& m, double s, double b) {
  const Radial r = radial(m, s, b);
  const int n = m.n;
  const double hnn = 2.0 * r.b1 * r.b1 + 2.0 * b * r.b2;
  const double htt = 2.0 * b * r.b1 * r.df / r.f;
  const double lap = hnn + (n - 1) * htt;
  const double tnn = hnn - lap / n, ttt = htt - lap / n;
  const double norm2 = tnn * tnn + (n - 1) * ttt * ttt;
  return std::pow(b, -n) * norm2 * unit_sphere_volume(n) * std::pow(r.f, n - 1);
}

void check_state(double b, double s, const char* who) {
  if (!std::isfinite(b) || b <= 0.0 || b > 1e12)
    throw std::domain_error(std::string(who) + ": profile blew up near s = " + std::to_string(s));
}

}  // namespace

void WarpedModel::validate() const {
  if (n < 3) throw std::invalid_argument("WarpedModel: n must be at least 3");
  if (!(s0 > 0.0 && s1 > s0)) throw std::invalid_argument("WarpedModel: need 0 < s0 < s1");
  if (!f || !df || !ddf) throw std::invalid_argument("WarpedModel: warp and derivatives required");
  const int k = 2000;
  for (int i = 0; i <= k; ++i) {
    const double s = s0 * std::pow(s1 / s0, static_cast<double>(i) / k);
    const double v = f(s);
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::domain_error("WarpedModel " + name + ": warp vanishes near s = " + std::to_string(s));
  }
}

WarpedModel WarpedModel::euclidean(int n, double s0, double s1) {
  WarpedModel m = cone(1.0, n, s0, s1);
  m.name = "euclidean";
  return m;
}

WarpedModel WarpedModel::cone(double a, int n, double s0, double s1) {
  if (!(a > 0.0)) throw std::invalid_argument("cone: slope must be positive");
  WarpedModel m;
  m.name = "cone";
  m.n = n;
  m.s0 = s0;
  m.s1 = s1;
  m.f = [a](double s) { return a * s; };
  m.df = [a](double) { return a; };
  m.ddf = [](double) { return 0.0; };
  m.cone_slope = a;
  // fixed point of x' = (x^{n-1} - x f') / f
  const double x = std::pow(a, 1.0 / (n - 2));
  m.anchor_s = 1.0;
  m.anchor_b = x * a;
  return m;
}

WarpedModel WarpedModel::tanh_warp(double a_in, double a_out, double sc, double width, int n, double s0,
                                   double s1) {
  if (!(a_in > 0.0 && a_out > 0.0 && width > 0.0)) throw std::invalid_argument("tanh_warp: bad parameters");
  WarpedModel m;
  m.name = "tanh";
  m.n = n;
  m.s0 = s0;
  m.s1 = s1;
  const double d = a_in - a_out;
  const double c0 = 0.5 * width * log_cosh(sc / width);
  m.f = [=](double s) { return a_out * s + d * (0.5 * s - 0.5 * width * log_cosh((s - sc) / width) + c0); };
  m.df = [=](double s) { return a_out + d * 0.5 * (1.0 - std::tanh((s - sc) / width)); };
  m.ddf = [=](double s) {
    const double c = std::cosh((s - sc) / width);
    return -d / (2.0 * width * c * c);
  };
  m.anchor_s = s1;
  m.anchor_b = std::pow(m.df(s1), 1.0 / (n - 2)) * m.f(s1);
  return m;
}

WarpedModel WarpedModel::log_bump(double eps, double width, int n, double s0, double s1) {
  if (!(width > 0.0) || std::log(s1) <= width) throw std::invalid_argument("log_bump: support must end before s1");
  WarpedModel m;
  m.name = "bump";
  m.n = n;
  m.s0 = s0;
  m.s1 = s1;
  // psi(t) = exp(1 - 1/(1 - tau^2)), tau = t / width
  struct Bump {
    double psi, d1, d2;
  };
  auto bump = [width](double t) -> Bump {
    const double tau = t / width;
    if (std::abs(tau) >= 1.0) return {0.0, 0.0, 0.0};
    const double u = 1.0 - tau * tau;
    const double psi = std::exp(1.0 - 1.0 / u);
    const double g = -2.0 * tau / (width * u * u);
    const double dg = -2.0 * (1.0 + 3.0 * tau * tau) / (width * width * u * u * u);
    return {psi, psi * g, psi * (g * g + dg)};
  };
  m.f = [=](double s) { return s * std::exp(eps * bump(std::log(s)).psi); };
  m.df = [=](double s) {
    const Bump p = bump(std::log(s));
    return std::exp(eps * p.psi) * (1.0 + eps * p.d1);
  };
  m.ddf = [=](double s) {
    const Bump p = bump(std::log(s));
    return std::exp(eps * p.psi) / s * (eps * p.d1 * (1.0 + eps * p.d1) + eps * p.d2);
  };
  m.anchor_s = s1;
  m.anchor_b = s1;
  return m;
}

WarpedModel WarpedModel::polynomial(std::vector<double> coeffs, int n, double s0, double s1) {
  if (coeffs.empty()) throw std::invalid_argument("polynomial: no coefficients");
  WarpedModel m;
  m.name = "polynomial";
  m.n = n;
  m.s0 = s0;
  m.s1 = s1;
  auto eval = [](const std::vector<double>& c, double s, int deriv) {
    double v = 0.0;
    for (int k = static_cast<int>(c.size()) - 1; k >= deriv; --k) {
      double coef = c[k];
      for (int j = 0; j < deriv; ++j) coef *= (k - j);
      v = v * s + coef;
    }
    return v;
  };
  m.f = [=](double s) { return eval(coeffs, s, 0); };
  m.df = [=](double s) { return eval(coeffs, s, 1); };
  m.ddf = [=](double s) { return eval(coeffs, s, 2); };
  const double slope = m.df(s1);
  if (!(slope > 0.0)) throw std::invalid_argument("polynomial: f'(s1) must be positive");
  m.anchor_s = s1;
  m.anchor_b = std::pow(slope, 1.0 / (n - 2)) * m.f(s1);
  return m;
}

GreenProfile::GreenProfile(const WarpedModel& m, double s_a, double b_a, int nodes) : m_(&m) {
  m.validate();
  if (!(s_a >= m.s0 && s_a <= m.s1)) throw std::invalid_argument("solve_green_radial: anchor outside interval");
  if (!(b_a > 0.0)) throw std::invalid_argument("solve_green_radial: anchor value must be positive");
  if (nodes < 8) throw std::invalid_argument("solve_green_radial: too few nodes");
  const int n = m.n;

  // Outward to s1 first.
  State1 y1{b_a};
  if (s_a < m.s1) {
    auto rhs1 = [&](const State1& y, State1& dy, double s) {
      check_state(y[0], s, "solve_green_radial");
      dy[0] = std::pow(y[0] / m.f(s), n - 1);
    };
    ode::integrate_adaptive(stepper1(), rhs1, y1, s_a, m.s1, 1e-3 * (m.s1 - s_a));
    check_state(y1[0], m.s1, "solve_green_radial");
  }

  // Then inward with q, sampling on a geometric grid.
  s_.resize(nodes);
  for (int i = 0; i < nodes; ++i) s_[i] = m.s0 * std::pow(m.s1 / m.s0, static_cast<double>(i) / (nodes - 1));
  s_.front() = m.s0;
  s_.back() = m.s1;
  bv_.assign(nodes, 0.0);
  qv_.assign(nodes, 0.0);
  auto rhs = [&](const State2& y, State2& dy, double s) {
    check_state(y[0], s, "solve_green_radial");
    dy[0] = std::pow(y[0] / m.f(s), n - 1);
    dy[1] = -q_integrand(m, s, y[0]);
  };
  State2 y{y1[0], 0.0};
  bv_.back() = y[0];
  for (int i = nodes - 1; i > 0; --i) {
    ode::integrate_adaptive(stepper(), rhs, y, s_[i], s_[i - 1], -0.25 * (s_[i] - s_[i - 1]));
    check_state(y[0], s_[i - 1], "solve_green_radial");
    bv_[i - 1] = y[0];
    qv_[i - 1] = y[1];
  }
  b_lo_ = bv_.front();
  b_hi_ = bv_.back();

  // Tail of q beyond s1 from the local power law of the integrand.
  const double i1 = q_integrand(m, m.s1, bv_.back());
  const double sm = s_[nodes - 2];
  const double im = q_integrand(m, sm, bv_[nodes - 2]);
  // |Hess b^2|^2 b^{-n} is of order n (2 b'^2)^2 b^{-n}; a trace-free part
  // below 1e-10 of |Hess b^2| is roundoff on an exact cone
  const double slope = std::pow(bv_.back() / m.f(m.s1), m.n - 1);
  const double floor = 1e-20 * m.n * 4.0 * std::pow(slope, 4) * std::pow(bv_.back(), -m.n);
  if (i1 <= floor) {
    q_tail_ = 0.0;
  } else if (im <= 0.0) {
    q_tail_ = std::numeric_limits<double>::infinity();
  } else {
    const double p = std::log(i1 / im) / std::log(m.s1 / sm);
    q_tail_ = p < -1.0 ? i1 * m.s1 / (-p - 1.0) : std::numeric_limits<double>::infinity();
  }
}

std::pair<double, double> GreenProfile::state_at(double s) const {
  const WarpedModel& m = *m_;
  if (!(s >= m.s0 && s <= m.s1)) throw std::domain_error("GreenProfile: s outside the model interval");
  auto it = std::lower_bound(s_.begin(), s_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - s_.begin());
  if (i == s_.size()) i = s_.size() - 1;
  if (i > 0 && std::abs(s_[i - 1] - s) < std::abs(s_[i] - s)) --i;
  if (s == s_[i]) return {bv_[i], qv_[i]};
  const int n = m.n;
  auto rhs = [&](const State2& y, State2& dy, double t) {
    dy[0] = std::pow(y[0] / m.f(t), n - 1);
    dy[1] = -q_integrand(m, t, y[0]);
  };
  State2 y{bv_[i], qv_[i]};
  ode::integrate_adaptive(stepper(), rhs, y, s_[i], s, 0.5 * (s - s_[i]));
  return {y[0], y[1]};
}

double GreenProfile::b(double s) const { return state_at(s).first; }
double GreenProfile::q(double s) const { return state_at(s).second; }
double GreenProfile::db(double s) const { return std::pow(b(s) / m_->f(s), m_->n - 1); }

double GreenProfile::d2b(double s, double bs) const { return radial(*m_, s, bs).b2; }

double GreenProfile::d3b(double s, double bs) const {
  const Radial r = radial(*m_, s, bs);
  const int n = m_->n;
  const double dnum = (n - 1) * std::pow(r.x, n - 2) * r.dx - r.dx * r.df - r.x * r.ddf;
  const double num = r.b1 - r.x * r.df;
  const double ddx = (dnum * r.f - num * r.df) / (r.f * r.f);
  return (n - 1) * ((n - 2) * std::pow(r.x, n - 3) * r.dx * r.dx + std::pow(r.x, n - 2) * ddx);
}

double GreenProfile::level(double R) const {
  if (!attains(R)) throw std::domain_error("GreenProfile: level b = " + std::to_string(R) + " not attained");
  auto it = std::lower_bound(bv_.begin(), bv_.end(), R);
  std::size_t i = static_cast<std::size_t>(it - bv_.begin());
  if (i < bv_.size() && bv_[i] == R) return s_[i];
  const double lo = s_[i - 1], hi = s_[i];
  std::uintmax_t iters = 200;
  auto res = boost::math::tools::toms748_solve([&](double s) { return b(s) - R; }, lo, hi, bv_[i - 1] - R,
                                               bv_[i] - R, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (res.first + res.second);
}

double GreenProfile::b_inf_estimate() const { return db(m_->s1); }

double GreenProfile::max_residual() const {
  const WarpedModel& m = *m_;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < s_.size(); i += 7) {
    const double s = s_[i];
    const double h = std::min(1e-3 * s, 0.5 * std::min(s - m.s0, m.s1 - s));
    const double d = fd_first([&](double t) { return b(s + t); }, {h, 0.1 * h});
    const double bn = std::pow(bv_[i], m.n - 1);
    worst = std::max(worst, std::abs(d * std::pow(m.f(s), m.n - 1) - bn) / bn);
  }
  return worst;
}

GreenProfile solve_green_radial(const WarpedModel& m, double s_a, double b_a) { return GreenProfile(m, s_a, b_a); }
GreenProfile solve_green_radial(const WarpedModel& m) { return GreenProfile(m, m.anchor_s, m.anchor_b); }

double LevelSetData::trace_B() const {
  double t = B_nn;
  for (double v : B_tan) t += v;
  return t;
}

double LevelSetData::norm_B2() const {
  double t = B_nn * B_nn + 2.0 * B_nt * B_nt;
  for (double v : B_tan) t += v * v;
  return t;
}

double LevelSetData::norm_B0_2() const {
  double t = 0.0;
  for (double v : B_tan) t += v * v;
  return t;
}

double LevelSetData::norm_dB2() const {
  double t = dB_nn * dB_nn + tangential_dB2;
  for (std::size_t i = 0; i < B_tan.size(); ++i) {
    t += dB_tan[i] * dB_tan[i];
    const double k = kappa[i] * (B_nn - B_tan[i]);
    t += 2.0 * k * k;
  }
  return t;
}

LevelSetData trace_free_hessian(const GreenProfile& gp, double s) {
  const WarpedModel& m = gp.model();
  const int n = m.n;
  LevelSetData d;
  d.n = n;
  d.s = s;
  const double f = m.f(s), df = m.df(s), ddf = m.ddf(s);
  d.b = gp.b(s);
  d.grad = std::pow(d.b / f, n - 1);
  d.b2 = gp.d2b(s, d.b);
  d.b3 = gp.d3b(s, d.b);
  d.radius = f;
  d.area = unit_sphere_volume(n) * std::pow(f, n - 1);
  const double k = df / f;
  d.kappa.assign(n - 1, k);
  d.dkappa.assign(n - 1, (ddf * f - df * df) / (f * f));

  d.hess_nn = 2.0 * d.grad * d.grad + 2.0 * d.b * d.b2;
  d.hess_tan.assign(n - 1, 2.0 * d.b * d.grad * k);
  d.lap_b2 = d.hess_nn + (n - 1) * d.hess_tan[0];
  const double g2 = d.grad * d.grad;
  d.B_nn = d.hess_nn - 2.0 * g2;
  d.B_nt = 0.0;
  d.B_tan.assign(n - 1, d.hess_tan[0] - 2.0 * g2);
  d.dB_nn = 2.0 * d.grad * d.b2 + 2.0 * d.b * d.b3;
  d.dB_tan.assign(n - 1, 2.0 * g2 * k + 2.0 * d.b * d.b2 * k + 2.0 * d.b * d.grad * d.dkappa[0] -
                             4.0 * d.grad * d.b2);

  d.H = (n - 1) * k;
  d.II0.assign(n - 1, k - d.H / (n - 1));

  d.scalar_T = (n - 1) * (n - 2) / (f * f);
  d.ric_T.assign(n - 1, (n - 2) / (f * f));
  d.ric_nn = -(n - 1) * ddf / f;
  d.ric_tan.assign(n - 1, -ddf / f + (n - 2) * (1.0 - df * df) / (f * f));
  d.k_rad.assign(n - 1, -ddf / f);
  d.scalar_M = d.ric_nn + (n - 1) * d.ric_tan[0];
  return d;
}

const IdentityResidual& LevelIdentityReport::find(const std::string& name) const {
  for (const auto& it : items)
    if (it.name == name) return it;
  throw std::out_of_range("LevelIdentityReport: no identity " + name);
}

namespace {

double rel(double l, double r) { return std::abs(l - r) / std::max({1.0, std::abs(l), std::abs(r)}); }

IdentityResidual general(const char* name, double l, double r) { return {name, l, r, rel(l, r), false, rel(l, r)}; }

IdentityResidual corrected(const char* name, double l, double r, double r_flat) {
  return {name, l, r, rel(l, r), true, rel(l, r_flat)};
}

}  // namespace

LevelIdentityReport check_appendix_b(const LevelSetData& d) {
  const int n = d.n;
  const double b = d.b, g = d.grad, g2 = g * g;
  const double B2 = d.norm_B2();
  const double Bn2 = d.B_nn * d.B_nn + d.B_nt * d.B_nt;  // |B(n)|^2
  LevelIdentityReport rep;
  rep.s = d.s;
  rep.b = b;
  auto& it = rep.items;

  it.push_back(general("trace", d.trace_B(), 0.0));
  it.push_back(general("harmonic", d.lap_b2, 2.0 * n * g2));
  // b grad |grad b|^2 = B(grad b), normal component
  it.push_back(general("grad_norm", b * 2.0 * g * d.b2, d.B_nn * g));
  // 2 b grad |grad b| = B(n)
  it.push_back(general("grad_norm_unit", 2.0 * b * d.b2, d.B_nn));

  {
    double worst = 0.0;
    IdentityResidual r{"tracefree_second_form", 0.0, 0.0, 0.0, false, 0.0};
    for (std::size_t i = 0; i < d.II0.size(); ++i) {
      const double l = 2.0 * b * g * d.II0[i];
      const double rr = d.B_tan[i] + d.B_nn / (n - 1);
      if (rel(l, rr) >= worst) {
        worst = rel(l, rr);
        r.lhs = l;
        r.rhs = rr;
      }
    }
    r.residual = r.flat_residual = worst;
    it.push_back(r);
  }
  it.push_back(general("mean_curvature", 2.0 * b * g * d.H, 2.0 * (n - 1) * g2 - d.B_nn));
  it.push_back(general("norm_split", B2, d.norm_B0_2() + 2.0 * d.B_nt * d.B_nt + d.B_nn * d.B_nn));
  {
    double ii0 = 0.0;
    for (double v : d.II0) ii0 += v * v;
    const double l = 4.0 * b * b * g2 * ii0;
    const double r1 = d.norm_B0_2() - d.B_nn * d.B_nn / (n - 1);
    const double r2 = B2 - 2.0 * d.B_nt * d.B_nt - n * d.B_nn * d.B_nn / (n - 1.0);
    const double r3 = B2 - n * Bn2 / (n - 1.0) - (n - 2.0) / (n - 1.0) * d.B_nt * d.B_nt;
    const double w = std::max({rel(l, r1), rel(l, r2), rel(l, r3)});
    it.push_back({"tracefree_split", l, r1, w, false, w});
  }

  // Divergence of B, normal component, scaled by b.
  {
    double div = d.dB_nn;
    for (std::size_t i = 0; i < d.kappa.size(); ++i) div += d.kappa[i] * (d.B_nn - d.B_tan[i]);
    const double flat = (2.0 * n - 2.0) * 2.0 * g * d.b2;
    const double ric = d.ric_nn * 2.0 * b * g;
    it.push_back(corrected("divergence", b * div, b * (flat + ric), b * flat));
  }
  // b^2 Lap |grad b|^2
  {
    const double lap = 2.0 * d.b2 * d.b2 + 2.0 * g * d.b3 + d.H * 2.0 * g * d.b2;
    const double flat = 0.5 * B2 + (2.0 * n - 4.0) * d.B_nn * g2;
    const double ric = 2.0 * b * b * d.ric_nn * g2;
    it.push_back(corrected("laplace_grad_norm", b * b * lap, flat + ric, flat));
  }
  // 4 b^2 |grad b|^2 R_T
  {
    const double flat = 4.0 * (n - 1) * (n - 2) * g2 * g2 - 4.0 * (n - 2) * g2 * d.B_nn - B2 + 2.0 * Bn2;
    const double amb = 4.0 * b * b * g2 * (d.scalar_M - 2.0 * d.ric_nn);
    it.push_back(corrected("level_scalar", 4.0 * b * b * g2 * d.scalar_T, flat + amb, flat));
  }
  // Ric^T(e_i, e_i) through the principal curvatures recovered from B.
  {
    const double H = (2.0 * (n - 1) * g2 - d.B_nn) / (2.0 * b * g);
    IdentityResidual r{"level_ricci", 0.0, 0.0, -1.0, true, 0.0};
    for (std::size_t i = 0; i < d.ric_T.size(); ++i) {
      const double lam = (d.B_tan[i] + d.B_nn / (n - 1)) / (2.0 * b * g) + H / (n - 1);
      const double flat = -d.k_rad[i] + lam * H - lam * lam;
      const double full = d.ric_tan[i] + flat;
      const double l = b * b * d.ric_T[i];
      const double res = rel(l, b * b * full);
      if (res > r.residual) {
        r.lhs = l;
        r.rhs = b * b * full;
        r.residual = res;
      }
      r.flat_residual = std::max(r.flat_residual, rel(l, b * b * flat));
      const double e = std::abs(b * b * d.ric_T[i] - (n - 2) * g2);
      const double scale = std::sqrt(B2) + b * std::sqrt(d.norm_dB2());
      if (scale > 0.0) rep.level_ricci_ratio = std::max(rep.level_ricci_ratio, e / scale);
    }
    it.push_back(r);
  }

  for (const auto& r : it) {
    if (r.ricci_corrected) {
      rep.max_corrected = std::max(rep.max_corrected, r.residual);
      rep.max_flat_form = std::max(rep.max_flat_form, r.flat_residual);
    } else {
      rep.max_general = std::max(rep.max_general, r.residual);
    }
  }
  return rep;
}

LevelIdentityReport check_appendix_b(const GreenProfile& gp, double s) { return check_appendix_b(trace_free_hessian(gp, s)); }

double eval_A_of_r(const GreenProfile& gp, double r) {
  const WarpedModel& m = gp.model();
  const double s = gp.level(r);
  const double g = std::pow(r / m.f(s), m.n - 1);
  return std::pow(r, 1 - m.n) * unit_sphere_volume(m.n) * std::pow(m.f(s), m.n - 1) * g * g * g;
}

double eval_Aprime(const GreenProfile& gp, double r) {
  const WarpedModel& m = gp.model();
  const int n = m.n;
  const double s = gp.level(r);
  const double f = m.f(s), df = m.df(s);
  const double b1 = std::pow(r / f, n - 1);
  const double b2 = gp.d2b(s, r);
  const double w = unit_sphere_volume(n);
  const double dA = w * ((1 - n) * std::pow(r, -n) * b1 * std::pow(f, n - 1) * b1 * b1 * b1 +
                         std::pow(r, 1 - n) * (n - 1) * std::pow(f, n - 2) * df * b1 * b1 * b1 +
                         std::pow(r, 1 - n) * std::pow(f, n - 1) * 3.0 * b1 * b1 * b2);
  return dA / b1;
}

QValue eval_Q_of_r(const GreenProfile& gp, double r) { return {gp.q(gp.level(r)), gp.q_tail()}; }

double annulus_energy(const GreenProfile& gp, double r1, double r2) {
  return gp.q(gp.level(r1)) - gp.q(gp.level(r2));
}

double stokes_flux(const GreenProfile& gp, double r) {
  const WarpedModel& m = gp.model();
  const double s = gp.level(r);
  const double h = std::min(1e-3 * s, 0.5 * std::min(s - m.s0, m.s1 - s));
  const double d = fd_first([&](double t) { return gp.b(s + t); }, {h, 0.1 * h});
  return std::pow(r, 1 - m.n) * unit_sphere_volume(m.n) * std::pow(m.f(s), m.n - 1) * d;
}

WeightedPair level_pair(const GreenProfile& gp, double R, const BackgroundData& base) {
  const WarpedModel& m = gp.model();
  if (base.n != m.n) throw std::invalid_argument("level_pair: model and base dimensions differ");
  const double s = gp.level(R);
  const double x = R / m.f(s);
  const int nodes = base.grid->size();
  return {(1.0 / (x * x)) * base.g0, Field::Constant(nodes, std::pow(x, m.n - 1))};
}

LevelFunctional eval_R_levelset(const GreenProfile& gp, double R, const BackgroundData& base) {
  const WarpedModel& m = gp.model();
  const int n = m.n;
  LevelFunctional out;
  out.R = R;
  out.s = gp.level(R);
  out.x = R / m.f(out.s);
  const WeightedPair p = level_pair(gp, R, base);
  require_guard(base, p, "eval_R_levelset");
  out.via_functional = eval_R(base.grid, p, n);

  const LevelSetData d = trace_free_hessian(gp, out.s);
  const double g = d.grad;
  const double Bn2 = d.B_nn * d.B_nn + d.B_nt * d.B_nt;
  out.a_of_r = eval_A_of_r(gp, R);
  out.b_correction = std::pow(R, 1 - n) / (n - 2) * d.area * g *
                     (-d.B_nn + (2.0 * Bn2 - d.norm_B2()) / (4.0 * (n - 2) * g * g));
  out.ricci_correction =
      std::pow(R, 3 - n) / ((n - 2.0) * (n - 2.0)) * d.area * g * (d.scalar_M - 2.0 * d.ric_nn);
  out.via_levelset = out.a_of_r + out.b_correction + out.ricci_correction;
  out.difference = std::abs(out.via_levelset - out.via_functional) / std::max(1.0, std::abs(out.via_functional));
  return out;
}

bool PropertyReport::holds(double c) const {
  for (const auto& s : samples)
    if (s.lhs > c * s.energy * (1.0 + 1e-9) + 1e-14) return false;
  return true;
}

namespace {

void check_annulus(const GreenProfile& gp, double R) {
  if (!gp.attains(0.5 * R) || !gp.attains(1.5 * R))
    throw std::domain_error("property check: annulus around R = " + std::to_string(R) + " exceeds the model");
}

PropertySample base_sample(const GreenProfile& gp, double R) {
  check_annulus(gp, R);
  PropertySample ps;
  ps.R = R;
  ps.energy = annulus_energy(gp, 0.5 * R, 1.5 * R);
  const LevelSetData d = trace_free_hessian(gp, gp.level(R));
  ps.c1_norm2 = d.norm_B2() + R * R * d.norm_dB2();
  ps.c1_ratio = ps.energy > 0.0 ? ps.c1_norm2 / ps.energy : 0.0;
  ps.r_aprime = -R * eval_Aprime(gp, R);
  return ps;
}

// Treats lhs below `floor` as zero.
double fitted_ratio(double lhs, double energy, double floor) {
  if (lhs <= floor) return 0.0;
  if (energy <= 0.0) return std::numeric_limits<double>::infinity();
  return lhs / energy;
}

void fit(PropertyReport& rep) {
  for (const auto& s : rep.samples) {
    rep.fitted_c = std::max(rep.fitted_c, s.ratio);
    rep.fitted_c1 = std::max(rep.fitted_c1, s.c1_ratio);
  }
}

}  // namespace

PropertyReport check_property4(const GreenProfile& gp, const std::vector<double>& radii, const BackgroundData& base) {
  PropertyReport rep;
  rep.property = 4;
  rep.model = gp.model().name;
  for (double R : radii) {
    PropertySample ps = base_sample(gp, R);
    const WeightedPair p = level_pair(gp, R, base);
    require_guard(base, p, "check_property4");
    const double g = l2_norm(base, project_gradient(p, base));
    ps.lhs = g * g;
    ps.ratio = fitted_ratio(ps.lhs, ps.energy, 1e-24);
    rep.samples.push_back(ps);
  }
  fit(rep);
  return rep;
}

PropertyReport check_property5(const GreenProfile& gp, const std::vector<double>& radii, const BackgroundData& base) {
  PropertyReport rep;
  rep.property = 5;
  rep.model = gp.model().name;
  for (double R : radii) {
    PropertySample ps = base_sample(gp, R);
    const LevelFunctional lf = eval_R_levelset(gp, R, base);
    ps.lhs = lf.a_of_r - lf.via_functional;
    ps.ratio = fitted_ratio(ps.lhs, ps.energy, 1e-12 * std::max(1.0, lf.a_of_r));
    rep.samples.push_back(ps);
  }
  fit(rep);
  return rep;
}

double spread_ratio(const std::vector<double>& c) {
  if (c.empty()) return 1.0;
  const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
  if (*hi == 0.0) return 1.0;
  if (*lo == 0.0) return std::numeric_limits<double>::infinity();
  return *hi / *lo;
}

FamilyReport check_property_family(const std::vector<WarpedModel>& family, const std::vector<double>& radii,
                                   const BackgroundData& base) {
  FamilyReport rep;
  std::vector<PropertyReport> r4, r5;
  for (const auto& m : family) {
    const GreenProfile gp = solve_green_radial(m);
    r4.push_back(check_property4(gp, radii, base));
    r5.push_back(check_property5(gp, radii, base));
    rep.models.push_back(m.name);
    rep.c4.push_back(r4.back().fitted_c);
    rep.c5.push_back(r5.back().fitted_c);
    rep.c1.push_back(r4.back().fitted_c1);
  }
  rep.spread4 = spread_ratio(rep.c4);
  rep.spread5 = spread_ratio(rep.c5);
  rep.uniform_c4 = rep.c4.empty() ? 0.0 : *std::max_element(rep.c4.begin(), rep.c4.end());
  rep.uniform_c5 = rep.c5.empty() ? 0.0 : *std::max_element(rep.c5.begin(), rep.c5.end());
  rep.holds4 = std::all_of(r4.begin(), r4.end(), [&](const PropertyReport& r) { return r.holds(rep.uniform_c4); });
  rep.holds5 = std::all_of(r5.begin(), r5.end(), [&](const PropertyReport& r) { return r.holds(rep.uniform_c5); });
  return rep;
}

std::vector<WarpedModel> bump_family(const std::vector<double>& eps) {
  std::vector<WarpedModel> out;
  for (double e : eps) {
    WarpedModel m = WarpedModel::log_bump(e);
    char buf[48];
    std::snprintf(buf, sizeof buf, "bump-%g", e);
    m.name = buf;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace conelab
