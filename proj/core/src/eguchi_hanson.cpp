#include "conelab/eguchi_hanson.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace conelab {

double CoordinateCurvature::rm(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                               const Eigen::VectorXd& z) const {
  double t = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int c = 0; c < dim; ++c)
        for (int d = 0; d < dim; ++d) t += rm(a, b, c, d) * u(a) * v(b) * w(c) * z(d);
  return t;
}

namespace {

template <class F>
Eigen::MatrixXd d4(F&& f, double h) {
  Eigen::MatrixXd out = (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h);
  return out;
}

}  // namespace

CoordinateCurvature coordinate_curvature(const CoordinateMetric& gf, const Eigen::VectorXd& x, double h) {
  const int n = static_cast<int>(x.size());
  auto shift = [&](int c, double t) {
    Eigen::VectorXd y = x;
    y(c) += t;
    return y;
  };
  CoordinateCurvature out;
  out.dim = n;
  out.g = gf(x);
  out.ginv = out.g.inverse();

  // dg[c] = d_c g, ddg[c][d] = d_c d_d g
  std::vector<Eigen::MatrixXd> dg(n);
  std::vector<std::vector<Eigen::MatrixXd>> ddg(n, std::vector<Eigen::MatrixXd>(n));
  for (int c = 0; c < n; ++c) {
    dg[c] = d4([&](double t) -> Eigen::MatrixXd { return gf(shift(c, t)); }, h);
    for (int d = 0; d <= c; ++d) {
      ddg[c][d] = d4(
          [&](double t) -> Eigen::MatrixXd {
            const Eigen::VectorXd y = shift(d, t);
            return d4([&](double u) -> Eigen::MatrixXd {
              Eigen::VectorXd z = y;
              z(c) += u;
              return gf(z);
            }, h);
          },
          h);
      ddg[d][c] = ddg[c][d];
    }
  }

  // Gamma_{a b c} = 1/2 (d_b g_ac + d_c g_ab - d_a g_bc) (first kind, a lowered)
  auto idx3 = [n](int a, int b, int c) { return (a * n + b) * n + c; };
  std::vector<double> gam1(n * n * n), gam2(n * n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) gam1[idx3(a, b, c)] = 0.5 * (dg[b](a, c) + dg[c](a, b) - dg[a](b, c));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int e = 0; e < n; ++e) s += out.ginv(a, e) * gam1[idx3(e, b, c)];
        gam2[idx3(a, b, c)] = s;
      }

  // R^r_smn = d_m Gamma^r_ns - d_n Gamma^r_ms + Gamma^r_ml Gamma^l_ns - Gamma^r_nl Gamma^l_ms,
  // lowered on the first index.  R_abab / |a ^ b|^2 is the sectional curvature.
  std::vector<Eigen::MatrixXd> dginv(n);
  for (int c = 0; c < n; ++c) dginv[c] = -out.ginv * dg[c] * out.ginv;
  auto dgam2 = [&](int m, int r, int a, int b) {
    double v = 0.0;
    for (int e = 0; e < n; ++e) {
      const double dg1 = 0.5 * (ddg[m][a](e, b) + ddg[m][b](e, a) - ddg[m][e](a, b));
      v += dginv[m](r, e) * gam1[idx3(e, a, b)] + out.ginv(r, e) * dg1;
    }
    return v;
  };
  std::vector<double> up(n * n * n * n, 0.0);
  auto idx4 = [n](int a, int b, int c, int d) { return ((a * n + b) * n + c) * n + d; };
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int m = 0; m < n; ++m)
        for (int q = 0; q < n; ++q) {
          double v = dgam2(m, r, q, s) - dgam2(q, r, m, s);
          for (int l = 0; l < n; ++l)
            v += gam2[idx3(r, m, l)] * gam2[idx3(l, q, s)] - gam2[idx3(r, q, l)] * gam2[idx3(l, m, s)];
          up[idx4(r, s, m, q)] = v;
        }
  out.riemann.assign(n * n * n * n, 0.0);
  out.ricci = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k)
    for (int s = 0; s < n; ++s)
      for (int m = 0; m < n; ++m)
        for (int q = 0; q < n; ++q) {
          double v = 0.0;
          for (int r = 0; r < n; ++r) v += out.g(k, r) * up[idx4(r, s, m, q)];
          out.riemann[idx4(k, s, m, q)] = v;
          if (k == m) out.ricci(s, q) += up[idx4(k, s, k, q)];
        }
  out.scalar = (out.ginv.array() * out.ricci.array()).sum();
  return out;
}

namespace {

// Rows: s_i on (dtheta, dphi, dpsi).
Eigen::Matrix3d sigma_forms(const Eigen::VectorXd& ang) {
  const double th = ang(0), ps = ang(2);
  Eigen::Matrix3d s;
  s << std::sin(ps), -std::cos(ps) * std::sin(th), 0.0,
       std::cos(ps), std::sin(ps) * std::sin(th), 0.0,
       0.0, std::cos(th), 1.0;
  return s;
}

const Eigen::Vector3d kAngles(1.1, 0.4, 0.7);

}  // namespace

EguchiHanson::EguchiHanson(double a) : a_(a) {
  if (!(a > 0.0)) throw std::invalid_argument("EguchiHanson: a must be positive");
}

Eigen::MatrixXd EguchiHanson::level_metric(double r, const Eigen::VectorXd& ang) const {
  const double u = std::pow(a_ / r, 4);
  const Eigen::Matrix3d s = sigma_forms(ang);
  const Eigen::Vector3d h2(r * r / 4.0, r * r / 4.0, r * r / 4.0 * (1.0 - u));
  return s.transpose() * h2.asDiagonal() * s;
}

Eigen::MatrixXd EguchiHanson::metric(const Eigen::VectorXd& x) const {
  const double r = x(0);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 4);
  g(0, 0) = 1.0 / (1.0 - std::pow(a_ / r, 4));
  g.block(1, 1, 3, 3) = level_metric(r, x.tail(3));
  return g;
}

double EguchiHanson::G(double r) const {
  if (!(r > a_)) throw std::domain_error("EguchiHanson: r must exceed a");
  return std::log1p(2.0 * a_ * a_ / (r * r - a_ * a_)) / (a_ * a_);
}

double EguchiHanson::b(double r) const { return 1.0 / std::sqrt(G(r)); }

double EguchiHanson::b_inf() const { return std::sqrt(volume_ratio()); }

double EguchiHanson::radius_of_level(double R) const {
  if (!(R > 0.0)) throw std::domain_error("EguchiHanson: level must be positive");
  // b < r / sqrt(2) and b -> r / sqrt(2); bracket accordingly.
  double lo = a_ * (1.0 + 1e-12), hi = std::max(2.0 * a_, 2.0 * R);
  while (b(hi) < R) hi *= 2.0;
  std::uintmax_t it = 200;
  auto res = boost::math::tools::toms748_solve([&](double r) { return b(r) - R; }, lo, hi,
                                               boost::math::tools::eps_tolerance<double>(52), it);
  return 0.5 * (res.first + res.second);
}

EguchiHanson::Radial EguchiHanson::radial(double r) const {
  const double a4 = std::pow(a_, 4);
  const double q = r * r * r * r - a4;
  Radial o;
  o.r = r;
  o.e = std::sqrt(1.0 - a4 / (r * r * r * r));
  o.de = 2.0 * a4 / (std::pow(r, 5) * o.e);
  o.dde = -10.0 * a4 / (std::pow(r, 6) * o.e) - 2.0 * a4 / std::pow(r, 5) * o.de / (o.e * o.e);

  const double g = G(r);
  const double g1 = -4.0 * r / q;
  const double g2 = 4.0 * (3.0 * r * r * r * r + a4) / (q * q);
  const double g3 = -16.0 * r * r * r * (3.0 * r * r * r * r + 5.0 * a4) / (q * q * q);
  const double beta = std::pow(g, -0.5);
  const double d1 = -0.5 * std::pow(g, -1.5) * g1;
  const double d2 = 0.75 * std::pow(g, -2.5) * g1 * g1 - 0.5 * std::pow(g, -1.5) * g2;
  const double d3 = -15.0 / 8.0 * std::pow(g, -3.5) * g1 * g1 * g1 + 9.0 / 4.0 * std::pow(g, -2.5) * g1 * g2 -
                    0.5 * std::pow(g, -1.5) * g3;
  const double e = o.e, de = o.de, dde = o.dde;
  o.b = beta;
  o.b1 = e * d1;
  o.b2 = e * de * d1 + e * e * d2;
  o.b3 = e * ((de * de + e * dde) * d1 + 3.0 * e * de * d2 + e * e * d3);

  o.k1 = e / r;
  o.k3 = e / r + de;
  o.dk1 = e * (de / r - e / (r * r));
  o.dk3 = e * (de / r - e / (r * r) + dde);
  return o;
}

LevelSetData EguchiHanson::level_data(double r) const {
  const Radial q = radial(r);
  LevelSetData d;
  d.n = 4;
  d.s = r;
  d.b = q.b;
  d.grad = q.b1;
  d.b2 = q.b2;
  d.b3 = q.b3;
  d.radius = r / 2.0;
  d.area = std::numbers::pi * std::numbers::pi * r * r * r * q.e;
  d.kappa = {q.k1, q.k1, q.k3};
  d.dkappa = {q.dk1, q.dk1, q.dk3};

  const double g2 = q.b1 * q.b1;
  d.hess_nn = 2.0 * g2 + 2.0 * q.b * q.b2;
  d.lap_b2 = d.hess_nn;
  d.B_nn = d.hess_nn - 2.0 * g2;
  d.dB_nn = 2.0 * q.b1 * q.b2 + 2.0 * q.b * q.b3;
  d.H = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double k = d.kappa[i], dk = d.dkappa[i];
    d.hess_tan.push_back(2.0 * q.b * q.b1 * k);
    d.lap_b2 += d.hess_tan.back();
    d.B_tan.push_back(d.hess_tan.back() - 2.0 * g2);
    d.dB_tan.push_back(2.0 * g2 * k + 2.0 * q.b * q.b2 * k + 2.0 * q.b * q.b1 * dk - 4.0 * q.b1 * q.b2);
    d.H += k;
  }
  for (int i = 0; i < 3; ++i) d.II0.push_back(d.kappa[i] - d.H / 3.0);

  // Level-set connection: [E_j, E_k] = E_i cyclically, e_i = E_i / h_i.
  const double h[3] = {r / 2.0, r / 2.0, r / 2.0 * q.e};
  d.tangential_dB2 = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        if (a == b || b == c || a == c) continue;
        const double sign = ((b - a + 3) % 3 == 1) ? 1.0 : -1.0;
        const double gam = 0.5 * sign * (h[c] / (h[a] * h[b]) - h[a] / (h[b] * h[c]) + h[b] / (h[c] * h[a]));
        const double diff = d.B_tan[b] - d.B_tan[c];
        d.tangential_dB2 += gam * gam * diff * diff;
      }

  // Ambient curvature in the frame e_r = E d_r, e_i = E_i / h_i.
  Eigen::VectorXd x(4);
  x << r, kAngles(0), kAngles(1), kAngles(2);
  const double step = 1e-3 * std::min(1.0, r - a_);
  const CoordinateCurvature amb =
      coordinate_curvature([this](const Eigen::VectorXd& y) { return metric(y); }, x, step);
  const Eigen::Matrix3d dual = sigma_forms(kAngles).inverse();  // columns: E_i
  Eigen::VectorXd en = Eigen::VectorXd::Zero(4);
  en(0) = q.e;
  std::vector<Eigen::VectorXd> et(3, Eigen::VectorXd::Zero(4));
  for (int i = 0; i < 3; ++i) et[i].tail(3) = dual.col(i) / h[i];
  d.ric_nn = amb.ric(en, en);
  d.scalar_M = amb.scalar;
  for (int i = 0; i < 3; ++i) {
    d.ric_tan.push_back(amb.ric(et[i], et[i]));
    d.k_rad.push_back(amb.rm(et[i], en, et[i], en));
  }

  const CoordinateCurvature lev = coordinate_curvature(
      [this, r](const Eigen::VectorXd& ang) { return level_metric(r, ang); }, kAngles, 1e-3);
  d.scalar_T = lev.scalar;
  for (int i = 0; i < 3; ++i) {
    const Eigen::VectorXd v = dual.col(i) / h[i];
    d.ric_T.push_back(lev.ric(v, v));
  }
  return d;
}

double EguchiHanson::ricci_residual(double r) const {
  Eigen::VectorXd x(4);
  x << r, kAngles(0), kAngles(1), kAngles(2);
  const double step = 1e-3 * std::min(1.0, r - a_);
  const CoordinateCurvature c = coordinate_curvature([this](const Eigen::VectorXd& y) { return metric(y); }, x, step);
  const double e = std::sqrt(1.0 - std::pow(a_ / r, 4));
  const double h[3] = {r / 2.0, r / 2.0, r / 2.0 * e};
  const Eigen::Matrix3d dual = sigma_forms(kAngles).inverse();
  Eigen::MatrixXd frame = Eigen::MatrixXd::Zero(4, 4);
  frame(0, 0) = e;
  for (int i = 0; i < 3; ++i) frame.block(1, i + 1, 3, 1) = dual.col(i) / h[i];
  const Eigen::MatrixXd ric = frame.transpose() * c.ricci * frame;
  return r * r * ric.cwiseAbs().maxCoeff();
}

double EguchiHanson::A(double R) const {
  const double r = radius_of_level(R);
  const Radial q = radial(r);
  const double area = std::numbers::pi * std::numbers::pi * r * r * r * q.e;
  return std::pow(R, -3) * area * q.b1 * q.b1 * q.b1;
}

double EguchiHanson::Aprime(double R) const {
  const double r = radius_of_level(R);
  const Radial q = radial(r);
  // log A = -3 log b + 3 log r + log E + 3 log b_s, in r
  const double db_dr = q.b1 / q.e;
  const double d2b_dr = (q.b2 / q.e - q.de * db_dr) / q.e;  // from b_ss = E (E b_r)'
  const double dlogA = -3.0 * db_dr / q.b + 3.0 / r + q.de / q.e + 3.0 * (q.de / q.e + d2b_dr / db_dr);
  return A(R) * dlogA / db_dr;
}

double EguchiHanson::energy_density(double r, int p) const {
  const Radial q = radial(r);
  const double g2 = q.b1 * q.b1;
  const double hnn = 2.0 * g2 + 2.0 * q.b * q.b2;
  const double h1 = 2.0 * q.b * q.b1 * q.k1, h3 = 2.0 * q.b * q.b1 * q.k3;
  const double lap = hnn + 2.0 * h1 + h3;
  const double t0 = hnn - lap / 4.0, t1 = h1 - lap / 4.0, t3 = h3 - lap / 4.0;
  return std::pow(q.b, -p) * (t0 * t0 + 2.0 * t1 * t1 + t3 * t3);
}

double EguchiHanson::level_integral(double R, int p) const {
  const double r0 = radius_of_level(R);
  boost::math::quadrature::exp_sinh<double> integrator;
  // The density decays like r^{-8-p}; far out the quadrature only sees roundoff.
  // dvol = pi^2 r^3 dr
  auto f = [&](double t) {
    const double r = r0 + t;
    return r > 1e6 * a_ ? 0.0 : energy_density(r, p) * r * r * r;
  };
  return std::numbers::pi * std::numbers::pi * integrator.integrate(f, 1e-13);
}

double EguchiHanson::Q(double R) const { return level_integral(R, 4); }

double EguchiHanson::monotonicity_rhs(double R) const { return -0.5 * R * level_integral(R, 6); }

double EguchiHanson::stokes_flux(double R) const {
  const double r = radius_of_level(R);
  const Radial q = radial(r);
  return std::pow(R, -3) * std::numbers::pi * std::numbers::pi * r * r * r * q.e * q.b1;
}

}  // namespace conelab
