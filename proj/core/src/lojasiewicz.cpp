#include "conelab/lojasiewicz.hpp"

#include "conelab/fd.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace conelab {

SliceObjective::SliceObjective(const BackgroundData& bg, VariationBasis basis)
    : bg_(&bg), basis_(std::move(basis)) {
  const int nodes = bg.grid->size();
  flat_.resize(4 * nodes, basis_.dim());
  for (int j = 0; j < basis_.dim(); ++j) flat_.col(j) = flatten(bg, basis_.elems[j]);
}

TangentPair SliceObjective::tangent(const Eigen::VectorXd& c) const {
  if (c.size() != dim()) throw std::invalid_argument("SliceObjective: coordinate dimension mismatch");
  TangentPair x = zero_tangent(bg_->grid->size());
  for (int i = 0; i < dim(); ++i)
    if (c(i) != 0.0) x += c(i) * basis_.elems[i];
  return x;
}

Eigen::VectorXd SliceObjective::coordinates(const TangentPair& y, double tol) const {
  const Eigen::VectorXd f = flatten(*bg_, y);
  const Eigen::VectorXd c = flat_.transpose() * f;
  const double outside = (f - flat_ * c).norm();
  if (outside > tol * f.norm())
    throw std::domain_error("SliceObjective: direction is not in the span of the basis");
  return c;
}

double SliceObjective::value(const Eigen::VectorXd& c) const {
  const WeightedPair p = exp_chart(tangent(c), *bg_);
  require_guard(*bg_, p, "eval_G");
  return eval_R(bg_->grid, p, bg_->n);
}

Eigen::VectorXd SliceObjective::gradient(const Eigen::VectorXd& c) const {
  const BackgroundData& bg = *bg_;
  const TangentPair x = tangent(c);
  const WeightedPair p = exp_chart(x, bg);
  const TangentPair gr = grad_R(p, bg);

  // d exp_x(e_i) = (h_i, v_i - dA_i / A) with A = A_1(gbar + h, b e^v)
  const Tensor g = bg.gbar + x.h;
  const Geometry geo = make_geometry(bg.grid, g);
  const Field wraw = bg.b_inf * x.v.exp();
  const double a1 = integrate(geo, wraw);
  const double gr_one = bg.b_inf * integrate(bg.base, gr.v);
  Eigen::VectorXd out = flat_.transpose() * flatten(bg, gr);
  for (int i = 0; i < dim(); ++i) {
    const TangentPair& e = basis_.elems[i];
    const double da = integrate(geo, (0.5 * trace(geo, e.h) + e.v) * wraw);
    out(i) -= da / a1 * gr_one;
  }
  return out;
}

Eigen::MatrixXd gradient_jacobian(const Objective& obj, const Eigen::VectorXd& x) {
  const int d = obj.dim();
  Eigen::MatrixXd j(d, d);
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e(k) = 1.0;
    j.col(k) = fd_first_value<Eigen::VectorXd>(
        [&](double t) -> Eigen::VectorXd { return obj.gradient(x + t * e); });
  }
  return j;
}

Eigen::MatrixXd kernel_from_jacobian(const Eigen::MatrixXd& j, double threshold, double abs_floor) {
  const Eigen::MatrixXd s = 0.5 * (j + j.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) throw std::runtime_error("kernel_from_jacobian: eigensolver failed");
  const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < s.rows(); ++i)
    if (std::abs(es.eigenvalues()(i)) < std::max(threshold * rho, abs_floor)) keep.push_back(i);
  Eigen::MatrixXd k(s.rows(), static_cast<int>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) k.col(c) = es.eigenvectors().col(keep[c]);
  return k;
}

ReducedProblem::ReducedProblem(const Objective& obj, Eigen::MatrixXd kernel, double tol, int max_iter)
    : obj_(&obj), k_(std::move(kernel)), tol_(tol), max_iter_(max_iter) {
  const int d = obj.dim();
  if (k_.rows() != d) {
    if (k_.size() != 0) throw std::invalid_argument("ReducedProblem: kernel has the wrong row count");
    k_.resize(d, 0);
  }
  j0_ = gradient_jacobian(obj, Eigen::VectorXd::Zero(d)) + k_ * k_.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (j0_ + j0_.transpose()));
  const Eigen::VectorXd ev = es.eigenvalues().cwiseAbs();
  inv_ = ev.maxCoeff() > 0.0 ? ev.minCoeff() / ev.maxCoeff() : 0.0;
  if (!(inv_ > 1e-8)) throw std::domain_error("ReducedProblem: dN_0 is not invertible");
  lu_.compute(j0_);
  g0_ = obj.value(Eigen::VectorXd::Zero(d));
}

Eigen::VectorXd ReducedProblem::N(const Eigen::VectorXd& x) const {
  return obj_->gradient(x) + k_ * (k_.transpose() * x);
}

Eigen::VectorXd ReducedProblem::phi(const Eigen::VectorXd& y, int* iterations) const {
  Eigen::VectorXd x = y;
  for (int it = 1; it <= max_iter_; ++it) {
    const Eigen::VectorXd dx = lu_.solve(N(x) - y);
    x -= dx;
    if (dx.norm() <= tol_ * (1.0 + x.norm())) {
      if (iterations) *iterations = it;
      return x;
    }
  }
  throw std::domain_error("ReducedProblem: Newton did not converge; shrink the radius");
}

double ReducedProblem::f(const Eigen::VectorXd& z) const { return obj_->value(phi(k_ * z)); }

Eigen::VectorXd ReducedProblem::grad_f(const Eigen::VectorXd& z) const {
  const int k = static_cast<int>(k_.cols());
  Eigen::VectorXd out(k);
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(k);
    e(i) = 1.0;
    // steps scaled to the point so that relative resolution is kept near 0
    const double s = std::max(z.norm(), 1e-6);
    out(i) = fd_first([&](double t) { return f(z + t * e); }, {1e-2 * s, 1e-3 * s});
  }
  return out;
}

namespace {
Eigen::VectorXd random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = g(rng);
  return x / x.norm();
}
}  // namespace

ReductionCheck check_reduction(const ReducedProblem& rp, double radius, int samples, std::uint64_t seed) {
  const int d = rp.objective().dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  ReductionCheck out;
  out.samples = samples;
  out.phi_at_zero = rp.phi(Eigen::VectorXd::Zero(d)).norm();
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd y = radius * u(rng) * random_unit(rng, d);
    const Eigen::VectorXd x = radius * u(rng) * random_unit(rng, d);
    int it = 0;
    const Eigen::VectorXd py = rp.phi(y, &it);
    out.max_iterations = std::max(out.max_iterations, it);
    out.n_of_phi = std::max(out.n_of_phi, (rp.N(py) - y).norm());
    const Eigen::VectorXd px = rp.phi(rp.N(x), &it);
    out.max_iterations = std::max(out.max_iterations, it);
    out.phi_of_n = std::max(out.phi_of_n, (px - x).norm());
    const Eigen::VectorXd pxx = rp.phi(x);
    out.lipschitz = std::max(out.lipschitz, (pxx - py).norm() / (x - y).norm());
  }
  return out;
}

ExponentEstimate estimate_exponent(const ReducedProblem& rp, double radius, int samples, std::uint64_t seed,
                                   int threads) {
  constexpr int kRadii = 10;
  if (samples < kRadii) throw std::invalid_argument("estimate_exponent: empty sample set");
  const Objective& obj = rp.objective();
  const int d = obj.dim();
  const int rays = samples / kRadii;
  ExponentEstimate out;
  out.rays = rays;
  out.samples = rays * kRadii;
  out.seed = seed;
  out.r_max = radius;
  out.r_min = radius * 1e-2;

  std::mt19937_64 rng(seed);
  std::vector<Eigen::VectorXd> pts;
  std::vector<int> shell;
  for (int r = 0; r < rays; ++r) {
    const Eigen::VectorXd dir = random_unit(rng, d);
    for (int k = 0; k < kRadii; ++k) {
      pts.push_back(radius * std::pow(1e-2, double(k) / (kRadii - 1)) * dir);
      shell.push_back(k);
    }
  }
  const int m = static_cast<int>(pts.size());
  const bool reduce = rp.kernel().cols() > 0;
  std::vector<double> dg(m), g2(m), dfk(m), gf2(m), fk(m);
  auto work = [&](int start, int stride) {
    for (int i = start; i < m; i += stride) {
      const double gv = obj.value(pts[i]);
      dg[i] = std::abs(gv - rp.base_value());
      g2[i] = obj.gradient(pts[i]).squaredNorm();
      if (reduce) {
        const Eigen::VectorXd z = rp.project(pts[i]);
        fk[i] = rp.f(z);
        gf2[i] = rp.grad_f(z).squaredNorm();
      } else {
        fk[i] = rp.base_value();
        gf2[i] = 0.0;
      }
      dfk[i] = std::abs(gv - fk[i]);
    }
  };
  threads = std::max(1, std::min(threads, m));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }

  for (int i = 0; i < m; ++i)
    if (!(g2[i] > 0.0) && dg[i] > 0.0) return out;  // non-critical zero of the gradient: invalid

  auto ratio = [&](int i, double alpha, double num) { return g2[i] > 0.0 ? std::pow(num, 2.0 - alpha) / g2[i] : 0.0; };
  auto holds = [&](double alpha) {
    double c_outer = 0.0;
    for (int i = 0; i < m; ++i)
      if (shell[i] == 0) c_outer = std::max(c_outer, ratio(i, alpha, dg[i]));
    for (int i = 0; i < m; ++i)
      if (ratio(i, alpha, dg[i]) > c_outer * (1.0 + 1e-6)) return false;
    return true;
  };
  double lo = 0.0, hi = 1.0;
  if (holds(hi)) {
    lo = hi;
  } else {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (holds(mid) ? lo : hi) = mid;
    }
  }
  out.alpha_hat = lo;
  out.valid = lo > 0.0;
  for (int i = 0; i < m; ++i) {
    out.constant = std::max(out.constant, ratio(i, lo, dg[i]));
    if (g2[i] > 0.0) {
      out.c_grad = std::max(out.c_grad, gf2[i] / g2[i]);
      out.c_f = std::max(out.c_f, dfk[i] / g2[i]);
    }
    out.c_chain = std::max(out.c_chain, ratio(i, lo, std::abs(fk[i] - rp.base_value())));
  }
  return out;
}

FlowReport gradient_flow(const Objective& obj, const Eigen::VectorXd& x0, double step, int iters) {
  FlowReport rep;
  Eigen::VectorXd x = x0;
  double gx = obj.value(x);
  rep.values.push_back(gx);
  std::vector<Eigen::VectorXd> traj{x};
  for (int k = 0; k < iters; ++k) {
    const Eigen::VectorXd g = obj.gradient(x);
    if (g.norm() == 0.0) break;
    for (;;) {
      const Eigen::VectorXd xn = x - step * g;
      double gn = 0.0;
      try {
        gn = obj.value(xn);
      } catch (const std::domain_error&) {
        rep.left_guard = true;
        break;
      }
      if (gn <= gx) {
        x = xn;
        gx = gn;
        break;
      }
      step *= 0.5;
      ++rep.halvings;
      if (step < 1e-14) {
        rep.monotone = false;
        break;
      }
    }
    if (!rep.monotone || rep.left_guard) break;
    rep.values.push_back(gx);
    traj.push_back(x);
  }
  rep.step = step;
  rep.last = x;
  for (const auto& p : traj) rep.distance_to_last.push_back((p - x).norm());
  for (std::size_t k = 1; k < rep.values.size(); ++k)
    if (rep.values[k] > rep.values[k - 1]) rep.monotone = false;
  // rate against the minimum value 0 of the synthetic models and the critical value otherwise
  const double gstar = obj.value(Eigen::VectorXd::Zero(obj.dim()));
  double logsum = 0.0;
  int cnt = 0;
  for (std::size_t k = 1; k < rep.values.size(); ++k) {
    const double a = rep.values[k - 1] - gstar, b = rep.values[k] - gstar;
    if (a > 0.0 && b > 0.0) {
      logsum += std::log(b / a);
      ++cnt;
    }
  }
  rep.mean_ratio = cnt ? std::exp(logsum / cnt) : 0.0;
  return rep;
}

}  // namespace conelab
