#include "conelab/linearization.hpp"

#include "conelab/fd.hpp"
#include "conelab/harmonics.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace conelab {

namespace {

double field_norm(const Geometry& geo, const Tensor& t) { return std::sqrt(integrate(geo, inner(geo, t, t))); }
double field_norm(const Geometry& geo, const Field& f) { return std::sqrt(integrate(geo, f.square())); }

Tensor trace_free(const Geometry& geo, const Tensor& h, int dim) {
  return h - (1.0 / dim) * (trace(geo, h) * geo.g);
}

void require_tangent(const BackgroundData& bg, const TangentPair& x, double tol, const char* who) {
  const Geometry& geo = bg.base;
  const double r = integrate(geo, 0.5 * trace(geo, x.h) + x.v);
  const double scale = std::sqrt(bg.level) * (field_norm(geo, x.h) + field_norm(geo, x.v)) + 1e-300;
  if (std::abs(r) > tol * scale) throw std::domain_error(std::string(who) + ": variation is not tangent to A_1");
}

TangentPair constraint_direction(const BackgroundData& bg) {
  return {0.5 * bg.gbar, Field::Ones(bg.grid->size())};
}

TangentPair project_constraint(const BackgroundData& bg, const TangentPair& x) {
  const TangentPair c = constraint_direction(bg);
  return x - (l2_inner(bg, x, c) / l2_inner(bg, c, c)) * c;
}

// Modified Gram-Schmidt (two passes) over flattened copies; dependent
// candidates are dropped.
struct Orthonormalizer {
  const BackgroundData& bg;
  double drop_tol;
  VariationBasis out;
  std::vector<Eigen::VectorXd> flat;
  // rms size of gbar itself; candidates below drop_tol of it are zero (Killing fields)
  double unit;

  bool add(TangentPair x, Tensor field, BasisLabel label) {
    Eigen::VectorXd f = flatten(bg, x);
    const double orig = f.norm();
    if (!(orig > drop_tol * unit)) return false;
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < flat.size(); ++k) {
        const double c = flat[k].dot(f);
        f -= c * flat[k];
        x -= c * out.elems[k];
        if (field.rank > 0 && !out.fields[k].c.empty()) field -= c * out.fields[k];
      }
    const double nrm = f.norm();
    if (nrm < drop_tol * orig) return false;
    x *= 1.0 / nrm;
    if (field.rank > 0) field *= 1.0 / nrm;
    flat.push_back(f / nrm);
    out.elems.push_back(std::move(x));
    out.labels.push_back(label);
    out.fields.push_back(std::move(field));
    return true;
  }

  VariationBasis finish() {
    const int d = static_cast<int>(flat.size());
    out.gram.resize(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out.gram(i, j) = l2_inner(bg, out.elems[i], out.elems[j]);
    return std::move(out);
  }
};

}  // namespace

PairPath second_order_path(const BackgroundData& bg, const TangentPair& x, const TangentPair& xp) {
  return [&bg, x, xp](double t) {
    WeightedPair p;
    p.g = bg.gbar + t * x.h + (0.5 * t * t) * xp.h;
    p.w = bg.b_inf * (t * x.v + (t * t) * xp.v).exp();
    return p;
  };
}

bool is_base_pair(const BackgroundData& bg, const WeightedPair& p, double tol) {
  if (p.g.nodes() != bg.grid->size() || p.w.size() != bg.grid->size()) return false;
  double dg = 0.0;
  for (int a = 0; a < p.g.ncomp(); ++a) dg = std::max(dg, (p.g.c[a] - bg.gbar.c[a]).abs().maxCoeff());
  const double dw = (p.w - bg.b_inf).abs().maxCoeff() / bg.b_inf;
  return dg <= tol * bg.gbar.max_abs() && dw <= tol;
}

double second_variation_A(const BackgroundData& bg, const TangentPair& x, const TangentPair& xp) {
  const Geometry& geo = bg.base;
  const double b = bg.b_inf;
  const Field tr = trace(geo, x.h);
  const Field psi = 0.5 * tr + x.v;
  const Field integrand = 4.0 * x.v * (0.5 * tr + 2.0 * x.v) + psi.square() + 6.0 * xp.v -
                          0.5 * inner(geo, x.h, x.h) + 0.5 * trace(geo, xp.h);
  return b * b * b * integrate(geo, integrand);
}

double second_variation_B(const BackgroundData& bg, const TangentPair& x, const TangentPair& xp) {
  const Geometry& geo = bg.base;
  const double b = bg.b_inf;
  const int n = bg.n;
  const Tensor& h = x.h;
  const Field tr = trace(geo, h);
  const Field psi = 0.5 * tr + x.v;
  const Tensor ddh = covariant_derivative(geo, divergence(geo, h));
  const Field lap_v = laplacian(geo, x.v);

  Field integrand = (b * b * (n - 2)) * ((n - 1) * psi - 2.0 * tr) * psi;
  integrand += -inner(geo, ddh, h) + 0.5 * inner(geo, rough_laplacian(geo, h), h) +
               0.5 * inner(geo, hessian(geo, tr), h) + inner(geo, riemann_action(geo, h), h);
  integrand += inner(geo, h, hessian(geo, x.v)) - tr * lap_v;
  integrand += (double_divergence(geo, h) - laplacian(geo, tr)) * psi;
  integrand += (b * b * (n - 2)) *
               (0.5 * (n - 3) * (trace(geo, xp.h) - inner(geo, h, h)) + 2.0 * (n - 1) * xp.v);
  return b * integrate(geo, integrand);
}

double second_variation_R(const BackgroundData& bg, const TangentPair& x, const TangentPair& xp) {
  const int n = bg.n;
  return (second_variation_A(bg, x, xp) - second_variation_B(bg, x, xp) / (n - 2)) / (2 - n);
}

double second_variation_A(const BackgroundData& bg, const WeightedPair& at, const TangentPair& x,
                          const TangentPair& xp) {
  if (!is_base_pair(bg, at)) throw std::domain_error("second_variation_A: formula holds at the base pair only");
  return second_variation_A(bg, x, xp);
}

double second_variation_B(const BackgroundData& bg, const WeightedPair& at, const TangentPair& x,
                          const TangentPair& xp) {
  if (!is_base_pair(bg, at)) throw std::domain_error("second_variation_B: formula holds at the base pair only");
  return second_variation_B(bg, x, xp);
}

double sv_tt_form(const Geometry& base, double b_inf, int n, const Tensor& h, const Field& v) {
  const Field integrand = inner(base, lichnerowicz(base, h), h) / (2.0 * (n - 2)) - 6.0 * b_inf * b_inf * v.square();
  return -b_inf * integrate(base, integrand);
}

double sv_transverse_traceless(const BackgroundData& bg, const Tensor& h, const Field& v, double tol) {
  const Geometry& geo = bg.base;
  const double scale = field_norm(geo, h) + field_norm(geo, v) + 1e-300;
  if (field_norm(geo, trace(geo, h)) > tol * scale)
    throw std::domain_error("sv_transverse_traceless: h is not trace free");
  if (std::sqrt(integrate(geo, inner(geo, divergence(geo, h), divergence(geo, h)))) > tol * scale)
    throw std::domain_error("sv_transverse_traceless: h is not divergence free");
  require_tangent(bg, {h, v}, 1e-10, "sv_transverse_traceless");
  return sv_tt_form(geo, bg.b_inf, bg.n, h, v);
}

double sv_conformal(const BackgroundData& bg, const Field& phi, const Field& v, double tol) {
  require_tangent(bg, {phi * bg.gbar, v}, tol, "sv_conformal");
  const Geometry& geo = bg.base;
  const double b2 = bg.b_inf * bg.b_inf;
  const int n = bg.n;
  const Field lp = laplacian(geo, phi);
  const Field lv = laplacian(geo, v);
  const Field integrand = 0.5 * (n - 3) * phi * (lp + (n - 1) * b2 * phi) + 2.0 * (n - 1) * b2 * phi * v +
                          phi * lv + v * lp + 6.0 * b2 * v.square();
  return bg.b_inf * integrate(geo, integrand);
}

std::pair<Field, Field> ConformalBlock::apply(const Field& phi, const Field& v) const {
  const Geometry& geo = bg_->base;
  const double c = bg_->b_inf * bg_->b_inf * (bg_->n - 1);
  const Field op_phi = laplacian(geo, phi) + c * phi;
  const Field op_v = laplacian(geo, v) + c * v;
  const double b2 = bg_->b_inf * bg_->b_inf;
  return {0.5 * (bg_->n - 3) * op_phi + op_v, op_phi + 6.0 * b2 * v};
}

double ConformalBlock::quadratic_form(const Field& phi, const Field& v) const {
  const auto [a, b] = apply(phi, v);
  return bg_->b_inf * integrate(bg_->base, a * phi + b * v);
}

Eigen::Matrix2d ConformalBlock::symbol() const {
  Eigen::Matrix2d s;
  s << 0.5 * (bg_->n - 3), 1.0, 1.0, 0.0;
  return s;
}

std::pair<double, double> ConformalBlock::constant_image(double c1, double c2) const {
  const double b2 = bg_->b_inf * bg_->b_inf;
  const int n = bg_->n;
  return {0.5 * (n - 3) * b2 * (n - 1) * c1 + b2 * (n - 1) * c2, b2 * (n - 1) * c1 + 6.0 * b2 * c2};
}

std::vector<VectorMode> vector_modes(const BackgroundData& bg, int lmin, int lmax) {
  const Geometry round = make_geometry(bg.grid, bg.g0);
  std::vector<VectorMode> out;
  for (auto [l, m] : harmonic_indices(std::max(lmin, 1), lmax)) {
    const Field y = real_harmonic(*bg.grid, l, m);
    out.push_back({gradient_field(round, y), l, m, false});
    out.push_back({rotated_gradient_field(round, y), l, m, true});
  }
  return out;
}

Eigen::VectorXd flatten(const BackgroundData& bg, const TangentPair& x) {
  const Tensor& g = bg.gbar;
  if (g(0, 1).abs().maxCoeff() > 0.0) throw std::invalid_argument("flatten: gbar must be diagonal");
  const int n = bg.grid->size();
  const Field wt = (bg.b_inf * bg.base.density * bg.grid->quad_weights()).sqrt();
  const Field s00 = g(0, 0), s11 = g(1, 1);
  Eigen::VectorXd out(4 * n);
  out.segment(0, n) = (wt * x.h(0, 0) / s00).matrix();
  out.segment(n, n) = (wt * std::sqrt(2.0) * x.h(0, 1) / (s00 * s11).sqrt()).matrix();
  out.segment(2 * n, n) = (wt * x.h(1, 1) / s11).matrix();
  out.segment(3 * n, n) = (wt * x.v).matrix();
  return out;
}

YorkParts york_decompose(const Tensor& h, const BackgroundData& bg, int lmax, double tol) {
  const Geometry& geo = bg.base;
  const int dim = bg.n - 1;
  const int nodes = bg.grid->size();
  YorkParts out;
  out.phi = trace(geo, h) / dim;
  out.conformal = out.phi * bg.gbar;
  const Tensor h0 = h - out.conformal;

  const std::vector<VectorMode> modes = vector_modes(bg, 1, lmax);
  const int k = static_cast<int>(modes.size());
  Eigen::MatrixXd a(4 * nodes, k);
  const Field zero = Field::Zero(nodes);
  for (int j = 0; j < k; ++j) {
    const Tensor lie = trace_free(geo, lie_derivative_metric(geo, modes[j].v), dim);
    a.col(j) = flatten(bg, {lie, zero});
  }
  const Eigen::VectorXd rhs = flatten(bg, {h0, zero});
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  cod.setThreshold(1e-9);
  const Eigen::VectorXd coef = cod.solve(rhs);

  out.v_up = Tensor(1, nodes);
  for (int j = 0; j < k; ++j) out.v_up += coef(j) * modes[j].v;
  const Tensor lie = lie_derivative_metric(geo, out.v_up);
  out.gauge = trace_free(geo, lie, dim);
  out.tt = h0 - out.gauge;
  const Field div_v = 0.5 * trace(geo, lie);
  out.phi_lie = out.phi - (2.0 / dim) * div_v;

  const double scale = field_norm(geo, h) + 1e-300;
  const Tensor dtt = divergence(geo, out.tt);
  out.divergence_residual = std::sqrt(integrate(geo, inner(geo, dtt, dtt))) / scale;
  out.trace_residual = field_norm(geo, trace(geo, out.tt)) / scale;
  if (out.divergence_residual > tol)
    throw std::domain_error("york_decompose: least-squares residual " + std::to_string(out.divergence_residual) +
                            " above tolerance (vector basis too small)");
  return out;
}

const char* label_name(BasisLabel l) {
  switch (l) {
    case BasisLabel::tt: return "tt";
    case BasisLabel::conformal: return "conformal";
    case BasisLabel::diffeo: return "diffeo";
  }
  return "?";
}

int VariationBasis::count(BasisLabel l) const {
  int c = 0;
  for (auto x : labels) c += (x == l);
  return c;
}

double VariationBasis::max_constraint_residual(const BackgroundData& bg) const {
  const TangentPair c = constraint_direction(bg);
  const double cn = l2_norm(bg, c);
  double worst = 0.0;
  for (const auto& e : elems) worst = std::max(worst, std::abs(l2_inner(bg, e, c)) / cn);
  return worst;
}

VariationBasis structure_basis(const BackgroundData& bg, int L, double drop_tol) {
  const int nodes = bg.grid->size();
  Orthonormalizer gs{bg, drop_tol, {}, {}, 0.0};
  gs.unit = l2_norm(bg, {bg.gbar, Field::Zero(nodes)}) / std::sqrt(bg.grid->reference_area());
  for (const auto& mode : vector_modes(bg, 1, L))
    gs.add({lie_derivative_metric(bg.base, mode.v), Field::Zero(nodes)}, mode.v, BasisLabel::diffeo);
  for (auto [l, m] : harmonic_indices(0, L)) {
    const Field y = real_harmonic(*bg.grid, l, m);
    gs.add(project_constraint(bg, {y * bg.gbar, Field::Zero(nodes)}), {}, BasisLabel::conformal);
    gs.add(project_constraint(bg, {Tensor(2, nodes), y}), {}, BasisLabel::conformal);
  }
  return gs.finish();
}

VariationBasis slice_basis(const BackgroundData& bg, int L, double drop_tol) {
  const int nodes = bg.grid->size();
  const double b2 = bg.b_inf * bg.b_inf;
  Orthonormalizer gs{bg, drop_tol, {}, {}, 0.0};
  gs.unit = l2_norm(bg, {bg.gbar, Field::Zero(nodes)}) / std::sqrt(bg.grid->reference_area());
  for (auto [l, m] : harmonic_indices(0, L)) {
    const Field y = real_harmonic(*bg.grid, l, m);
    if (l != 1) {
      Tensor h = y * bg.g0;
      if (l > 0) h += (1.0 / (l * (l + 1) - 1.0)) * hessian(bg.base, y);
      h *= 1.0 / b2;
      gs.add(project_constraint(bg, {h, Field::Zero(nodes)}), {}, BasisLabel::conformal);
    }
    gs.add(project_constraint(bg, {Tensor(2, nodes), y}), {}, BasisLabel::conformal);
  }
  return gs.finish();
}

double OperatorMatrix::symmetry_defect() const {
  const double nm = m.norm();
  return nm > 0.0 ? (m - m.transpose()).norm() / nm : 0.0;
}

double OperatorMatrix::label_block_norm(BasisLabel l) const {
  const double nm = m.norm();
  if (!(nm > 0.0)) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    if (labels[i] == l) worst = std::max({worst, m.col(i).norm(), m.row(i).norm()});
  return worst / nm;
}

double OperatorMatrix::cross_block_norm(BasisLabel a, BasisLabel b) const {
  const double nm = m.norm();
  if (!(nm > 0.0)) return 0.0;
  double s = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (labels[i] == a && labels[j] == b) s += m(i, j) * m(i, j);
  return std::sqrt(s) / nm;
}

void OperatorMatrix::write_csv(std::ostream& os) const {
  for (std::size_t j = 0; j < labels.size(); ++j) os << (j ? "," : "") << label_name(labels[j]) << j;
  os << "\n";
  os.precision(17);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
    os << "\n";
  }
}

TangentPair linearized_gradient(const BackgroundData& bg, const TangentPair& x) {
  return fd_first_value<TangentPair>(
      [&](double t) -> TangentPair { return project_gradient(exp_chart(t * x, bg), bg); });
}

OperatorMatrix assemble_L(const VariationBasis& basis, const BackgroundData& bg, int threads) {
  const int d = basis.dim();
  const int nodes = bg.grid->size();
  Eigen::MatrixXd flat(4 * nodes, d);
  for (int j = 0; j < d; ++j) flat.col(j) = flatten(bg, basis.elems[j]);

  OperatorMatrix out;
  out.labels = basis.labels;
  out.m.resize(d, d);
  auto work = [&](int start, int stride) {
    for (int j = start; j < d; j += stride)
      out.m.col(j) = flat.transpose() * flatten(bg, linearized_gradient(bg, basis.elems[j]));
  };
  threads = std::max(1, std::min(threads, d));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  return out;
}

KernelResult kernel_of_L(const OperatorMatrix& m, double threshold) {
  KernelResult out;
  for (int i = 0; i < m.m.rows(); ++i)
    if (m.labels[i] != BasisLabel::diffeo) out.restricted.push_back(i);
  const int r = static_cast<int>(out.restricted.size());
  Eigen::MatrixXd sub(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) sub(i, j) = m.m(out.restricted[i], out.restricted[j]);
  sub = 0.5 * (sub + sub.transpose()).eval();
  out.vectors.resize(m.m.rows(), 0);
  if (r == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
  if (es.info() != Eigen::Success) throw std::runtime_error("kernel_of_L: eigensolver did not converge");
  out.eigenvalues = es.eigenvalues();
  out.spectral_radius = out.eigenvalues.cwiseAbs().maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < r; ++i)
    if (std::abs(out.eigenvalues(i)) < threshold * out.spectral_radius) keep.push_back(i);
  out.vectors = Eigen::MatrixXd::Zero(m.m.rows(), static_cast<int>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    for (int i = 0; i < r; ++i) out.vectors(out.restricted[i], c) = es.eigenvectors()(i, keep[c]);
  return out;
}

}  // namespace conelab
