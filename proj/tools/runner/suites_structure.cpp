#include "runner/suites.hpp"
#include "runner/svg.hpp"

#include <conelab/fd.hpp>
#include <conelab/harmonics.hpp>
#include <conelab/lojasiewicz.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace conelab::runner {

namespace {

double l2(const Geometry& geo, const Tensor& t) { return std::sqrt(std::max(0.0, integrate(geo, inner(geo, t, t)))); }

std::string flow_csv(const std::vector<std::pair<std::string, FlowReport>>& flows) {
  std::ostringstream os;
  os.precision(17);
  os << "objective,iteration,value,distance_to_last\n";
  for (const auto& [name, f] : flows)
    for (std::size_t i = 0; i < f.values.size(); ++i)
      os << name << ',' << i << ',' << f.values[i] << ',' << (i < f.distance_to_last.size() ? f.distance_to_last[i] : 0.0)
         << '\n';
  return os.str();
}

nlohmann::ordered_json exponent_json(const ExponentEstimate& e) {
  return {{"alpha_hat", e.alpha_hat}, {"constant", e.constant}, {"c_grad", e.c_grad}, {"c_f", e.c_f},
          {"c_chain", e.c_chain},     {"samples", e.samples},   {"rays", e.rays},     {"r_min", e.r_min},
          {"r_max", e.r_max},         {"seed", e.seed},         {"valid", e.valid}};
}

}  // namespace

void linearization_structure(SuiteContext& ctx) {
  const auto& c = ctx.config();
  const auto grid = Grid::sphere(c.n_lat, c.n_lon);
  const BackgroundData bg = BackgroundData::round(grid, 1.0);

  const VariationBasis sb = structure_basis(bg, c.L);
  const OperatorMatrix M = assemble_L(sb, bg, c.threads);
  ctx.record("symmetry", M.symmetry_defect());
  ctx.record("diffeo_block", M.label_block_norm(BasisLabel::diffeo));
  ctx.record("tt_conformal_block", M.cross_block_norm(BasisLabel::tt, BasisLabel::conformal));

  double image_tt = 0.0;
  int used = 0;
  for (int i = 0; i < sb.dim() && used < c.conformal_images; ++i) {
    if (sb.labels[i] != BasisLabel::conformal) continue;
    ++used;
    const TangentPair Lx = linearized_gradient(bg, sb.elems[i]);
    // the image carries finite-difference noise outside the band, so the
    // fit residual is not gated; what is measured is the TT share of L x
    const YorkParts yp = york_decompose(Lx.h, bg, 10, std::numeric_limits<double>::infinity());
    image_tt = std::max(image_tt, l2(bg.base, yp.tt) / std::max(l2_norm(bg, Lx), 1e-300));
  }
  ctx.record("conformal_image_tt", image_tt);

  double recon = 0.0, orth = 0.0, ttres = 0.0;
  const BackgroundData bg13 = BackgroundData::round(grid, 1.3);
  for (int k = 0; k < c.york_samples; ++k) {
    const BackgroundData& b = k % 2 ? bg13 : bg;
    FieldSampler fs(grid, derive_seed(ctx.seed(), ctx.suite(), k));
    const Tensor h = fs.sym_tensor();
    const YorkParts yp = york_decompose(h, b);
    recon = std::max(recon, (yp.tt + yp.conformal + yp.gauge - h).max_abs() / h.max_abs());
    const double nh = l2(b.base, h);
    const Tensor* parts[] = {&yp.tt, &yp.conformal, &yp.gauge};
    // relative to |h|^2: the TT part is at roundoff level on S^2
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        orth = std::max(orth, std::abs(integrate(b.base, inner(b.base, *parts[i], *parts[j]))) / (nh * nh));
    ttres = std::max({ttres, yp.divergence_residual, yp.trace_residual});
  }
  ctx.record("york_reconstruction", recon);
  ctx.record("york_orthogonality", orth);
  ctx.record("york_tt_residual", ttres);
  ctx.record("basis_tangency", sb.max_constraint_residual(bg));

  const KernelResult K = kernel_of_L(M);
  ctx.record("kernel_dimension", K.dim());

  std::ostringstream os;
  M.write_csv(os);
  ctx.artifact("L_matrix.csv", os.str());
  nlohmann::ordered_json j;
  j["dimension"] = sb.dim();
  j["diffeo"] = sb.count(BasisLabel::diffeo);
  j["conformal"] = sb.count(BasisLabel::conformal);
  j["tt"] = sb.count(BasisLabel::tt);
  j["symmetry_defect"] = M.symmetry_defect();
  j["spectral_radius"] = K.spectral_radius;
  j["eigenvalues"] = std::vector<double>(K.eigenvalues.data(), K.eigenvalues.data() + K.eigenvalues.size());
  ctx.artifact("L_summary.json", j.dump(1) + "\n");
}

void lojasiewicz(SuiteContext& ctx) {
  const auto& c = ctx.config();
  const int d = 6;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
  nlohmann::ordered_json summary;
  std::vector<std::pair<std::string, FlowReport>> flows;

  const QuadraticModel quad(d);
  const QuarticModel quart(d);
  for (const Objective* obj : {static_cast<const Objective*>(&quad), static_cast<const Objective*>(&quart)}) {
    const bool quadratic = obj == &quad;
    const std::string name = quadratic ? "quadratic" : "quartic";
    const ReducedProblem rp(*obj, kernel_from_jacobian(gradient_jacobian(*obj, zero)));
    const ReductionCheck rc = check_reduction(rp, 0.1, c.reduction_samples, derive_seed(ctx.seed(), name, 0));
    const ExponentEstimate ee =
        estimate_exponent(rp, 0.1, c.exponent_samples, derive_seed(ctx.seed(), name, 1), c.threads);
    ctx.record(name + "_reduction", std::max({rc.phi_at_zero, rc.n_of_phi, rc.phi_of_n}));
    ctx.record(name + "_exponent", std::abs(ee.alpha_hat - (quadratic ? 1.0 : 0.5)));
    summary[name] = exponent_json(ee);
    summary[name]["kernel_dimension"] = rp.kernel().cols();
  }
  const FlowReport qf = gradient_flow(quad, Eigen::VectorXd::Constant(d, 0.1), 0.1, 30);
  ctx.record("quadratic_flow_rate", std::abs(qf.mean_ratio - std::pow(1.0 - 2.0 * 0.1, 2)));
  flows.emplace_back("quadratic", qf);

  const auto grid = Grid::sphere(c.n_lat, c.n_lon);
  const BackgroundData bg = BackgroundData::round(grid, 1.0);
  const SliceObjective G(bg, slice_basis(bg, c.L));
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(G.dim());
  const double g0 = bg.b_inf * bg.b_inf * unit_sphere_volume(bg.n);
  ctx.record("slice_base", std::max(std::abs(G.value(z) - g0) / g0, G.gradient(z).norm()));

  std::mt19937_64 rng(derive_seed(ctx.seed(), ctx.suite(), 0));
  std::normal_distribution<double> nd;
  Eigen::VectorXd x(G.dim()), y(G.dim());
  for (int i = 0; i < G.dim(); ++i) x(i) = 0.005 * nd(rng);
  for (int i = 0; i < G.dim(); ++i) y(i) = nd(rng);
  const double fd = fd_first([&](double t) { return G.value(x + t * y); });
  ctx.record("slice_gradient", std::abs(G.gradient(x).dot(y) - fd) / std::abs(fd));

  const ReducedProblem rp(G, Eigen::MatrixXd());
  const ReductionCheck rc = check_reduction(rp, c.exponent_radius, c.reduction_samples,
                                            derive_seed(ctx.seed(), ctx.suite(), 1));
  ctx.record("slice_reduction", std::max({rc.phi_at_zero, rc.n_of_phi, rc.phi_of_n}));
  const ExponentEstimate ee = estimate_exponent(rp, c.exponent_radius, c.exponent_samples,
                                                derive_seed(ctx.seed(), ctx.suite(), 2), c.threads);
  ctx.record("slice_inequality", ee.valid ? 0.0 : 1.0);
  summary["slice"] = exponent_json(ee);
  summary["slice"]["dimension"] = G.dim();
  summary["slice"]["invertibility"] = rp.invertibility();
  summary["slice"]["reduction_lipschitz"] = rc.lipschitz;

  const FlowReport sf = gradient_flow(G, 1e-3 * y / y.norm(), 0.02, c.flow_iterations);
  ctx.record("slice_flow_monotone", sf.monotone ? 0.0 : 1.0);
  flows.emplace_back("slice", sf);

  ctx.artifact("exponents.json", summary.dump(1) + "\n");
  ctx.artifact("flows.csv", flow_csv(flows));
  if (ctx.plotting()) {
    std::vector<Series> ss;
    for (const auto& [name, f] : flows) {
      Series s{name, {}, {}};
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        s.x.push_back(double(i));
        s.y.push_back(std::abs(f.values[i] - f.values.back()));
      }
      ss.push_back(std::move(s));
    }
    ctx.plot("flow.svg", line_plot({"gradient descent", "iteration", "|G - G(last)|", false, true}, ss));
  }
}

}  // namespace conelab::runner
