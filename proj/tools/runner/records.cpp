#include "runner/records.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace conelab::runner {

namespace {

// clang-format off
const std::vector<CheckSpec> kChecks = {
  {"geometry-oracles", "completed", "suite ran to completion", 0.5, 12},
  {"geometry-oracles", "sphere_scalar", "round unit sphere has scalar curvature 2", 1e-6, 1},
  {"geometry-oracles", "torus_curvature", "constant metrics on the torus are flat", 1e-10, 1},
  {"geometry-oracles", "quadrature_area", "quadrature reproduces the area 4 pi of the unit sphere", 1e-12, 1},
  {"geometry-oracles", "quadrature_orthonormality", "real spherical harmonics are orthonormal", 1e-10, 1},
  {"geometry-oracles", "curvature_contractions", "Ricci and scalar curvature are traces of Riemann", 1e-10, 1},
  {"geometry-oracles", "laplacian_spectrum", "Y_lm is a Laplace eigenfunction with eigenvalue -l(l+1)", 1e-8, 1},
  {"geometry-oracles", "laplacian_divergence_form", "Laplacian equals the divergence of the gradient in divergence form", 1e-8, 1},
  {"geometry-oracles", "conformal_scalar", "scalar curvature of e^{2u} g is e^{-2u} (R - 2 Lap u) in dimension 2", 1e-8, 1},
  {"geometry-oracles", "integration_by_parts", "int <h, Hess u> = int u div div h", 1e-8, 1},
  {"geometry-oracles", "lichnerowicz_metric", "Lichnerowicz operator sends the round metric to 2 g0", 1e-8, 1},

  {"variation-oracles", "completed", "suite ran to completion", 0.5, 12},
  {"variation-oracles", "base_value", "R at the base pair equals b_inf^2 Vol(S^2) (b_inf = 1), b_inf^{4-n} Vol(g0) in general", 1e-10, 2},
  {"variation-oracles", "exp_chart_constraint", "exp_chart lands in the constraint set A_1", 1e-12, 2},
  {"variation-oracles", "exp_chart_linearization", "exp_chart has differential the identity on tangent pairs", 1e-6, 2},
  {"variation-oracles", "constraint_first", "first-order constraint along paths in A_1", 1e-6, 2},
  {"variation-oracles", "constraint_second", "second-order constraint along paths in A_1", 1e-6, 2},
  {"variation-oracles", "base_criticality", "the round base pair is critical for R on A_1", 1e-8, 3},
  {"variation-oracles", "projection_orthogonality", "constrained gradient is orthogonal to grad A_1", 1e-10, 3},
  {"variation-oracles", "psi_duality", "Psi carries the g pairing to the fixed gbar pairing", 1e-12, 3},
  {"variation-oracles", "gradient_R", "L2 gradient of R matches its directional derivative", 1e-6, 4},
  {"variation-oracles", "first_variation_A", "first variation of A", 1e-6, 4},
  {"variation-oracles", "first_variation_B", "first variation of B", 1e-6, 4},
  {"variation-oracles", "first_variation_A1", "first variation of A_1", 1e-6, 4},
  {"variation-oracles", "d_metric_inverse", "variation of the inverse metric is -g^-1 h g^-1", 1e-6, 4},
  {"variation-oracles", "d_norm_gradient", "variation of |grad u|^2", 1e-6, 4},
  {"variation-oracles", "d_volume", "variation of the volume form is Tr(h)/2", 1e-6, 4},
  {"variation-oracles", "d_scalar_curvature", "variation of scalar curvature", 1e-6, 4},
  {"variation-oracles", "d_ricci", "variation of Ricci curvature", 1e-6, 4},
  {"variation-oracles", "d_hessian", "variation of the Hessian", 1e-6, 4},

  {"second-variation", "completed", "suite ran to completion", 0.5, 12},
  {"second-variation", "second_variation_A", "second variation of A at the base pair", 1e-5, 5},
  {"second-variation", "second_variation_B", "second variation of B at the base pair", 1e-5, 5},
  {"second-variation", "second_variation_R", "second variation of R at the base pair", 1e-5, 5},
  {"second-variation", "transverse_traceless", "second variation of R along transverse traceless directions", 1e-5, 5},
  {"second-variation", "conformal", "second variation of R along conformal directions", 1e-5, 5},
  {"second-variation", "conformal_block", "conformal block quadratic form equals (2 - n) R''", 1e-5, 5},
  {"second-variation", "symbol_determinant", "Laplacian coefficient matrix of the conformal block has determinant -1", 1e-15, 5},

  {"linearization-structure", "completed", "suite ran to completion", 0.5, 12},
  {"linearization-structure", "symmetry", "linearized gradient L is symmetric", 1e-6, 6},
  {"linearization-structure", "diffeo_block", "diffeomorphism directions are annihilated by L", 1e-6, 6},
  {"linearization-structure", "tt_conformal_block", "L does not couple transverse traceless and conformal directions", 1e-5, 6},
  {"linearization-structure", "conformal_image_tt", "L maps conformal directions to pairs without transverse traceless part", 1e-5, 6},
  {"linearization-structure", "york_reconstruction", "York parts sum back to h", 1e-8, 6},
  {"linearization-structure", "york_orthogonality", "York parts are mutually L2 orthogonal", 1e-8, 6},
  {"linearization-structure", "york_tt_residual", "transverse traceless York part is divergence and trace free", 1e-8, 6},
  {"linearization-structure", "basis_tangency", "structure basis is tangent to A_1", 1e-10, 6},
  {"linearization-structure", "kernel_dimension", "L has no kernel at the round base beyond diffeomorphisms", 0.5, 6},

  {"lojasiewicz", "completed", "suite ran to completion", 0.5, 12},
  {"lojasiewicz", "quadratic_reduction", "Phi and N are mutually inverse for |x|^2", 1e-8, 7},
  {"lojasiewicz", "quadratic_exponent", "gradient inequality for |x|^2 is feasible at exponent 1", 0.05, 7},
  {"lojasiewicz", "quartic_reduction", "Phi and N are mutually inverse for |x|^4", 1e-8, 7},
  {"lojasiewicz", "quartic_exponent", "gradient inequality for |x|^4 has exponent 1/2", 0.05, 7},
  {"lojasiewicz", "quadratic_flow_rate", "gradient descent on |x|^2 contracts by (1 - 2 step)^2", 1e-6, 7},
  {"lojasiewicz", "slice_base", "slice objective has value 4 pi b_inf^2 and zero gradient at the base", 1e-8, 7},
  {"lojasiewicz", "slice_gradient", "slice gradient matches its directional derivative", 1e-6, 7},
  {"lojasiewicz", "slice_reduction", "Phi and N are mutually inverse on the slice", 1e-8, 7},
  {"lojasiewicz", "slice_inequality", "gradient inequality holds at every sample with the reported exponent and constant", 0.5, 7},
  {"lojasiewicz", "slice_flow_monotone", "slice objective decreases along discrete gradient descent", 0.5, 7},

  {"cone-models", "completed", "suite ran to completion", 0.5, 12},
  {"cone-models", "euclidean_profile", "Green coordinate of Euclidean space is b = s", 1e-10, 8},
  {"cone-models", "euclidean_A", "A is 4 pi on Euclidean space", 1e-10, 8},
  {"cone-models", "euclidean_Q", "Q vanishes on Euclidean space", 1e-10, 8},
  {"cone-models", "cone_b_inf", "cone of slope 0.9 has b_inf = 0.81", 1e-9, 8},
  {"cone-models", "cone_A", "A is 0.81^2 4 pi on the cone of slope 0.9", 1e-9, 8},
  {"cone-models", "cone_Q", "Q vanishes on exact cones", 1e-10, 8},
  {"cone-models", "level_set_formula", "R of the level pair equals its level set expression", 1e-8, 8},
  {"cone-models", "stokes_flux", "r^{1-n} int_{b=r} |grad b| = Vol(S^{n-1})", 1e-8, 8},
  {"cone-models", "property_spread", "fitted constants of the two annulus properties are uniform across the warp family", 10.0, 9},
  {"cone-models", "property_holds", "both annulus properties hold at every sampled radius with the uniform constant", 0.5, 9},
  {"cone-models", "eh_ricci", "Eguchi-Hanson is Ricci flat", 1e-6, 10},
  {"cone-models", "eh_A_monotone", "A is nonincreasing on Eguchi-Hanson", 1e-12, 10},
  {"cone-models", "eh_Q_monotone", "Q is nonincreasing on Eguchi-Hanson", 1e-12, 10},
  {"cone-models", "eh_monotonicity", "A' equals the monotonicity integrand on Eguchi-Hanson", 1e-2, 10},

  {"appendix-b", "completed", "suite ran to completion", 0.5, 12},
  {"appendix-b", "general_identities", "level set identities valid on any metric", 1e-8, 8},
  {"appendix-b", "ricci_corrected", "Ricci corrected level set identities on warped models", 1e-6, 8},
  {"appendix-b", "flat_form_euclidean", "Ricci flat level set identities on Euclidean space", 1e-8, 8},
  {"appendix-b", "flat_form_eguchi_hanson", "Ricci flat level set identities on Eguchi-Hanson", 1e-6, 10},

  {"decay-engine", "completed", "suite ran to completion", 0.5, 12},
  {"decay-engine", "alg_grid_failures", "corrected algebraic lower bound holds on the grid", 0.5, 11},
  {"decay-engine", "decay_a30", "power decay certificate on the extremal sequence, alpha 0.3", 0.5, 11},
  {"decay-engine", "decay_a50", "power decay certificate on the extremal sequence, alpha 0.5", 0.5, 11},
  {"decay-engine", "decay_a70", "power decay certificate on the extremal sequence, alpha 0.7", 0.5, 11},
  {"decay-engine", "exponent_a30", "extremal sequence decays like j^{-(1+beta)}, alpha 0.3", 0.01, 11},
  {"decay-engine", "exponent_a50", "extremal sequence decays like j^{-(1+beta)}, alpha 0.5", 0.01, 11},
  {"decay-engine", "exponent_a70", "extremal sequence decays like j^{-(1+beta)}, alpha 0.7", 0.01, 11},
  {"decay-engine", "series_example", "sum_{j>=10} (j^-2 - (j+1)^-2) j = 0.1952", 5e-5, 11},
  {"decay-engine", "series_bound", "the same sum is at most 0.2", 1e-12, 11},
  {"decay-engine", "theta_sum", "sum of Theta from j1 is at most C j1^{-beta_bar}", 0.5, 11},
  {"decay-engine", "annulus_chain", "annulus distances are bounded by 3 sum Theta", 0.5, 11},

  {"bootstrap", "completed", "suite ran to completion", 0.5, 12},
  {"bootstrap", "forward_instance", "forward generated instance is certified", 0.5, 11},
  {"bootstrap", "exact_cone", "exact cone instance is certified", 0.5, 11},
  {"bootstrap", "tail_bound", "Theta tail sums stay below C j^{-beta_bar} on the forward instance", 1e-12, 11},
  {"bootstrap", "adversary_seed_closeness", "instance with a far seed annulus is refused at the right step", 0.5, 11},
  {"bootstrap", "adversary_area_drop", "instance with a large drop of A is refused at the right step", 0.5, 11},
  {"bootstrap", "adversary_theta_relation", "instance violating the Theta relation is refused at the right step", 0.5, 11},
};
// clang-format on

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const std::vector<CheckSpec>& check_table() { return kChecks; }

const CheckSpec* find_check(std::string_view suite, std::string_view id) {
  for (const auto& c : kChecks)
    if (c.suite == suite && c.id == id) return &c;
  return nullptr;
}

bool known_check(const std::string& key) {
  const auto dot = key.find('.');
  return dot != std::string::npos && find_check(key.substr(0, dot), key.substr(dot + 1));
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "geometry-oracles", "variation-oracles", "second-variation", "linearization-structure", "lojasiewicz",
      "cone-models",      "appendix-b",        "decay-engine",     "bootstrap"};
  return names;
}

bool ResultRecord::recompute() const { return std::isfinite(value) && value <= tol; }

SuiteContext::SuiteContext(std::string suite, const ExperimentConfig& cfg, std::filesystem::path out)
    : suite_(std::move(suite)), cfg_(&cfg), out_(std::move(out)), mark_(std::chrono::steady_clock::now()) {}

void SuiteContext::record(std::string_view id, double value) {
  const CheckSpec* spec = find_check(suite_, id);
  if (!spec) throw std::logic_error("unregistered check " + suite_ + "." + std::string(id));
  const auto now = std::chrono::steady_clock::now();
  ResultRecord r;
  r.suite = suite_;
  r.check = std::string(id);
  r.anchor = std::string(spec->anchor);
  r.value = value;
  const auto over = cfg_->tolerances.find(suite_ + "." + r.check);
  r.tol = over == cfg_->tolerances.end() ? spec->tol : over->second;
  r.pass = r.recompute();
  r.seconds = cfg_->record_timing ? std::chrono::duration<double>(now - mark_).count() : 0.0;
  r.criterion = spec->criterion;
  records_.push_back(std::move(r));
  mark_ = now;
}

void SuiteContext::artifact(const std::string& name, const std::string& content) const {
  write_file(out_ / "artifacts" / suite_ / name, content);
}

void SuiteContext::plot(const std::string& name, const std::string& svg) const {
  if (cfg_->plot) write_file(out_ / "plots" / name, svg);
}

std::string results_csv(const std::vector<ResultRecord>& rs) {
  std::ostringstream os;
  os << "suite,check,anchor,value,tol,pass,seconds\n";
  for (const auto& r : rs) {
    os << r.suite << ',' << r.check << ",\"" << r.anchor << "\"," << fmt(r.value) << ',' << fmt(r.tol) << ','
       << (r.pass ? "true" : "false") << ',' << fmt(r.seconds) << '\n';
  }
  return os.str();
}

std::string results_json(const std::vector<ResultRecord>& rs, const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["suite"] = cfg.suite;
  j["seed"] = *cfg.seed;
  j["grid"] = {{"n_lat", cfg.n_lat}, {"n_lon", cfg.n_lon}, {"L", cfg.L}};
  std::size_t failures = 0;
  auto& arr = j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : rs) {
    failures += r.pass ? 0 : 1;
    arr.push_back({{"suite", r.suite},
                   {"check", r.check},
                   {"anchor", r.anchor},
                   {"criterion", r.criterion},
                   {"value", std::isfinite(r.value) ? nlohmann::ordered_json(r.value) : nlohmann::ordered_json(fmt(r.value))},
                   {"tol", r.tol},
                   {"pass", r.pass},
                   {"seconds", r.seconds}});
  }
  j["failures"] = failures;
  return j.dump(1) + "\n";
}

std::vector<ResultRecord> parse_results_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  if (line != "suite,check,anchor,value,tol,pass,seconds") throw std::runtime_error("unexpected CSV header");
  std::vector<ResultRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ResultRecord r;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const auto q = line.find("\",", c2 + 2);
    if (c1 == std::string::npos || c2 == std::string::npos || q == std::string::npos || line[c2 + 1] != '"')
      throw std::runtime_error("malformed CSV row: " + line);
    r.suite = line.substr(0, c1);
    r.check = line.substr(c1 + 1, c2 - c1 - 1);
    r.anchor = line.substr(c2 + 2, q - c2 - 2);
    std::istringstream rest(line.substr(q + 2));
    std::string v, t, p, s;
    std::getline(rest, v, ',');
    std::getline(rest, t, ',');
    std::getline(rest, p, ',');
    std::getline(rest, s, ',');
    r.value = std::stod(v);
    r.tol = std::stod(t);
    r.pass = p == "true";
    r.seconds = std::stod(s);
    out.push_back(std::move(r));
  }
  return out;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << content;
  if (!os) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace conelab::runner
