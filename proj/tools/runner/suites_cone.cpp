#include "runner/models.hpp"
#include "runner/suites.hpp"
#include "runner/svg.hpp"

#include <conelab/eguchi_hanson.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace conelab::runner {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

std::vector<double> geometric(double lo, double hi, int n) {
  std::vector<double> r;
  for (int i = 0; i < n; ++i) r.push_back(lo * std::pow(hi / lo, n == 1 ? 0.0 : double(i) / (n - 1)));
  return r;
}

// A(r) and Q(r) on the levels attained in [r_lo, r_hi].
struct Curve {
  std::string name;
  std::vector<double> r, a, q;
};

Curve profile_curve(const std::string& name, const GreenProfile& gp, double r_lo, double r_hi, int n) {
  Curve c{name, {}, {}, {}};
  for (double r : geometric(r_lo, r_hi, n)) {
    if (!gp.attains(r)) continue;
    c.r.push_back(r);
    c.a.push_back(eval_A_of_r(gp, r));
    c.q.push_back(eval_Q_of_r(gp, r).value);
  }
  return c;
}

std::string curves_csv(const std::vector<Curve>& cs) {
  std::ostringstream os;
  os.precision(17);
  os << "model,r,A,Q\n";
  for (const auto& c : cs)
    for (std::size_t i = 0; i < c.r.size(); ++i) os << c.name << ',' << c.r[i] << ',' << c.a[i] << ',' << c.q[i] << '\n';
  return os.str();
}

void plot_curves(SuiteContext& ctx, const std::vector<Curve>& cs) {
  if (!ctx.plotting()) return;
  std::vector<Series> a, q;
  for (const auto& c : cs) {
    a.push_back({c.name, c.r, c.a});
    q.push_back({c.name, c.r, c.q});
  }
  ctx.plot("A_of_r.svg", line_plot({"A(r)", "r", "A", true, false}, a));
  ctx.plot("Q_of_r.svg", line_plot({"Q(r)", "r", "Q", true, true}, q));
}

}  // namespace

void cone_models(SuiteContext& ctx) {
  const auto& c = ctx.config();
  const auto grid = Grid::sphere(c.n_lat, c.n_lon);
  const BackgroundData base = BackgroundData::round(grid, 1.0);
  const std::vector<double> samples{0.2, 0.5, 1.0, 2.0, 4.0, 8.0};
  std::vector<Curve> curves;

  {
    const WarpedModel m = WarpedModel::euclidean();
    const GreenProfile gp = solve_green_radial(m);
    double prof = 0.0, a = 0.0, q = 0.0;
    for (double s : samples) {
      prof = std::max(prof, std::abs(gp.b(s) - s) / s);
      a = std::max(a, std::abs(eval_A_of_r(gp, s) / kFourPi - 1.0));
      const QValue qv = eval_Q_of_r(gp, s);
      q = std::max(q, qv.value + qv.tail);
    }
    ctx.record("euclidean_profile", prof);
    ctx.record("euclidean_A", a);
    ctx.record("euclidean_Q", q);
    curves.push_back(profile_curve("euclidean", gp, 0.2, 8.0, 40));
  }
  {
    const double slope = 0.9, binf = slope * slope;
    const WarpedModel m = WarpedModel::cone(slope);
    const GreenProfile gp = solve_green_radial(m);
    double b = std::abs(gp.b_inf_estimate() - binf), a = 0.0, q = 0.0;
    for (double s : samples) {
      b = std::max(b, std::abs(gp.b(s) / s - binf));
      const double r = gp.b(s);
      a = std::max(a, std::abs(eval_A_of_r(gp, r) / (binf * binf * kFourPi) - 1.0));
      const QValue qv = eval_Q_of_r(gp, r);
      q = std::max(q, qv.value + qv.tail);
    }
    ctx.record("cone_b_inf", b);
    ctx.record("cone_A", a);
    ctx.record("cone_Q", q);
    curves.push_back(profile_curve("cone:0.9", gp, 0.2, 6.0, 40));
  }

  double formula = 0.0, flux = 0.0;
  for (const auto& preset : c.models) {
    const WarpedModel m = make_model(preset);
    const GreenProfile gp = solve_green_radial(m);
    for (double R : {0.5, 1.0, 1.5, 3.0}) {
      if (!gp.attains(R)) continue;
      formula = std::max(formula, eval_R_levelset(gp, R, base).difference);
      flux = std::max(flux, std::abs(stokes_flux(gp, R) / unit_sphere_volume(m.n) - 1.0));
    }
    if (preset != "euclidean" && preset != "cone:0.9") curves.push_back(profile_curve(preset, gp, 0.2, 8.0, 40));
  }
  ctx.record("level_set_formula", formula);
  ctx.record("stokes_flux", flux);

  const std::vector<double> radii = geometric(0.2, 2.0, c.property_radii);
  const std::vector<WarpedModel> family = bump_family(c.family);
  const FamilyReport fr = check_property_family(family, radii, base);
  ctx.record("property_spread", std::max(fr.spread4, fr.spread5));
  ctx.record("property_holds", fr.holds4 && fr.holds5 ? 0.0 : 1.0);
  {
    std::ostringstream os;
    os.precision(17);
    os << "model,c4,c5,c1\n";
    for (std::size_t i = 0; i < fr.models.size(); ++i)
      os << fr.models[i] << ',' << fr.c4[i] << ',' << fr.c5[i] << ',' << fr.c1[i] << '\n';
    os << "# spread4 " << fr.spread4 << " spread5 " << fr.spread5 << " uniform_c4 " << fr.uniform_c4 << " uniform_c5 "
       << fr.uniform_c5 << '\n';
    ctx.artifact("property_family.csv", os.str());
  }

  if (c.eguchi_hanson) {
    const EguchiHanson eh(1.0);
    double ricci = 0.0;
    for (double r : {1.2, 1.5, 2.0, 4.0, 10.0}) ricci = std::max(ricci, eh.ricci_residual(r));
    ctx.record("eh_ricci", ricci);

    const std::vector<double> levels = geometric(0.8, 3.0, 12);
    double up_a = 0.0, up_q = 0.0, mono = 0.0;
    Curve ec{"eguchi-hanson", {}, {}, {}};
    for (double R : levels) {
      ec.r.push_back(R);
      ec.a.push_back(eh.A(R));
      ec.q.push_back(eh.Q(R));
      mono = std::max(mono, std::abs(eh.Aprime(R) / eh.monotonicity_rhs(R) - 1.0));
    }
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
      up_a = std::max(up_a, (ec.a[i + 1] - ec.a[i]) / ec.a[i]);
      up_q = std::max(up_q, (ec.q[i + 1] - ec.q[i]) / ec.q[i]);
    }
    ctx.record("eh_A_monotone", std::max(0.0, up_a));
    ctx.record("eh_Q_monotone", std::max(0.0, up_q));
    ctx.record("eh_monotonicity", mono);
    curves.push_back(std::move(ec));
  }

  ctx.artifact("profiles.csv", curves_csv(curves));
  plot_curves(ctx, curves);
}

void appendix_b(SuiteContext& ctx) {
  const auto& c = ctx.config();
  std::ostringstream os;
  os.precision(17);
  os << "model,s,identity,lhs,rhs,residual,flat_residual,ricci_corrected\n";
  auto dump = [&](const std::string& model, const LevelIdentityReport& r) {
    for (const auto& it : r.items)
      os << model << ',' << r.s << ',' << it.name << ',' << it.lhs << ',' << it.rhs << ',' << it.residual << ','
         << it.flat_residual << ',' << (it.ricci_corrected ? "true" : "false") << '\n';
  };

  double general = 0.0, corrected = 0.0, flat = 0.0;
  for (const auto& preset : c.models) {
    const WarpedModel m = make_model(preset);
    const GreenProfile gp = solve_green_radial(m);
    for (double s : c.levels) {
      if (s < m.s0 || s > m.s1) continue;
      const LevelIdentityReport r = check_appendix_b(gp, s);
      dump(preset, r);
      general = std::max(general, r.max_general);
      if (!(m.name == "euclidean")) corrected = std::max(corrected, r.max_corrected);
    }
  }
  {
    const WarpedModel m = WarpedModel::euclidean();
    const GreenProfile gp = solve_green_radial(m);
    for (double s : c.levels)
      if (s >= m.s0 && s <= m.s1) flat = std::max(flat, check_appendix_b(gp, s).max_flat_form);
  }
  ctx.record("general_identities", general);
  ctx.record("ricci_corrected", corrected);
  ctx.record("flat_form_euclidean", flat);

  if (c.eguchi_hanson) {
    const EguchiHanson eh(1.0);
    double ehflat = 0.0;
    for (double R : {0.8, 1.0, 1.5, 2.0, 3.0}) {
      const LevelIdentityReport r = check_appendix_b(eh.level_data(eh.radius_of_level(R)));
      dump("eguchi-hanson", r);
      ehflat = std::max(ehflat, r.max_flat_form);
    }
    ctx.record("flat_form_eguchi_hanson", ehflat);
  }
  ctx.artifact("level_identities.csv", os.str());
}

}  // namespace conelab::runner
