#include "runner/suites.hpp"
#include "runner/svg.hpp"

#include <conelab/decay.hpp>

#include <nlohmann/json.hpp>

#include <cmath>

namespace conelab::runner {

void decay_engine(SuiteContext& ctx) {
  const auto& c = ctx.config();

  const AlgGridReport grid = alg_lemma_grid(c.alg_grid);
  ctx.record("alg_grid_failures", double(grid.failures));
  nlohmann::ordered_json alg = {{"points", grid.points},
                                {"failures", grid.failures},
                                {"naive_failures", grid.naive_failures},
                                {"min_margin", grid.min_margin}};
  ctx.artifact("alg_grid.json", alg.dump(1) + "\n");

  for (const auto& [alpha, tag] : {std::pair{0.3, "a30"}, {0.5, "a50"}, {0.7, "a70"}}) {
    const MonotoneSeq s = extremal_sequence(1.0, alpha, 1.0, c.decay_jmax + 2);
    const DecayCertificate dc = iterate_decay(s, alpha, 1.0, 0, c.decay_jmax);
    ctx.record(std::string("decay_") + tag, dc.issued && dc.recheck() ? 0.0 : 1.0);
    ctx.record(std::string("exponent_") + tag, std::abs(dc.fitted_exponent + 1.0 + dc.beta) / (1.0 + dc.beta));
    ctx.artifact(std::string("decay_") + tag + ".json", to_json(dc) + "\n");
  }

  const SeriesResult sr = series_lemma([](std::size_t j) { return 1.0 / double(j * j); }, 1.0, 1.0, 1, 1.0, 10);
  ctx.record("series_example", std::abs(sr.partial_sum - 0.1952));
  ctx.record("series_bound", std::max(0.0, sr.partial_sum - sr.bound));

  const double alpha = 0.5, beta = alpha / (1.0 - alpha);
  const MonotoneSeq q2 = dyadic_from_quartic(extremal_sequence(1.0, alpha, 1.0, 202));
  const ThetaSeq theta = theta_from_Q(q2, 0.1, 1.0);
  const ThetaSumCertificate ts = sum_theta(q2, theta, beta, 16);
  ctx.record("theta_sum", ts.issued && ts.recheck() ? 0.0 : 1.0);
  ctx.artifact("theta_sum.json", to_json(ts) + "\n");
  ctx.artifact("decay_table.csv", decay_table_csv(q2, theta, ts));

  const ChainReport chain = verify_annulus_chain(synthetic_annuli(theta, ctx.seed()), theta);
  ctx.record("annulus_chain", chain.ok ? 0.0 : 1.0);

  if (ctx.plotting() && ts.issued) {
    Series direct{"sum of Theta from j", {}, {}}, bound{"C j^-beta_bar", {}, {}};
    double tail = 0.0;
    std::vector<double> tails(theta.last() + 1, 0.0);
    for (std::size_t j = theta.last() + 1; j-- > theta.first;) tails[j] = tail += theta.at(j);
    for (std::size_t j = ts.j1; j <= theta.last(); ++j) {
      direct.x.push_back(double(j));
      direct.y.push_back(tails[j]);
      bound.x.push_back(double(j));
      bound.y.push_back(ts.c_bar * std::pow(double(j), -ts.exps.beta_bar));
    }
    ctx.plot("theta_sums.svg", line_plot({"Theta tail sums", "j", "sum", true, true}, {direct, bound}));
  }
}

void bootstrap(SuiteContext& ctx) {
  const auto& c = ctx.config();
  const AbstractInstance fw = forward_instance(0.5, c.bootstrap_m);
  const EffectiveCertificate ec = bootstrap_uniqueness(fw);
  ctx.record("forward_instance", ec.issued ? 0.0 : 1.0);
  double excess = ec.issued ? 0.0 : 1.0;
  for (std::size_t k = 0; k < ec.tail_sums.size(); ++k) {
    const double b = ec.c_bar * std::pow(double(ec.j1 + k), -ec.beta_bar);
    excess = std::max(excess, (ec.tail_sums[k] - b) / b);
  }
  ctx.record("tail_bound", std::max(0.0, excess));
  ctx.artifact("forward.json", to_json(ec, true) + "\n");

  const EffectiveCertificate ex = bootstrap_uniqueness(exact_cone_instance());
  ctx.record("exact_cone", ex.issued ? 0.0 : 1.0);
  ctx.artifact("exact-cone.json", to_json(ex) + "\n");

  for (const Adversary& a : adversarial_instances()) {
    const EffectiveCertificate r = bootstrap_uniqueness(a.inst);
    const bool right = !r.issued && r.failed_step == a.expected_step && r.failing_scale == a.expected_scale;
    std::string id = "adversary_" + a.inst.name;
    for (char& ch : id)
      if (ch == '-') ch = '_';
    ctx.record(id, right ? 0.0 : 1.0);
    ctx.artifact(a.inst.name + ".json", to_json(r) + "\n");
  }

  if (ctx.plotting() && ec.issued) {
    Series tails{"sum of Theta from j", {}, {}}, bound{"C j^-beta_bar", {}, {}};
    for (std::size_t k = 0; k < ec.tail_sums.size(); ++k) {
      const double j = double(ec.j1 + k);
      tails.x.push_back(j);
      tails.y.push_back(ec.tail_sums[k]);
      bound.x.push_back(j);
      bound.y.push_back(ec.c_bar * std::pow(j, -ec.beta_bar));
    }
    ctx.plot("bootstrap_tails.svg", line_plot({"forward instance", "j", "sum", true, true}, {tails, bound}));
  }
}

}  // namespace conelab::runner
