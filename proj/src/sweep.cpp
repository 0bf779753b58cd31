#include "torusmf/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torusmf/errors.hpp"
#include "torusmf/spectral.hpp"
#include "torusmf/testfunctions.hpp"

namespace torusmf {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

SweepRecord make_record(int k, double rho, ScalarField u, const ProblemSpec& spec) {
  const TorusGrid& grid = spec.grid;
  const ProblemSpec at = with_rho(spec, rho);
  SweepRecord rec;
  rec.k = k;
  rec.rho = rho;
  const auto it = std::max_element(u.values().begin(), u.values().end());
  const auto idx = static_cast<std::size_t>(it - u.values().begin());
  rec.c = *it;
  rec.x = {idx % grid.n(), idx / grid.n()};
  const Residual res = el_residual(u, at);
  rec.mu = res.mu;
  rec.lambda1 = res.lambda1;
  rec.residual = l2_norm(res.projected, grid);
  rec.energy = bundle_energy(u, spec.conn, grid);
  rec.jvalue = evaluate_j(u, at);
  rec.r_scale = std::sqrt(rec.mu / (rho * spec.hweight(rec.x.i, rec.x.j))) * std::exp(-0.5 * rec.c);
  rec.u = std::move(u);
  return rec;
}

std::vector<SweepRecord> subcritical_sweep(const ProblemSpec& tmpl, int kmax, const ScalarField& init,
                                           const MinimizeOptions& opts) {
  if (kmax < 4) throw InvalidArgument("subcritical_sweep: kmax must be at least 4");
  std::vector<SweepRecord> out;
  ScalarField start = init;
  for (int k = 1; k <= kmax; ++k) {
    const double rho = sweep_rho(k);
    const ProblemSpec spec = with_rho(tmpl, rho);
    try {
      MinimizeResult res = minimize(spec, start, opts);
      SweepRecord rec = make_record(k, rho, res.u, tmpl);
      rec.iterations = res.iterations;
      rec.converged = res.converged;
      rec.overflow = res.overflow_hit;
      start = res.u;
      out.push_back(std::move(rec));
    } catch (const OverflowError&) {
      SweepRecord rec;
      rec.k = k;
      rec.rho = rho;
      rec.overflow = true;
      out.push_back(std::move(rec));
      break;
    }
  }
  return out;
}

double lambda1_bound(const ProblemSpec& spec) {
  if (spec.kb.dim == 0) return 0.0;
  const TorusGrid& grid = spec.grid;
  const auto& t = spec.kb.tau1->values();
  double tmax = 0.0;
  for (double x : t) tmax = std::max(tmax, std::abs(x));
  const auto [hmin, hmax] = std::minmax_element(spec.hweight.values().begin(), spec.hweight.values().end());
  const double area = grid.total_area();
  return 8.0 * kPi * tmax * (1.0 + std::sqrt(area) / area) * (*hmax / *hmin);
}

RescaledProfile rescaled_profile(const SweepRecord& rec, double window, int points) {
  if (points < 3 || points % 2 == 0) throw InvalidArgument("rescaled_profile: points must be odd and at least 3");
  if (!(rec.r_scale > 0.0)) throw InvalidArgument("rescaled_profile: record has no positive scale");
  const std::size_t n = rec.u.n();
  const double h = 1.0 / static_cast<double>(n);
  RescaledProfile pr;
  pr.k = rec.k;
  pr.r_scale = rec.r_scale;
  const int half = points / 2;
  std::vector<double> xs(points), ys(points);
  pr.ys.resize(points);
  for (int a = 0; a < points; ++a) {
    pr.ys[a] = window * (a - half) / half;
    xs[a] = static_cast<double>(rec.x.i) * h + rec.r_scale * pr.ys[a];
    ys[a] = static_cast<double>(rec.x.j) * h + rec.r_scale * pr.ys[a];
  }
  const std::vector<double> vals = spectral::interpolate_tensor(rec.u, xs, ys);
  const double centre = vals[static_cast<std::size_t>(half * points + half)];
  pr.phi.resize(vals.size());
  pr.psi.resize(vals.size());
  pr.phi_max = -std::numeric_limits<double>::infinity();
  for (int b = 0; b < points; ++b) {
    for (int a = 0; a < points; ++a) {
      const auto q = static_cast<std::size_t>(b * points + a);
      pr.phi[q] = vals[q] - centre;
      pr.psi[q] = vals[q] / rec.c;
      pr.phi_max = std::max(pr.phi_max, pr.phi[q]);
      const double rad = std::hypot(pr.ys[a], pr.ys[b]);
      if (rad > window) continue;
      pr.phi_distance = std::max(pr.phi_distance, std::abs(pr.phi[q] - bubble(rad)));
      pr.psi_distance = std::max(pr.psi_distance, std::abs(pr.psi[q] - 1.0));
    }
  }
  return pr;
}

BlowupReport blowup_diagnostics(const std::vector<SweepRecord>& records, const ProblemSpec& spec,
                                const DiagnosticsOptions& opts) {
  std::vector<const SweepRecord*> recs;
  bool overflow = false;
  for (const auto& r : records) {
    if (r.overflow) overflow = true;
    if (r.u.size() != 0) recs.push_back(&r);
  }
  if (recs.size() < 4) throw InvalidArgument("blowup_diagnostics: need at least 4 records");
  const TorusGrid& grid = spec.grid;
  BlowupReport rep;

  std::vector<int> ks;
  std::vector<double> logk, cs;
  rep.min_mu = std::numeric_limits<double>::infinity();
  rep.min_r_over_h = std::numeric_limits<double>::infinity();
  rep.C0 = recs.front()->energy - 8.0 * kPi * (1.0 + opts.epsilon) * recs.front()->c;
  double cmax = -std::numeric_limits<double>::infinity();
  for (const auto* r : recs) {
    ks.push_back(r->k);
    logk.push_back(std::log(static_cast<double>(r->k)));
    cs.push_back(r->c);
    cmax = std::max(cmax, r->c);
    rep.min_mu = std::min(rep.min_mu, r->mu);
    rep.lambda1_max = std::max(rep.lambda1_max, std::abs(r->lambda1));
    if (r->energy > 8.0 * kPi * (1.0 + opts.epsilon) * r->c + rep.C0 + 1e-9) rep.energy_height_holds = false;
    if (!(r->r_scale > 0.0)) rep.r_scale_positive = false;
    rep.min_r_over_h = std::min(rep.min_r_over_h, r->r_scale / grid.h());
  }
  rep.mu_above_floor = rep.min_mu >= opts.mu_floor;
  rep.lambda1_bound = lambda1_bound(spec);

  const std::size_t tail = std::min<std::size_t>(5, recs.size());
  for (std::size_t a = recs.size() - tail; a < recs.size(); ++a) {
    for (std::size_t b = a + 1; b < recs.size(); ++b) {
      rep.j_tail = std::max(rep.j_tail, std::abs(recs[a]->jvalue - recs[b]->jvalue));
    }
  }

  // Least-squares slope of c against log k.
  {
    const double m = static_cast<double>(cs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      sx += logk[i];
      sy += cs[i];
      sxx += logk[i] * logk[i];
      sxy += logk[i] * cs[i];
    }
    const double den = m * sxx - sx * sx;
    rep.c_slope = den > 0.0 ? (m * sxy - sx * sy) / den : 0.0;
  }
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(opts.trend_tail), cs.size());
  bool increasing = true;
  for (std::size_t i = cs.size() - t + 1; i < cs.size(); ++i) {
    if (!(cs[i] > cs[i - 1])) increasing = false;
  }

  if (overflow) {
    rep.classification = "BLOWUP-CANDIDATE";
    rep.reason = "overflow guard hit";
  } else if (cmax > opts.c_threshold) {
    rep.classification = "BLOWUP-CANDIDATE";
    rep.reason = "max u exceeds threshold";
  } else if (rep.c_slope >= opts.trend_slope && increasing) {
    rep.classification = "BLOWUP-CANDIDATE";
    rep.reason = "max u grows with k";
  } else {
    rep.classification = "ATTAINED";
    rep.reason = "max u and mu stay bounded";
    return rep;
  }

  for (const auto* r : recs) {
    const double lm = std::log(r->mu);
    rep.log_mu_ratio.push_back(lm / (r->c - lm));
    rep.c_ratio.push_back(r->c / (r->c - lm));
    rep.decay.push_back(r->r_scale * r->r_scale * std::exp(opts.gamma * r->c));
    const RescaledProfile pr = rescaled_profile(*r, opts.window);
    rep.phi_distance.push_back(pr.phi_distance);
    rep.psi_distance.push_back(pr.psi_distance);
  }
  rep.phi_distance_nonincreasing = true;
  for (std::size_t i = 1; i < rep.phi_distance.size(); ++i) {
    if (rep.phi_distance[i] > rep.phi_distance[i - 1]) rep.phi_distance_nonincreasing = false;
  }

  const SweepRecord& last = *recs.back();
  const ProblemSpec at = with_rho(spec, last.rho);
  const double radius = opts.window * last.r_scale;
  ScalarField r = distance_to(grid, last.x);
  r *= std::exp(grid.v()(last.x.i, last.x.j));
  double mass = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    if (r[q] <= radius) mass += at.h_area[q] * std::exp(last.u[q]);
  }
  rep.concentration = mass / last.mu;
  rep.last_profile = rescaled_profile(last, opts.window);
  return rep;
}

}  // namespace torusmf
