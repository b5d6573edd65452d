#include "kahler/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "kahler/conventions.hpp"
#include "kahler/dh_measures.hpp"
#include "kahler/error.hpp"
#include "kahler/kenergy_foliation.hpp"
#include "kahler/metric_superposition.hpp"

namespace kahler {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Cp1 fs(int m) { return Cp1::make(m, SymplecticPotential::fubini_study()); }

std::vector<double> as_double(const std::vector<int>& v) { return {v.begin(), v.end()}; }

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) e = std::max(e, std::abs(a[k] - b[k]));
  return e;
}

GeodesicPath induced_cp1(int m, double a, TimeGrid grid, bool legendre = false) {
  InducedOptions o;
  if (legendre) o.route = InducedOptions::Route::legendre;
  return induced_geodesic(Cp1Dilation{cplx(a, 0.0)}, Manifold(fs(m)), grid, o);
}

GeodesicPath toric_cp1(int m, double c, TimeGrid grid = TimeGrid::uniform(0, 1, 5)) {
  const auto x = fs(m);
  return toric_geodesic(x, x.potential().plus(Polynomial::bump() * c), grid);
}

// Closed form of the dilation path on Fubini-Study: log(1 - m + e^{2at} m) plus
// the constant making E vanish, E(f) = 2 pi int f dm - pi int m(1-m) f'^2 dm by
// composite Simpson on 40000 panels.
double closed_form_gauge(double a, double t) {
  const double e = std::exp(2.0 * a * t);
  const int n = 40000;
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double m = double(k) / n;
    const double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
    const double f = std::log(1 - m + e * m), df = (e - 1) / (1 - m + e * m);
    s += w * (two_pi * f - pi * m * (1 - m) * df * df);
  }
  return -s / (3.0 * n) / two_pi;
}

void set_trend(ReportRecord& r, const LineFit& f) {
  r.trend_slope = f.slope;
  r.trend_residual = f.residual;
}

ReportRecord record(int id, const std::string& experiment, const std::string& quantity) {
  ReportRecord r;
  r.criterion = id;
  r.experiment = experiment;
  r.quantity = quantity;
  return r;
}

PlotSpec line_plot(std::string name, std::string title, std::string table, std::string x,
                   std::vector<std::string> ys, bool logx = false, bool logy = false) {
  PlotSpec p;
  p.name = std::move(name);
  p.title = std::move(title);
  p.table = std::move(table);
  p.x = std::move(x);
  p.ys = std::move(ys);
  p.log_x = logx;
  p.log_y = logy;
  return p;
}

// Wall-clock data stays out of the record so reports are reproducible.
Table timing_table(double runtime, double limit) {
  return Table{"timing", {}, {}}.add("runtime_s", {runtime}).add("limit_s", {limit});
}

std::vector<int> last_levels(const std::vector<int>& ladder, std::size_t k) {
  if (ladder.size() < k) throw PreconditionError("resolution ladder needs at least " + std::to_string(k) + " levels");
  return {ladder.end() - static_cast<std::ptrdiff_t>(k), ladder.end()};
}

// ---------------------------------------------------------------------------

Outcome c1_geodesic(const SuiteOptions& o) {
  const auto t0 = Clock::now();
  auto r = record(1, "geodesic", "cp1 dilation: closed form and residual trend");
  const int top = o.ladder.back();
  const auto x = fs(top);
  const auto path = induced_cp1(top, o.dilation, TimeGrid::uniform(-1, 1, 11));
  double err = 0.0;
  for (double t : {-0.8, 0.25, 1.0}) {
    const double e = std::exp(2.0 * o.dilation * t), c = closed_form_gauge(o.dilation, t);
    const auto u = path.potential(t);
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double m = x.coord(j);
      err = std::max(err, std::abs(u[j] - (std::log(1 - m + e * m) + c)));
    }
  }
  std::vector<double> dev;
  for (int m : o.ladder) dev.push_back(geodesic_residual(induced_cp1(m, o.dilation, TimeGrid::uniform(-1, 1, 5)), 0.5).deviation);
  const auto fit = convergence_order(as_double(o.ladder), dev);
  const double runtime = seconds_since(t0);
  r.set("closed_form_error", err).set("closed_form_tol", o.tol.closed_form).set("cells", top);
  r.set("residual_order", fit.slope).set("min_order", o.tol.min_order);
  const bool in_time = runtime <= o.tol.geodesic_runtime;
  r.set("runtime_within_limit", in_time ? 1.0 : 0.0);
  set_trend(r, fit);
  r.pass = err <= o.tol.closed_form && fit.slope >= o.tol.min_order && in_time;
  Outcome out{r, {}, {}};
  out.tables.push_back(timing_table(runtime, o.tol.geodesic_runtime));
  out.tables.push_back(Table{"residual_trend", {}, {}}.add("cells", as_double(o.ladder)).add("deviation", dev));
  out.plots.push_back(line_plot("residual_trend", "geodesic residual deviation", "residual_trend", "cells",
                                {"deviation"}, true, true));
  return out;
}

Outcome c2_counterexample(const SuiteOptions& o) {
  auto r = record(2, "geodesic", "torus translation: periodic canonical path is not a geodesic");
  const double eps = o.torus_eps;
  const auto x = Torus::make(o.torus_cells, [eps](double x1, double) { return 1.0 + eps * std::cos(two_pi * x1); });
  InducedOptions io;
  io.override_exactness = true;
  const auto q = induced_geodesic(TorusTranslation{}, Manifold(x), TimeGrid::uniform(0, 2, 9), io);
  double period = 0.0;
  for (double t : {0.3, 0.55, 0.8}) period = std::max(period, sup_diff(q.potential(t + 1.0), q.potential(t)));
  const double variation = sup_diff(q.potential(0.3), q.potential(0.8));
  const double torus_dev = geodesic_residual(q, 0.5).deviation;
  const double induced_dev =
      geodesic_residual(induced_cp1(o.torus_cells, o.dilation, TimeGrid::uniform(-1, 1, 5)), 0.5).deviation;
  const double ratio = torus_dev / induced_dev;
  r.set("periodicity_error", period).set("periodicity_tol", o.tol.periodicity);
  r.set("variation", variation).set("torus_residual", torus_dev).set("induced_residual", induced_dev);
  r.set("ratio", ratio).set("ratio_min", o.tol.counterexample_ratio);
  // Non-constant: the change over half a period stands far above the periodicity floor.
  r.pass = period <= o.tol.periodicity && variation > 100.0 * o.tol.periodicity && ratio >= o.tol.counterexample_ratio;
  return {r, {}, {}};
}

Outcome c3_invariance(const SuiteOptions& o) {
  auto r = record(3, "dh", "pushforward measure is time-invariant");
  const auto [tmin, tmax] = std::minmax_element(o.dh_times.begin(), o.dh_times.end());
  const TimeGrid grid = TimeGrid::uniform(std::min(*tmin, 0.0) - 0.5, std::max(*tmax, 0.0) + 0.5, 9);
  const BinSpec bins{o.bins, -o.dilation, o.dilation};
  const auto uniform = uniform_measure({bins}, two_pi);

  std::vector<double> d_cp1, d_uniform;
  EmpiricalMeasure last;
  for (int m : o.ladder) {
    const auto path = induced_cp1(m, o.dilation, grid, true);
    const auto mu0 = pushforward(path, {0.0, 0.0}, {bins});
    double d = 0.0, du = measure_distance(mu0, uniform);
    for (double t : o.dh_times) {
      const auto mt = pushforward(path, {t, 0.0}, {bins});
      d = std::max(d, measure_distance(mu0, mt));
      du = std::max(du, measure_distance(mt, uniform));
      if (m == o.ladder.back() && t == o.dh_times.back()) last = mt;
    }
    d_cp1.push_back(d);
    d_uniform.push_back(du);
  }
  const auto fit = convergence_order(as_double(o.ladder), d_cp1);

  const std::vector<BinSpec> pbins{BinSpec{64, -o.dilation, o.dilation}, BinSpec{64, -o.dilation, o.dilation}};
  std::vector<double> d_prod;
  InducedOptions lo;
  lo.route = InducedOptions::Route::legendre;
  for (int m : o.product_ladder) {
    const auto x = Cp1Product::make(m, SymplecticPotential::fubini_study(), SymplecticPotential::fubini_study());
    const auto path = multi_geodesic(ProductDilation{cplx(o.dilation, 0), cplx(o.dilation, 0)}, x, grid, grid, lo);
    const auto mu0 = pushforward(path, {0.0, 0.0}, pbins);
    double d = 0.0;
    for (double t : o.dh_times) d = std::max(d, measure_distance(mu0, pushforward(path, {t, t}, pbins)));
    d_prod.push_back(d);
  }
  const auto pfit = convergence_order(as_double(o.product_ladder), d_prod);

  const double limit = d_uniform.back(), limit_tol = o.tol.dh_bin_widths / o.bins;
  r.set("cp1_slope", fit.slope).set("product_slope", pfit.slope).set("slope_min", o.tol.dh_slope);
  r.set("cp1_finest_distance", d_cp1.back()).set("product_finest_distance", d_prod.back());
  r.set("uniform_cdf_error", limit).set("uniform_cdf_tol", limit_tol);
  r.set("product_trend_residual", pfit.residual);
  set_trend(r, fit);
  r.pass = fit.slope >= o.tol.dh_slope && pfit.slope >= o.tol.dh_slope && limit <= limit_tol;

  Outcome out{r, {}, {}};
  out.tables.push_back(Table{"cp1_trend", {}, {}}
                           .add("cells", as_double(o.ladder))
                           .add("distance_to_mu0", d_cp1)
                           .add("distance_to_uniform", d_uniform));
  out.tables.push_back(Table{"product_trend", {}, {}}.add("cells", as_double(o.product_ladder)).add("distance_to_mu0", d_prod));
  std::vector<double> centre(o.bins), dens(o.bins), flat(o.bins);
  for (int i = 0; i < o.bins; ++i) {
    centre[i] = bins.edge(i) + 0.5 * bins.width();
    dens[i] = last.weights[i] / (last.total * bins.width());
    flat[i] = uniform.weights[i] / (uniform.total * bins.width());
  }
  out.tables.push_back(Table{"histogram", {}, {}}.add("velocity", centre).add("density", dens).add("uniform", flat));
  PlotSpec h = line_plot("histogram", "pushforward density at the last sampled time", "histogram", "velocity",
                         {"density", "uniform"});
  h.kind = PlotSpec::Kind::histogram;
  out.plots.push_back(h);
  out.plots.push_back(line_plot("cp1_trend", "sup-CDF distance to mu_0", "cp1_trend", "cells", {"distance_to_mu0"}, true, true));
  return out;
}

Outcome c4_ranges(const SuiteOptions& o) {
  auto r = record(4, "sets", "A equals the closure of B_x");
  const int top = o.ladder.back();
  const double a = o.dilation;
  const auto path = induced_cp1(top, a, TimeGrid::uniform(-20, 20, 81), true);
  const auto A = set_A(path, {0.7, 0.0});
  const double cell = 2.0 * a / top;

  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<std::size_t> pick(1, static_cast<std::size_t>(top) - 1);
  std::vector<std::size_t> nodes;
  for (int k = 0; k < o.range_samples; ++k) nodes.push_back(pick(rng));
  const auto bs = set_B(path, nodes, path.grids());
  std::vector<double> dist, coord;
  double worst = 0.0;
  for (std::size_t k = 0; k < bs.size(); ++k) {
    dist.push_back(hausdorff(A, bs[k]));
    coord.push_back(static_cast<double>(nodes[k]) / top);
    worst = std::max(worst, dist.back());
  }
  // Fixed points of the flow: the poles.
  const auto b0 = set_B(path, 0, path.grids());
  const auto b1 = set_B(path, static_cast<std::size_t>(top), path.grids());
  const double width = std::max(b0.hi - b0.lo, b1.hi - b1.lo);
  const double endpoint = std::max(std::abs(b0.lo - A.lo), std::abs(b1.hi - A.hi));

  const int pm = o.product_ladder.back();
  const auto x = Cp1Product::make(pm, SymplecticPotential::fubini_study(), SymplecticPotential::fubini_study());
  InducedOptions lo;
  lo.route = InducedOptions::Route::legendre;
  const auto prod = multi_geodesic(ProductDilation{cplx(a, 0), cplx(a, 0)}, x, TimeGrid::uniform(-1, 1, 5),
                                   TimeGrid::uniform(-1, 1, 5), lo);
  const double pcell = 2.0 * a / pm;
  const auto pA = set_A(prod, {0.5, -0.5}, 1.0 / pm);

  r.set("hausdorff_max", worst).set("hausdorff_tol", o.tol.range_cells * cell).set("samples", o.range_samples);
  r.set("fixed_point_width", width).set("fixed_point_endpoint_error", endpoint);
  r.set("product_coverage_defect", pA.coverage_defect).set("product_hull_defect", pA.hull_defect);
  r.set("product_tol", o.tol.range_cells * pcell);
  // Singleton endpoints: below a thousandth of a cell.
  const double singleton = 1e-3 * cell;
  r.pass = worst <= o.tol.range_cells * cell && width <= singleton && endpoint <= singleton &&
           pA.coverage_defect <= o.tol.range_cells * pcell && pA.hull_defect <= 1e-12;
  Outcome out{r, {}, {}};
  out.tables.push_back(Table{"range_samples", {}, {}}.add("moment", coord).add("hausdorff", dist));
  std::vector<double> hx, hy;
  for (const auto& p : pA.hull) {
    hx.push_back(p[0]);
    hy.push_back(p[1]);
  }
  out.tables.push_back(Table{"product_hull", {}, {}}.add("x", hx).add("y", hy));
  PlotSpec hull = line_plot("product_hull", "hull of A on the product", "product_hull", "x", {"x:y"});
  hull.kind = PlotSpec::Kind::polygon;
  out.plots.push_back(hull);
  return out;
}

Outcome c5_slope(const SuiteOptions& o) {
  auto r = record(5, "sets", "sup-norm invariance and asymptotic slope");
  const int top = o.ladder.back();
  const auto path = induced_cp1(top, o.dilation, TimeGrid::uniform(-5, 5, 11), true);
  std::vector<double> ts;
  for (int k = -5; k <= 5; ++k) ts.push_back(k);
  const auto rep = asymptotic_slope(path, o.horizon, ts, o.tol.slope_band, o.tol.slope_band);
  const double v = volume(path.manifold());
  r.set("sup_norm_spread", rep.sup_norm_spread).set("sup_norm_tol", o.tol.sup_norm);
  r.set("limit", rep.limit).set("horizon", o.horizon);
  r.set("slope_exceptional_fraction", rep.slope_deviation_measure / v);
  r.set("velocity_exceptional_fraction", rep.velocity_deviation_measure / v);
  r.set("exceptional_tol", o.tol.slope_measure);
  r.pass = rep.sup_norm_spread <= o.tol.sup_norm && rep.slope_deviation_measure <= o.tol.slope_measure * v;
  if (rep.slope_deviation_measure > o.tol.slope_measure * v)
    r.detail = "u_T/T = g* + O(1/T) off the poles; the velocity u-dot_T meets the band (see velocity_exceptional_fraction)";
  Outcome out{r, {}, {}};
  const auto& x = std::get<Cp1>(path.manifold());
  std::vector<double> m(x.nodes());
  for (std::size_t j = 0; j < m.size(); ++j) m[j] = x.coord(j);
  out.tables.push_back(Table{"asymptotics", {}, {}}.add("moment", m).add("velocity_T", rep.velocity).add("slope_T", rep.slope));
  out.tables.push_back(Table{"sup_norms", {}, {}}.add("t", ts).add("sup_velocity", rep.sup_norms));
  out.plots.push_back(line_plot("asymptotics", "u-dot_T and u_T/T", "asymptotics", "moment", {"velocity_T", "slope_T"}));
  return out;
}

Outcome c6_moment(const SuiteOptions& o) {
  auto r = record(6, "moment", "moment image of the double rotation is the unit square");
  const auto square = cloud_set({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  std::vector<double> haus, cover;
  RangeSet last;
  for (int m : o.product_ladder) {
    const auto x = Cp1Product::make(m, SymplecticPotential::fubini_study(), SymplecticPotential::fubini_study());
    // Sample spacing off the lattice so the coverage defect measures the grid.
    const auto img = moment_image(ProductDilation{cplx(1, 0), cplx(1, 0)}, x, 1, 1.0 / (3.0 * m));
    std::vector<std::array<double, 2>> shifted;
    for (const auto& p : img.image.hull) shifted.push_back({p[0] + img.gauge[0], p[1] + img.gauge[1]});
    last = cloud_set(shifted);
    haus.push_back(hausdorff(last, square));
    cover.push_back(img.image.coverage_defect);
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < cover.size(); ++k) decreasing = decreasing && cover[k] < cover[k - 1];
  const double tol = o.tol.moment_cells / o.product_ladder.back();
  const auto fit = convergence_order(as_double(o.product_ladder), cover);
  r.set("hausdorff", haus.back()).set("hausdorff_tol", tol).set("coverage_finest", cover.back());
  r.set("coverage_decreasing", decreasing ? 1.0 : 0.0);
  set_trend(r, fit);
  r.pass = haus.back() <= tol && decreasing;
  Outcome out{r, {}, {}};
  out.tables.push_back(Table{"moment_trend", {}, {}}.add("cells", as_double(o.product_ladder)).add("hausdorff", haus).add("coverage_defect", cover));
  std::vector<double> hx, hy;
  for (const auto& p : last.hull) {
    hx.push_back(p[0]);
    hy.push_back(p[1]);
  }
  out.tables.push_back(Table{"moment_hull", {}, {}}.add("x", hx).add("y", hy));
  PlotSpec hull = line_plot("moment_hull", "moment image (gauged)", "moment_hull", "x", {"x:y"});
  hull.kind = PlotSpec::Kind::polygon;
  out.plots.push_back(hull);
  return out;
}

Outcome c7_energy(const SuiteOptions& o) {
  auto r = record(7, "geodesic", "Aubin-Yau energy is affine along geodesics");
  const int m = o.ladder[o.ladder.size() > 1 ? o.ladder.size() - 2 : 0];
  const TimeGrid g = TimeGrid::uniform(-1, 1, 9);
  const auto canonical = induced_cp1(m, o.dilation, g);
  const auto manual = canonical.regauged(0.4, -1.3);
  const auto toric = toric_cp1(m, o.toric_bump, g);
  Table t{"energy", {}, {}};
  std::vector<double> times;
  for (int i = 0; i < g.count; ++i) times.push_back(g.at(i));
  t.add("t", times);
  auto deviation = [&](const GeodesicPath& p, const std::string& name) {
    std::vector<double> e;
    for (int i = 0; i < g.count; ++i) e.push_back(aubin_yau_energy(p.manifold(), p.sample(i)));
    const auto fit = fit_line(times, e);
    double worst = 0.0;
    for (int i = 0; i < g.count; ++i) worst = std::max(worst, std::abs(e[i] - fit.intercept - fit.slope * times[i]));
    t.add(name, e);
    r.set(name + "_deviation", worst);
    return worst;
  };
  const double d = std::max({deviation(canonical, "canonical"), deviation(manual, "regauged"), deviation(toric, "toric")});
  r.set("max_deviation", d).set("tol", o.tol.energy_affine);
  r.pass = d <= o.tol.energy_affine;
  Outcome out{r, {t}, {}};
  out.plots.push_back(line_plot("energy", "energy along paths", "energy", "t", {"canonical", "regauged", "toric"}));
  return out;
}

Outcome c8_pullback(const SuiteOptions& o) {
  auto r = record(8, "leaves", "leaf pullback f_t*(omega_t) = omega");
  const TimeGrid strip{-1, 0.05, 41};
  const double start = 0.3;
  std::vector<double> ei, et;
  for (int m : o.ladder) {
    ei.push_back(leaf_pullback_check(induced_cp1(m, o.dilation, TimeGrid::uniform(-1, 1, 5)), start, strip));
    et.push_back(leaf_pullback_check(toric_cp1(m, o.toric_bump), start, strip));
  }
  const auto fi = convergence_order(as_double(o.ladder), ei), ft = convergence_order(as_double(o.ladder), et);
  const auto base = induced_cp1(o.ladder.back(), o.dilation, TimeGrid::uniform(-1, 1, 5));
  const auto& x = std::get<Cp1>(base.manifold());
  const auto bad = base.perturbed([&](double t, std::size_t k) { return 0.1 * t * t * std::sin(pi * x.coord(k)); });
  const double control = leaf_pullback_check(bad, start, strip);
  const double ratio = control / ei.back();
  const LeafSolver good_leaves(base, strip), bad_leaves(bad, strip);
  const double hg = leaf_holomorphicity_defect(good_leaves, start), hb = leaf_holomorphicity_defect(bad_leaves, start);
  r.set("induced_order", fi.slope).set("toric_order", ft.slope).set("min_order", o.tol.min_order);
  r.set("induced_error", ei.back()).set("toric_error", et.back());
  r.set("control_error", control).set("control_ratio", ratio).set("control_ratio_min", o.tol.control_ratio);
  r.set("holomorphicity_defect_geodesic", hg).set("holomorphicity_defect_control", hb);
  r.set("holomorphicity_ratio", hb / hg).set("toric_trend_residual", ft.residual);
  set_trend(r, fi);
  r.pass = fi.slope >= o.tol.min_order && ft.slope >= o.tol.min_order && ratio >= o.tol.control_ratio;
  if (ratio < o.tol.control_ratio)
    r.detail = "real-time leaves are Moser flows, so the pullback identity holds for the control too; "
               "the control is separated by the holomorphicity defect instead";
  Outcome out{r, {}, {}};
  out.tables.push_back(Table{"pullback_trend", {}, {}}.add("cells", as_double(o.ladder)).add("induced", ei).add("toric", et));
  out.plots.push_back(line_plot("pullback_trend", "leaf pullback error", "pullback_trend", "cells", {"induced", "toric"}, true, true));
  return out;
}

Outcome c9_theta(const SuiteOptions& o) {
  auto r = record(9, "kenergy", "fiber-integral kappa equals the direct difference");
  std::vector<ThetaDensity> th;
  std::vector<double> gap, zero;
  for (int m : o.ladder) {
    th.push_back(kenergy_theta(toric_cp1(m, o.toric_bump), ThetaOptions{-0.5, 0.5, 0.05, m / 2}));
    gap.push_back(th.back().discrepancy);
    const auto z = kenergy_theta(induced_cp1(m, o.dilation, TimeGrid::uniform(-1, 1, 5)), ThetaOptions{-0.5, 0.5, 0.05, 32});
    double s = 0.0;
    for (int i = 0; i < z.times.count; ++i) s = std::max({s, std::abs(z.kappa[i]), std::abs(z.kappa_direct[i])});
    zero.push_back(s);
  }
  const auto fit = convergence_order(as_double(o.ladder), gap);
  // tol(h) from the two finest levels, applied at the coarser one.
  const std::size_t k = th.size() - 2;
  double tf = 0.0, td = 0.0;
  for (int i = 0; i < th[k].times.count; ++i) {
    tf = std::max(tf, refinement_tolerance(th[k].kappa[i], th[k + 1].kappa[i]));
    td = std::max(td, refinement_tolerance(th[k].kappa_direct[i], th[k + 1].kappa_direct[i]));
  }
  const double tz = refinement_tolerance(zero[k], zero[k + 1]);
  r.set("discrepancy", gap[k]).set("combined_tol", tf + td).set("order", fit.slope).set("min_order", o.tol.min_order);
  r.set("induced_sup_kappa", zero[k]).set("induced_tol", tz).set("cells", o.ladder[k]);
  set_trend(r, fit);
  r.pass = gap[k] <= tf + td && fit.slope >= o.tol.min_order && zero[k] <= tz;
  Outcome out{r, {}, {}};
  std::vector<double> times;
  for (int i = 0; i < th.back().times.count; ++i) times.push_back(th.back().times.at(i));
  out.tables.push_back(Table{"kappa", {}, {}}.add("t", times).add("fiber", th.back().kappa).add("direct", th.back().kappa_direct));
  out.tables.push_back(Table{"kappa_trend", {}, {}}.add("cells", as_double(o.ladder)).add("discrepancy", gap).add("induced_sup", zero));
  out.plots.push_back(line_plot("kappa", "kappa(t): fiber integral and direct difference", "kappa", "t", {"fiber", "direct"}));
  return out;
}

// Toric window of the curvature checks, scaled with the bump amplitude.
struct ToricWindow {
  Strip strip;
  ThetaOptions theta;
};
ToricWindow toric_window(double c, int leaves) {
  const auto ext = max_extension_time(SymplecticPotential::fubini_study(), Polynomial::bump() * c);
  return {Strip{-ext.backward, ext.forward + ext.backward}, ThetaOptions{-6.0 / c, 2.5 / c, 0.25 / c, leaves}};
}

double probe_margin(const Strip& s, double step, double lo, double hi) {
  const int count = static_cast<int>(std::lround((hi - lo) / step)) + 1;
  const TimeGrid g{lo, step, count};
  std::vector<double> k(count);
  for (int i = 0; i < count; ++i) k[i] = 0.5 * two_pi * s.density(g.at(i));
  return curvature_bound_check(g, k, two_pi, 1, s).min_margin;
}

Outcome c10_burns(const SuiteOptions& o) {
  auto r = record(10, "kenergy", "curvature of Theta and of leaf metrics");
  const auto levels = last_levels(o.ladder, 3);
  std::vector<double> margin, leaf;
  std::vector<CurvatureBoundReport> reps;
  const double c = o.toric_bump;
  const TimeGrid wide{-4.0 / c, 0.25 / c, 29};
  for (int m : levels) {
    const auto w = toric_window(c, m / 2);
    reps.push_back(curvature_bound_check(kenergy_theta(toric_cp1(m, c), w.theta), two_pi, 1, w.strip));
    margin.push_back(reps.back().min_margin);
    leaf.push_back(burns_margin(theta_on_leaf(trace_leaf(toric_cp1(m, c), 0.3, wide))));
  }
  const double tol0 = refinement_tolerance(margin[0], margin[1]), tol1 = refinement_tolerance(margin[1], margin[2]);
  const double ltol0 = refinement_tolerance(leaf[0], leaf[1]), ltol1 = refinement_tolerance(leaf[1], leaf[2]);
  const auto w = toric_window(c, 0);
  const double p0 = probe_margin(w.strip, w.theta.step, w.theta.t_lo, w.theta.t_hi);
  const double p1 = probe_margin(w.strip, 0.5 * w.theta.step, w.theta.t_lo, w.theta.t_hi);
  const double ptol = refinement_tolerance(p0, p1);
  r.set("margin_h", margin[0]).set("tol_h", tol0).set("margin_h2", margin[1]).set("tol_h2", tol1);
  r.set("leaf_margin_h", leaf[0]).set("leaf_tol_h", ltol0).set("leaf_margin_h2", leaf[1]).set("leaf_tol_h2", ltol1);
  r.set("probe_margin", p0).set("probe_tol", ptol).set("cells_h", levels[0]);
  std::vector<double> tols{tol0, tol1};
  const auto fit = convergence_order(std::vector<double>{double(levels[0]), double(levels[1])}, tols);
  set_trend(r, fit);
  r.pass = margin[0] >= -tol0 && margin[1] >= -tol1 && tol1 < tol0 && leaf[0] >= -ltol0 && leaf[1] >= -ltol1 &&
           ltol1 < ltol0 && std::abs(p0) <= ptol;
  Outcome out{r, {}, {}};
  out.tables.push_back(Table{"theta_margin", {}, {}}.add("t", reps.back().times).add("margin", reps.back().margin));
  out.plots.push_back(line_plot("theta_margin", "(1/4)(log kappa)'' - (2/(nV)) kappa", "theta_margin", "t", {"margin"}));
  return out;
}

Outcome c11_strip(const SuiteOptions& o) {
  auto r = record(11, "kenergy", "kappa below the strip hyperbolic bound");
  const auto levels = last_levels(o.ladder, 2);
  std::vector<ThetaDensity> th;
  std::vector<CurvatureBoundReport> reps;
  const auto w = toric_window(o.toric_bump, 0);
  for (int m : levels) {
    auto opt = w.theta;
    opt.leaves = m / 2;
    th.push_back(kenergy_theta(toric_cp1(m, o.toric_bump), opt));
    reps.push_back(curvature_bound_check(th.back(), two_pi, 1, w.strip));
  }
  double tol = 0.0;
  for (std::size_t i = 0; i < th[0].kappa.size(); ++i) tol = std::max(tol, refinement_tolerance(th[0].kappa[i], th[1].kappa[i]));
  r.set("max_excess", reps[0].max_strip_excess).set("tol", tol).set("max_excess_finest", reps[1].max_strip_excess);
  r.set("strip_a", w.strip.a).set("strip_length", w.strip.length).set("cells", levels[0]);
  r.pass = reps[0].max_strip_excess <= tol;
  Outcome out{r, {}, {}};
  std::vector<double> bound;
  for (double t : reps[1].times) bound.push_back(reps[1].constant_strip * w.strip.density(t));
  out.tables.push_back(Table{"strip_bound", {}, {}}.add("t", reps[1].times).add("kappa", th[1].kappa).add("bound", bound));
  out.plots.push_back(line_plot("strip_bound", "kappa against (nV/2) lambda", "strip_bound", "t", {"kappa", "bound"}, false, true));
  return out;
}

struct Family {
  std::vector<ConformalMetric> members;
  std::vector<double> nu;
  double a = 0.0;
};

// Scaled hyperbolic metrics of random disks containing the unit disk.
Family random_family(const DomainGrid& grid, std::uint64_t seed, int size) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale(1.0, 3.0), off(-0.2, 0.2), slack(0.1, 0.5), w(0.1, 1.0);
  Family f;
  f.a = std::numeric_limits<double>::infinity();
  for (int k = 0; k < size; ++k) {
    const double c = scale(rng);
    const cplx p(off(rng), off(rng));
    f.members.push_back(scaled_poincare(grid, c, p, std::abs(p) + 1.0 + slack(rng)));
    f.nu.push_back(w(rng));
    f.a = std::min(f.a, 1.0 / (2.0 * c));
  }
  return f;
}

Outcome c12_superposition(const SuiteOptions& o) {
  const auto t0 = Clock::now();
  auto r = record(12, "prop-superpose", "superposition of negatively curved metrics");
  const auto grid = disk_grid(o.superposition_grid, 1.0);
  std::vector<double> seeds, margins, identity;
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < o.families; ++s) {
    const auto f = random_family(grid, o.seed * 1000003ULL + static_cast<std::uint64_t>(s), o.family_size);
    const auto pc = prop_check(f.members, f.nu, f.a);
    seeds.push_back(s);
    margins.push_back(pc.margin);
    identity.push_back(pc.member_identity);
    worst = std::min(worst, pc.margin);
  }
  const auto p = scaled_poincare(grid, 2.0, {0.1, -0.05}, 1.3);
  const auto eq = prop_check({p, p, p}, {0.5, 1.0, 1.5}, 0.25);
  const double runtime = seconds_since(t0);
  r.set("min_margin", worst).set("margin_tol", o.tol.superposition_margin).set("families", o.families);
  r.set("equality_margin", eq.margin).set("equality_tol", o.tol.equality_margin);
  const bool in_time = runtime <= o.tol.superposition_runtime;
  r.set("grid", o.superposition_grid).set("runtime_within_limit", in_time ? 1.0 : 0.0);
  r.pass = worst >= -o.tol.superposition_margin && std::abs(eq.margin) <= o.tol.equality_margin && in_time;
  Outcome out{r, {}, {}};
  out.tables.push_back(timing_table(runtime, o.tol.superposition_runtime));
  out.tables.push_back(Table{"families", {}, {}}.add("family", seeds).add("margin", margins).add("member_identity", identity));
  return out;
}

}  // namespace

const std::vector<ToleranceKey>& tolerance_keys() {
  static const std::vector<ToleranceKey> keys{
      {"closed_form", &Tolerances::closed_form, "1: sup |u_t - closed form| at the finest level"},
      {"min_order", &Tolerances::min_order, "1, 8, 9: observed refinement order"},
      {"geodesic_runtime", &Tolerances::geodesic_runtime, "1: seconds"},
      {"periodicity", &Tolerances::periodicity, "2: ||u_{t+1} - u_t||"},
      {"counterexample_ratio", &Tolerances::counterexample_ratio, "2: torus residual / induced residual"},
      {"dh_slope", &Tolerances::dh_slope, "3: log-log decay slope of d(mu_0, mu_t)"},
      {"dh_bin_widths", &Tolerances::dh_bin_widths, "3: sup-CDF error against uniform, in bin widths"},
      {"range_cells", &Tolerances::range_cells, "4: Hausdorff and coverage, in grid cells"},
      {"sup_norm", &Tolerances::sup_norm, "5: spread of sup |u-dot_t|"},
      {"slope_band", &Tolerances::slope_band, "5: |u_T/T - g*|"},
      {"slope_measure", &Tolerances::slope_measure, "5: exceptional set, as a fraction of V(X)"},
      {"moment_cells", &Tolerances::moment_cells, "6: Hausdorff to the unit square, in cells"},
      {"energy_affine", &Tolerances::energy_affine, "7: max deviation from the affine fit"},
      {"control_ratio", &Tolerances::control_ratio, "8: non-geodesic / geodesic pullback error"},
      {"superposition_margin", &Tolerances::superposition_margin, "12"},
      {"equality_margin", &Tolerances::equality_margin, "12: |margin| of the equality probe"},
      {"superposition_runtime", &Tolerances::superposition_runtime, "12: seconds"},
  };
  return keys;
}

const std::vector<CriterionInfo>& criteria() {
  static const std::vector<CriterionInfo> list{
      {1, "geodesic construction", "geodesic",
       "cp1 dilation: sup|u_t - closed form| <= 1e-6 at the finest level; residual order >= 1.8; runtime <= 60 s"},
      {2, "torus counterexample", "geodesic",
       "canonical torus path 1-periodic to 1e-8, non-constant, residual >= 10x the induced residual"},
      {3, "pushforward invariance", "dh",
       "d(mu_0, mu_t) decays with log-log slope >= 0.9 on cp1 and the product; cp1 limit uniform within 2 bin widths"},
      {4, "velocity ranges", "sets",
       "Hausdorff(A, closure B_x) <= 2 cells over 100 samples; fixed points give singleton endpoints; product coverage <= 2 cells"},
      {5, "sup-norm and asymptotic slope", "sets",
       "sup|u-dot_t| constant to 1e-6 on [-5, 5]; |u_T/T - g*| <= 1e-3 off a set of measure <= 1e-3 V at T = 20"},
      {6, "moment image", "moment",
       "double rotation image is the unit square within 2 cells; coverage defect decreases under refinement"},
      {7, "energy linearity", "geodesic", "energy deviates from its affine fit by <= 1e-7 on canonical and regauged paths"},
      {8, "leaf pullback", "leaves",
       "pullback error order >= 1.8 on induced and toric paths; non-geodesic control fails by >= 10x"},
      {9, "K-energy theta", "kenergy",
       "fiber kappa vs direct kappa within combined tol(h), order >= 1.8; induced sup|kappa| <= tol(h)"},
      {10, "Burns bounds", "kenergy",
       "Theta margin >= -tol(h) with tol(h) decreasing; leaf Burns margin likewise; strip sharpness probe |margin| <= tol"},
      {11, "strip bound", "kenergy", "kappa <= (nV/2) lambda_strip + tol(h) on the toric window"},
      {12, "superposition", "prop-superpose",
       "100 random scaled-Poincare families have margin >= -1e-6 at 256^2; equality probe within 1e-4; runtime <= 120 s"},
  };
  return list;
}

Outcome run_criterion(int id, const SuiteOptions& o) {
  switch (id) {
    case 1: return c1_geodesic(o);
    case 2: return c2_counterexample(o);
    case 3: return c3_invariance(o);
    case 4: return c4_ranges(o);
    case 5: return c5_slope(o);
    case 6: return c6_moment(o);
    case 7: return c7_energy(o);
    case 8: return c8_pullback(o);
    case 9: return c9_theta(o);
    case 10: return c10_burns(o);
    case 11: return c11_strip(o);
    case 12: return c12_superposition(o);
    default: throw PreconditionError("no acceptance criterion " + std::to_string(id));
  }
}

Outcome torus_point_mass(const SuiteOptions& o) {
  auto r = record(0, "dh", "flat torus translation: point-mass pushforward");
  const auto x = Torus::make(o.torus_cells, [](double, double) { return 1.0; });
  InducedOptions io;
  io.override_exactness = true;
  const auto [tmin, tmax] = std::minmax_element(o.dh_times.begin(), o.dh_times.end());
  const auto path = induced_geodesic(TorusTranslation{}, Manifold(x), TimeGrid::uniform(*tmin - 0.5, *tmax + 0.5, 5), io);
  const BinSpec bins{o.bins, -o.dilation, o.dilation};
  const auto mu0 = pushforward(path, {0.0, 0.0}, {bins});
  double d = 0.0, off = 0.0;
  for (double t : o.dh_times) d = std::max(d, measure_distance(mu0, pushforward(path, {t, 0.0}, {bins})));
  for (int i = 0; i < bins.count; ++i)
    if (!(bins.edge(i) <= 0.0 && 0.0 <= bins.edge(i + 1))) off += mu0.weights[i];
  r.set("distance", d).set("mass_off_zero", off / mu0.total).set("total", mu0.total);
  r.pass = d <= 1e-12 && off <= 1e-12 * mu0.total;
  return {r, {}, {}};
}

Outcome leaf_burns(const SuiteOptions& o) {
  auto r = record(0, "leaves", "toric leaf: trace, pullback and Burns margin");
  const auto levels = last_levels(o.ladder, 2);
  const double c = o.toric_bump;
  const TimeGrid wide{-4.0 / c, 0.25 / c, 29};
  std::vector<double> margin;
  LeafTrajectory leaf;
  LeafTheta theta;
  double pull = 0.0;
  for (int m : levels) {
    const auto p = toric_cp1(m, c);
    leaf = trace_leaf(p, 0.3, wide);
    theta = theta_on_leaf(leaf);
    margin.push_back(burns_margin(theta));
    pull = leaf_pullback_check(p, 0.3, wide);
  }
  const double tol = refinement_tolerance(margin[0], margin[1]);
  r.set("burns_margin", margin[1]).set("tol", tol).set("pullback_error", pull).set("kappa_sup", theta.kappa_sup);
  r.pass = margin[1] >= -tol;
  Outcome out{r, {}, {}};
  std::vector<double> ts;
  for (int i = 0; i < wide.count; ++i) ts.push_back(wide.at(i));
  out.tables.push_back(Table{"leaf", {}, {}}
                           .add("t", ts)
                           .add("position", leaf.position)
                           .add("ratio", leaf.ratio)
                           .add("kappa", theta.kappa)
                           .add("curvature", theta.curvature));
  out.plots.push_back(line_plot("leaf_curvature", "leaf curvature (Burns bound -2)", "leaf", "t", {"curvature"}));
  return out;
}

}  // namespace kahler
