#include "stratwave/cli/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "stratwave/cli/report.hpp"
#include "stratwave/dispersion_analysis.hpp"
#include "stratwave/errors.hpp"
#include "stratwave/group_fourier.hpp"
#include "stratwave/hermite_wigner.hpp"
#include "stratwave/parallel.hpp"
#include "stratwave/propagator_kernel.hpp"

#ifndef STRATWAVE_VERSION
#define STRATWAVE_VERSION "unknown"
#endif

namespace stratwave::cli {

namespace {

using json = nlohmann::ordered_json;

struct RunConfig {
  std::string group = "heisenberg:1";
  std::vector<double> window{1.0, 2.0};
  std::string t = "20:500:12log";
  int m_max = 6;
  int m_grid = 2;
  double tol = 1e-6;
  double slope_tolerance = 0.1;
  std::vector<double> z, p, q, r, point, lambda_star;
  std::string kind = "optimality";
  double radius = 0.8;
  int samples = 50;
  std::uint64_t seed = 1;
  double tol_zero = 1e-6, tol_rank = 1e-3;
  QuadratureBudget budget;
  FourierGrid fourier;
  std::vector<double> ring{0.25, 2.0};
  int n = 0;
  double xi1 = 0.0, xi2 = 0.0;
  bool selftest = false;
  bool as_json = false;
  int jobs = 0;
  std::string csv, json_out, svg;
};

template <class T>
json to_j(const T& v) {
  return json(v);
}
json to_j(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Ties a flag to a config key so --config can fill whatever the command line left unset
// and the summary can echo every resolved value.
class Bindings {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key, T& field, const std::string& help) {
    CLI::Option* opt = app->add_option(flag, field, help)->capture_default_str();
    if constexpr (std::is_same_v<T, std::vector<double>>) opt->delimiter(',');
    track(opt, key, field);
    return opt;
  }
  CLI::Option* flag(CLI::App* app, const std::string& flag, const std::string& key, bool& field, const std::string& help) {
    CLI::Option* opt = app->add_flag(flag, field, help);
    track(opt, key, field);
    return opt;
  }
  template <class T>
  void track(CLI::Option* opt, const std::string& key, T& field) {
    entries_.push_back({key, opt, [&field](const json& j) { field = j.get<T>(); }, [&field] { return to_j(field); }});
  }
  void load(const json& doc) {
    for (const auto& e : entries_)
      if (doc.contains(e.key) && (e.opt == nullptr || e.opt->count() == 0)) e.load(doc.at(e.key));
  }
  json dump() const {
    json out = json::object();
    for (const auto& e : entries_) out[e.key] = e.save();
    return out;
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* opt;
    std::function<void(const json&)> load;
    std::function<json()> save;
  };
  std::vector<Entry> entries_;
};

struct Command {
  CLI::App* app = nullptr;
  RunConfig cfg;
  Bindings bind;
  std::function<int(Command&, std::ostream&)> handler;
};

void add_group_window(Command& c) {
  c.bind.add(c.app, "--group,-g", "group", c.cfg.group, "catalog group, e.g. htype:4,2");
  c.bind.add(c.app, "--window", "window", c.cfg.window, "spectral window a,b")->expected(2);
}

void add_budget(Command& c) {
  c.bind.add(c.app, "--c0", "c0", c.cfg.budget.c0, "initial node factor");
  c.bind.add(c.app, "--min-nodes", "min_nodes", c.cfg.budget.min_nodes, "minimum nodes per axis");
  c.bind.add(c.app, "--max-nodes-per-axis", "max_nodes_per_axis", c.cfg.budget.max_nodes_per_axis, "node cap per axis");
  c.bind.add(c.app, "--max-total-nodes", "max_total_nodes", c.cfg.budget.max_total_nodes, "node cap per integral");
  c.bind.add(c.app, "--abs-tol", "abs_tol", c.cfg.budget.abs_tol, "absolute quadrature tolerance");
}

void add_outputs(Command& c, bool svg) {
  c.bind.add(c.app, "--csv", "csv", c.cfg.csv, "CSV output path");
  c.bind.add(c.app, "--json", "json", c.cfg.json_out, "JSON summary path (also printed)");
  if (svg) c.bind.add(c.app, "--svg", "svg", c.cfg.svg, "log-log SVG plot path");
}

WindowSpec window_of(const RunConfig& cfg) {
  if (cfg.window.size() != 2) throw std::invalid_argument("--window needs two numbers");
  WindowSpec w{cfg.window[0], cfg.window[1]};
  w.validate();
  return w;
}

json summary(const std::string& command, const Command& c) {
  json s;
  s["command"] = command;
  s["version"] = STRATWAVE_VERSION;
  s["config"] = c.bind.dump();
  return s;
}

void emit(const json& s, const RunConfig& cfg, std::ostream& out) {
  std::string text = s.dump(2);
  out << text << '\n';
  if (!cfg.json_out.empty()) {
    std::ofstream f(cfg.json_out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + cfg.json_out);
    f << text << '\n';
  }
}

std::vector<std::string> z_columns(int p) {
  std::vector<std::string> cols{"t"};
  for (int i = 0; i < p; ++i) cols.push_back("Z" + std::to_string(i + 1));
  return cols;
}

std::string alpha_text(const MultiIndex& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ";" : "") + std::to_string(a[i]);
  return s;
}

// ---------------------------------------------------------------- catalog

int cmd_catalog(Command& c, std::ostream& out, const std::string& name) {
  if (name.empty()) {
    out << "heisenberg:d\n"
           "htype:m,p            p=1 m even; p<=3 m%4==0; p<=7 m%8==0\n"
           "diamond:k,d          0<=k<=d\n"
           "tensor_heisenberg:d1,d2\n"
           "tensor_htype:m1,p1,m2,p2\n";
    return kPass;
  }
  GroupSpec spec = catalog_from_string(name);
  if (c.cfg.as_json) {
    out << to_json(spec) << '\n';
    return kPass;
  }
  out << "name=" << spec.name() << '\n'
      << "p=" << spec.p() << ",d=" << spec.d() << ",k=" << spec.k() << '\n'
      << "dim=" << spec.dimension() << ",Q=" << homogeneous_dimension(spec) << '\n'
      << "eta_mode=" << (spec.eta_mode() == EtaMode::ClosedForm ? "CLOSED_FORM" : "NUMERIC")
      << ",frame_mode=" << (spec.frame_mode() == FrameMode::Explicit ? "EXPLICIT" : "CENTER_ONLY") << '\n'
      << "slope=" << format_number(theoretical_slope(spec)) << '\n';
  return kPass;
}

// ---------------------------------------------------------------- special

int cmd_special(Command& c, std::ostream& out) {
  const RunConfig& cfg = c.cfg;
  if (cfg.selftest) {
    auto rows = hermite_selftest();
    CsvWriter csv(cfg.csv, &out);
    csv.header({"check", "value", "threshold", "pass"});
    bool ok = true;
    for (const auto& r : rows) {
      csv.row({r.check, r.value, r.threshold, r.pass ? 1 : 0});
      ok = ok && r.pass;
    }
    json s = summary("special", c);
    s["result"]["checks"] = static_cast<int>(rows.size());
    s["verdict"] = ok ? "pass" : "fail";
    // stdout already carries the CSV unless it went to a file.
    if (!cfg.csv.empty()) emit(s, cfg, out);
    else if (!cfg.json_out.empty()) {
      std::ostringstream sink;
      emit(s, cfg, sink);
    }
    return ok ? kPass : kVerdictFail;
  }
  json s = summary("special", c);
  WignerValue w = wigner_g(cfg.n, cfg.xi1, cfg.xi2);
  s["result"] = {{"hermite", hermite(cfg.n, cfg.xi1)},
                 {"wigner_re", w.value.real()},
                 {"wigner_im", w.value.imag()},
                 {"wigner_certificate", w.error_estimate},
                 {"wigner_nodes", w.nodes},
                 {"laguerre_form", wigner_g_laguerre(cfg.n, cfg.xi1, cfg.xi2)}};
  emit(s, cfg, out);
  return kPass;
}

// ---------------------------------------------------------------- kernel

GroupElement point_of(const GroupSpec& spec, const RunConfig& cfg) {
  GroupElement x = GroupElement::identity(spec);
  auto fill = [](std::vector<double>& dst, const std::vector<double>& src, const char* name) {
    if (src.empty()) return;
    if (src.size() != dst.size())
      throw std::invalid_argument(std::string("--") + name + " needs " + std::to_string(dst.size()) + " components");
    dst = src;
  };
  fill(x.P, cfg.p, "p");
  fill(x.Q, cfg.q, "q");
  fill(x.R, cfg.r, "r");
  fill(x.Z, cfg.z, "z");
  if (!cfg.point.empty()) {
    const std::size_t d = x.P.size(), p = x.Z.size(), k = x.R.size();
    if (cfg.point.size() != 2 * d + p + k)
      throw std::invalid_argument("--point needs P,Q,Z,R with " + std::to_string(2 * d + p + k) + " components");
    auto it = cfg.point.begin();
    x.P.assign(it, it + d);
    x.Q.assign(it + d, it + 2 * d);
    x.Z.assign(it + 2 * d, it + 2 * d + p);
    x.R.assign(it + 2 * d + p, cfg.point.end());
  }
  return x;
}

int cmd_kernel(Command& c, std::ostream& out) {
  const RunConfig& cfg = c.cfg;
  GroupSpec spec = catalog_from_string(cfg.group);
  WindowSpec w = window_of(cfg);
  auto ts = parse_t_grid(cfg.t);
  CsvWriter csv(cfg.csv, nullptr);
  auto cols = z_columns(spec.p());
  for (const char* s : {"re", "im", "modulus", "tail_bound", "quad_error", "nodes"}) cols.push_back(s);
  csv.header(cols);
  json s = summary("kernel", c);
  json values = json::array();
  for (double t : ts) {
    KernelRequest req{spec, w, t, point_of(spec, cfg), cfg.m_max, cfg.tol, cfg.budget, cfg.jobs};
    KernelValue v = kernel(req);
    std::vector<Cell> row{t};
    for (double zc : req.x.Z) row.push_back(zc);
    for (Cell cell : std::vector<Cell>{v.value.real(), v.value.imag(), std::abs(v.value), v.series_tail_bound,
                                       v.quadrature_error, v.nodes})
      row.push_back(cell);
    csv.row(row);
    values.push_back({{"t", t},
                      {"value_re", v.value.real()},
                      {"value_im", v.value.imag()},
                      {"modulus", std::abs(v.value)},
                      {"fresnel_modulus", v.fresnel_modulus},
                      {"tail_bound", v.series_tail_bound},
                      {"quad_error", v.quadrature_error},
                      {"nodes", v.nodes},
                      {"terms", v.terms}});
  }
  if (values.size() == 1) s["result"] = values[0];
  else s["result"]["values"] = values;
  emit(s, cfg, out);
  return kPass;
}

// ---------------------------------------------------------------- decay

int cmd_decay(Command& c, std::ostream& out) {
  const RunConfig& cfg = c.cfg;
  GroupSpec spec = catalog_from_string(cfg.group);
  WindowSpec w = window_of(cfg);
  auto ts = parse_t_grid(cfg.t);
  std::vector<std::vector<double>> zs;
  if (!cfg.z.empty()) {
    if (static_cast<int>(cfg.z.size()) != spec.p()) throw std::invalid_argument("--z has the wrong length");
    zs.push_back(cfg.z);
  } else {
    zs = stationary_z_grid(spec, w, cfg.m_grid);
  }
  DecayOptions opt;
  opt.m_max = cfg.m_max;
  opt.tol = cfg.tol;
  opt.slope_tolerance = cfg.slope_tolerance;
  opt.budget = cfg.budget;
  opt.jobs = cfg.jobs;
  DecayReport rep = decay_scan(spec, w, ts, zs, opt);

  CsvWriter csv(cfg.csv, nullptr);
  auto cols = z_columns(spec.p());
  for (const char* s : {"re", "im", "modulus", "tail_bound", "quad_error", "nodes", "status"}) cols.push_back(s);
  csv.header(cols);
  long long nodes = 0;
  double tail = 0.0, qerr = 0.0;
  int failures = 0;
  for (const auto& smp : rep.samples) {
    std::vector<Cell> row{smp.t};
    for (double zc : smp.z) row.push_back(zc);
    if (smp.ok) {
      const auto& v = smp.value;
      for (Cell cell : std::vector<Cell>{v.value.real(), v.value.imag(), std::abs(v.value), v.series_tail_bound,
                                         v.quadrature_error, v.nodes, std::string("ok")})
        row.push_back(cell);
      nodes += v.nodes;
      tail = std::max(tail, v.series_tail_bound);
      qerr = std::max(qerr, v.quadrature_error);
    } else {
      ++failures;
      for (int i = 0; i < 6; ++i) row.push_back(std::string("nan"));
      row.push_back(std::string("failed"));
    }
    csv.row(row);
  }
  json s = summary("decay", c);
  json sup = json::array(), used = json::array();
  for (std::size_t i = 0; i < rep.t_grid.size(); ++i) {
    sup.push_back(to_j(rep.sup_modulus[i]));
    used.push_back(static_cast<bool>(rep.used[i]));
  }
  s["result"] = {{"slope", rep.fit.slope},
                 {"intercept", rep.fit.intercept},
                 {"ci", {rep.fit.ci_low, rep.fit.ci_high}},
                 {"points", rep.fit.points},
                 {"theory", rep.theory},
                 {"tolerance", rep.tolerance},
                 {"theory_in_ci", rep.theory_in_ci},
                 {"t", rep.t_grid},
                 {"sup_modulus", sup},
                 {"used", used},
                 {"z_grid", zs},
                 {"total_nodes", nodes},
                 {"max_tail_bound", tail},
                 {"max_quad_error", qerr},
                 {"failed_samples", failures}};
  s["verdict"] = rep.pass ? "pass" : "fail";
  if (!cfg.svg.empty()) {
    SeriesPlot plot;
    plot.title = spec.name() + " sup |k_t|";
    plot.x = rep.t_grid;
    plot.y = rep.sup_modulus;
    plot.has_fit = rep.fit.points >= 2;
    plot.fit_slope = rep.fit.slope;
    plot.fit_intercept = rep.fit.intercept;
    plot.has_theory = true;
    plot.theory_slope = rep.theory;
    write_loglog_svg(cfg.svg, plot);
  }
  emit(s, cfg, out);
  return rep.pass ? kPass : kVerdictFail;
}

// ---------------------------------------------------------------- rank

int cmd_rank(Command& c, std::ostream& out) {
  const RunConfig& cfg = c.cfg;
  GroupSpec spec = catalog_from_string(cfg.group);
  RankThresholds th{cfg.tol_zero, cfg.tol_rank};
  RankReport rep = assumption_check(spec, cfg.samples, cfg.seed, th);
  const int p = spec.p();
  CsvWriter csv(cfg.csv, nullptr);
  std::vector<std::string> cols{"alpha"};
  for (int i = 0; i < p; ++i) cols.push_back("lambda" + std::to_string(i + 1));
  for (int i = 0; i < p; ++i) cols.push_back("sigma" + std::to_string(i + 1));
  for (const char* s : {"hessian_scale", "rank", "pass", "euler_residual"}) cols.push_back(s);
  csv.header(cols);
  double worst_gap = std::numeric_limits<double>::infinity(), worst_null = 0.0;
  int failed = 0;
  for (const auto& smp : rep.samples) {
    std::vector<Cell> row{alpha_text(smp.alpha)};
    for (double v : smp.lambda) row.push_back(v);
    for (double v : smp.singular_values) row.push_back(v);
    row.push_back(smp.hessian_scale);
    row.push_back(smp.rank);
    row.push_back(smp.pass ? 1 : 0);
    row.push_back(smp.euler_residual);
    csv.row(row);
    if (!smp.pass) ++failed;
    if (p >= 2 && smp.singular_values[0] > 0.0) {
      worst_gap = std::min(worst_gap, smp.singular_values[p - 2] / smp.singular_values[0]);
      worst_null = std::max(worst_null, smp.singular_values[p - 1] / smp.singular_values[0]);
    }
  }
  bool euler_ok = rep.max_euler_residual < cfg.tol_zero;
  bool ok = rep.pass && euler_ok;
  json s = summary("rank", c);
  s["result"] = {{"assumption_holds", rep.pass},
                 {"samples", static_cast<int>(rep.samples.size())},
                 {"failed_samples", failed},
                 {"expected_rank", p - 1},
                 {"min_sigma_ratio_p_minus_1", p >= 2 ? to_j(worst_gap) : json(nullptr)},
                 {"max_sigma_ratio_p", p >= 2 ? to_j(worst_null) : json(nullptr)},
                 {"max_euler_residual", rep.max_euler_residual},
                 {"euler_ok", euler_ok}};
  s["verdict"] = ok ? "pass" : "fail";
  emit(s, cfg, out);
  return ok ? kPass : kVerdictFail;
}

// ---------------------------------------------------------------- witness

int cmd_witness(Command& c, std::ostream& out) {
  const RunConfig& cfg = c.cfg;
  GroupSpec spec = catalog_from_string(cfg.group);
  auto ts = parse_t_grid(cfg.t);
  std::vector<WitnessEntry> entries;
  double theory = 0.0;
  if (cfg.kind == "optimality") {
    WitnessOptions o;
    o.lambda_star = cfg.lambda_star;
    o.radius = cfg.radius;
    o.tol = cfg.tol;
    o.budget = cfg.budget;
    entries = parallel_map<WitnessEntry>(ts.size(), [&](std::size_t i) { return optimality_witness(spec, ts[i], o); },
                                         cfg.jobs);
    theory = -0.5 * (spec.k() + spec.p() - 1) + 0.0;
  } else if (cfg.kind == "nondispersion") {
    WindowSpec g = window_of(cfg);
    QuadratureBudget b = cfg.budget;
    b.rel_tol = cfg.tol;
    entries = parallel_map<WitnessEntry>(
        ts.size(), [&](std::size_t i) { return nondispersion_witness(spec, g, ts[i], b); }, cfg.jobs);
  } else {
    throw std::invalid_argument("--kind must be optimality or nondispersion");
  }
  WitnessResult res = classify_witness(entries);
  CsvWriter csv(cfg.csv, nullptr);
  auto cols = z_columns(spec.p());
  for (const char* s : {"re", "im", "modulus", "quad_error", "nodes"}) cols.push_back(s);
  csv.header(cols);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& e : res.entries) {
    std::vector<Cell> row{e.t};
    for (double zc : e.z) row.push_back(zc);
    for (Cell cell : std::vector<Cell>{e.value.real(), e.value.imag(), e.modulus, e.quad_error, e.nodes}) row.push_back(cell);
    csv.row(row);
    double scaled = e.modulus * std::pow(std::abs(e.t), -theory);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  bool ok;
  json s = summary("witness", c);
  s["result"] = {{"classification", res.classification}, {"exponent", res.exponent}, {"spread", res.spread}};
  if (cfg.kind == "optimality") {
    ok = std::abs(res.exponent - theory) <= cfg.slope_tolerance && lo > 0.0 && hi / lo < 3.0;
    s["result"]["theory"] = theory;
    s["result"]["scaled_modulus_range"] = {to_j(lo), to_j(hi)};
  } else {
    ok = res.classification == "constant" && lo > 0.0;
  }
  s["verdict"] = ok ? "pass" : "fail";
  if (!cfg.svg.empty()) {
    SeriesPlot plot;
    plot.title = spec.name() + " " + cfg.kind + " witness";
    for (const auto& e : res.entries) {
      plot.x.push_back(std::abs(e.t));
      plot.y.push_back(e.modulus);
    }
    plot.has_theory = true;
    plot.theory_slope = theory;
    write_loglog_svg(cfg.svg, plot);
  }
  emit(s, cfg, out);
  return ok ? kPass : kVerdictFail;
}

// ---------------------------------------------------------------- fourier-check

int cmd_fourier(Command& c, std::ostream& out) {
  RunConfig& cfg = c.cfg;
  if (cfg.ring.size() != 2) throw std::invalid_argument("--ring needs two numbers");
  FourierGrid g = cfg.fourier;
  g.ring_a = cfg.ring[0];
  g.ring_b = cfg.ring[1];
  g.jobs = cfg.jobs;
  const double pts[5][3] = {{0, 0, 0}, {0.3, -0.2, 0.5}, {-0.7, 0.4, -1.0}, {1.0, 1.0, 2.0}, {0.1, -0.9, 3.0}};
  CsvWriter csv(cfg.csv, nullptr);
  csv.header({"function", "quantity", "x", "y", "s", "value"});
  std::vector<double> kappas;
  std::vector<FourierData> data;
  auto fs = standard_test_functions();
  for (const auto& nf : fs) {
    KappaEstimate k;
    k.spatial = spatial_norm2(nf.f, g);
    data.push_back(forward(nf.f, g));
    k.fourier = fourier_norm2(data.back());
    k.kappa = k.spatial / k.fourier;
    kappas.push_back(k.kappa);
    csv.row({nf.name, std::string("kappa"), 0.0, 0.0, 0.0, k.kappa});
  }
  double kmin = *std::min_element(kappas.begin(), kappas.end());
  double kmax = *std::max_element(kappas.begin(), kappas.end());
  double kmean = 0.0;
  for (double k : kappas) kmean += k / kappas.size();
  double round_trip = 0.0, diag = 0.0;
  json per = json::array();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    double rt = 0.0;
    for (const auto& p : pts) {
      GroupElement x{{p[0]}, {p[1]}, {}, {p[2]}};
      double f = fs[i].f(p[0], p[1], p[2]);
      double err = std::abs(inverse_at(x, data[i], kmean) - f) / std::abs(f);
      csv.row({fs[i].name, std::string("round_trip"), p[0], p[1], p[2], err});
      rt = std::max(rt, err);
    }
    FourierData dl = forward(sublaplacian_fd(fs[i].f), g);
    double num = 0.0, den = 0.0;
    for (std::size_t l = 0; l < data[i].lambda.size(); ++l) {
      Eigen::MatrixXcd expect = data[i].M[l] * oscillator_diagonal(data[i].lambda[l], g.N).asDiagonal();
      num += data[i].weights[l] * (dl.M[l] - expect).squaredNorm();
      den += data[i].weights[l] * expect.squaredNorm();
    }
    double dr = std::sqrt(num / den);
    csv.row({fs[i].name, std::string("diagonal_residual"), 0.0, 0.0, 0.0, dr});
    round_trip = std::max(round_trip, rt);
    diag = std::max(diag, dr);
    per.push_back({{"function", fs[i].name}, {"kappa", kappas[i]}, {"round_trip", rt}, {"diagonal_residual", dr}});
  }
  const double spread = kmax / kmin - 1.0;
  bool ok = spread < 0.02 && round_trip < 1e-2 && diag < 1e-2;
  json s = summary("fourier-check", c);
  json rts = json::array(), drs = json::array();
  for (const auto& f : per) {
    rts.push_back(f["round_trip"]);
    drs.push_back(f["diagonal_residual"]);
  }
  s["result"] = {{"kappa_estimates", kappas},
                 {"roundtrip_errors", rts},
                 {"diag_residual", drs},
                 {"kappa_mean", kmean},
                 {"kappa_reference", 1.0 / (4.0 * std::numbers::pi * std::numbers::pi)},
                 {"kappa_spread", spread},
                 {"roundtrip_max", round_trip},
                 {"diag_residual_max", diag},
                 {"functions", per}};
  s["verdict"] = ok ? "pass" : "fail";
  emit(s, cfg, out);
  return ok ? kPass : kVerdictFail;
}

json read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path);
  json doc = json::parse(f, nullptr, true, true);
  // A previous summary can be fed back as a config.
  if (doc.contains("config") && doc["config"].is_object()) return doc["config"];
  return doc;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"stratwave: Schrodinger dispersion on step-2 stratified groups"};
  app.require_subcommand(1);
  app.set_version_flag("--version", STRATWAVE_VERSION);
  std::string config_path;
  int jobs = 0;
  CLI::Option* config_opt = app.add_option("--config", config_path, "JSON config; command-line flags win");
  CLI::Option* jobs_opt = app.add_option("--jobs,-j", jobs, "worker threads (default STRATWAVE_JOBS or all cores)");

  std::vector<std::unique_ptr<Command>> commands;
  auto make = [&](const std::string& name, const std::string& help) -> Command& {
    commands.push_back(std::make_unique<Command>());
    Command& c = *commands.back();
    c.app = app.add_subcommand(name, help);
    c.app->fallthrough();
    c.bind.track(jobs_opt, "jobs", c.cfg.jobs);
    return c;
  };

  std::vector<std::string> catalog_tokens;
  Command& cat = make("catalog", "describe a catalog group");
  cat.app->add_option("group", catalog_tokens, "kind:params or kind params..., e.g. heisenberg:2 or htype 4 2");
  cat.bind.flag(cat.app, "--as-json", "as_json", cat.cfg.as_json, "print the group as JSON");
  cat.handler = [&](Command& c, std::ostream& o) {
    std::string name;
    for (std::size_t i = 0; i < catalog_tokens.size(); ++i)
      name += (i == 0 ? "" : (i == 1 ? ":" : ",")) + catalog_tokens[i];
    return cmd_catalog(c, o, name);
  };

  Command& sp = make("special", "Hermite and Wigner special functions");
  sp.bind.flag(sp.app, "--selftest", "selftest", sp.cfg.selftest, "run the invariant suite, CSV on stdout");
  sp.bind.add(sp.app, "--n", "n", sp.cfg.n, "order");
  sp.bind.add(sp.app, "--xi1", "xi1", sp.cfg.xi1, "first argument");
  sp.bind.add(sp.app, "--xi2", "xi2", sp.cfg.xi2, "second argument");
  add_outputs(sp, false);
  sp.handler = cmd_special;

  Command& ke = make("kernel", "evaluate the propagator kernel");
  ke.cfg.t = "1";
  ke.cfg.tol = 1e-8;
  ke.cfg.m_max = 10;
  add_group_window(ke);
  ke.bind.add(ke.app, "--t", "t", ke.cfg.t, "time or t grid");
  ke.bind.add(ke.app, "--z", "z", ke.cfg.z, "central coordinate Z (point is t Z)");
  ke.bind.add(ke.app, "--p", "p", ke.cfg.p, "P components");
  ke.bind.add(ke.app, "--q", "q", ke.cfg.q, "Q components");
  ke.bind.add(ke.app, "--r", "r", ke.cfg.r, "R components");
  ke.bind.add(ke.app, "--point", "point", ke.cfg.point, "P,Q,Z,R in one list (overrides --p --q --z --r)");
  ke.bind.add(ke.app, "--mmax,--m-max", "m_max", ke.cfg.m_max, "series truncation");
  ke.bind.add(ke.app, "--tol", "tol", ke.cfg.tol, "relative quadrature tolerance per term");
  add_budget(ke);
  add_outputs(ke, false);
  ke.handler = cmd_kernel;

  Command& de = make("decay", "fit the decay rate of sup_Z |k_t(0,0,tZ,0)|");
  add_group_window(de);
  de.bind.add(de.app, "--t", "t", de.cfg.t, "t grid: a:b:Nlog, a:b:Nlin or a list");
  de.bind.add(de.app, "--z", "z", de.cfg.z, "single Z instead of the stationary grid");
  de.bind.add(de.app, "--mmax,--m-max", "m_max", de.cfg.m_max, "series truncation");
  de.bind.add(de.app, "--m-grid", "m_grid", de.cfg.m_grid, "largest |alpha| in the stationary grid");
  de.bind.add(de.app, "--tol", "tol", de.cfg.tol, "relative quadrature tolerance per term");
  de.bind.add(de.app, "--slope-tolerance", "slope_tolerance", de.cfg.slope_tolerance, "accepted |slope - theory|");
  add_budget(de);
  add_outputs(de, true);
  de.handler = cmd_decay;

  Command& ra = make("rank", "check the Hessian rank condition");
  ra.bind.add(ra.app, "--group,-g", "group", ra.cfg.group, "catalog group");
  ra.bind.add(ra.app, "--samples", "samples", ra.cfg.samples, "random unit lambda");
  ra.bind.add(ra.app, "--seed", "seed", ra.cfg.seed, "RNG seed");
  ra.bind.add(ra.app, "--tol-zero", "tol_zero", ra.cfg.tol_zero, "null singular value ratio");
  ra.bind.add(ra.app, "--tol-rank", "tol_rank", ra.cfg.tol_rank, "nonzero singular value ratio");
  add_outputs(ra, false);
  ra.handler = cmd_rank;

  Command& wi = make("witness", "optimality or non-dispersion witness");
  wi.cfg.tol = 1e-10;
  add_group_window(wi);
  wi.bind.add(wi.app, "--kind", "kind", wi.cfg.kind, "optimality | nondispersion")
      ->check(CLI::IsMember({"optimality", "nondispersion"}));
  wi.bind.add(wi.app, "--t", "t", wi.cfg.t, "t grid");
  wi.bind.add(wi.app, "--lambda-star", "lambda_star", wi.cfg.lambda_star, "centre of the bump (default e1)");
  wi.bind.add(wi.app, "--radius", "radius", wi.cfg.radius, "bump radius relative to |lambda*|");
  wi.bind.add(wi.app, "--tol", "tol", wi.cfg.tol, "relative quadrature tolerance");
  wi.bind.add(wi.app, "--slope-tolerance", "slope_tolerance", wi.cfg.slope_tolerance, "accepted |exponent - theory|");
  add_budget(wi);
  add_outputs(wi, true);
  wi.handler = cmd_witness;

  Command& fo = make("fourier-check", "Plancherel, inversion and sublaplacian checks on H^1");
  fo.bind.add(fo.app, "--N", "N", fo.cfg.fourier.N, "Hermite truncation");
  fo.bind.add(fo.app, "--ring", "ring", fo.cfg.ring, "|lambda| range a,b")->expected(2);
  fo.bind.add(fo.app, "--lambda-nodes", "lambda_nodes", fo.cfg.fourier.lambda_nodes, "Gauss nodes per sign");
  fo.bind.add(fo.app, "--box-xy", "box_xy", fo.cfg.fourier.box_xy, "half-width in x and y");
  fo.bind.add(fo.app, "--xy-nodes", "xy_nodes", fo.cfg.fourier.xy_nodes, "trapezoid nodes in x and y");
  fo.bind.add(fo.app, "--box-s", "box_s", fo.cfg.fourier.box_s, "half-width in s");
  fo.bind.add(fo.app, "--s-nodes", "s_nodes", fo.cfg.fourier.s_nodes, "Gauss nodes in s");
  fo.bind.add(fo.app, "--xi-nodes", "xi_nodes", fo.cfg.fourier.xi_nodes, "Gauss nodes in the Hermite variable");
  add_outputs(fo, false);
  fo.handler = cmd_fourier;

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  try {
    for (auto& c : commands) {
      if (!c->app->parsed()) continue;
      if (config_opt->count() > 0) c->bind.load(read_config(config_path));
      if (c->cfg.jobs > 0) set_default_jobs(c->cfg.jobs);
      return c->handler(*c, out);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kPass : kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: config: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace stratwave::cli
