#include "pustat/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "pustat/bounds.hpp"
#include "pustat/chaos.hpp"
#include "pustat/concentration.hpp"
#include "pustat/error.hpp"
#include "pustat/stats.hpp"
#include "pustat/ustat.hpp"

namespace pustat {

using json = nlohmann::json;

namespace {

// Name tables ------------------------------------------------------------------

template <class E>
struct NameTable {
  E value;
  const char* name;
};

constexpr NameTable<ExperimentKind> kKinds[] = {
    {ExperimentKind::moments, "moments"},
    {ExperimentKind::clt_rate, "clt_rate"},
    {ExperimentKind::regimes, "regimes"},
    {ExperimentKind::concentration, "concentration"},
    {ExperimentKind::fourth_moment, "fourth_moment"},
    {ExperimentKind::chaos_identity, "chaos_identity"},
};
constexpr NameTable<WindowShape> kShapes[] = {
    {WindowShape::box, "box"},
    {WindowShape::ball, "ball"},
    {WindowShape::growing_box, "growing_box"},
};
constexpr NameTable<IntensityForm> kForms[] = {
    {IntensityForm::scaled, "scaled"},
    {IntensityForm::restricted, "restricted"},
};
constexpr NameTable<ReferenceMeasure> kReferences[] = {
    {ReferenceMeasure::lebesgue_on_window, "lebesgue_on_window"},
    {ReferenceMeasure::line_measure_2d, "line_measure_2d"},
    {ReferenceMeasure::line_measure_3d, "line_measure_3d"},
};

template <class E, std::size_t N>
const char* to_name(const NameTable<E> (&table)[N], E value) {
  for (const auto& e : table) {
    if (e.value == value) return e.name;
  }
  return "?";
}

template <class E, std::size_t N>
E from_name(const NameTable<E> (&table)[N], const std::string& name,
            const std::string& field) {
  for (const auto& e : table) {
    if (name == e.name) return e.value;
  }
  std::string options;
  for (const auto& e : table) options += std::string(options.empty() ? "" : ", ") + e.name;
  throw ConfigError(field, "unknown value '" + name + "' (expected one of " + options + ")");
}

// JSON access with field paths in errors --------------------------------------

template <class T>
T get_or(const json& j, const char* key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path + key, std::string("wrong type: ") + e.what());
  }
}

const json& object_at(const json& j, const char* key, const std::string& path) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  const json& v = j.at(key);
  if (!v.is_object()) throw ConfigError(path + key, "expected an object");
  return v;
}

std::string fmt_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

const char* kind_name(ExperimentKind kind) { return to_name(kKinds, kind); }

// Config ----------------------------------------------------------------------

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  static const char* kKnown[] = {"kind", "kernel", "window", "intensity", "schedule",
                                 "replicates", "mc_samples", "inner_samples", "seed",
                                 "mode", "theory", "bounds", "plot",
                                 "abort_on_instability", "u_grid"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      throw ConfigError(key, "unknown key");
    }
  }
  ExperimentConfig c;
  if (!j.contains("kind")) throw ConfigError("kind", "missing");
  c.kind = from_name(kKinds, get_or<std::string>(j, "kind", "", ""), "kind");

  const json& k = object_at(j, "kernel", "");
  c.kernel.family = get_or<std::string>(k, "family", "kernel.", c.kernel.family);
  c.kernel.delta = get_or<double>(k, "delta", "kernel.", c.kernel.delta);
  if (k.contains("torus_period")) {
    c.kernel.torus_period = get_or<double>(k, "torus_period", "kernel.", 1.0);
  }
  c.kernel.face_dim = get_or<int>(k, "face_dim", "kernel.", c.kernel.face_dim);
  c.kernel.k = get_or<int>(k, "k", "kernel.", c.kernel.k);
  c.kernel.domain = get_or<std::string>(k, "domain", "kernel.", c.kernel.domain);
  c.kernel.center = get_or<double>(k, "center", "kernel.", c.kernel.center);
  c.kernel.half_width = get_or<double>(k, "half_width", "kernel.", c.kernel.half_width);

  const json& w = object_at(j, "window", "");
  c.window.shape = from_name(kShapes, get_or<std::string>(w, "shape", "window.", "box"),
                             "window.shape");
  c.window.dim = get_or<int>(w, "dim", "window.", c.window.dim);
  c.window.extent = get_or<double>(w, "extent", "window.", c.window.extent);
  c.window.center = get_or<std::vector<double>>(w, "center", "window.", {});

  const json& in = object_at(j, "intensity", "");
  c.form = from_name(kForms, get_or<std::string>(in, "form", "intensity.", "scaled"),
                     "intensity.form");
  c.reference = from_name(
      kReferences, get_or<std::string>(in, "reference", "intensity.", "lebesgue_on_window"),
      "intensity.reference");
  if (in.contains("marks")) {
    const json& m = in.at("marks");
    const auto type = get_or<std::string>(m, "type", "intensity.marks.", "");
    if (type == "categorical") {
      c.marks = CategoricalMarks{
          get_or<std::vector<double>>(m, "weights", "intensity.marks.", {})};
    } else if (type == "uniform") {
      c.marks = UniformMarks{get_or<double>(m, "lo", "intensity.marks.", 0.0),
                             get_or<double>(m, "hi", "intensity.marks.", 1.0)};
    } else {
      throw ConfigError("intensity.marks.type", "expected 'categorical' or 'uniform'");
    }
  }

  const json& s = object_at(j, "schedule", "");
  c.t = get_or<std::vector<double>>(s, "t", "schedule.", {});
  c.v_t = get_or<std::vector<double>>(s, "v_t", "schedule.", {});
  c.alpha = get_or<std::vector<double>>(s, "alpha", "schedule.", {});

  c.replicates = get_or<std::size_t>(j, "replicates", "", c.replicates);
  c.mc_samples = get_or<std::size_t>(j, "mc_samples", "", c.mc_samples);
  c.inner_samples = get_or<std::size_t>(j, "inner_samples", "", c.inner_samples);
  c.seed = get_or<std::uint64_t>(j, "seed", "", c.seed);
  c.mode = get_or<std::string>(j, "mode", "", c.mode);
  c.theory = get_or<bool>(j, "theory", "", c.theory);
  c.bounds = get_or<bool>(j, "bounds", "", c.bounds);
  c.plot = get_or<bool>(j, "plot", "", c.plot);
  c.abort_on_instability =
      get_or<bool>(j, "abort_on_instability", "", c.abort_on_instability);
  c.u_grid = get_or<std::vector<double>>(j, "u_grid", "", {});

  // Validation.
  if (c.t.empty()) throw ConfigError("schedule.t", "schedule must not be empty");
  for (double t : c.t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw ConfigError("schedule.t", "entries must be finite and >= 0");
    }
  }
  if (!c.v_t.empty() && c.v_t.size() != c.t.size()) {
    throw ConfigError("schedule.v_t", "must have the same length as schedule.t");
  }
  if (!c.alpha.empty() && c.alpha.size() != c.t.size()) {
    throw ConfigError("schedule.alpha", "must have the same length as schedule.t");
  }
  for (double v : c.v_t) {
    if (!(v > 0.0)) throw ConfigError("schedule.v_t", "entries must be positive");
  }
  for (double a : c.alpha) {
    if (!(a > 0.0)) throw ConfigError("schedule.alpha", "entries must be positive");
  }
  if (c.replicates < 1) throw ConfigError("replicates", "must be >= 1");
  if (c.mc_samples < 1) throw ConfigError("mc_samples", "must be >= 1");
  if (c.inner_samples < 1) throw ConfigError("inner_samples", "must be >= 1");
  if (c.mode != "auto" && c.mode != "naive" && c.mode != "grid") {
    throw ConfigError("mode", "expected 'auto', 'naive' or 'grid'");
  }
  if (c.window.dim < 1) throw ConfigError("window.dim", "must be >= 1");
  if (!(c.window.extent > 0.0)) throw ConfigError("window.extent", "must be positive");
  if (!c.window.center.empty() &&
      c.window.center.size() != static_cast<std::size_t>(c.window.dim)) {
    throw ConfigError("window.center", "must have window.dim entries");
  }
  if (c.window.shape == WindowShape::ball && !c.window.center.empty()) {
    throw ConfigError("window.center", "ball windows are centered at the origin");
  }
  if (c.kernel.domain != "points" && c.kernel.domain != "flats") {
    throw ConfigError("kernel.domain", "expected 'points' or 'flats'");
  }
  if (c.kind == ExperimentKind::regimes && c.v_t.size() < 3) {
    throw ConfigError("schedule.v_t", "regimes experiments need at least 3 entries");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["kind"] = kind_name(c.kind);
  json k;
  k["family"] = c.kernel.family;
  k["delta"] = c.kernel.delta;
  if (c.kernel.torus_period) k["torus_period"] = *c.kernel.torus_period;
  k["face_dim"] = c.kernel.face_dim;
  k["k"] = c.kernel.k;
  k["domain"] = c.kernel.domain;
  k["center"] = c.kernel.center;
  k["half_width"] = c.kernel.half_width;
  j["kernel"] = k;
  json w;
  w["shape"] = to_name(kShapes, c.window.shape);
  w["dim"] = c.window.dim;
  w["extent"] = c.window.extent;
  w["center"] = c.window.center;
  j["window"] = w;
  json in;
  in["form"] = to_name(kForms, c.form);
  in["reference"] = to_name(kReferences, c.reference);
  if (c.marks) {
    if (const auto* cat = std::get_if<CategoricalMarks>(&*c.marks)) {
      in["marks"] = {{"type", "categorical"}, {"weights", cat->weights}};
    } else {
      const auto& u = std::get<UniformMarks>(*c.marks);
      in["marks"] = {{"type", "uniform"}, {"lo", u.lo}, {"hi", u.hi}};
    }
  }
  j["intensity"] = in;
  j["schedule"] = {{"t", c.t}, {"v_t", c.v_t}, {"alpha", c.alpha}};
  j["replicates"] = c.replicates;
  j["mc_samples"] = c.mc_samples;
  j["inner_samples"] = c.inner_samples;
  j["seed"] = c.seed;
  j["mode"] = c.mode;
  j["theory"] = c.theory;
  j["bounds"] = c.bounds;
  j["plot"] = c.plot;
  j["abort_on_instability"] = c.abort_on_instability;
  j["u_grid"] = c.u_grid;
  return j;
}

}  // namespace

std::string canonical_json(const ExperimentConfig& config) {
  return config_to_json(config).dump();
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_json(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Running ---------------------------------------------------------------------

namespace {

Window make_window(const WindowConfig& w, double t) {
  switch (w.shape) {
    case WindowShape::growing_box:
      return Window::growing_box(w.dim, t);
    case WindowShape::ball:
      return Window::ball(w.dim, w.extent);
    case WindowShape::box:
      break;
  }
  if (w.center.empty()) return Window::box(w.dim, w.extent);
  return Window::box(w.dim, w.extent, w.center);
}

Kernel build_kernel(const ExperimentConfig& c, const Window& window) {
  const KernelConfig& k = c.kernel;
  try {
    if (k.family == "gilbert") return make_kernel(GilbertSpec{k.delta, k.torus_period});
    if (k.family == "rips") return make_kernel(RipsSpec{k.face_dim, k.delta});
    if (k.family == "sylvester") return make_kernel(SylvesterSpec{k.k});
    if (k.family == "line_intersection") {
      return make_kernel(LineIntersectionSpec{window.extent()});
    }
    if (k.family == "proximity") return make_kernel(ProximitySpec{k.delta, window.extent()});
    if (k.family == "constant") {
      return make_kernel(ConstantSpec{
          k.k, k.domain == "flats" ? Domain::flats : Domain::points});
    }
    if (k.family == "product_degenerate") {
      return make_kernel(centered_linear_product(k.center, k.half_width));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("kernel", e.what());
  }
  throw ConfigError("kernel.family", "unknown kernel family '" + k.family + "'");
}

// Runs body(r) for r in [0, n) on `workers` threads over contiguous blocks.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  const std::size_t w = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, std::max<std::size_t>(n, 1));
  if (w == 1) {
    for (std::size_t r = 0; r < n; ++r) body(r);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(w);
  for (std::size_t i = 0; i < w; ++i) {
    const std::size_t lo = n * i / w;
    const std::size_t hi = n * (i + 1) / w;
    threads.emplace_back([&, i, lo, hi] {
      try {
        for (std::size_t r = lo; r < hi; ++r) body(r);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void check_stable(const Estimate& e, const ExperimentConfig& c, const std::string& what) {
  if (e.unstable && c.abort_on_instability) {
    throw NumericalInstability(what + " failed the Monte Carlo stability check");
  }
}

struct ReplicateValue {
  double u = 0.0;
  double local_max = 0.0;
  double residual = 0.0;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, int workers) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.config = config;
  result.config_hash = config_hash(config);
  const bool flats_reference = config.reference != ReferenceMeasure::lebesgue_on_window;

  for (std::size_t i = 0; i < config.t.size(); ++i) {
    const double t = config.t[i];
    const Window window = make_window(config.window, t);
    IntensitySpec spec;
    spec.form = config.form;
    spec.t = t;
    spec.marks = config.marks;
    spec.reference = config.reference;
    Kernel kernel = build_kernel(config, window);
    const bool on_flats = kernel.domain() == Domain::flats;
    if (on_flats != flats_reference) {
      throw ConfigError("intensity.reference",
                        "reference measure does not match the kernel domain");
    }
    double alpha = 1.0;
    if (!config.alpha.empty()) {
      alpha = config.alpha[i];
    } else if (!config.v_t.empty() && !on_flats) {
      alpha = std::pow(config.v_t[i], -1.0 / config.window.dim);
    }
    if (alpha != 1.0) {
      if (on_flats) throw ConfigError("schedule.alpha", "flat kernels cannot be rescaled");
      kernel = rescale(kernel, alpha);
    }
    EvalMode mode = preferred_mode(kernel);
    if (config.mode == "naive") mode = EvalMode::naive;
    if (config.mode == "grid") {
      if (!kernel.locality_radius() || on_flats) {
        throw ConfigError("mode", "grid mode needs a local point kernel");
      }
      mode = EvalMode::grid;
    }

    std::optional<PartialFn> closed_form;
    if (config.kind == ExperimentKind::chaos_identity) {
      if (on_flats) throw ConfigError("kernel.domain", "chaos_identity needs points");
      if (config.kernel.family == "constant") {
        closed_form = analytic::constant(kernel.order(), spec.total_mass(window));
      } else if (config.kernel.family == "gilbert" && config.kernel.torus_period &&
                 alpha == 1.0) {
        const double period = *config.kernel.torus_period;
        const Window torus = Window::box(1, period / 2, {period / 2});
        if (!(window == torus) || config.form != IntensityForm::scaled) {
          throw ConfigError("window",
                            "torus gilbert needs the scaled form on a 1D box [0, torus_period]");
        }
        closed_form = analytic::torus_gilbert(config.kernel.delta, period, t);
      } else {
        throw ConfigError("kernel.family",
                          "chaos_identity needs a closed form: constant, or gilbert "
                          "with torus_period");
      }
    }

    const std::uint64_t stream_seed = mix64(config.seed ^ mix64(i + 1));
    std::vector<ReplicateValue> values(config.replicates);
    std::vector<ChaosKernel> closed_kernels;
    if (closed_form) {
      const PointMeasure measure(spec, window);
      for (int n = 0; n <= kernel.order(); ++n) {
        closed_kernels.emplace_back(kernel, n, measure, ClosedForm{*closed_form});
      }
    }
    parallel_for(config.replicates, workers, [&](std::size_t r) {
      ReplicateValue v;
      if (on_flats) {
        const auto report = evaluate(kernel, sample_flats(spec, window, stream_seed, r));
        v.u = report.value;
        v.local_max = report.local_max.value_or(0.0);
      } else {
        const auto config_r = sample_points(spec, window, stream_seed, r);
        const auto report = evaluate(kernel, config_r, mode);
        v.u = report.value;
        v.local_max = report.local_max.value_or(0.0);
        if (closed_form) {
          double chaos_sum = 0.0;
          for (const auto& h : closed_kernels) chaos_sum += multiple_integral(h, config_r);
          v.residual = std::abs(v.u - chaos_sum);
        }
      }
      values[r] = v;
    });

    std::vector<double> u(values.size());
    for (std::size_t r = 0; r < values.size(); ++r) u[r] = values[r].u;

    ResultRow row;
    row.kind = kind_name(config.kind);
    row.t = t;
    if (!config.v_t.empty()) row.v_t = config.v_t[i];
    row.replicates = config.replicates;
    row.seed = config.seed;
    row.emp_mean = sample_mean(u);
    if (u.size() >= 3) {
      const SampleSummary s = summarize(u);
      row.emp_mean_se = s.mean.se;
      row.emp_var = s.variance.value;
      row.emp_var_se = s.variance.se;
    } else if (u.size() == 2) {
      row.emp_var = sample_variance(u);
    }

    const std::uint64_t theory_seed = mix64(stream_seed ^ 0x7468656f7279ULL);
    const bool wants_theory = config.theory && config.kind != ExperimentKind::chaos_identity &&
                              config.kind != ExperimentKind::concentration;
    std::optional<ChaosVariance> chaos_var;
    if (wants_theory && spec.total_mass(window) > 0.0) {
      const Estimate mean =
          mecke_expectation(kernel, spec, window, config.mc_samples, theory_seed);
      check_stable(mean, config, "theory_mean");
      row.theory_mean = mean.value;
      if (!on_flats) {
        chaos_var = variance_chaos(kernel, PointMeasure(spec, window),
                                   MonteCarlo{config.inner_samples, theory_seed + 1},
                                   config.mc_samples, theory_seed + 2);
        check_stable(chaos_var->total, config, "theory_var");
        row.theory_var = chaos_var->total.value;
      }
    }

    const bool distribution_columns = config.kind == ExperimentKind::moments ||
                                      config.kind == ExperimentKind::clt_rate ||
                                      config.kind == ExperimentKind::regimes ||
                                      config.kind == ExperimentKind::fourth_moment;
    if (distribution_columns && row.emp_var && *row.emp_var > 0.0) {
      const bool analytic = row.theory_mean && row.theory_var && *row.theory_var > 0.0;
      const auto z = analytic ? standardize(u, Centering::analytic, *row.theory_mean,
                                            *row.theory_var)
                              : standardize(u);
      row.ks = kolmogorov_distance_normal(z);
      row.w1 = wasserstein1_distance_normal(z);
      if (u.size() >= 100) row.fourth_gap = fourth_moment_gap(u).value;
    }

    if (config.bounds && chaos_var && chaos_var->total.value > 0.0) {
      const PointMeasure measure(spec, window);
      const double inv_sigma = 1.0 / std::sqrt(chaos_var->total.value);
      std::vector<Function> hs;
      for (const auto& h :
           chaos_kernels(kernel, measure, MonteCarlo{config.inner_samples, theory_seed + 3})) {
        hs.push_back(h.function().scaled(inv_sigma));
      }
      BoundOptions options;
      options.mc_samples = config.mc_samples;
      options.seed = theory_seed + 4;
      const BoundReport b = clt_bounds(hs, measure, options);
      if (b.unstable && config.abort_on_instability) {
        throw NumericalInstability("B(F) terms failed the Monte Carlo stability check");
      }
      row.B = b.B;
      row.B_prime = b.B_prime;
    }

    if (config.v_t.size() >= 3) {
      const auto pred = predict_regime(kernel.order(), config.t, config.v_t);
      row.regime = regime_name(pred[i].regime);
    }

    if (config.kind == ExperimentKind::concentration) {
      double B = 0.0;
      for (const auto& v : values) B = std::max(B, v.local_max);
      const double median = sample_median(u);
      if (!(median > 0.0) || !(B > 0.0)) {
        throw ConfigError("kind", "concentration needs a positive median and local sum");
      }
      std::vector<double> grid = config.u_grid;
      if (grid.empty()) {
        const double sd = std::sqrt(row.emp_var.value_or(0.0));
        for (int g = 1; g <= 20; ++g) grid.push_back(std::max(sd, 1.0) * 0.25 * g);
      }
      const int k = kernel.order();
      const LDIReport report = empirical_tail_check(
          u, grid, [&](double uu, double m) { return BoundValue{ldi_general(uu, m, B, k, 0.0), true}; });
      row.bound_violations = report.violations;
    }
    if (config.kind == ExperimentKind::chaos_identity) {
      std::int64_t bad = 0;
      for (const auto& v : values) bad += v.residual > 1e-9 ? 1 : 0;
      row.bound_violations = bad;
    }

    result.rows.push_back(row);
    result.samples.push_back(std::move(u));
  }
  result.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

// Output ----------------------------------------------------------------------

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns = {
      "kind",     "t",         "v_t",         "replicates", "seed",
      "emp_mean", "emp_mean_se", "emp_var",   "emp_var_se", "theory_mean",
      "theory_var", "ks",      "w1",          "fourth_gap", "B",
      "B_prime",  "regime",    "bound_violations"};
  return columns;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? fmt_number(*v) : ""; }

std::vector<std::optional<double>*> numeric_fields(ResultRow& r) {
  return {&r.emp_mean, &r.emp_mean_se, &r.emp_var, &r.emp_var_se, &r.theory_mean,
          &r.theory_var, &r.ks, &r.w1, &r.fourth_gap, &r.B, &r.B_prime};
}

}  // namespace

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (ResultRow r : rows) {
    out += r.kind + ',' + fmt_number(r.t) + ',' + cell(r.v_t) + ',' +
           std::to_string(r.replicates) + ',' + std::to_string(r.seed);
    for (auto* f : numeric_fields(r)) out += ',' + cell(*f);
    out += ',' + r.regime + ',' +
           (r.bound_violations ? std::to_string(*r.bound_violations) : "");
    out += '\n';
  }
  return out;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) return {};
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string c;
    std::istringstream ls(line);
    while (std::getline(ls, c, ',')) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != csv_columns().size()) {
      throw std::runtime_error("CSV row has " + std::to_string(cells.size()) +
                               " cells, expected " + std::to_string(csv_columns().size()));
    }
    auto num = [](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return std::stod(s);
    };
    ResultRow r;
    r.kind = cells[0];
    r.t = std::stod(cells[1]);
    r.v_t = num(cells[2]);
    r.replicates = std::stoull(cells[3]);
    r.seed = std::stoull(cells[4]);
    auto fields = numeric_fields(r);
    for (std::size_t i = 0; i < fields.size(); ++i) *fields[i] = num(cells[5 + i]);
    r.regime = cells[16];
    if (!cells[17].empty()) r.bound_violations = std::stoll(cells[17]);
    rows.push_back(r);
  }
  return rows;
}

std::string to_jsonl(const std::vector<ResultRow>& rows) {
  std::string out;
  for (ResultRow r : rows) {
    nlohmann::ordered_json j;
    auto opt = [](const std::optional<double>& v) -> nlohmann::ordered_json {
      return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    j["kind"] = r.kind;
    j["t"] = r.t;
    j["v_t"] = opt(r.v_t);
    j["replicates"] = r.replicates;
    j["seed"] = r.seed;
    const auto& cols = csv_columns();
    auto fields = numeric_fields(r);
    for (std::size_t i = 0; i < fields.size(); ++i) j[cols[5 + i]] = opt(*fields[i]);
    j["regime"] = r.regime;
    j["bound_violations"] = r.bound_violations
                                ? nlohmann::ordered_json(*r.bound_violations)
                                : nlohmann::ordered_json(nullptr);
    out += j.dump() + '\n';
  }
  return out;
}

std::vector<ResultRow> parse_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    auto opt = [&](const char* key) -> std::optional<double> {
      if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
      return j.at(key).get<double>();
    };
    ResultRow r;
    r.kind = j.at("kind").get<std::string>();
    r.t = j.at("t").get<double>();
    r.v_t = opt("v_t");
    r.replicates = j.at("replicates").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    const auto& cols = csv_columns();
    auto fields = numeric_fields(r);
    for (std::size_t i = 0; i < fields.size(); ++i) *fields[i] = opt(cols[5 + i].c_str());
    r.regime = j.at("regime").get<std::string>();
    if (!j.at("bound_violations").is_null()) {
      r.bound_violations = j.at("bound_violations").get<std::int64_t>();
    }
    rows.push_back(r);
  }
  return rows;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string svg_chart(const std::vector<ResultRow>& rows) {
  struct Series {
    const char* name;
    const char* colour;
    std::vector<std::pair<double, double>> points;
  };
  std::vector<Series> series = {{"emp_var", "#1f77b4", {}},
                                {"theory_var", "#2ca02c", {}},
                                {"ks", "#d62728", {}},
                                {"w1", "#9467bd", {}}};
  for (ResultRow r : rows) {
    const std::optional<double> values[] = {r.emp_var, r.theory_var, r.ks, r.w1};
    for (std::size_t s = 0; s < series.size(); ++s) {
      if (values[s] && *values[s] > 0.0 && r.t > 0.0) {
        series[s].points.emplace_back(std::log10(r.t), std::log10(*values[s]));
      }
    }
  }
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) y1 = y0 + 1.0;
  const double W = 640, H = 400, M = 50;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << M << "\" y=\"20\" font-size=\"12\">log10 value vs log10 t</text>\n";
  int legend = 0;
  for (const auto& s : series) {
    if (s.points.empty()) continue;
    svg << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" points=\"";
    for (auto [x, y] : s.points) {
      svg << M + (x - x0) / (x1 - x0) * (W - 2 * M) << ','
          << H - M - (y - y0) / (y1 - y0) * (H - 2 * M) << ' ';
    }
    svg << "\"/>\n<text x=\"" << W - M - 80 << "\" y=\"" << 40 + 15 * legend++
        << "\" font-size=\"11\" fill=\"" << s.colour << "\">" << s.name << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

void write_results(const ExperimentResult& result, const std::filesystem::path& dir,
                   OutputFormat format, bool plot_data) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  if (format == OutputFormat::csv) {
    write_file(dir / "results.csv", to_csv(result.rows));
  } else {
    write_file(dir / "results.jsonl", to_jsonl(result.rows));
  }
  json meta;
  meta["config"] = config_to_json(result.config);
  meta["config_hash"] = result.config_hash;
  meta["seed"] = result.config.seed;
  meta["wall_clock_seconds"] = result.wall_clock_seconds;
  meta["reference_normalization"] = describe_normalization(result.config.reference);
  meta["columns"] = csv_columns();
  write_file(dir / "meta.json", meta.dump(2) + '\n');
  if (!plot_data) return;
  for (const char* column : {"emp_mean", "emp_var", "theory_var", "ks", "w1", "fourth_gap"}) {
    std::string data = "# t " + std::string(column) + '\n';
    const auto& cols = csv_columns();
    const auto idx = static_cast<std::size_t>(
        std::find(cols.begin(), cols.end(), column) - cols.begin() - 5);
    for (ResultRow r : result.rows) {
      const auto& v = *numeric_fields(r)[idx];
      if (v) data += fmt_number(r.t) + ' ' + fmt_number(*v) + '\n';
    }
    write_file(dir / (std::string("series_") + column + ".dat"), data);
  }
  write_file(dir / "rates.svg", svg_chart(result.rows));
}

std::string report_summary(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << rows.size() << " rows\n";
  std::vector<double> t, var, ks;
  for (const auto& r : rows) {
    out << "  " << r.kind << " t=" << fmt_number(r.t);
    if (r.emp_mean) out << " mean=" << fmt_number(*r.emp_mean);
    if (r.emp_var) out << " var=" << fmt_number(*r.emp_var);
    if (r.theory_var) out << " theory_var=" << fmt_number(*r.theory_var);
    if (r.ks) out << " ks=" << fmt_number(*r.ks);
    if (!r.regime.empty()) out << " regime=" << r.regime;
    if (r.bound_violations) out << " violations=" << *r.bound_violations;
    out << '\n';
    if (r.t > 0.0 && r.emp_var && *r.emp_var > 0.0 && r.ks && *r.ks > 0.0) {
      t.push_back(r.t);
      var.push_back(*r.emp_var);
      ks.push_back(*r.ks);
    }
  }
  if (t.size() >= 3) {
    const PowerLawFit fv = fit_power_law(t, var);
    const PowerLawFit fk = fit_power_law(t, ks);
    out << "variance slope " << fmt_number(fv.slope) << " [" << fmt_number(fv.slope_lo)
        << ", " << fmt_number(fv.slope_hi) << "]\n";
    out << "KS slope " << fmt_number(fk.slope) << " [" << fmt_number(fk.slope_lo) << ", "
        << fmt_number(fk.slope_hi) << "]\n";
  }
  return out.str();
}

}  // namespace pustat
