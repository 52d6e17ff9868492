#include "tdas/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "tdas/calib.hpp"
#include "tdas/error.hpp"
#include "tdas/filters.hpp"
#include "tdas/sampler.hpp"
#include "tdas/scores.hpp"
#include "tdas/synthdata.hpp"
#include "tdas/tensor_io.hpp"
#include "tdas/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tdas::cli {

namespace {

constexpr const char* kManifestName = "run_manifest.json";

struct Common {
  std::string out;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

struct Ladder {
  double sigma_max = 0.0;
  double sigma_min = 0.01;
  std::size_t levels = 10;
  std::size_t iterations = 2000;
  double eps0 = 2e-5;
  double accel = 1.0;
};

struct MakeDataArgs {
  std::string kind = "low_freq_blobs";
  std::size_t count = 100;
  std::vector<std::size_t> shape{1, 32, 32};
  double decay = 2.0;
  double amplitude = 0.15;
};

struct SampleArgs {
  bool vanilla = false;
  bool tdas = false;
  std::string model = "empirical";
  std::string data;
  std::vector<std::size_t> shape{1, 32, 32};
  double gaussian_mean = 0.0;
  double gaussian_std = 1.0;
  Ladder ladder;
  bool denoise = false;
  std::size_t count = 100;
  std::string filter;
  bool space_mask = false;
  std::string transform = "dct";
  bool export_images = false;
};

struct CalibrateArgs {
  std::string reference;
  std::string generated;
  std::string direction = "sgm";
  std::string transform = "dct";
  double floor = kDefaultPowerFloor;
};

struct StatsArgs {
  std::string samples;
  std::string transform = "dct";
};

struct ValidateArgs {
  bool theorem1 = false;
  bool theorem2 = false;
  bool metrics = false;
  std::vector<std::size_t> shape;
  // theorem1
  std::size_t steps = 100;
  std::string map = "dct";
  double tolerance = 1e-6;
  double gaussian_std = 0.5;
  Ladder ladder{1.0, 0.01, 10, 100, 2e-5, 1.0};
  // theorem2
  double eps = 0.01;
  std::size_t draws = 100000;
  double sigma = 0.0;
  // metrics
  std::string reference;
  std::vector<std::string> samples;
  std::size_t projections = 64;
  std::string transform = "dct";
};

struct BenchArgs {
  bool filter_overhead = false;
  std::vector<std::size_t> sizes{256, 1024};
  std::size_t channels = 3;
  std::size_t runs = 10;
  std::string transform = "dct";
};

Shape to_shape(const std::vector<std::size_t>& v) {
  if (v.size() != 3) throw DomainError("shape needs three values C,H,W");
  Shape s{v[0], v[1], v[2]};
  require_valid(s);
  return s;
}

// Wall time per named phase, in seconds.
class Phases {
 public:
  template <class F>
  auto run(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record(name, t0);
    } else {
      auto r = f();
      record(name, t0);
      return r;
    }
  }
  const json& doc() const { return doc_; }

 private:
  void record(const std::string& name, std::chrono::steady_clock::time_point t0) {
    doc_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  json doc_ = json::object();
};

// Resolved value of every option except help and --config, as strings, so the
// object can be fed back through --config.
json echo_options(const CLI::App& app) {
  json cfg = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    if (opt->get_expected_max() == 0) {
      cfg[name] = opt->count() > 0;
      continue;
    }
    if (opt->count() > 0) {
      const auto& r = opt->results();
      if (r.size() == 1)
        cfg[name] = r.front();
      else
        cfg[name] = r;
    } else {
      const std::string d = opt->get_default_str();
      if (d.empty()) continue;
      if (d.front() == '[' && d.back() == ']') {
        json list = json::array();
        std::string item;
        for (char c : d.substr(1, d.size() - 2)) {
          if (c == ',') {
            list.push_back(item);
            item.clear();
          } else {
            item += c;
          }
        }
        list.push_back(item);
        cfg[name] = list;
      } else {
        cfg[name] = d;
      }
    }
  }
  return cfg;
}

void write_manifest(const fs::path& dir, const std::string& command, const CLI::App& sub, std::uint64_t seed,
                    const Phases& phases, const std::vector<std::string>& outputs, const json& result,
                    const std::vector<std::string>& argv) {
  json doc{{"command", command},
           {"version", kVersion},
           {"seed", seed},
           {"argv", argv},
           {"config", echo_options(sub)},
           {"timings", phases.doc()},
           {"outputs", outputs},
           {"result", result}};
  fs::create_directories(dir);
  write_json(doc, dir / kManifestName);
}

void write_csv(const fs::path& path, const std::string& header, const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(17);
  out << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

// Largest pairwise distance, the usual choice for the first noise level.
double max_pairwise_distance(const ImageDataset& ds) {
  double best = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t j = i + 1; j < ds.size(); ++j) best = std::max(best, norm(ds[i] - ds[j]));
  return best;
}

SamplerConfig make_sampler_config(const Ladder& l, double sigma_max) {
  if (l.levels == 0 || l.iterations == 0 || l.iterations % l.levels != 0)
    throw DomainError("--iterations (" + std::to_string(l.iterations) + ") must be a positive multiple of --levels (" +
                      std::to_string(l.levels) + ")");
  SamplerConfig cfg;
  cfg.levels = geometric_levels(sigma_max, l.sigma_min, l.levels, l.iterations / l.levels);
  cfg.eps0 = l.eps0;
  cfg.accel_factor = l.accel;
  cfg.validate();
  return cfg;
}

void add_ladder(CLI::App* sub, Ladder& l, bool auto_sigma) {
  sub->add_option("--sigma-max", l.sigma_max,
                  auto_sigma ? "Largest noise level (0 = largest pairwise distance in the data)"
                             : "Largest noise level")
      ->capture_default_str();
  sub->add_option("--sigma-min", l.sigma_min, "Smallest noise level")->capture_default_str();
  sub->add_option("--levels", l.levels, "Number of noise levels")->capture_default_str();
  sub->add_option("--iterations", l.iterations, "Total Langevin iterations (multiple of --levels)")
      ->capture_default_str();
  sub->add_option("--eps0", l.eps0, "Step size at the smallest level")->capture_default_str();
  sub->add_option("--accel", l.accel, "Step-size multiplier")->capture_default_str();
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "Output directory")->required();
  sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  sub->add_option("--config", "JSON config (or a previous run_manifest.json); flags take precedence");
}

// ---- commands ---------------------------------------------------------------

struct Outcome {
  std::vector<std::string> outputs;
  json result = json::object();
  // Set when a harness ran but missed its tolerance (exit code 2).
  std::string failure;
};

Outcome cmd_make_data(const MakeDataArgs& a, const Common& c, Phases& ph, std::ostream& out) {
  SynthSpec spec;
  spec.kind = parse_synth_kind(a.kind);
  spec.count = a.count;
  spec.shape = to_shape(a.shape);
  spec.spectral_decay = a.decay;
  spec.amplitude = a.amplitude;
  spec.seed = derive_seed(c.seed, "make-data");
  const ImageDataset ds = ph.run("generate", [&] { return generate(spec); });
  ph.run("write", [&] { save_dataset(ds, c.out, spec.to_json()); });
  out << "wrote " << ds.size() << " " << a.kind << " items to " << c.out << "\n";
  Outcome o;
  o.outputs = {"manifest.json"};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "item_%05zu.tdt", i);
    o.outputs.push_back(name);
  }
  o.result = {{"spec", spec.to_json()}};
  return o;
}

Outcome cmd_sample(const SampleArgs& a, const Common& c, Phases& ph, std::ostream& out) {
  if (a.vanilla == a.tdas) throw DomainError("sample needs exactly one of --vanilla, --tdas");
  std::unique_ptr<ScoreModel> model;
  std::optional<ImageDataset> data;
  double sigma_max = a.ladder.sigma_max;
  if (a.model == "empirical") {
    if (a.data.empty()) throw DomainError("--model empirical needs --data DIR");
    data = ph.run("load", [&] { return load_dataset(a.data); });
    if (sigma_max <= 0.0) sigma_max = max_pairwise_distance(*data);
    model = std::make_unique<EmpiricalScore>(*data);
  } else if (a.model == "gaussian") {
    const Shape s = to_shape(a.shape);
    if (sigma_max <= 0.0) sigma_max = a.gaussian_std * std::sqrt(2.0 * static_cast<double>(s.size()));
    model = std::make_unique<GaussianScore>(Tensor(s, a.gaussian_mean), a.gaussian_std);
  } else {
    throw DomainError("unknown --model '" + a.model + "' (expected empirical or gaussian)");
  }
  SamplerConfig cfg = make_sampler_config(a.ladder, sigma_max);
  cfg.denoise_final = a.denoise;
  const Shape shape = model->shape();

  std::optional<TdasFilter> filter;
  json filter_doc = nullptr;
  if (a.tdas) {
    TransformKind kind = parse_transform(a.transform);
    Tensor freq = Tensor::ones(shape);
    if (!a.filter.empty()) {
      const FreqFilterParams p = FreqFilterParams::from_json(read_json(a.filter));
      kind = p.transform;
      freq = build_freq_mask(p, shape);
      filter_doc = p.to_json();
    }
    SpaceFilter space = identity_space_mask(shape);
    if (a.space_mask) {
      if (!data) throw DomainError("--space-mask needs the empirical model's --data");
      space = build_space_mask(*data);
    }
    filter.emplace(std::move(space), std::move(freq), kind);
  }

  const ImageDataset samples = ph.run("sample", [&] {
    return sample_batch(*model, cfg, filter ? &*filter : nullptr, derive_seed(c.seed, "sample"), a.count, c.jobs);
  });
  json meta{{"sampler", a.tdas ? "tdas" : "vanilla"},
            {"iterations", cfg.total_iterations()},
            {"accel", cfg.accel_factor},
            {"sigma_max", sigma_max},
            {"filter", filter_doc}};
  Outcome o;
  ph.run("write", [&] {
    save_dataset(samples, c.out, meta);
    o.outputs.push_back("manifest.json");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      char name[40];
      std::snprintf(name, sizeof name, "item_%05zu.tdt", i);
      o.outputs.push_back(name);
      if (a.export_images) {
        std::snprintf(name, sizeof name, "item_%05zu.%s", i, shape.channels == 3 ? "ppm" : "pgm");
        export_image(samples[i], fs::path(c.out) / name);
        o.outputs.push_back(name);
      }
    }
  });
  out << "wrote " << samples.size() << " " << (a.tdas ? "tdas" : "vanilla") << " samples (T=" << cfg.total_iterations()
      << ") to " << c.out << "\n";
  o.result = meta;
  return o;
}

Outcome cmd_calibrate(const CalibrateArgs& a, const Common& c, Phases& ph, std::ostream& out, std::ostream& err) {
  const TransformKind kind = parse_transform(a.transform);
  const CalibrationDirection dir = parse_direction(a.direction);
  const ImageDataset ref = ph.run("load_reference", [&] { return load_dataset(a.reference); });
  const ImageDataset gen = ph.run("load_generated", [&] { return load_dataset(a.generated); });
  require_same(ref.shape(), gen.shape(), "calibrate: reference and generated datasets");
  const RatioGrid grid = ph.run("statistics", [&] {
    return ratio_grid(freq_power_stats(gen, kind), freq_power_stats(ref, kind), a.floor);
  });
  if (grid.clamped_cells > 0)
    err << "warning: " << grid.clamped_cells << " reference power cells below " << a.floor << " were clamped\n";
  fs::create_directories(c.out);
  const fs::path dir_out(c.out);
  save_tensor(grid.gamma, dir_out / "gamma.tdt");
  auto curve_rows = [](const std::vector<KappaPoint>& curve) {
    std::vector<std::vector<double>> rows;
    for (const KappaPoint& p : curve) rows.push_back({p.r, p.kappa});
    return rows;
  };
  Calibration cal;
  try {
    cal = ph.run("calibrate", [&] { return calc_freq_params(grid, dir, kind); });
  } catch (const CalibrationError& e) {
    write_csv(dir_out / "kappa.csv", "r,kappa", curve_rows(e.curve()));
    throw;
  }
  write_csv(dir_out / "kappa.csv", "r,kappa", curve_rows(cal.curve));
  write_json(cal.params.to_json(), dir_out / "params.json");
  out << "lambda1=" << cal.params.lambda1 << " lambda2=" << cal.params.lambda2 << " r1=" << cal.params.r1
      << " r2=" << cal.params.r2 << "\n";
  Outcome o;
  o.outputs = {"params.json", "kappa.csv", "gamma.tdt"};
  o.result = {{"params", cal.params.to_json()},
              {"average", cal.average},
              {"q_mid", cal.q_mid},
              {"q_high", cal.q_high},
              {"clamped_cells", grid.clamped_cells},
              {"floor", a.floor},
              {"direction", to_string(dir)}};
  return o;
}

Outcome cmd_stats(const StatsArgs& a, const Common& c, Phases& ph, std::ostream& out) {
  const TransformKind kind = parse_transform(a.transform);
  const ImageDataset ds = ph.run("load", [&] { return load_dataset(a.samples); });
  const FreqStats st = ph.run("statistics", [&] { return freq_power_stats(ds, kind); });
  fs::create_directories(c.out);
  save_tensor(st.power, fs::path(c.out) / "power.tdt");
  std::vector<std::vector<double>> rows;
  for (const RadialBin& b : radial_profile(st))
    rows.push_back({b.radius, b.power, static_cast<double>(b.cells)});
  write_csv(fs::path(c.out) / "radial.csv", "radius,power,cells", rows);
  out << "wrote power statistics of " << ds.size() << " samples to " << c.out << "\n";
  Outcome o;
  o.outputs = {"power.tdt", "radial.csv"};
  o.result = {{"sample_count", st.sample_count}, {"transform", to_string(kind)}};
  return o;
}

Outcome cmd_validate(const ValidateArgs& a, const Common& c, Phases& ph, std::ostream& out) {
  if (int(a.theorem1) + int(a.theorem2) + int(a.metrics) != 1)
    throw DomainError("validate needs exactly one of --theorem1, --theorem2, --metrics");
  Outcome o;
  json report;
  bool pass = true;
  if (a.theorem1) {
    const Shape s = to_shape(a.shape.empty() ? std::vector<std::size_t>{1, 16, 16} : a.shape);
    NoiseSource model_src(derive_seed(c.seed, "model"));
    const GaussianScore model(draw_normal(model_src, s), a.gaussian_std);
    const SamplerConfig cfg = make_sampler_config(a.ladder, a.ladder.sigma_max);
    std::unique_ptr<OrthogonalMap> map;
    if (a.map == "dct")
      map = std::make_unique<DctMap>();
    else if (a.map == "permutation")
      map = std::make_unique<PermutationMap>(s, derive_seed(c.seed, "permutation"));
    else
      throw DomainError("unknown --map '" + a.map + "' (expected dct or permutation)");
    const Theorem1Report r =
        ph.run("theorem1", [&] { return check_theorem1(model, cfg, derive_seed(c.seed, "theorem1"), a.steps, *map); });
    pass = r.max_deviation <= a.tolerance;
    report = r.to_json();
    report["tolerance"] = a.tolerance;
    report["pass"] = pass;
    out << "theorem1 map=" << r.map << " steps=" << r.steps << " max_deviation=" << r.max_deviation
        << (pass ? " pass" : " FAIL") << "\n";
  } else if (a.theorem2) {
    const Shape s = to_shape(a.shape.empty() ? std::vector<std::size_t>{1, 4, 4} : a.shape);
    const GaussianScore model(Tensor(s), 1.0);
    const Tensor x_t(s);
    const std::uint64_t seed = derive_seed(c.seed, "theorem2");
    const auto regimes = ph.run("theorem2", [&] {
      return std::vector<DeviationReport>{
          check_theorem2(model, a.sigma, x_t, independent_noise(), a.eps, a.draws, seed),
          check_theorem2(model, a.sigma, x_t, aligned_noise(), a.eps, a.draws, seed),
          check_theorem2(model, a.sigma, x_t, anti_aligned_noise(), a.eps, a.draws, seed)};
    });
    const char* names[] = {"independent", "aligned", "anti_aligned"};
    report = {{"harness", "theorem2"}, {"eps", a.eps}, {"draws", a.draws}};
    for (std::size_t i = 0; i < 3; ++i) {
      report[names[i]] = regimes[i].to_json();
      pass = pass && regimes[i].consistent();
    }
    const PairedEstimate gap = aligned_gap_residual(regimes[0], regimes[1]);
    const bool gap_ok = std::abs(gap.mean) <= 4.0 * gap.standard_error;
    report["aligned_gap_residual"] = {{"mean", gap.mean}, {"standard_error", gap.standard_error}, {"pass", gap_ok}};
    pass = pass && gap_ok;
    report["pass"] = pass;
    out << "theorem2 draws=" << a.draws << (pass ? " pass" : " FAIL") << "\n";
  } else {
    if (a.reference.empty() || a.samples.empty()) throw DomainError("--metrics needs --reference and --samples");
    const TransformKind kind = parse_transform(a.transform);
    const ImageDataset ref = ph.run("load", [&] { return load_dataset(a.reference); });
    report = {{"harness", "metrics"}, {"reference", a.reference}, {"projections", a.projections}};
    json rows = json::array();
    for (const std::string& dir : a.samples) {
      const ImageDataset ds = load_dataset(dir);
      const double sd = spectral_deviation(ds, ref, kind);
      const double sw = sliced_wasserstein(ds, ref, a.projections, derive_seed(c.seed, "projections"));
      rows.push_back({{"samples", dir}, {"spectral_deviation", sd}, {"sliced_wasserstein", sw}});
      out << dir << " spectral_deviation=" << sd << " sliced_wasserstein=" << sw << "\n";
    }
    report["results"] = rows;
  }
  fs::create_directories(c.out);
  write_json(report, fs::path(c.out) / "report.json");
  o.outputs = {"report.json"};
  o.result = report;
  if (!pass) o.failure = "harness outside tolerance, see " + (fs::path(c.out) / "report.json").string();
  return o;
}

Outcome cmd_bench(const BenchArgs& a, const Common& c, Phases& ph, std::ostream& out) {
  if (!a.filter_overhead) throw DomainError("bench needs --filter-overhead");
  const auto rows = ph.run("bench", [&] {
    return bench_filter_overhead(a.sizes, a.channels, a.runs, parse_transform(a.transform), c.seed);
  });
  std::vector<std::vector<double>> csv;
  json result = json::array();
  for (const auto& r : rows) {
    csv.push_back({double(r.size), double(r.channels), double(r.runs), r.median_ms, r.min_ms, r.ratio});
    result.push_back({{"size", r.size}, {"median_ms", r.median_ms}, {"ratio", r.ratio}});
    out << r.channels << "x" << r.size << "x" << r.size << " median_ms=" << r.median_ms << " ratio=" << r.ratio << "\n";
  }
  fs::create_directories(c.out);
  write_csv(fs::path(c.out) / "bench.csv", "size,channels,runs,median_ms,min_ms,ratio", csv);
  Outcome o;
  o.outputs = {"bench.csv"};
  o.result = {{"rows", result}};
  return o;
}

// ---- argument handling ------------------------------------------------------

// Splices `--config FILE` into explicit flags for every key the command line
// does not already set. Keys become `--key`; arrays expand to several values;
// booleans toggle flags.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return args;
  json doc = read_json(path);
  if (doc.contains("command") && doc.contains("config")) doc = doc["config"];
  if (!doc.is_object()) throw FormatError(path + ": config must be a JSON object");
  std::set<std::string> given;
  for (const std::string& a : rest)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  for (const auto& [key, value] : doc.items()) {
    if (given.count(key) || value.is_null()) continue;
    auto scalar = [&](const json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_object() || v.is_array()) throw FormatError(path + ": nested value for '" + key + "'");
      return v.dump();
    };
    if (value.is_boolean()) {
      if (value.get<bool>()) rest.push_back("--" + key);
    } else if (value.is_array()) {
      rest.push_back("--" + key);
      for (const json& v : value) rest.push_back(scalar(v));
    } else {
      rest.push_back("--" + key);
      rest.push_back(scalar(value));
    }
  }
  return rest;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const FormatError*>(&e)) return "format";
  if (dynamic_cast<const ShapeError*>(&e)) return "shape";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const DegenerateError*>(&e)) return "degenerate";
  if (dynamic_cast<const DivergenceError*>(&e)) return "divergence";
  if (dynamic_cast<const CalibrationError*>(&e)) return "calibration";
  if (dynamic_cast<const Error*>(&e)) return "io";
  return "internal";
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Target-distribution-aware sampling toolkit", "tdas"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kVersion);
  app.failure_message([](const CLI::App*, const CLI::Error& e) { return "error: usage: " + one_line(e.what()) + "\n"; });

  Common common;
  MakeDataArgs md;
  SampleArgs sa;
  CalibrateArgs ca;
  StatsArgs st;
  ValidateArgs va;
  BenchArgs ba;

  auto* make_data = app.add_subcommand("make-data", "Generate a synthetic dataset");
  add_common(make_data, common);
  make_data->add_option("--kind", md.kind, "low_freq_blobs, face_like or unstructured")->capture_default_str();
  make_data->add_option("--count", md.count, "Number of items")->capture_default_str();
  make_data->add_option("--shape", md.shape, "C,H,W")->delimiter(',')->expected(3)->capture_default_str();
  make_data->add_option("--decay", md.decay, "Spectral decay exponent p")->capture_default_str();
  make_data->add_option("--amplitude", md.amplitude, "Pixel std of the random component")->capture_default_str();

  auto* sample = app.add_subcommand("sample", "Run the annealed Langevin sampler");
  add_common(sample, common);
  auto* f_vanilla = sample->add_flag("--vanilla", sa.vanilla, "Isotropic noise");
  auto* f_tdas = sample->add_flag("--tdas", sa.tdas, "Filter the initial state and every noise draw");
  f_vanilla->excludes(f_tdas);
  sample->add_option("--model", sa.model, "empirical (score of --data) or gaussian")->capture_default_str();
  sample->add_option("--data", sa.data, "Dataset directory for the empirical model");
  sample->add_option("--shape", sa.shape, "C,H,W for the gaussian model")->delimiter(',')->expected(3)->capture_default_str();
  sample->add_option("--gaussian-mean", sa.gaussian_mean, "Constant mean of the gaussian model")->capture_default_str();
  sample->add_option("--gaussian-std", sa.gaussian_std, "Std of the gaussian model")->capture_default_str();
  add_ladder(sample, sa.ladder, true);
  sample->add_flag("--denoise", sa.denoise, "Add one sigma_min^2 * score step at the end");
  sample->add_option("--count", sa.count, "Number of chains")->capture_default_str();
  sample->add_option("--jobs", common.jobs, "Worker threads (results do not depend on it)")->capture_default_str();
  sample->add_option("--filter", sa.filter, "Frequency filter parameter JSON (from calibrate)");
  sample->add_flag("--space-mask", sa.space_mask, "Build the space mask from --data");
  sample->add_option("--transform", sa.transform, "Transform when no --filter is given")->capture_default_str();
  sample->add_flag("--export-images", sa.export_images, "Also write PGM/PPM images, [0, 1] mapped to [0, 255]");

  auto* calibrate = app.add_subcommand("calibrate", "Fit frequency filter parameters from two sample sets");
  add_common(calibrate, common);
  calibrate->add_option("--reference", ca.reference, "Reference dataset directory")->required();
  calibrate->add_option("--generated", ca.generated, "Generated dataset directory")->required();
  calibrate->add_option("--direction", ca.direction, "sgm or ddpm")->capture_default_str();
  calibrate->add_option("--transform", ca.transform, "dct or dft")->capture_default_str();
  calibrate->add_option("--floor", ca.floor, "Reference power floor")->capture_default_str();

  auto* stats = app.add_subcommand("stats", "Spectral power statistics of a dataset");
  add_common(stats, common);
  stats->add_option("--samples", st.samples, "Dataset directory")->required();
  stats->add_option("--transform", st.transform, "dct or dft")->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Numerical harnesses and sample metrics");
  add_common(validate, common);
  validate->add_flag("--theorem1", va.theorem1, "Orthogonal invariance of the sampling loop");
  validate->add_flag("--theorem2", va.theorem2, "One-step deviation decomposition");
  validate->add_flag("--metrics", va.metrics, "Spectral deviation and sliced Wasserstein against --reference");
  validate->add_option("--shape", va.shape, "C,H,W (theorem harnesses)")->delimiter(',')->expected(3);
  validate->add_option("--steps", va.steps, "Theorem 1: iterations to compare")->capture_default_str();
  validate->add_option("--map", va.map, "Theorem 1: dct or permutation")->capture_default_str();
  validate->add_option("--tolerance", va.tolerance, "Theorem 1: allowed max deviation")->capture_default_str();
  validate->add_option("--gaussian-std", va.gaussian_std, "Theorem 1: target std")->capture_default_str();
  add_ladder(validate, va.ladder, false);
  validate->add_option("--eps", va.eps, "Theorem 2: step size")->capture_default_str();
  validate->add_option("--draws", va.draws, "Theorem 2: Monte-Carlo draws")->capture_default_str();
  validate->add_option("--sigma", va.sigma, "Theorem 2: noise level of the score")->capture_default_str();
  validate->add_option("--reference", va.reference, "Metrics: reference dataset directory");
  validate->add_option("--samples", va.samples, "Metrics: dataset directories to score");
  validate->add_option("--projections", va.projections, "Metrics: sliced Wasserstein projections")->capture_default_str();
  validate->add_option("--transform", va.transform, "Metrics: dct or dft")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Timing benchmarks");
  add_common(bench, common);
  bench->add_flag("--filter-overhead", ba.filter_overhead, "Time apply_tdas across sizes");
  bench->add_option("--sizes", ba.sizes, "Square sizes")->delimiter(',')->capture_default_str();
  bench->add_option("--channels", ba.channels, "Channels")->capture_default_str();
  bench->add_option("--runs", ba.runs, "Timed runs per size")->capture_default_str();
  bench->add_option("--transform", ba.transform, "dct or dft")->capture_default_str();

  try {
    const std::vector<std::string> expanded = expand_config(args);
    std::vector<const char*> argv{"tdas"};
    for (const auto& a : expanded) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kOk : kError;
    }

    Phases phases;
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    Outcome o;
    if (sub == make_data) o = cmd_make_data(md, common, phases, out);
    else if (sub == sample) o = cmd_sample(sa, common, phases, out);
    else if (sub == calibrate) o = cmd_calibrate(ca, common, phases, out, err);
    else if (sub == stats) o = cmd_stats(st, common, phases, out);
    else if (sub == validate) o = cmd_validate(va, common, phases, out);
    else o = cmd_bench(ba, common, phases, out);
    write_manifest(common.out, name, *sub, common.seed, phases, o.outputs, o.result, args);
    if (!o.failure.empty()) {
      err << "error: validation: " << one_line(o.failure) << "\n";
      return kValidationFailed;
    }
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << error_kind(e) << ": " << one_line(e.what()) << "\n";
    return kError;
  }
}

}  // namespace tdas::cli
