#include "sal/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sal {

std::string MethodSpec::name() const {
  return std::string(criterion_name(criterion)) + (use_oae ? "_oae" : "_raw");
}

MethodSpec MethodSpec::parse(const std::string& token) {
  const auto sep = token.find_first_of("+_");
  if (sep == std::string::npos)
    throw std::invalid_argument("method '" + token +
                                "' must look like 'qbc+oae' or 'rnd+raw'");
  MethodSpec spec;
  spec.criterion = parse_criterion(token.substr(0, sep));
  const std::string feat = token.substr(sep + 1);
  if (feat == "oae")
    spec.use_oae = true;
  else if (feat == "raw")
    spec.use_oae = false;
  else
    throw std::invalid_argument("method '" + token +
                                "' must end in 'oae' or 'raw'");
  return spec;
}

namespace {

struct RunOutput {
  std::vector<std::optional<RunTrace>> traces; // per method
  std::vector<std::string> errors;             // per method, empty = ok
};

RunOutput execute_run(const BenchConfig& cfg, const RawDataset* shared_data,
                      int r) {
  RunOutput out;
  out.traces.resize(cfg.methods.size());
  out.errors.resize(cfg.methods.size());

  RawDataset generated;
  const RawDataset* data = shared_data;
  if (!data) {
    ProcessSpec spec = cfg.process;
    spec.seed = cfg.base_seed + static_cast<std::uint64_t>(r);
    generated = generate(spec, cfg.n_total);
    data = &generated;
  }
  const Splits parts = split(*data, cfg.fractions, true);

  const bool any_oae =
      std::any_of(cfg.methods.begin(), cfg.methods.end(),
                  [](const MethodSpec& m) { return m.use_oae; });
  OAEModel oae;
  if (any_oae) {
    if (cfg.arch.input_dim() != parts.history.cols())
      throw std::invalid_argument(
          "bench: OAE input width does not match the data; set oae.layers");
    const Standardizer s = fit_standardizer(parts.history);
    TrainConfig tc = cfg.oae_train;
    tc.seed = cfg.base_seed + static_cast<std::uint64_t>(r);
    oae = train_oae(apply(s, parts.history.features), cfg.arch, cfg.lambda,
                    tc);
  }

  RawDataset empty_labeled;
  empty_labeled.features.resize(0, parts.history.cols());
  empty_labeled.feature_names = parts.history.feature_names;

  for (size_t m = 0; m < cfg.methods.size(); ++m) {
    const MethodSpec& method = cfg.methods[m];
    EngineConfig ec;
    ec.criterion = method.criterion;
    ec.alpha = cfg.alpha;
    ec.budget = cfg.budget;
    ec.committee_size = cfg.committee_size;
    ec.ridge = cfg.ridge;
    ec.cov_reg = cfg.cov_reg;
    ec.initial_labels = cfg.initial_labels;
    ec.seed = cfg.base_seed + static_cast<std::uint64_t>(r);
    ec.use_oae = method.use_oae;
    try {
      StreamSource stream(parts.stream_data);
      out.traces[m] = run(parts.history, empty_labeled, stream, parts.test,
                          method.use_oae ? &oae : nullptr, ec);
    } catch (const std::exception& e) {
      out.errors[m] = e.what();
    }
  }
  return out;
}

// RMSE after acquisition c for c = 0..budget; runs that spent less than the
// full budget are extended with their last value.
std::vector<double> aligned_curve(const RunTrace& trace, int budget) {
  std::vector<double> values;
  values.reserve(budget + 1);
  for (const AcquisitionRecord& a : trace.acquisitions)
    values.push_back(a.test_rmse);
  while (static_cast<int>(values.size()) < budget + 1)
    values.push_back(values.back());
  return values;
}

} // namespace

BenchResult run_benchmark(const BenchConfig& cfg) {
  if (cfg.methods.empty())
    throw std::invalid_argument("bench: methods list is empty");
  if (cfg.n_runs < 1) throw std::invalid_argument("bench: n_runs must be >= 1");
  if (cfg.budget < 0) throw std::invalid_argument("bench: negative budget");

  RawDataset loaded;
  const RawDataset* shared = nullptr;
  if (!cfg.csv_path.empty()) {
    loaded = load_csv(cfg.csv_path, cfg.response_column);
    shared = &loaded;
  }

  std::vector<RunOutput> outputs(cfg.n_runs);
  std::vector<std::string> run_errors(cfg.n_runs);
  {
    unsigned pool = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                    : std::thread::hardware_concurrency();
    pool = std::max(1u, std::min<unsigned>(pool, cfg.n_runs));
    std::atomic<int> next{0};
    const auto worker = [&]() {
      while (true) {
        const int r = next.fetch_add(1);
        if (r >= cfg.n_runs) return;
        try {
          outputs[r] = execute_run(cfg, shared, r);
        } catch (const std::exception& e) {
          run_errors[r] = e.what(); // whole-run failure (data/OAE stage)
        }
      }
    };
    std::vector<std::thread> threads;
    for (unsigned i = 1; i < pool; ++i) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
  }

  BenchResult result;
  for (size_t m = 0; m < cfg.methods.size(); ++m) {
    const std::string name = cfg.methods[m].name();
    std::vector<const RunTrace*> ok;
    for (int r = 0; r < cfg.n_runs; ++r) {
      if (!run_errors[r].empty()) {
        if (m == 0)
          result.failures.push_back("run " + std::to_string(r) + ": " +
                                    run_errors[r]);
        continue;
      }
      if (outputs[r].traces[m]) {
        ok.push_back(&*outputs[r].traces[m]);
      } else {
        result.failures.push_back("run " + std::to_string(r) + " " + name +
                                  ": " + outputs[r].errors[m]);
      }
    }

    const int failed = cfg.n_runs - static_cast<int>(ok.size());
    if (static_cast<double>(failed) > 0.2 * static_cast<double>(cfg.n_runs)) {
      std::string detail;
      for (const std::string& f : result.failures) detail += "\n  " + f;
      throw std::runtime_error("bench: method " + name + " failed " +
                               std::to_string(failed) + "/" +
                               std::to_string(cfg.n_runs) + " runs:" + detail);
    }
    if (ok.empty())
      throw std::runtime_error("bench: method " + name + " has no usable runs");

    LearningCurve curve;
    curve.method = name;
    curve.runs_aggregated = static_cast<int>(ok.size());
    curve.runs_failed = failed;
    const long n0 = ok.front()->initial_labels;
    std::vector<std::vector<double>> per_run;
    per_run.reserve(ok.size());
    for (const RunTrace* t : ok) per_run.push_back(aligned_curve(*t, cfg.budget));
    for (int c = 0; c <= cfg.budget; ++c) {
      double mean = 0.0;
      for (const auto& v : per_run) mean += v[c];
      mean /= static_cast<double>(per_run.size());
      double var = 0.0;
      for (const auto& v : per_run) var += (v[c] - mean) * (v[c] - mean);
      const double sd =
          per_run.size() > 1
              ? std::sqrt(var / static_cast<double>(per_run.size() - 1))
              : 0.0;
      curve.n_labels.push_back(n0 + c);
      curve.mean_rmse.push_back(mean);
      curve.std_rmse.push_back(sd);
    }
    result.curves.push_back(std::move(curve));
  }

  for (int r = 0; r < cfg.n_runs; ++r) {
    if (!run_errors[r].empty()) continue;
    for (size_t m = 0; m < cfg.methods.size(); ++m)
      if (outputs[r].traces[m])
        result.traces.push_back(
            {r, cfg.methods[m].name(), std::move(*outputs[r].traces[m])});
  }
  return result;
}

void write_curves_csv(const std::vector<LearningCurve>& curves,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_curves_csv: cannot open '" + path + "'");
  out << "method,n_labels,mean_rmse,std_rmse\n";
  char buf[128];
  for (const LearningCurve& c : curves) {
    for (size_t i = 0; i < c.n_labels.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s,%ld,%.17g,%.17g\n", c.method.c_str(),
                    c.n_labels[i], c.mean_rmse[i], c.std_rmse[i]);
      out << buf;
    }
  }
}

std::vector<LearningCurve> read_curves_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("read_curves_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "method,n_labels,mean_rmse,std_rmse")
    throw std::runtime_error("read_curves_csv: '" + path +
                             "' is not a curves file");
  std::vector<LearningCurve> curves;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string method, labels, mean, sd;
    if (!std::getline(ss, method, ',') || !std::getline(ss, labels, ',') ||
        !std::getline(ss, mean, ',') || !std::getline(ss, sd, ','))
      throw std::runtime_error("read_curves_csv: malformed line '" + line +
                               "'");
    if (curves.empty() || curves.back().method != method) {
      LearningCurve c;
      c.method = method;
      curves.push_back(std::move(c));
    }
    curves.back().n_labels.push_back(std::stol(labels));
    curves.back().mean_rmse.push_back(std::stod(mean));
    curves.back().std_rmse.push_back(std::stod(sd));
  }
  if (curves.empty())
    throw std::runtime_error("read_curves_csv: '" + path + "' has no curves");
  return curves;
}

namespace {

const char* method_color(const std::string& method) {
  if (method.rfind("rnd", 0) == 0) return "#1f77b4";
  if (method.rfind("hot", 0) == 0) return "#d62728";
  if (method.rfind("qbc", 0) == 0) return "#2ca02c";
  if (method.rfind("emc", 0) == 0) return "#9467bd";
  return "#7f7f7f";
}

bool dashed(const std::string& method) {
  return method.size() >= 4 && method.substr(method.size() - 4) == "_raw";
}

void fmt(std::string& svg, const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  svg += buf;
}

} // namespace

void emit_plot(const std::vector<LearningCurve>& curves,
               const std::string& path) {
  if (curves.empty()) throw std::invalid_argument("emit_plot: no curves");

  constexpr double width = 960.0, height = 600.0;
  constexpr double ml = 80.0, mr = 30.0, mt = 30.0, mb = 70.0;
  const double plot_w = width - ml - mr;
  const double plot_h = height - mt - mb;

  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const LearningCurve& c : curves) {
    if (c.n_labels.empty())
      throw std::invalid_argument("emit_plot: empty curve for " + c.method);
    for (size_t i = 0; i < c.n_labels.size(); ++i) {
      x0 = std::min(x0, static_cast<double>(c.n_labels[i]));
      x1 = std::max(x1, static_cast<double>(c.n_labels[i]));
      y0 = std::min(y0, c.mean_rmse[i] - c.std_rmse[i]);
      y1 = std::max(y1, c.mean_rmse[i] + c.std_rmse[i]);
    }
  }
  if (x1 <= x0) x1 = x0 + 1.0;
  const double pad = (y1 - y0) > 0 ? 0.05 * (y1 - y0) : std::max(0.5, 0.1 * std::abs(y1));
  y0 -= pad;
  y1 += pad;

  const auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * plot_w; };
  const auto py = [&](double y) { return mt + (y1 - y) / (y1 - y0) * plot_h; };

  std::string svg;
  fmt(svg,
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
      "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
      width, height, width, height);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes
  fmt(svg,
      "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" "
      "stroke=\"black\"/>\n",
      ml, mt + plot_h, ml + plot_w, mt + plot_h);
  fmt(svg,
      "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" "
      "stroke=\"black\"/>\n",
      ml, mt, ml, mt + plot_h);
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    fmt(svg,
        "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" "
        "stroke=\"black\"/>\n",
        px(xv), mt + plot_h, px(xv), mt + plot_h + 6.0);
    fmt(svg,
        "<text x=\"%.3f\" y=\"%.3f\" font-size=\"14\" "
        "text-anchor=\"middle\">%.4g</text>\n",
        px(xv), mt + plot_h + 24.0, xv);
    fmt(svg,
        "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" "
        "stroke=\"black\"/>\n",
        ml - 6.0, py(yv), ml, py(yv));
    fmt(svg,
        "<text x=\"%.3f\" y=\"%.3f\" font-size=\"14\" "
        "text-anchor=\"end\">%.4g</text>\n",
        ml - 10.0, py(yv) + 5.0, yv);
  }
  fmt(svg,
      "<text x=\"%.3f\" y=\"%.3f\" font-size=\"16\" "
      "text-anchor=\"middle\">labels queried</text>\n",
      ml + plot_w / 2.0, height - 18.0);
  fmt(svg,
      "<text x=\"%.3f\" y=\"%.3f\" font-size=\"16\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 %.3f %.3f)\">test RMSE</text>\n",
      22.0, mt + plot_h / 2.0, 22.0, mt + plot_h / 2.0);

  // +-1 std bands first so the lines stay on top
  for (const LearningCurve& c : curves) {
    svg += "<polygon fill=\"";
    svg += method_color(c.method);
    svg += "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
    for (size_t i = 0; i < c.n_labels.size(); ++i)
      fmt(svg, "%.3f,%.3f ", px(static_cast<double>(c.n_labels[i])),
          py(c.mean_rmse[i] + c.std_rmse[i]));
    for (size_t i = c.n_labels.size(); i-- > 0;)
      fmt(svg, "%.3f,%.3f ", px(static_cast<double>(c.n_labels[i])),
          py(c.mean_rmse[i] - c.std_rmse[i]));
    svg += "\"/>\n";
  }
  for (const LearningCurve& c : curves) {
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += method_color(c.method);
    svg += "\" stroke-width=\"2\"";
    if (dashed(c.method)) svg += " stroke-dasharray=\"6 4\"";
    svg += " points=\"";
    for (size_t i = 0; i < c.n_labels.size(); ++i)
      fmt(svg, "%.3f,%.3f ", px(static_cast<double>(c.n_labels[i])),
          py(c.mean_rmse[i]));
    svg += "\"/>\n";
  }

  // legend, top right
  double ly = mt + 14.0;
  for (const LearningCurve& c : curves) {
    const double lx = ml + plot_w - 150.0;
    fmt(svg,
        "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"%s\" "
        "stroke-width=\"2\"%s/>\n",
        lx, ly - 4.0, lx + 26.0, ly - 4.0, method_color(c.method),
        dashed(c.method) ? " stroke-dasharray=\"6 4\"" : "");
    fmt(svg, "<text x=\"%.3f\" y=\"%.3f\" font-size=\"14\">%s</text>\n",
        lx + 32.0, ly, c.method.c_str());
    ly += 20.0;
  }
  svg += "</svg>\n";

  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_plot: cannot open '" + path + "'");
  out << svg;
  if (!out) throw std::runtime_error("emit_plot: write to '" + path + "' failed");
}

ProcessSpec process_spec_from(const ConfigFile& cfg) {
  const int p = static_cast<int>(cfg.get_int("process.observed_dim", 16));
  const int q = static_cast<int>(cfg.get_int("process.latent_dim", 4));
  const std::uint64_t structure =
      static_cast<std::uint64_t>(cfg.get_int("process.structure_seed", 0));
  ProcessSpec spec = structure == 0 && p == 16 && q == 4
                         ? ProcessSpec::defaults()
                         : ProcessSpec::random_structure(
                               p, q, structure == 0 ? 20240616ull : structure);
  spec.ar_coefficient =
      cfg.get_double("process.ar_coefficient", spec.ar_coefficient);
  if (cfg.has("process.noise_std"))
    spec.noise_std.setConstant(cfg.get_double("process.noise_std"));
  spec.response_noise_std =
      cfg.get_double("process.response_noise_std", spec.response_noise_std);
  spec.seed = static_cast<std::uint64_t>(cfg.get_int("process.seed", 0));
  return spec;
}

EngineConfig engine_config_from(const ConfigFile& cfg) {
  EngineConfig ec;
  ec.criterion = parse_criterion(cfg.get_string("engine.criterion", "rnd"));
  ec.alpha = cfg.get_double("engine.alpha", ec.alpha);
  ec.budget = static_cast<int>(cfg.get_int("engine.budget", ec.budget));
  ec.committee_size =
      static_cast<int>(cfg.get_int("engine.committee_size", ec.committee_size));
  ec.ridge = cfg.get_double("engine.ridge", ec.ridge);
  ec.cov_reg = cfg.get_double("engine.cov_reg", ec.cov_reg);
  ec.initial_labels =
      static_cast<int>(cfg.get_int("engine.initial_labels", ec.initial_labels));
  ec.seed = static_cast<std::uint64_t>(cfg.get_int("engine.seed", 0));
  ec.use_oae = cfg.get_bool("engine.use_oae", true);
  return ec;
}

BenchConfig bench_config_from(const ConfigFile& cfg) {
  BenchConfig bc;
  if (cfg.has("bench.methods")) {
    bc.methods.clear();
    for (const std::string& token : cfg.get_string_array("bench.methods"))
      bc.methods.push_back(MethodSpec::parse(token));
  } else {
    bc.methods = {MethodSpec{CriterionKind::Random, false},
                  MethodSpec{CriterionKind::Random, true},
                  MethodSpec{CriterionKind::HotellingT2, true},
                  MethodSpec{CriterionKind::QbcAmbiguity, true},
                  MethodSpec{CriterionKind::ExpectedModelChange, true}};
  }
  bc.n_runs = static_cast<int>(cfg.get_int("bench.runs", bc.n_runs));
  bc.base_seed =
      static_cast<std::uint64_t>(cfg.get_int("bench.base_seed", 0));
  bc.threads = static_cast<int>(cfg.get_int("bench.threads", 0));

  const EngineConfig ec = engine_config_from(cfg);
  bc.budget = static_cast<int>(cfg.get_int("engine.budget", 100));
  bc.alpha = ec.alpha;
  bc.committee_size = ec.committee_size;
  bc.ridge = ec.ridge;
  bc.cov_reg = ec.cov_reg;
  bc.initial_labels = ec.initial_labels;

  bc.csv_path = cfg.get_string("data.csv", "");
  bc.response_column = cfg.get_string("data.response", "y");
  bc.n_total = cfg.get_int("data.n_total", bc.n_total);
  if (cfg.has("data.fractions")) {
    const auto f = cfg.get_double_array("data.fractions");
    if (f.size() != 3)
      throw std::runtime_error("config: data.fractions needs 3 entries");
    bc.fractions = {f[0], f[1], f[2]};
  }
  bc.process = process_spec_from(cfg);

  if (cfg.has("oae.layers")) {
    bc.arch.layer_sizes.clear();
    for (std::int64_t s : cfg.get_int_array("oae.layers"))
      bc.arch.layer_sizes.push_back(static_cast<int>(s));
    bc.arch.validate();
  }
  bc.lambda = cfg.get_double("oae.lambda", bc.lambda);
  bc.oae_train.batch_size =
      static_cast<int>(cfg.get_int("oae.batch_size", bc.oae_train.batch_size));
  bc.oae_train.learning_rate =
      cfg.get_double("oae.learning_rate", bc.oae_train.learning_rate);
  bc.oae_train.max_epochs =
      static_cast<int>(cfg.get_int("oae.max_epochs", bc.oae_train.max_epochs));
  bc.oae_train.patience =
      static_cast<int>(cfg.get_int("oae.patience", bc.oae_train.patience));
  bc.oae_train.validation_fraction = cfg.get_double(
      "oae.validation_fraction", bc.oae_train.validation_fraction);
  return bc;
}

} // namespace sal
