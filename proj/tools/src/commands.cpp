#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "csv.hpp"
#include "fairreg/error.hpp"
#include "fairreg/metrics.hpp"
#include "fairreg/serialization.hpp"

namespace fairreg::cli {

using nlohmann::json;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void require_path(const std::string& value, const char* flag) {
  if (value.empty()) throw SchemaError(std::string("missing required option ") + flag);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw SchemaError(std::string(what) + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.contains(key)) throw SchemaError(std::string(what) + ": unknown key '" + key + "'");
  }
}

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(std::string("config key '") + key + "' is missing or has the wrong type");
  }
}

// Runs the input stage and the compute stage with the exit-code split:
// anything wrong with the inputs is a schema error (1), anything raised by
// the library while fitting or predicting is a fit error (2).
int staged(std::ostream& err, const std::function<std::function<void()>()>& load) {
  std::function<void()> compute;
  try {
    compute = load();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSchema;
  }
  try {
    compute();
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFit;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitSchema;
  }
  return kExitOk;
}

FairModel load_model(const std::string& path) {
  return fair_model_from_json(parse_json(read_text(path)));
}

void check_groups_known(const FairModel& model, const Dataset& data) {
  for (const GroupLabel& g : data.groups) {
    if (!model.cdf_samples.contains(g)) throw ArgumentError("unknown group label '" + g + "'");
  }
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SchemaError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw SchemaError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw SchemaError("cannot move output into place at '" + path + "': " + ec.message());
  }
}

RunConfig run_config_from_json(const json& j, std::optional<std::uint64_t> seed_override) {
  check_keys(j, {"loss", "qclass", "split", "seed"}, "run config");
  RunConfig cfg;
  if (!j.contains("loss")) throw SchemaError("run config: missing 'loss'");
  cfg.loss = loss_from_json(j["loss"]);

  std::optional<std::uint64_t> seed = seed_override;
  if (!seed && j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw SchemaError("run config: 'seed' must be a non-negative integer");
    seed = j["seed"].get<std::uint64_t>();
  }

  if (j.contains("qclass")) {
    const json& q = j["qclass"];
    check_keys(q, {"solver", "spline", "cv"}, "qclass");
    const auto solver = q.contains("solver") ? get_as<std::string>(q, "solver") : std::string("isotonic");
    if (solver == "isotonic") {
      cfg.qclass = QClassConfig::isotonic();
      if (q.contains("spline") || q.contains("cv")) {
        throw SchemaError("qclass: the isotonic solver takes no spline or cv settings");
      }
    } else if (solver == "ispline") {
      if (q.contains("spline") == q.contains("cv")) {
        throw SchemaError("qclass: the ispline solver needs exactly one of 'spline' or 'cv'");
      }
      if (q.contains("spline")) {
        const json& s = q["spline"];
        check_keys(s, {"degree", "interior_knots"}, "spline");
        SplineBasisConfig basis{get_as<int>(s, "degree"), get_as<int>(s, "interior_knots")};
        try {
          basis.validate();
        } catch (const ConfigError& e) {
          throw SchemaError(e.what());
        }
        cfg.qclass = QClassConfig::ispline(basis);
      } else {
        CVConfig cv = cv_config_from_json(q["cv"]);
        if (seed) cv.seed = *seed;
        cfg.qclass = QClassConfig::ispline_cv(cv);
      }
    } else {
      throw SchemaError("qclass: unknown solver '" + solver + "'");
    }
  }

  if (j.contains("split")) {
    const json& s = j["split"];
    check_keys(s, {"mode", "fraction"}, "split");
    const auto mode = s.contains("mode") ? get_as<std::string>(s, "mode") : std::string("reuse");
    if (mode == "reuse") {
      if (s.contains("fraction")) throw SchemaError("split: 'fraction' applies only to mode 'split'");
      cfg.split = SplitMode::reuse();
    } else if (mode == "split") {
      const double fraction = s.contains("fraction") ? get_as<double>(s, "fraction") : 0.5;
      if (!(fraction > 0.0 && fraction < 1.0)) throw SchemaError("split: 'fraction' must lie in (0,1)");
      cfg.split = SplitMode::split(fraction, 0);
    } else {
      throw SchemaError("split: unknown mode '" + mode + "'");
    }
  }
  if (seed) cfg.split.seed = *seed;
  return cfg;
}

RobustSimConfig sim_config_from_json(const json& j, std::optional<std::uint64_t> seed_override) {
  check_keys(j,
             {"n_train", "n_test", "a", "seed", "repetitions", "huber_m", "methods", "full_cv_grid",
              "cv_folds"},
             "simulation config");
  RobustSimConfig c;
  if (j.contains("n_train")) c.n_train = get_as<std::size_t>(j, "n_train");
  if (j.contains("n_test")) c.n_test = get_as<std::size_t>(j, "n_test");
  if (j.contains("a")) c.a = get_as<double>(j, "a");
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("repetitions")) c.repetitions = get_as<int>(j, "repetitions");
  if (j.contains("huber_m")) c.huber_m = get_as<double>(j, "huber_m");
  if (j.contains("full_cv_grid")) c.full_cv_grid = get_as<bool>(j, "full_cv_grid");
  if (j.contains("cv_folds")) c.cv_folds = get_as<int>(j, "cv_folds");
  if (j.contains("methods")) {
    c.methods.clear();
    for (const auto& name : get_as<std::vector<std::string>>(j, "methods")) {
      try {
        c.methods.push_back(method_from_string(name));
      } catch (const ArgumentError& e) {
        throw SchemaError(e.what());
      }
    }
  }
  if (seed_override) c.seed = *seed_override;
  try {
    c.validate();
  } catch (const Error& e) {
    throw SchemaError(e.what());
  }
  return c;
}

int cmd_fit(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return staged(err, [&]() -> std::function<void()> {
    require_path(opts.data, "--data");
    require_path(opts.config, "--config");
    require_path(opts.out, "--out");
    const RunConfig cfg = run_config_from_json(parse_json(read_text(opts.config)), opts.seed);
    auto loaded = std::make_shared<LoadedData>(table_to_dataset(read_csv(opts.data), true));
    return [&, cfg, loaded] {
      FairModel model = fit_fair(loaded->data, cfg.loss, cfg.qclass, cfg.split);
      model.feature_names = loaded->feature_names;
      const MetricsReport report = evaluate(model, loaded->data, cfg.loss);
      write_file_atomic(opts.out, dump_canonical(fair_model_to_json(model)));
      out << dump_canonical(metrics_to_json(report));
    };
  });
}

int cmd_predict(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return staged(err, [&]() -> std::function<void()> {
    require_path(opts.model, "--model");
    require_path(opts.data, "--data");
    auto model = std::make_shared<FairModel>(load_model(opts.model));
    auto table = std::make_shared<CsvTable>(read_csv(opts.data));
    if (std::find(table->header.begin(), table->header.end(), "prediction") != table->header.end()) {
      throw SchemaError("csv: input already has a 'prediction' column");
    }
    auto loaded = std::make_shared<LoadedData>(table_to_dataset(*table, false, model->feature_names));
    if (loaded->data.dim() != static_cast<std::size_t>(model->base.models.begin()->second.weights.size())) {
      throw SchemaError("csv: feature count does not match the model");
    }
    return [&, model, table, loaded] {
      check_groups_known(*model, loaded->data);
      const Eigen::VectorXd preds = predict_fair(*model, loaded->data);
      CsvTable result = *table;
      result.header.push_back("prediction");
      for (std::size_t r = 0; r < result.rows.size(); ++r) {
        result.rows[r].push_back(json(preds(static_cast<Eigen::Index>(r))).dump());
      }
      const std::string text = format_csv(result);
      if (opts.out.empty()) {
        out << text;
      } else {
        write_file_atomic(opts.out, text);
      }
    };
  });
}

int cmd_evaluate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return staged(err, [&]() -> std::function<void()> {
    require_path(opts.model, "--model");
    require_path(opts.data, "--data");
    auto model = std::make_shared<FairModel>(load_model(opts.model));
    auto loaded = std::make_shared<LoadedData>(table_to_dataset(read_csv(opts.data), true, model->feature_names));
    if (loaded->data.dim() != static_cast<std::size_t>(model->base.models.begin()->second.weights.size())) {
      throw SchemaError("csv: feature count does not match the model");
    }
    return [&, model, loaded] {
      check_groups_known(*model, loaded->data);
      const std::string text = dump_canonical(metrics_to_json(evaluate(*model, loaded->data, model->loss)));
      if (!opts.out.empty()) write_file_atomic(opts.out, text);
      out << text;
    };
  });
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return staged(err, [&]() -> std::function<void()> {
    require_path(opts.config, "--config");
    require_path(opts.out, "--out");
    const RobustSimConfig cfg = sim_config_from_json(parse_json(read_text(opts.config)), opts.seed);
    return [&, cfg] {
      const ExperimentResult result = run_experiment(cfg);
      write_file_atomic(opts.out, experiment_to_csv(result));
      out << dump_canonical(experiment_to_json(result));
    };
  });
}

int cmd_cv(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return staged(err, [&]() -> std::function<void()> {
    require_path(opts.data, "--data");
    require_path(opts.config, "--config");
    const RunConfig cfg = run_config_from_json(parse_json(read_text(opts.config)), opts.seed);
    if (!cfg.qclass.cv) throw SchemaError("cv: the config needs qclass.solver 'ispline' with a 'cv' block");
    auto loaded = std::make_shared<LoadedData>(table_to_dataset(read_csv(opts.data), true));
    return [&, cfg, loaded] {
      const CvResult result = select_cv(loaded->data, cfg.loss, *cfg.qclass.cv, cfg.split);
      const std::string text = dump_canonical(cv_result_to_json(result));
      if (!opts.out.empty()) write_file_atomic(opts.out, text);
      out << text;
    };
  });
}

}  // namespace fairreg::cli
