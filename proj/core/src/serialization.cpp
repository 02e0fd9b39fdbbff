#include "fairreg/serialization.hpp"

#include <cmath>
#include <set>

#include "fairreg/error.hpp"

namespace fairreg {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object()) throw SchemaError(std::string("expected a JSON object holding '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing key '") + key + "'");
  return *it;
}

double require_number(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number()) throw SchemaError(std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

int require_int(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number_integer()) throw SchemaError(std::string("key '") + key + "' must be an integer");
  return v.get<int>();
}

std::vector<double> number_array(const json& v, const char* key) {
  if (!v.is_array()) throw SchemaError(std::string("key '") + key + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& e : v) {
    if (!e.is_number()) throw SchemaError(std::string("key '") + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<int> int_array(const json& v, const char* key) {
  if (!v.is_array()) throw SchemaError(std::string("key '") + key + "' must be an array");
  std::vector<int> out;
  for (const json& e : v) {
    if (!e.is_number_integer()) throw SchemaError(std::string("key '") + key + "' must hold integers");
    out.push_back(e.get<int>());
  }
  return out;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.contains(key)) throw SchemaError(std::string(what) + ": unknown key '" + key + "'");
  }
}

json finite_array(const std::vector<double>& values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw SchemaError("cannot serialize a non-finite value");
  }
  return json(values);
}

double finite(double v) {
  if (!std::isfinite(v)) throw SchemaError("cannot serialize a non-finite value");
  return v;
}

// Rethrows library argument errors raised while rebuilding objects as schema
// errors, since they originate from the document.
template <class F>
auto rebuild(F&& f, const char* what) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

json loss_to_json(const LossSpec& spec) {
  json j{{"kind", std::string(to_string(spec.kind()))}};
  if (spec.kind() == LossKind::Pinball) j["tau"] = spec.tau();
  if (spec.kind() == LossKind::Huber) j["m"] = spec.m();
  return j;
}

LossSpec loss_from_json(const json& j) {
  const json& kind_node = require(j, "kind");
  if (!kind_node.is_string()) throw SchemaError("loss 'kind' must be a string");
  const std::string kind = kind_node.get<std::string>();
  return rebuild(
      [&] {
        switch (loss_kind_from_string(kind)) {
          case LossKind::Pinball:
            reject_unknown_keys(j, {"kind", "tau"}, "loss");
            return LossSpec::pinball(require_number(j, "tau"));
          case LossKind::Huber:
            reject_unknown_keys(j, {"kind", "m"}, "loss");
            return LossSpec::huber(require_number(j, "m"));
          case LossKind::Squared:
            reject_unknown_keys(j, {"kind"}, "loss");
            return LossSpec::squared();
          case LossKind::Absolute:
            reject_unknown_keys(j, {"kind"}, "loss");
            return LossSpec::absolute();
          case LossKind::PoissonNLL:
            reject_unknown_keys(j, {"kind"}, "loss");
            return LossSpec::poisson();
          case LossKind::CrossEntropy:
            reject_unknown_keys(j, {"kind"}, "loss");
            return LossSpec::cross_entropy();
        }
        throw SchemaError("loss: unsupported kind");
      },
      "loss");
}

json step_to_json(const StepFunction& f) {
  return json{{"knots", finite_array(f.knots())}, {"values", finite_array(f.values())}};
}

StepFunction step_from_json(const json& j) {
  auto knots = number_array(require(j, "knots"), "knots");
  auto values = number_array(require(j, "values"), "values");
  return rebuild([&] { return StepFunction(std::move(knots), std::move(values)); }, "step function");
}

json spline_to_json(const SplineFit& f) {
  return json{{"degree", f.config.degree},
              {"interior_knots", f.config.n_interior_knots},
              {"alpha0", finite(f.alpha0)},
              {"alphas", finite_array(f.alphas)}};
}

SplineFit spline_from_json(const json& j) {
  SplineFit f;
  f.config.degree = require_int(j, "degree");
  f.config.n_interior_knots = require_int(j, "interior_knots");
  f.alpha0 = require_number(j, "alpha0");
  f.alphas = number_array(require(j, "alphas"), "alphas");
  rebuild([&] { f.config.validate(); return 0; }, "spline");
  if (f.alphas.size() != static_cast<std::size_t>(f.config.dimension())) {
    throw SchemaError("spline: alphas length does not match the basis dimension");
  }
  for (double a : f.alphas) {
    if (a < 0.0) throw SchemaError("spline: negative coefficient");
  }
  return f;
}

json group_models_to_json(const GroupModels& m) {
  json groups = json::object();
  for (const auto& [label, model] : m.models) {
    std::vector<double> w(model.weights.data(), model.weights.data() + model.weights.size());
    groups[label] = json{{"intercept", finite(model.intercept)}, {"weights", finite_array(w)}};
  }
  return json{{"loss", loss_to_json(m.loss)}, {"groups", groups}};
}

GroupModels group_models_from_json(const json& j) {
  GroupModels m;
  m.loss = loss_from_json(require(j, "loss"));
  const json& groups = require(j, "groups");
  if (!groups.is_object() || groups.empty()) throw SchemaError("base 'groups' must be a nonempty object");
  std::optional<std::size_t> dim;
  for (const auto& [label, node] : groups.items()) {
    LinearModel model;
    model.intercept = require_number(node, "intercept");
    const std::vector<double> w = number_array(require(node, "weights"), "weights");
    if (dim && *dim != w.size()) throw SchemaError("base: groups disagree on the feature dimension");
    dim = w.size();
    model.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    model.link = link_for(m.loss);
    m.models.emplace(label, std::move(model));
  }
  return m;
}

json fair_model_to_json(const FairModel& m) {
  json cdf = json::object();
  for (const auto& [label, sample] : m.cdf_samples) cdf[label] = finite_array(sample);
  json quantile = std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        json q;
        if constexpr (std::is_same_v<T, StepFunction>) {
          q = step_to_json(f);
          q["type"] = "step";
        } else {
          q = spline_to_json(f);
          q["type"] = "ispline";
        }
        return q;
      },
      m.quantile);
  json j{{"version", kModelFormatVersion},
         {"loss", loss_to_json(m.loss)},
         {"base", group_models_to_json(m.base)},
         {"cdf_samples", cdf},
         {"quantile", quantile}};
  if (!m.feature_names.empty()) j["feature_names"] = m.feature_names;
  return j;
}

FairModel fair_model_from_json(const json& j) {
  const json& version = require(j, "version");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
    throw SchemaError("unsupported model version " + version.dump());
  }
  FairModel m;
  m.loss = loss_from_json(require(j, "loss"));
  m.base = group_models_from_json(require(j, "base"));

  const json& cdf = require(j, "cdf_samples");
  if (!cdf.is_object()) throw SchemaError("'cdf_samples' must be an object");
  for (const auto& [label, node] : cdf.items()) {
    m.cdf_samples[label] = number_array(node, "cdf_samples");
  }

  const json& q = require(j, "quantile");
  const json& type = require(q, "type");
  if (type == "step") {
    m.quantile = step_from_json(q);
  } else if (type == "ispline") {
    m.quantile = spline_from_json(q);
  } else {
    throw SchemaError("unknown quantile type " + type.dump());
  }

  if (const auto it = j.find("feature_names"); it != j.end()) {
    if (!it->is_array()) throw SchemaError("'feature_names' must be an array");
    for (const json& name : *it) {
      if (!name.is_string()) throw SchemaError("'feature_names' must hold strings");
      m.feature_names.push_back(name.get<std::string>());
    }
  }
  rebuild([&] { m.validate(); return 0; }, "model");
  return m;
}

json metrics_to_json(const MetricsReport& r) {
  json per_group = json::object();
  for (const auto& [label, risk] : r.per_group_risk) per_group[label] = finite(risk);
  return json{{"risk", finite(r.risk)}, {"ks", finite(r.ks)}, {"per_group_risk", per_group}, {"n", r.n}};
}

json cv_result_to_json(const CvResult& r) {
  json rows = json::array();
  for (const CvCandidate& c : r.candidates) {
    json row{{"degree", c.config.degree},
             {"interior_knots", c.config.n_interior_knots},
             {"feasible", c.feasible},
             {"passed_ks_filter", c.passed_ks_filter}};
    if (c.feasible) {
      row["mean_ks"] = c.mean_ks;
      row["mean_risk"] = c.mean_risk;
    } else {
      row["failure"] = c.failure;
    }
    rows.push_back(std::move(row));
  }
  return json{{"best", {{"degree", r.best.degree}, {"interior_knots", r.best.n_interior_knots}}},
              {"ks_threshold", r.ks_threshold},
              {"candidates", rows}};
}

CVConfig cv_config_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("cv settings must be an object");
  reject_unknown_keys(j, {"folds", "degrees", "knot_counts", "ks_fraction", "seed"}, "cv");
  CVConfig cv;
  if (j.contains("folds")) cv.folds = require_int(j, "folds");
  if (j.contains("degrees")) cv.degrees = int_array(j["degrees"], "degrees");
  if (j.contains("knot_counts")) cv.knot_counts = int_array(j["knot_counts"], "knot_counts");
  if (j.contains("ks_fraction")) cv.ks_fraction = require_number(j, "ks_fraction");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw SchemaError("cv 'seed' must be a non-negative integer");
    cv.seed = j["seed"].get<std::uint64_t>();
  }
  rebuild([&] { cv.validate(); return 0; }, "cv");
  return cv;
}

json experiment_to_json(const ExperimentResult& r) {
  json rows = json::array();
  for (const ExperimentRow& row : r.rows) {
    rows.push_back({{"method", row.method},
                    {"metric", row.metric},
                    {"mean", finite(row.mean)},
                    {"stderr", finite(row.std_error)},
                    {"n_reps", row.n_reps}});
  }
  return json{{"rows", rows}, {"failures", r.failures}, {"repetitions", r.repetitions.size()}};
}

std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace fairreg
