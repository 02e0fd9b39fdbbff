#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fairreg/fair_pipeline.hpp"
#include "fairreg/losses.hpp"
#include "fairreg/simulation.hpp"

namespace fairreg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 1;
inline constexpr int kExitFit = 2;

/// Paths and overrides shared by every subcommand; each command reads the
/// fields it needs.
struct CommandOptions {
  std::string data;
  std::string config;
  std::string model;
  std::string out;
  std::optional<std::uint64_t> seed;
};

/// Parsed run configuration:
///   {"loss": {...}, "qclass": {"solver": "isotonic" | "ispline",
///    "spline": {"degree", "interior_knots"}, "cv": {...}},
///    "split": {"mode": "reuse" | "split", "fraction"}, "seed": n}
/// A seed (from --seed, else the document) is applied to the split and the
/// cv folds.
struct RunConfig {
  LossSpec loss = LossSpec::squared();
  QClassConfig qclass;
  SplitMode split;
};

RunConfig run_config_from_json(const nlohmann::json& j, std::optional<std::uint64_t> seed_override);
RobustSimConfig sim_config_from_json(const nlohmann::json& j,
                                     std::optional<std::uint64_t> seed_override);

int cmd_fit(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_predict(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_evaluate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_cv(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Writes to a sibling temporary file and renames it over path.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace fairreg::cli
