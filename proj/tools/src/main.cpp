#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace fairreg::cli;

  CLI::App app{"Fair regression under demographic parity: fit, predict, evaluate, simulate, cv"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::uint64_t seed = 0;
  std::vector<CLI::Option*> seed_options;

  auto add_seed = [&](CLI::App* sub) {
    seed_options.push_back(sub->add_option("--seed", seed, "Seed; overrides the config seed"));
  };

  CLI::App* fit = app.add_subcommand("fit", "Fit a fair model on a CSV training set");
  fit->add_option("--data", opts.data, "Training CSV with group and target columns")->required();
  fit->add_option("--config", opts.config, "Run configuration JSON")->required();
  fit->add_option("--out", opts.out, "Where to write the model JSON")->required();
  add_seed(fit);

  CLI::App* predict = app.add_subcommand("predict", "Append fair predictions to a CSV");
  predict->add_option("--model", opts.model, "Model JSON")->required();
  predict->add_option("--data", opts.data, "CSV with a group column and the model's features")->required();
  predict->add_option("--out", opts.out, "Output CSV (standard output when omitted)");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Risk and KS of a model on labelled data");
  evaluate->add_option("--model", opts.model, "Model JSON")->required();
  evaluate->add_option("--data", opts.data, "CSV with group and target columns")->required();
  evaluate->add_option("--out", opts.out, "Also write the report here");

  CLI::App* simulate = app.add_subcommand("simulate", "Run the robust-regression simulation study");
  simulate->add_option("--config", opts.config, "Simulation configuration JSON")->required();
  simulate->add_option("--out", opts.out, "Where to write the results CSV")->required();
  add_seed(simulate);

  CLI::App* cv = app.add_subcommand("cv", "Cross-validate the I-spline degree and knot count");
  cv->add_option("--data", opts.data, "Training CSV")->required();
  cv->add_option("--config", opts.config, "Run configuration JSON with a qclass.cv block")->required();
  cv->add_option("--out", opts.out, "Also write the candidate table here");
  add_seed(cv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitSchema;
  }

  for (const CLI::Option* option : seed_options) {
    if (option->count() > 0) opts.seed = seed;
  }

  if (fit->parsed()) return cmd_fit(opts, std::cout, std::cerr);
  if (predict->parsed()) return cmd_predict(opts, std::cout, std::cerr);
  if (evaluate->parsed()) return cmd_evaluate(opts, std::cout, std::cerr);
  if (simulate->parsed()) return cmd_simulate(opts, std::cout, std::cerr);
  return cmd_cv(opts, std::cout, std::cerr);
}
