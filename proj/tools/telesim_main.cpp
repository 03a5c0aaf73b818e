// telesim: probabilistic teleportation through partially entangled pure
// channels. Subcommands run single configurations, matching-law sweeps,
// multi-pair runs, Monte Carlo sessions, and brute-force enumerations.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "telesim/cli.hpp"

namespace {

// "b2:bp2,b2:bp2,..." -> bank pairs.
std::vector<std::pair<double, double>> parse_banks(const std::string& spec) {
  std::vector<std::pair<double, double>> banks;
  std::string token;
  std::istringstream in(spec);
  while (std::getline(in, token, ',')) {
    const auto colon = token.find(':');
    if (colon == std::string::npos) {
      throw CLI::ValidationError("--banks", "expected b2:bp2 pairs");
    }
    banks.emplace_back(std::stod(token.substr(0, colon)),
                       std::stod(token.substr(colon + 1)));
  }
  if (banks.empty()) throw CLI::ValidationError("--banks", "no pairs given");
  return banks;
}

int emit(const telesim::CommandResult& result, const std::string& out_path) {
  if (!result.diagnostics.empty()) std::cerr << result.diagnostics;
  if (out_path.empty()) {
    std::cout << result.output;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot open " << out_path << " for writing\n";
      return 2;
    }
    out << result.output;
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conclusive teleportation simulator"};
  app.require_subcommand(1);

  telesim::RunConfig cfg;
  std::string banks_spec;
  std::string out_path;

  const std::map<std::string, telesim::RunConfig::Format> format_names{
      {"table", telesim::RunConfig::Format::table},
      {"csv", telesim::RunConfig::Format::csv},
      {"json", telesim::RunConfig::Format::json}};

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "output format: table, csv, json")
        ->transform(CLI::CheckedTransformer(format_names, CLI::ignore_case));
    sub->add_option("--out", out_path, "write the report to a file");
    sub->add_option("--seed", cfg.seed, "RNG seed");
  };

  auto* teleport = app.add_subcommand("teleport", "single-pair run with crosschecks");
  teleport->add_option("--b2", cfg.b2, "channel Schmidt weight b^2, in [0, 0.5]")
      ->required();
  teleport->add_option("--bp2", cfg.bp2, "measurement weight b'^2, in [0, 0.5]");
  teleport->add_option("--input", cfg.input_spec,
                       "input qubit: random:N or amplitudes re:im,re:im");
  add_common(teleport);

  auto* sweep = app.add_subcommand("sweep", "P(b2, bp2) grid against the oracle");
  sweep->add_option("--grid", cfg.grid, "points per axis on [0, 0.5]");
  add_common(sweep);

  auto* multi = app.add_subcommand("multi", "k-pair run (full vector for k <= 3)");
  multi->add_option("--banks", banks_spec, "per-pair parameters b2:bp2,b2:bp2,...")
      ->required();
  multi->add_option("--input", cfg.input_spec,
                    "k-qubit input: random:N or 2^k amplitudes");
  add_common(multi);

  auto* session = app.add_subcommand("session", "seeded Monte Carlo of the protocol");
  session->add_option("--b2", cfg.b2, "channel b^2 (single pair)");
  session->add_option("--bp2", cfg.bp2, "measurement b'^2 (single pair)");
  session->add_option("--banks", banks_spec, "multi-pair parameters b2:bp2,...");
  session->add_option("--trials", cfg.trials, "number of trials");
  session->add_option("--input", cfg.input_spec, "input state spec");
  add_common(session);

  auto* oracle = app.add_subcommand("oracle", "full outcome enumeration dump");
  oracle->add_option("--b2", cfg.b2, "channel b^2 (single pair)");
  oracle->add_option("--bp2", cfg.bp2, "measurement b'^2 (single pair)");
  oracle->add_option("--banks", banks_spec, "multi-pair parameters b2:bp2,...");
  oracle->add_option("--input", cfg.input_spec, "input state spec");
  add_common(oracle);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!banks_spec.empty()) cfg.banks = parse_banks(banks_spec);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (teleport->parsed()) cfg.mode = telesim::RunConfig::Mode::teleport;
  if (sweep->parsed()) cfg.mode = telesim::RunConfig::Mode::sweep;
  if (multi->parsed()) cfg.mode = telesim::RunConfig::Mode::multi;
  if (session->parsed()) cfg.mode = telesim::RunConfig::Mode::session;
  if (oracle->parsed()) cfg.mode = telesim::RunConfig::Mode::oracle;

  return emit(telesim::execute(cfg), out_path);
}
