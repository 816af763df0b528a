// gkp_breed: command-line front end for the breeding pipeline.
//
//   gkp_breed simulate --config cfg.json --out result.json [--wigner w.csv]
//   gkp_breed table1 [--rows 1,2] [--dim 56] [--allow-long]
//   gkp_breed target --k 0 --delta-db 10 [--wigner w.csv]
//
// Exit codes: 0 success, 1 invalid input, 2 numeric failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gkp/gkp.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;

void print_warnings(const gkp::Warnings& warnings) {
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int simulate(const std::string& config_path, const std::string& out_path, const std::string& wigner_path) {
  gkp::PipelineConfig config = gkp::load_config(config_path);
  if (!wigner_path.empty() && !config.wigner) config.wigner = gkp::WignerSpec{};
  const gkp::PipelineResult result = gkp::run_pipeline(config);
  gkp::write_results(result, out_path);
  if (!wigner_path.empty()) gkp::write_wigner_csv(*result.wigner, wigner_path);
  print_warnings(result.warnings);
  std::printf("probability %.4e  squeezing %.2f dB  fidelity %.4f  damping t %.4f\n", result.total_probability, result.squeezing_db, result.fidelity,
              result.damping_t);
  return 0;
}

std::vector<int> parse_rows(const std::string& text) {
  std::vector<int> ids;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, end - start);
    if (!item.empty()) {
      try {
        std::size_t used = 0;
        const int id = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        ids.push_back(id);
      } catch (const std::exception&) {
        throw gkp::ValidationError("--rows: '" + item + "' is not a row number");
      }
    }
    start = end + 1;
  }
  return ids;
}

int table1(const std::optional<std::string>& rows_text, std::optional<int> dim, bool allow_long) {
  const auto rows = gkp::table1_rows();
  std::vector<int> ids;
  if (rows_text) {
    ids = parse_rows(*rows_text);
  } else {
    for (const auto& r : rows) {
      if (!r.long_row || allow_long) ids.push_back(r.id);
    }
  }
  for (int id : ids) {
    if (id < 1 || id > static_cast<int>(rows.size())) throw gkp::ValidationError("--rows: unknown row " + std::to_string(id));
    if (rows[static_cast<std::size_t>(id - 1)].long_row && !allow_long) {
      throw gkp::ValidationError("row " + std::to_string(id) + " (n=16) takes several seconds to minutes; pass --allow-long");
    }
  }
  std::printf("%-3s %-20s %11s %11s %6s %6s %6s %7s %7s %5s\n", "id", "row", "P ref", "P", "ratio", "dB ref", "dB", "F ref", "F", "pass");
  int failed = 0;
  for (int id : ids) {
    const auto start = std::chrono::steady_clock::now();
    const auto outcome = gkp::reproduce_table1({id}, dim).front();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto& r = outcome.result;
    std::printf("%-3d %-20s %11.3e %11.3e %6.2f %6.1f %6.2f %7.3f %7.4f %5s  (%.1fs)\n", id, outcome.row.label.c_str(), outcome.row.probability,
                r.total_probability, outcome.probability_ratio, outcome.row.db, r.squeezing_db, outcome.row.fidelity, r.fidelity,
                outcome.pass() ? "yes" : "no", seconds);
    std::fflush(stdout);
    if (!outcome.pass()) ++failed;
  }
  std::printf("%zu rows, %d outside tolerance\n", ids.size(), failed);
  return 0;
}

int target(int k, double delta_db, std::optional<double> kappa_db, int dim, const std::string& wigner_path) {
  gkp::TruncationPolicy policy;
  policy.dim = dim;
  policy.validate();
  const double delta = gkp::delta_from_db(delta_db);
  const double kappa = kappa_db ? gkp::delta_from_db(*kappa_db) : delta;
  gkp::Warnings warnings;
  const gkp::FockState state = gkp::codeword(k, delta, kappa, policy, &warnings);
  const auto m = gkp::moments(state);
  print_warnings(warnings);
  std::printf("codeword k=%d  Delta=%.6f  kappa=%.6f  <n>=%.4f  var_x=%.4f  var_p=%.4f  tail=%.3e\n", k, delta, kappa, m.mean_photon, m.var_x, m.var_p,
              state.tail_mass());
  if (!wigner_path.empty()) gkp::write_wigner_csv(gkp::wigner(state, gkp::WignerSpec{}), wigner_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian breeding of GKP states in a truncated Fock space"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string wigner_path;
  auto* sim = app.add_subcommand("simulate", "Run one pipeline from a JSON config");
  sim->add_option("--config", config_path, "Pipeline config (JSON)")->required();
  sim->add_option("--out", out_path, "Results file (JSON)")->required();
  sim->add_option("--wigner", wigner_path, "Wigner CSV of the final state");

  std::optional<std::string> rows;
  std::optional<int> dim;
  bool allow_long = false;
  auto* tab = app.add_subcommand("table1", "Reproduce Table 1 rows against the reference values");
  tab->add_option("--rows", rows, "Comma-separated row ids (default: all short rows)");
  tab->add_option("--dim", dim, "Override the Fock truncation");
  tab->add_flag("--allow-long", allow_long, "Permit the n=16 rows");

  int k = 0;
  double delta_db = 0.0;
  std::optional<double> kappa_db;
  int target_dim = 56;
  std::string target_wigner;
  auto* tgt = app.add_subcommand("target", "Build a codeword and optionally sample its Wigner function");
  tgt->add_option("--k", k, "Codeword label")->required()->check(CLI::IsMember({0, 1}));
  tgt->add_option("--delta-db", delta_db, "Peak squeezing 10 log10 Delta^2")->required();
  tgt->add_option("--kappa-db", kappa_db, "Envelope 10 log10 kappa^2 (default: same as Delta)");
  tgt->add_option("--dim", target_dim, "Fock truncation");
  tgt->add_option("--wigner", target_wigner, "Wigner CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*sim) return simulate(config_path, out_path, wigner_path);
    if (*tab) return table1(rows, dim, allow_long);
    if (*tgt) return target(k, delta_db, kappa_db, target_dim, target_wigner);
  } catch (const gkp::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const gkp::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return kExitNumeric;
  }
  return 0;
}
