// anoneq: equilibria of two-strategy anonymous games from the command line.
//
// Subcommands: solve, verify, round, bounds, gen. Reports are line-oriented
// `key: value` text; profiles are space-separated probabilities of playing
// strategy 2, in player order.
//
// Exit codes: 0 success, 1 verification/dominance failure, 2 bad input,
// 3 resource cap reached.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "anoneq/dist.hpp"
#include "anoneq/equilibrium.hpp"
#include "anoneq/game.hpp"
#include "anoneq/ptas.hpp"
#include "anoneq/rounding.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitCapHit = 3;

int env_threads() {
  const char* raw = std::getenv("ANONEQ_THREADS");
  if (raw == nullptr) return 0;  // auto
  try {
    const int value = std::stoi(raw);
    return value < 0 ? 0 : value;
  } catch (...) {
    return 0;
  }
}

std::string join_profile(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    out += anoneq::decimal_string(v(i));
  }
  return out;
}

// Accepts either a path to a whitespace-separated file of decimals or the
// decimals themselves.
Eigen::VectorXd parse_profile_arg(const std::string& arg) {
  std::string text = arg;
  std::error_code probe;
  if (std::filesystem::is_regular_file(arg, probe)) {
    std::ifstream in(arg, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  std::istringstream in(text);
  std::vector<double> values;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      values.push_back(v);
    } catch (...) {
      throw std::runtime_error("malformed probability '" + tok + "'");
    }
  }
  if (values.empty()) throw std::runtime_error("empty probability list");
  Eigen::VectorXd out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) out(static_cast<Eigen::Index>(i)) = values[i];
  return out;
}

void print_check(const anoneq::BoundCheck& check) {
  std::cout << "check " << check.name << ": lhs=" << anoneq::decimal_string(check.lhs)
            << " rhs=" << anoneq::decimal_string(check.rhs) << " "
            << (check.pass ? "pass" : "FAIL") << "\n";
}

int cmd_solve(const std::string& game_path, anoneq::SolverConfig config, bool echo_config) {
  const anoneq::AnonymousGame game = anoneq::load_game_file(game_path);
  const anoneq::SolveOutcome outcome = anoneq::solve(game, config);
  if (echo_config) {
    std::cout << "config epsilon: " << anoneq::decimal_string(config.eps) << "\n";
    std::cout << "config k: " << config.k << "\n";
    std::cout << "config max-k: " << config.max_k << "\n";
    std::cout << "config c: " << anoneq::decimal_string(config.c) << "\n";
    std::cout << "config tol: " << anoneq::decimal_string(config.tol) << "\n";
    std::cout << "config sparse-cap: " << config.sparse_cap << "\n";
    std::cout << "config threads: " << config.threads << "\n";
  }
  if (!outcome.certificate) {
    std::cout << "status: exhausted\n";
    std::cout << "sparse-cap-hit: " << (outcome.sparse_cap_hit ? "yes" : "no") << "\n";
    std::cout << "candidates: " << outcome.candidates << "\n";
    for (const auto& [k, count] : outcome.per_k) {
      std::cout << "candidates at k=" << k << ": " << count << "\n";
    }
    std::cout << "wall-ms: " << anoneq::decimal_string(outcome.wall_seconds * 1000.0) << "\n";
    return kExitCapHit;
  }
  const auto& cert = *outcome.certificate;
  std::cout << "status: ok\n";
  std::cout << "method: " << cert.method << "\n";
  std::cout << "k: " << outcome.k_used << "\n";
  std::cout << "eps-requested: " << anoneq::decimal_string(config.eps) << "\n";
  std::cout << "eps-achieved: " << anoneq::decimal_string(cert.epsilon) << "\n";
  std::cout << "profile: " << join_profile(cert.profile) << "\n";
  std::cout << "regrets: " << join_profile(cert.regret) << "\n";
  std::cout << "candidates: " << outcome.candidates << "\n";
  for (const auto& [k, count] : outcome.per_k) {
    std::cout << "candidates at k=" << k << ": " << count << "\n";
  }
  std::cout << "wall-ms: " << anoneq::decimal_string(outcome.wall_seconds * 1000.0) << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& game_path, const std::string& profile_arg, double eps,
               double tol) {
  const anoneq::AnonymousGame game = anoneq::load_game_file(game_path);
  const Eigen::VectorXd profile = parse_profile_arg(profile_arg);
  anoneq::validate_profile(game, profile);
  const anoneq::NashCheck check = anoneq::is_eps_nash(game, profile, eps, tol);
  const anoneq::RegretReport report = anoneq::regrets(game, profile);
  std::cout << "status: " << (check.ok ? "pass" : "fail") << "\n";
  std::cout << "eps-requested: " << anoneq::decimal_string(eps) << "\n";
  std::cout << "eps-support: " << anoneq::decimal_string(report.eps_support) << "\n";
  std::cout << "eps-approx: " << anoneq::decimal_string(report.eps_approximate) << "\n";
  std::cout << "profile: " << join_profile(profile) << "\n";
  std::cout << "regrets: " << join_profile(report.support_regret) << "\n";
  for (Eigen::Index i = 0; i < game.players(); ++i) {
    std::cout << "utilities " << i + 1 << ": " << anoneq::decimal_string(report.utilities[i].u1)
              << " " << anoneq::decimal_string(report.utilities[i].u2) << "\n";
  }
  if (!check.ok) {
    for (const auto i : check.violators) std::cout << "violator: " << i + 1 << "\n";
  }
  return check.ok ? kExitOk : kExitVerifyFail;
}

int cmd_round(const std::string& profile_arg, int k, long n_for_grid) {
  const Eigen::VectorXd profile = parse_profile_arg(profile_arg);
  if (n_for_grid == 0) n_for_grid = profile.size();
  const anoneq::RoundingReport report =
      anoneq::round_profile(profile, anoneq::RoundingParams{k}, n_for_grid);
  std::cout << "k: " << k << "\n";
  std::cout << "grid-n: " << n_for_grid << "\n";
  std::cout << "trimmed: " << join_profile(report.trimmed) << "\n";
  std::cout << "rounded: " << join_profile(report.rounded) << "\n";
  if (const auto* uniform = std::get_if<anoneq::UniformStructure>(&report.structure)) {
    std::cout << "structure: uniform\n";
    std::cout << "shared-q: " << anoneq::decimal_string(uniform->q) << "\n";
    std::cout << "shared-count: " << uniform->shared.size() << "\n";
  } else {
    const auto& sparse = std::get<anoneq::SparseStructure>(report.structure);
    std::cout << "structure: sparse\n";
    long mixed = 0;
    for (const auto& [g, members] : sparse.grid) mixed += static_cast<long>(members.size());
    std::cout << "mixed-count: " << mixed << "\n";
  }
  std::cout << "grid-clamped: " << (report.grid_clamped ? "yes" : "no") << "\n";
  std::cout << "tv-full: " << anoneq::decimal_string(report.tv_full) << "\n";
  const double worst_loo =
      report.tv_leave_one_out.size() > 0 ? report.tv_leave_one_out.maxCoeff() : 0.0;
  std::cout << "tv-leave-one-out-max: " << anoneq::decimal_string(worst_loo) << "\n";
  for (const auto& check : report.checks) print_check(check);
  return kExitOk;
}

int cmd_bounds(const std::string& probs_arg, const std::string& compare) {
  const Eigen::VectorXd probs = parse_profile_arg(probs_arg);
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!(probs(i) >= 0.0 && probs(i) <= 1.0)) {
      throw std::invalid_argument("probability out of [0,1]");
    }
  }
  const anoneq::TranslatedPoissonParams params = anoneq::translated_poisson_fit(probs);
  std::cout << "mu: " << anoneq::decimal_string(params.mu) << "\n";
  std::cout << "sigma2: " << anoneq::decimal_string(params.sigma2) << "\n";
  std::cout << "compare: " << compare << "\n";

  const anoneq::CountPmf exact = anoneq::poisson_binomial(probs);
  double tv = 0.0;
  double bound = 0.0;
  if (compare == "tp") {
    bound = anoneq::rollin_bound(probs);
    tv = anoneq::tv_distance(exact, anoneq::translated_poisson_pmf(params));
  } else {
    // Moment-matched binomial: count from the square-over-sum-of-squares
    // ratio, success probability the exact mean ratio (no grid here).
    const double mu = probs.sum();
    const double lambda2 = probs.squaredNorm();
    const long count = std::max(1L, static_cast<long>(std::ceil(mu * mu / lambda2 - 1e-9)));
    const double q = mu / static_cast<double>(count);
    const anoneq::CountPmf fit = anoneq::binomial_pmf(count, q);
    const anoneq::TranslatedPoissonParams fit_params{mu, static_cast<double>(count) * q *
                                                             (1.0 - q)};
    std::cout << "fit-count: " << count << "\n";
    std::cout << "fit-q: " << anoneq::decimal_string(q) << "\n";
    tv = anoneq::tv_distance(exact, fit);
    Eigen::VectorXd fit_vector = Eigen::VectorXd::Constant(count, q);
    const double via_tp = anoneq::rollin_bound(probs) + anoneq::rollin_bound(fit_vector) +
                          anoneq::tp_distance_bound(params, fit_params);
    std::cout << "tp-pair-bound: "
              << anoneq::decimal_string(anoneq::tp_distance_bound(params, fit_params)) << "\n";
    bound = via_tp;
  }
  std::cout << "tv: " << anoneq::decimal_string(tv) << "\n";
  std::cout << "bound: " << anoneq::decimal_string(bound) << "\n";
  const bool pass = tv <= bound + 1e-9;
  std::cout << "dominance: " << (pass ? "pass" : "FAIL") << "\n";
  return pass ? kExitOk : kExitVerifyFail;
}

int cmd_gen(const std::string& kind, long players, std::uint64_t seed, const std::string& out) {
  const anoneq::AnonymousGame game = anoneq::generate(kind, players, seed);
  const std::string text = anoneq::save_game(game);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream file(out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write '" + out + "'");
    file << text;
    std::cout << "written: " << out << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"equilibria of two-strategy anonymous games"};
  app.require_subcommand(1);

  const auto open_unit = [](const std::string& value) -> std::string {
    try {
      const double eps = std::stod(value);
      if (eps > 0.0 && eps < 1.0) return {};
    } catch (...) {
    }
    return "must lie strictly between 0 and 1";
  };

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "search for an eps-Nash equilibrium");
  std::string solve_game;
  anoneq::SolverConfig config;
  bool seed_report = false;
  solve_cmd->add_option("game", solve_game, "game file")->required();
  solve_cmd->add_option("--epsilon", config.eps, "target approximation")
      ->required()
      ->check(open_unit);
  solve_cmd->add_option("--k", config.k, "explicit quantization parameter (>= 2)");
  solve_cmd->add_option("--max-k", config.max_k, "escalation ceiling");
  solve_cmd->add_option("--c", config.c, "scale in k = ceil(c/epsilon)");
  solve_cmd->add_option("--tol", config.tol, "comparison slack");
  solve_cmd->add_option("--sparse-cap", config.sparse_cap, "sparse candidate budget per k");
  solve_cmd->add_flag("--best", config.best, "scan all candidates, keep minimum regret");
  solve_cmd->add_flag("--seed-report", seed_report, "echo the full configuration");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "check the eps-Nash support condition");
  std::string verify_game, verify_profile;
  double verify_eps = 0.1;
  double verify_tol = anoneq::kDefaultTol;
  verify_cmd->add_option("game", verify_game, "game file")->required();
  verify_cmd->add_option("profile", verify_profile, "profile file or inline decimals")
      ->required();
  verify_cmd->add_option("--epsilon", verify_eps, "approximation to verify")->required();
  verify_cmd->add_option("--tol", verify_tol, "comparison slack");

  // round
  auto* round_cmd = app.add_subcommand("round", "round a profile onto the structured grids");
  std::string round_profile_arg;
  int round_k = 2;
  long round_n = 0;
  round_cmd->add_option("profile", round_profile_arg, "profile file or inline decimals")
      ->required();
  round_cmd->add_option("--k", round_k, "quantization parameter (>= 2)")->required();
  round_cmd->add_option("--n", round_n, "player count defining the 1/(k n) grid");

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "approximation bounds for a Bernoulli sum");
  std::string bounds_probs;
  std::string bounds_compare = "tp";
  bounds_cmd->add_option("probs", bounds_probs, "inline probabilities")->required();
  bounds_cmd->add_option("--compare", bounds_compare, "tp or binomial")
      ->check(CLI::IsMember({"tp", "binomial"}));

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "generate a benchmark game");
  std::string gen_kind;
  long gen_players = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "-";
  gen_cmd->add_option("--kind", gen_kind, "random | dominant | coordination | anticoordination")
      ->required();
  gen_cmd->add_option("--players", gen_players, "player count")->required();
  gen_cmd->add_option("--seed", gen_seed, "generator seed");
  gen_cmd->add_option("--out", gen_out, "output path, '-' for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  try {
    if (*solve_cmd) {
      config.threads = env_threads();
      return cmd_solve(solve_game, config, seed_report);
    }
    if (*verify_cmd) return cmd_verify(verify_game, verify_profile, verify_eps, verify_tol);
    if (*round_cmd) return cmd_round(round_profile_arg, round_k, round_n);
    if (*bounds_cmd) return cmd_bounds(bounds_probs, bounds_compare);
    if (*gen_cmd) return cmd_gen(gen_kind, gen_players, gen_seed, gen_out);
  } catch (const std::exception& e) {
    std::cout << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
