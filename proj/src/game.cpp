#include "anoneq/game.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace anoneq {

namespace {

std::vector<std::string> significant_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream probe(line);
    std::string tok;
    if (probe >> tok) lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) toks.push_back(tok);
  return toks;
}

double parse_decimal(const std::string& tok) {
  double value = 0.0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw std::runtime_error("malformed decimal '" + tok + "'");
  }
  return value;
}

long parse_count(const std::string& tok) {
  long value = 0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw std::runtime_error("malformed integer '" + tok + "'");
  }
  return value;
}

void parse_payoff_row(const std::vector<std::string>& toks, const std::string& tag,
                      Eigen::MatrixXd& table, Eigen::Index player) {
  const Eigen::Index n = table.cols();
  if (toks.empty() || toks[0] != tag) {
    throw std::runtime_error("expected a '" + tag + "' line for player " +
                             std::to_string(player + 1));
  }
  if (static_cast<Eigen::Index>(toks.size()) != n + 1) {
    throw std::runtime_error("'" + tag + "' line for player " + std::to_string(player + 1) +
                             " must carry exactly " + std::to_string(n) + " values");
  }
  for (Eigen::Index m = 0; m < n; ++m) table(player, m) = parse_decimal(toks[m + 1]);
}

double uniform_unit(std::mt19937_64& rng) {
  // 53-bit mantissa draw; bit-identical on every platform.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void validate_game(const AnonymousGame& game) {
  const Eigen::Index n = game.u1.rows();
  if (n < 1) throw std::invalid_argument("game needs at least one player");
  if (game.u1.cols() != n || game.u2.rows() != n || game.u2.cols() != n) {
    throw std::invalid_argument("payoff tables must both be n x n");
  }
  for (const Eigen::MatrixXd* table : {&game.u1, &game.u2}) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index m = 0; m < n; ++m) {
        const double v = (*table)(i, m);
        if (!(v >= 0.0 && v <= 1.0)) {
          throw std::invalid_argument("payoff " + decimal_string(v) + " outside [0,1]");
        }
      }
    }
  }
}

void validate_profile(const AnonymousGame& game, const MixedProfile& profile) {
  if (profile.size() != game.players()) {
    throw std::invalid_argument("profile length " + std::to_string(profile.size()) +
                                " does not match player count " +
                                std::to_string(game.players()));
  }
  for (Eigen::Index i = 0; i < profile.size(); ++i) {
    if (!(profile(i) >= 0.0 && profile(i) <= 1.0)) {
      throw std::invalid_argument("profile entry out of [0,1] at index " + std::to_string(i));
    }
  }
}

AnonymousGame load_game(const std::string& text) {
  const auto lines = significant_lines(text);
  std::size_t at = 0;
  auto next = [&]() -> std::vector<std::string> {
    if (at >= lines.size()) throw std::runtime_error("unexpected end of game file");
    return tokens_of(lines[at++]);
  };

  auto header = next();
  if (header.size() != 2 || header[0] != "anon-game" || header[1] != "v1") {
    throw std::runtime_error("missing 'anon-game v1' header");
  }
  auto players_line = next();
  if (players_line.size() != 2 || players_line[0] != "players") {
    throw std::runtime_error("expected 'players <n>'");
  }
  const long n = parse_count(players_line[1]);
  if (n < 1) throw std::invalid_argument("player count must be positive");

  bool do_normalize = false;
  std::size_t payoff_start = at;
  if (at < lines.size()) {
    const auto toks = tokens_of(lines[at]);
    if (!toks.empty() && toks[0] == "normalize") {
      if (toks.size() != 2 || (toks[1] != "on" && toks[1] != "off")) {
        throw std::runtime_error("normalize takes 'on' or 'off'");
      }
      do_normalize = toks[1] == "on";
      payoff_start = ++at;
    }
  }
  (void)payoff_start;

  AnonymousGame game;
  game.u1.resize(n, n);
  game.u2.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    parse_payoff_row(next(), "u1", game.u1, i);
    parse_payoff_row(next(), "u2", game.u2, i);
  }
  if (at != lines.size()) throw std::runtime_error("trailing content after the payoff table");

  for (const Eigen::MatrixXd* table : {&game.u1, &game.u2}) {
    if (!table->allFinite()) throw std::invalid_argument("non-finite payoff value");
  }
  if (do_normalize) return normalize(game);
  validate_game(game);
  return game;
}

AnonymousGame load_game_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open game file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_game(buf.str());
}

std::string save_game(const AnonymousGame& game) {
  validate_game(game);
  const Eigen::Index n = game.players();
  std::ostringstream out;
  out << "anon-game v1\n";
  out << "players " << n << "\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const auto& [tag, table] : {std::pair{"u1", &game.u1}, std::pair{"u2", &game.u2}}) {
      out << tag;
      for (Eigen::Index m = 0; m < n; ++m) out << ' ' << decimal_string((*table)(i, m));
      out << '\n';
    }
  }
  return out.str();
}

AnonymousGame normalize(const AnonymousGame& game) {
  if (!game.u1.allFinite() || !game.u2.allFinite()) {
    throw std::invalid_argument("cannot normalize non-finite payoffs");
  }
  const double lo = std::min(game.u1.minCoeff(), game.u2.minCoeff());
  const double hi = std::max(game.u1.maxCoeff(), game.u2.maxCoeff());
  AnonymousGame out = game;
  if (hi == lo) {
    out.u1.setZero();
    out.u2.setZero();
  } else if (lo != 0.0 || hi != 1.0) {
    const double span = hi - lo;
    out.u1 = (game.u1.array() - lo) / span;
    out.u2 = (game.u2.array() - lo) / span;
  }
  validate_game(out);
  return out;
}

AnonymousGame generate(const std::string& kind, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("player count must be positive");
  AnonymousGame game;
  game.u1.resize(n, n);
  game.u2.resize(n, n);

  if (kind == "random") {
    std::mt19937_64 rng(seed);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index m = 0; m < n; ++m) game.u1(i, m) = uniform_unit(rng);
      for (Eigen::Index m = 0; m < n; ++m) game.u2(i, m) = uniform_unit(rng);
    }
  } else if (kind == "dominant") {
    game.u1.setZero();
    game.u2.setOnes();
  } else if (kind == "coordination" || kind == "anticoordination") {
    // Payoff is the fraction of other players on the same strategy
    // (coordination) or on the opposite one (anticoordination).
    if (n == 1) {
      game.u1.setConstant(0.5);
      game.u2.setConstant(0.5);
    } else {
      const double span = static_cast<double>(n - 1);
      for (Eigen::Index m = 0; m < n; ++m) {
        const double frac_at_2 = static_cast<double>(m) / span;
        const bool coord = kind == "coordination";
        game.u2.col(m).setConstant(coord ? frac_at_2 : 1.0 - frac_at_2);
        game.u1.col(m).setConstant(coord ? 1.0 - frac_at_2 : frac_at_2);
      }
    }
  } else {
    throw std::invalid_argument("unknown generator kind '" + kind + "'");
  }
  validate_game(game);
  return game;
}

std::string decimal_string(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace anoneq
