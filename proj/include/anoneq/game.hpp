#pragma once

// Two-strategy anonymous games: representation, validation, generation,
// normalization, and the text file format.
//
// Game file format (UTF-8 text, '#' starts a comment):
//   anon-game v1
//   players <n>
//   normalize <on|off>        (optional; default off)
//   u1 <n decimals>           (player 1, payoff vs 0..n-1 opponents at strategy 2)
//   u2 <n decimals>
//   ... one u1/u2 pair per player ...

#include <Eigen/Core>

#include <cstdint>
#include <string>

namespace anoneq {

// Entry i is the probability that player i plays strategy 2.
using MixedProfile = Eigen::VectorXd;

// u1(i, m) / u2(i, m): payoff of player i for strategy 1 / 2 when m of the
// other players choose strategy 2. All payoffs live in [0, 1]. Values are
// immutable after construction and safe to share across threads.
struct AnonymousGame {
  Eigen::MatrixXd u1;
  Eigen::MatrixXd u2;

  Eigen::Index players() const { return u1.rows(); }
  double payoff(Eigen::Index player, int strategy, Eigen::Index others_at_2) const {
    return strategy == 1 ? u1(player, others_at_2) : u2(player, others_at_2);
  }
};

// Shape and range checks. Throws std::invalid_argument on violation.
void validate_game(const AnonymousGame& game);
void validate_profile(const AnonymousGame& game, const MixedProfile& profile);

// Parses the documented format. Throws std::runtime_error on malformed text
// and std::invalid_argument on domain violations (payoff outside [0,1]
// without `normalize on`, non-positive player count, non-finite payoffs).
AnonymousGame load_game(const std::string& text);
AnonymousGame load_game_file(const std::string& path);

// Serializes so that load_game(save_game(g)) reproduces g exactly.
std::string save_game(const AnonymousGame& game);

// One global affine map of all payoffs onto [0,1]; a constant game maps to
// all zeros. Idempotent. Throws on non-finite payoffs.
AnonymousGame normalize(const AnonymousGame& game);

// Deterministic generators: `random` (i.i.d. uniform payoffs), `dominant`
// (strategy 2 always pays 1, strategy 1 pays 0), `coordination` (payoff
// increases with the number of same-strategy opponents), `anticoordination`
// (payoff decreases with it). Only `random` consumes the seed.
AnonymousGame generate(const std::string& kind, Eigen::Index n, std::uint64_t seed);

// Shortest decimal text that parses back to exactly the same double.
std::string decimal_string(double value);

}  // namespace anoneq
