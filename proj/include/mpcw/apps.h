#pragma once
#include <map>
#include <optional>
#include <set>
#include <string>

#include "mpcw/mpc_third.h"

// Application protocols on the honest-majority suite: distributed password
// authentication, secret and unanimous ballots, anonymous mail.
namespace mpcw::apps {

// ---- passwords ----

// Each host keeps one share per enrolled user.
struct PasswordStore {
  std::map<std::string, third::Secret> pw;
};

enum class AuthMode { Fast, Certified };

struct AuthResult {
  bool accept = false;
  bool retried = false;   // certified mode hit a spurious u = 0 and redrew
  bool exhausted = false; // retry budget spent without a usable certificate
  uint64_t w = 0;         // the revealed product (uniform nonzero on mismatch)
};

// Enroll `user`: `owner` verifiably shares the password, every host stores
// its share. One batch per call.
void password_init(third::Party& P, PasswordStore& st, const std::string& user, int owner,
                   uint64_t password);

// v = password - attempt, then reveal w = v*r for a joint random r; accept
// iff w = 0. Certified mode also draws s and retries until u = r*s != 0,
// which certifies r != 0 so a mismatch can never be accepted.
// Throws std::out_of_range for an unknown user.
AuthResult password_authenticate(third::Party& P, PasswordStore& st, const std::string& user,
                                 int requester, uint64_t attempt, AuthMode mode,
                                 int max_tries = 32);

// ---- ballots ----

struct BallotResult {
  uint64_t tally = 0;
  std::vector<uint64_t> z;   // revealed validity values, zero for honest bits
  std::set<int> invalid;     // voters with z != 0, excluded from the tally
};
// Every player casts one vote; z_i = x_i(x_i - 1) is revealed to weed out
// non-bits, then the valid votes are summed and revealed.
BallotResult secret_ballot(third::Party& P, uint64_t my_vote);

struct UnanimousResult {
  bool unanimous = false;
  uint64_t revealed = 0;  // (sum - n)^(order-1): 0 iff unanimous, else 1
};
// Reveals only whether every vote was 1; the revealed word is constant over
// all non-unanimous tallies. Requires field order > n.
UnanimousResult unanimous_vote(third::Party& P, uint64_t my_vote);

// ---- anonymous mail ----

enum class MailMode { Permutation, Mailbox };

struct MailResult {
  bool ok = false;                   // no collision, mail delivered
  std::optional<uint64_t> received;  // my box content when delivered
  std::vector<uint64_t> box_flags;   // revealed per-box indicator sums
};
// Every player shares a message and an indicator row over the boxes; box
// sums are revealed to detect collisions (permutation mode also checks the
// row sums), then box j's content sum(M_i * d_ij) is opened to player j
// alone. limited_espionage skips the collision checks entirely.
MailResult anonymous_mail(third::Party& P, MailMode mode, uint64_t my_message, int my_dest,
                          bool limited_espionage = false);

}  // namespace mpcw::apps
