#pragma once
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mpcw/field.h"
#include "mpcw/rng.h"

namespace mpcw {

// Channel kinds. Private/Broadcast are ordinary synchronous channels.
// OT is the probability-1/2 erasure channel. OT12* implement an ideal
// 1-out-of-2 oblivious transfer, TPE an ideal two-party evaluation, and
// CV* an ideal correlated-randomness setup for check vectors.
enum class Channel {
  Private,
  Broadcast,
  OT,
  OT12Send,
  OT12Choice,
  OT12Deliver,
  TPEPost,
  TPEResult,
  CVIssue,
  CVTag,
  CVKey,
};

const char* channel_name(Channel c);

struct Msg {
  int from = 0;
  int to = 0;  // 0 = broadcast
  Channel ch = Channel::Private;
  std::vector<uint64_t> data;
};

struct TraceRecord {
  int round;
  Msg msg;
};

struct Metrics {
  int rounds = 0;
  uint64_t messages = 0;
  uint64_t total_bits = 0;
  std::map<int, uint64_t> bits_sent_by;
};

struct Execution {
  std::vector<TraceRecord> trace;
  std::map<int, std::vector<uint64_t>> outputs;
  Metrics metrics;
  std::string trace_text() const;  // canonical line-per-record dump
};

Metrics measure(const Execution& ex);

// Adversary script applied by the coordinator at delivery time. The tamper
// hook sees every outbound message of the round (rushing: it observes honest
// traffic before corrupt messages are fixed) and may rewrite corrupt players'
// payloads in place. Returning false from keep() drops the message (omission).
struct Adversary {
  enum class Kind { Passive, FailStop, Omission, Byzantine };
  Kind kind = Kind::Passive;
  std::set<int> corrupt;
  int halt_round = -1;  // FailStop: no messages from corrupt players at/after this round
  std::function<void(int round, const std::vector<Msg>& all, Msg& m)> tamper;  // corrupt senders only
  std::function<bool(int round, const Msg& m)> keep;  // Omission: false = drop
  bool is_corrupt(int i) const { return corrupt.count(i) != 0; }
};

class Sim;

// Per-player handle used inside protocol code. Sends are queued and take
// effect at the next round() barrier, which returns the player's inbox.
class Ctx {
 public:
  int id = 0;  // 1-based
  int n = 0;
  Rng rng{0};

  void send(int to, std::vector<uint64_t> data);
  void broadcast(std::vector<uint64_t> data);
  void ot_send(int to, std::vector<uint64_t> data);
  void ot12_send(int to, std::vector<uint64_t> m0, std::vector<uint64_t> m1);
  void ot12_choose(int from, int choice);
  void tpe_post(int peer, uint64_t func_id, std::vector<uint64_t> input);
  // Ideal check-vector setup: issue k (pad, bit) rows to `checker` and the
  // matching tags for `value` to `owner`. The label is echoed in both
  // deliveries so several issues between the same pair stay matched up.
  void cv_issue(int owner, int checker, uint64_t value, int k, uint64_t label = 0);

  std::vector<Msg> round();
  void output(std::vector<uint64_t> out);

  // Inbox helpers.
  static const Msg* find(const std::vector<Msg>& inbox, int from, Channel ch = Channel::Private);
  static std::vector<uint64_t> from(const std::vector<Msg>& inbox, int f, Channel ch = Channel::Private);

 private:
  friend class Sim;
  Sim* sim_ = nullptr;
  std::vector<Msg> outbox_;
};

// Ideal two-party evaluation functions are registered once per simulation.
using TpeFunc = std::function<std::pair<std::vector<uint64_t>, std::vector<uint64_t>>(
    const std::vector<uint64_t>&, const std::vector<uint64_t>&)>;

struct SimOptions {
  uint64_t seed = 1;
  Adversary adversary;  // Passive/empty by default
  std::map<uint64_t, TpeFunc> tpe_registry;
  const Field* cv_field = nullptr;  // arithmetic for check-vector tags
};

// Run the same program on n players (SPMD; code branches on ctx.id).
Execution run_protocol(int n, const std::function<void(Ctx&)>& program, const SimOptions& opt);
Execution run_protocol(int n, const std::function<void(Ctx&)>& program, uint64_t seed);

}  // namespace mpcw
