#include "mpcw/netsim.h"

#include <algorithm>
#include <barrier>
#include <mutex>
#include <sstream>
#include <thread>
#include <atomic>

namespace mpcw {

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::Private: return "priv";
    case Channel::Broadcast: return "bcast";
    case Channel::OT: return "ot";
    case Channel::OT12Send: return "ot12send";
    case Channel::OT12Choice: return "ot12choice";
    case Channel::OT12Deliver: return "ot12deliver";
    case Channel::TPEPost: return "tpepost";
    case Channel::TPEResult: return "tperesult";
    case Channel::CVIssue: return "cvissue";
    case Channel::CVTag: return "cvtag";
    case Channel::CVKey: return "cvkey";
  }
  return "?";
}

std::string Execution::trace_text() const {
  std::ostringstream os;
  for (auto& r : trace) {
    os << "r=" << r.round << " from=" << r.msg.from << " to=" << r.msg.to
       << " ch=" << channel_name(r.msg.ch) << " data=";
    for (size_t i = 0; i < r.msg.data.size(); ++i) {
      if (i) os << ",";
      os << std::hex << "0x" << r.msg.data[i] << std::dec;
    }
    os << "\n";
  }
  return os.str();
}

Metrics measure(const Execution& ex) { return ex.metrics; }

namespace {
bool msg_less(const Msg& a, const Msg& b) {
  if (a.from != b.from) return a.from < b.from;
  if (a.to != b.to) return a.to < b.to;
  if (a.ch != b.ch) return a.ch < b.ch;
  return a.data < b.data;
}
}  // namespace

class Sim {
 public:
  Sim(int n, SimOptions opt)
      : n_(n),
        opt_(std::move(opt)),
        coord_rng_(Rng::derive(opt_.seed, uint64_t(1) << 40)),
        outboxes_(n + 1),
        inboxes_(n + 1),
        out_slots_(n + 1),
        has_output_(n + 1, 0),
        barrier_(n, Completion{this}) {}

  Execution run(const std::function<void(Ctx&)>& program) {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errs(n_ + 1);
    for (int i = 1; i <= n_; ++i) {
      threads.emplace_back([this, i, &program, &errs] {
        Ctx ctx;
        ctx.id = i;
        ctx.n = n_;
        ctx.rng = Rng::derive(opt_.seed, uint64_t(i));
        ctx.sim_ = this;
        try {
          program(ctx);
        } catch (...) {
          errs[i] = std::current_exception();
        }
        barrier_.arrive_and_drop();
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
    Execution ex;
    ex.trace = std::move(trace_);
    for (int i = 1; i <= n_; ++i)
      if (!out_slots_[i].empty() || has_output_[i]) ex.outputs[i] = out_slots_[i];
    ex.metrics = metrics_;
    ex.metrics.rounds = round_;
    return ex;
  }

  std::vector<Msg> round_barrier(int id, std::vector<Msg> out) {
    outboxes_[id] = std::move(out);
    participants_.fetch_add(1, std::memory_order_relaxed);
    barrier_.arrive_and_wait();
    return std::move(inboxes_[id]);
  }

  void set_output(int id, std::vector<uint64_t> v) {
    out_slots_[id] = std::move(v);
    has_output_[id] = true;
  }

 private:
  struct Completion {
    Sim* s;
    void operator()() noexcept { s->deliver(); }
  };

  void deliver() {
    // A phase in which nobody called round() (players winding down via
    // arrive_and_drop) is not a protocol round.
    if (participants_.exchange(0, std::memory_order_relaxed) == 0) return;
    std::vector<Msg> posted;
    for (int i = 1; i <= n_; ++i) {
      for (auto& m : outboxes_[i]) {
        metrics_.messages++;
        uint64_t bits = 64 * uint64_t(m.data.size());
        metrics_.total_bits += bits;
        metrics_.bits_sent_by[i] += bits;
        posted.push_back(std::move(m));
      }
      outboxes_[i].clear();
      inboxes_[i].clear();
    }
    std::sort(posted.begin(), posted.end(), msg_less);

    // Adversary pass: operates on corrupt senders' traffic with a full view
    // of the round (rushing).
    const Adversary& adv = opt_.adversary;
    std::vector<Msg> kept;
    const std::vector<Msg> view = posted;
    for (auto& m : posted) {
      if (adv.is_corrupt(m.from)) {
        if (adv.kind == Adversary::Kind::FailStop && adv.halt_round >= 0 && round_ >= adv.halt_round)
          continue;
        if (adv.kind == Adversary::Kind::Omission && adv.keep && !adv.keep(round_, m))
          continue;
        if (adv.kind == Adversary::Kind::Byzantine && adv.tamper) adv.tamper(round_, view, m);
      }
      kept.push_back(std::move(m));
    }

    std::vector<std::pair<std::pair<int, int>, std::vector<uint64_t>>> ot12_sends;  // (from,to)->[len0,m0,m1]
    std::vector<std::pair<std::pair<int, int>, int>> ot12_choices;                  // (chooser,from)->c
    std::vector<std::pair<std::pair<int, int>, std::vector<uint64_t>>> tpe_posts;   // (from,peer)->[fid,in]

    for (auto& m : kept) {
      switch (m.ch) {
        case Channel::Private:
          inboxes_[m.to].push_back(m);
          trace_.push_back({round_, m});
          break;
        case Channel::Broadcast:
          for (int j = 1; j <= n_; ++j) inboxes_[j].push_back(m);
          trace_.push_back({round_, m});
          break;
        case Channel::OT:
          if (coord_rng_.bit()) {
            inboxes_[m.to].push_back(m);
            trace_.push_back({round_, m});
          }
          break;
        case Channel::OT12Send:
          ot12_sends.push_back({{m.from, m.to}, m.data});
          trace_.push_back({round_, m});
          break;
        case Channel::OT12Choice:
          ot12_choices.push_back({{m.from, m.to}, int(m.data.at(0))});
          trace_.push_back({round_, m});
          break;
        case Channel::TPEPost:
          tpe_posts.push_back({{m.from, m.to}, m.data});
          trace_.push_back({round_, m});
          break;
        case Channel::CVIssue: {
          // data = [owner, checker, value, k, label]; coordinator mints the
          // correlated rows: checker gets (bit, pad) rows, owner gets tags.
          int owner = int(m.data.at(0)), checker = int(m.data.at(1));
          uint64_t value = m.data.at(2);
          int k = int(m.data.at(3));
          uint64_t label = m.data.size() > 4 ? m.data.at(4) : 0;
          Msg tag_msg{m.from, owner, Channel::CVTag, {uint64_t(checker), label}};
          Msg key_msg{m.from, checker, Channel::CVKey, {uint64_t(owner), label}};
          for (int l = 0; l < k; ++l) {
            uint64_t bit = coord_rng_.bit() ? 1 : 0;
            const Field* cf = opt_.cv_field;
            uint64_t pad = cf ? coord_rng_.fe(*cf) : coord_rng_.next();
            uint64_t tag = cf ? cf->add(pad, bit ? value : 0) : pad + (bit ? value : 0);
            key_msg.data.push_back(bit);
            key_msg.data.push_back(pad);
            tag_msg.data.push_back(tag);
          }
          inboxes_[owner].push_back(tag_msg);
          inboxes_[checker].push_back(key_msg);
          trace_.push_back({round_, tag_msg});
          trace_.push_back({round_, key_msg});
          break;
        }
        default:
          throw std::logic_error("unexpected channel post");
      }
    }

    for (auto& [key, c] : ot12_choices) {
      auto [chooser, sender] = key;
      for (auto& [skey, data] : ot12_sends) {
        if (skey.first != sender || skey.second != chooser) continue;
        size_t len0 = size_t(data.at(0));
        std::vector<uint64_t> payload;
        if (c == 0)
          payload.assign(data.begin() + 1, data.begin() + 1 + len0);
        else
          payload.assign(data.begin() + 1 + len0, data.end());
        Msg d{sender, chooser, Channel::OT12Deliver, std::move(payload)};
        inboxes_[chooser].push_back(d);
        trace_.push_back({round_, d});
      }
    }

    for (size_t a = 0; a < tpe_posts.size(); ++a) {
      auto [i, peer_i] = tpe_posts[a].first;
      for (size_t b = a + 1; b < tpe_posts.size(); ++b) {
        auto [j, peer_j] = tpe_posts[b].first;
        if (j != peer_i || i != peer_j) continue;
        uint64_t fid = tpe_posts[a].second.at(0);
        if (tpe_posts[b].second.at(0) != fid) continue;
        // Convention: the lower-id player supplies the first argument.
        const auto& lo = i < j ? tpe_posts[a].second : tpe_posts[b].second;
        const auto& hi = i < j ? tpe_posts[b].second : tpe_posts[a].second;
        auto it = opt_.tpe_registry.find(fid);
        if (it == opt_.tpe_registry.end()) throw std::logic_error("unregistered tpe function");
        auto [out_lo, out_hi] = it->second(
            std::vector<uint64_t>(lo.begin() + 1, lo.end()),
            std::vector<uint64_t>(hi.begin() + 1, hi.end()));
        int lo_id = std::min(i, j), hi_id = std::max(i, j);
        Msg m1{hi_id, lo_id, Channel::TPEResult, std::move(out_lo)};
        Msg m2{lo_id, hi_id, Channel::TPEResult, std::move(out_hi)};
        inboxes_[lo_id].push_back(m1);
        inboxes_[hi_id].push_back(m2);
        trace_.push_back({round_, m1});
        trace_.push_back({round_, m2});
      }
    }

    for (int j = 1; j <= n_; ++j)
      std::sort(inboxes_[j].begin(), inboxes_[j].end(), msg_less);
    std::stable_sort(trace_.begin() + trace_mark_, trace_.end(),
                     [](const TraceRecord& a, const TraceRecord& b) { return msg_less(a.msg, b.msg); });
    trace_mark_ = trace_.size();
    ++round_;
  }

 private:
  int n_;
  SimOptions opt_;
  Rng coord_rng_;
  std::vector<std::vector<Msg>> outboxes_;
  std::vector<std::vector<Msg>> inboxes_;
  std::vector<std::vector<uint64_t>> out_slots_;
  std::vector<char> has_output_;
  std::vector<TraceRecord> trace_;
  size_t trace_mark_ = 0;
  Metrics metrics_;
  int round_ = 0;
  std::atomic<int> participants_{0};
  std::barrier<Completion> barrier_;
};

void Ctx::send(int to, std::vector<uint64_t> data) {
  outbox_.push_back({id, to, Channel::Private, std::move(data)});
}
void Ctx::broadcast(std::vector<uint64_t> data) {
  outbox_.push_back({id, 0, Channel::Broadcast, std::move(data)});
}
void Ctx::ot_send(int to, std::vector<uint64_t> data) {
  outbox_.push_back({id, to, Channel::OT, std::move(data)});
}
void Ctx::ot12_send(int to, std::vector<uint64_t> m0, std::vector<uint64_t> m1) {
  std::vector<uint64_t> data{uint64_t(m0.size())};
  data.insert(data.end(), m0.begin(), m0.end());
  data.insert(data.end(), m1.begin(), m1.end());
  outbox_.push_back({id, to, Channel::OT12Send, std::move(data)});
}
void Ctx::ot12_choose(int from, int choice) {
  outbox_.push_back({id, from, Channel::OT12Choice, {uint64_t(choice)}});
}
void Ctx::tpe_post(int peer, uint64_t func_id, std::vector<uint64_t> input) {
  std::vector<uint64_t> data{func_id};
  data.insert(data.end(), input.begin(), input.end());
  outbox_.push_back({id, peer, Channel::TPEPost, std::move(data)});
}
void Ctx::cv_issue(int owner, int checker, uint64_t value, int k, uint64_t label) {
  outbox_.push_back({id, 0, Channel::CVIssue,
                     {uint64_t(owner), uint64_t(checker), value, uint64_t(k), label}});
}

std::vector<Msg> Ctx::round() { return sim_->round_barrier(id, std::move(outbox_)); }

void Ctx::output(std::vector<uint64_t> out) { sim_->set_output(id, std::move(out)); }

const Msg* Ctx::find(const std::vector<Msg>& inbox, int from, Channel ch) {
  for (auto& m : inbox)
    if (m.from == from && m.ch == ch) return &m;
  return nullptr;
}
std::vector<uint64_t> Ctx::from(const std::vector<Msg>& inbox, int f, Channel ch) {
  const Msg* m = find(inbox, f, ch);
  if (!m) throw std::runtime_error("expected message missing");
  return m->data;
}

Execution run_protocol(int n, const std::function<void(Ctx&)>& program, const SimOptions& opt) {
  Sim sim(n, opt);
  return sim.run(program);
}
Execution run_protocol(int n, const std::function<void(Ctx&)>& program, uint64_t seed) {
  SimOptions opt;
  opt.seed = seed;
  return run_protocol(n, program, opt);
}

}  // namespace mpcw
