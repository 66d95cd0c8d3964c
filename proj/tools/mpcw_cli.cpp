// Experiment runner: `run` executes one configured protocol deterministically
// and writes report + trace; `sweep` aggregates statistics over parameter
// ranges. Exit codes: 0 success, 1 invalid config or usage, 2 protocol-level
// rejection (reason in the report).
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mpcw/apps.h"
#include "mpcw/constrounds.h"
#include "mpcw/fair.h"

using namespace mpcw;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const json& need(const json& cfg, const std::string& key) {
  auto it = cfg.find(key);
  if (it == cfg.end()) throw ConfigError("missing config key: " + key);
  return *it;
}

Field parse_field(const json& spec) {
  std::string kind = need(spec, "kind").get<std::string>();
  if (kind == "prime") return Field(FieldSpec::prime(need(spec, "modulus").get<uint64_t>()));
  if (kind == "binary") return Field(FieldSpec::binary(need(spec, "bits").get<unsigned>()));
  throw ConfigError("unknown field kind: " + kind);
}

SimOptions parse_sim(const json& cfg, const Field& f) {
  SimOptions opt;
  opt.seed = need(cfg, "seed").get<uint64_t>();  // seeds are mandatory
  opt.cv_field = &f;
  if (cfg.contains("adversary")) {
    const json& a = cfg["adversary"];
    std::string kind = need(a, "kind").get<std::string>();
    if (kind == "passive") opt.adversary.kind = Adversary::Kind::Passive;
    else if (kind == "failstop") {
      opt.adversary.kind = Adversary::Kind::FailStop;
      opt.adversary.halt_round = need(a, "halt_round").get<int>();
    } else throw ConfigError("unknown adversary kind: " + kind);
    for (int p : a.value("corrupt", std::vector<int>{})) opt.adversary.corrupt.insert(p);
  }
  return opt;
}

json adversary_summary(const SimOptions& opt) {
  json a;
  a["kind"] = opt.adversary.kind == Adversary::Kind::FailStop ? "failstop" : "passive";
  a["corrupt"] = opt.adversary.corrupt;
  if (opt.adversary.kind == Adversary::Kind::FailStop)
    a["halt_round"] = opt.adversary.halt_round;
  return a;
}

void check_suite_bound(const std::string& suite, int n, int t) {
  if (suite == "third" && 3 * t >= n) throw ConfigError("suite third requires 3t<n");
  if (suite == "half" && 2 * t >= n) throw ConfigError("suite half requires 2t<n");
}

struct RunOutcome {
  Execution ex;
  json detail;
  bool rejected = false;
  std::string reason;
};

RunOutcome run_config(const json& cfg) {
  std::string proto = need(cfg, "protocol").get<std::string>();
  Field f = parse_field(need(cfg, "field"));
  int n = need(cfg, "n").get<int>();
  int t = cfg.value("t", 0);
  SimOptions opt = parse_sim(cfg, f);
  RunOutcome out;

  if (proto == "eval_const") {
    check_suite_bound("third", n, t);
    auto fm = cr::parse_formula(need(cfg, "formula").get<std::string>());
    auto inputs = need(cfg, "inputs").get<std::vector<uint64_t>>();
    auto mp = cr::compile_formula(f, fm);
    out.ex = run_protocol(n, [&](Ctx& ctx) {
      third::Party P(ctx, f, t);
      std::vector<std::pair<int, uint64_t>> deals;
      for (uint64_t v : inputs) deals.push_back({1, v});
      auto xs = third::vss_deal_many(P, deals);
      ctx.output({third::reveal(P, cr::eval_const(P, mp, xs))});
    }, opt);
    out.detail["formula"] = cr::print_formula(fm);
  } else if (proto == "eval_circuit") {
    check_suite_bound("third", n, t);
    auto c = third::Circuit::parse(need(cfg, "circuit").get<std::string>());
    std::map<int, std::vector<uint64_t>> inputs;
    for (auto& [k, v] : need(cfg, "inputs").items())
      inputs[std::stoi(k)] = v.get<std::vector<uint64_t>>();
    out.ex = run_protocol(n, [&](Ctx& ctx) {
      third::Party P(ctx, f, t);
      auto it = inputs.find(ctx.id);
      ctx.output(third::eval_circuit(P, c, it == inputs.end() ? std::vector<uint64_t>{}
                                                              : it->second));
    }, opt);
  } else if (proto == "ballot") {
    check_suite_bound("third", n, t);
    auto votes = need(cfg, "votes").get<std::vector<uint64_t>>();
    if (int(votes.size()) != n) throw ConfigError("votes must list one bit per player");
    out.ex = run_protocol(n, [&](Ctx& ctx) {
      third::Party P(ctx, f, t);
      auto r = apps::secret_ballot(P, votes[ctx.id - 1]);
      std::vector<uint64_t> o{r.tally, r.invalid.size()};
      for (uint64_t z : r.z) o.push_back(z);
      ctx.output(o);
    }, opt);
  } else if (proto == "unanimous") {
    check_suite_bound("third", n, t);
    auto votes = need(cfg, "votes").get<std::vector<uint64_t>>();
    if (int(votes.size()) != n) throw ConfigError("votes must list one bit per player");
    out.ex = run_protocol(n, [&](Ctx& ctx) {
      third::Party P(ctx, f, t);
      auto r = apps::unanimous_vote(P, votes[ctx.id - 1]);
      ctx.output({r.unanimous ? uint64_t(1) : 0, r.revealed});
    }, opt);
  } else if (proto == "password") {
    check_suite_bound("third", n, t);
    uint64_t pw = need(cfg, "password").get<uint64_t>();
    uint64_t attempt = need(cfg, "attempt").get<uint64_t>();
    auto mode = cfg.value("mode", std::string("fast")) == "certified"
                    ? apps::AuthMode::Certified
                    : apps::AuthMode::Fast;
    out.ex = run_protocol(n, [&](Ctx& ctx) {
      third::Party P(ctx, f, t);
      apps::PasswordStore st;
      apps::password_init(P, st, "user", 1, pw);
      auto r = apps::password_authenticate(P, st, "user", 2, attempt, mode);
      ctx.output({r.accept ? uint64_t(1) : 0, r.w});
    }, opt);
    if (out.ex.outputs[1][0] == 0) {
      out.rejected = true;
      out.reason = "authentication rejected";
    }
  } else if (proto == "mail") {
    check_suite_bound("third", n, t);
    auto msgs = need(cfg, "messages").get<std::vector<uint64_t>>();
    auto dests = need(cfg, "destinations").get<std::vector<int>>();
    if (int(msgs.size()) != n || int(dests.size()) != n)
      throw ConfigError("messages/destinations must list one entry per player");
    auto mode = cfg.value("mode", std::string("permutation")) == "mailbox"
                    ? apps::MailMode::Mailbox
                    : apps::MailMode::Permutation;
    out.ex = run_protocol(n, [&](Ctx& ctx) {
      third::Party P(ctx, f, t);
      auto r = apps::anonymous_mail(P, mode, msgs[ctx.id - 1], dests[ctx.id - 1]);
      std::vector<uint64_t> o{r.ok ? uint64_t(1) : 0, r.received ? *r.received : 0};
      for (uint64_t b : r.box_flags) o.push_back(b);
      ctx.output(o);
    }, opt);
    if (out.ex.outputs[1][0] == 0) {
      out.rejected = true;
      out.reason = "mail collision";
    }
  } else if (proto == "fair_disclose") {
    if (n != 2) throw ConfigError("fair_disclose runs with n=2");
    int k = need(cfg, "k").get<int>();
    auto shares = need(cfg, "shares").get<std::vector<uint64_t>>();
    if (shares.size() != 2) throw ConfigError("shares must list the two xor-shares of F");
    opt.tpe_registry[fair::kTpeCoins] = fair::make_coin_tpe();
    opt.tpe_registry[fair::kTpeMult] = fair::make_mult_tpe(f);
    out.ex = run_protocol(2, [&](Ctx& ctx) {
      fair::Party P(ctx, f);
      auto r = fair::fair_disclose(P, shares[ctx.id - 1], k, cfg.value("halter", 0),
                                   cfg.value("halt_after", 0));
      ctx.output({uint64_t(r.guess), r.completed ? uint64_t(1) : 0, uint64_t(r.rounds_seen)});
    }, opt);
    if (out.ex.outputs[1][1] == 0) {
      out.rejected = true;
      out.reason = "disclosure halted early";
    }
  } else {
    throw ConfigError("unknown protocol: " + proto);
  }
  return out;
}

json report_json(const json& cfg, const RunOutcome& out, const SimOptions& opt) {
  json rep;
  rep["config"] = cfg;
  rep["status"] = out.rejected ? "rejected" : "ok";
  if (out.rejected) rep["reason"] = out.reason;
  if (!out.detail.empty()) rep["detail"] = out.detail;
  for (auto& [id, vals] : out.ex.outputs) rep["outputs"][std::to_string(id)] = vals;
  rep["metrics"]["rounds"] = out.ex.metrics.rounds;
  rep["metrics"]["messages"] = out.ex.metrics.messages;
  rep["metrics"]["total_bits"] = out.ex.metrics.total_bits;
  for (auto& [id, b] : out.ex.metrics.bits_sent_by)
    rep["metrics"]["bits_sent_by"][std::to_string(id)] = b;
  rep["adversary"] = adversary_summary(opt);
  return rep;
}

std::string report_text(const json& rep) {
  std::ostringstream os;
  os << "protocol: " << rep["config"]["protocol"].get<std::string>() << "\n";
  os << "status: " << rep["status"].get<std::string>() << "\n";
  if (rep.contains("reason")) os << "reason: " << rep["reason"].get<std::string>() << "\n";
  for (auto& [id, vals] : rep["outputs"].items()) {
    os << "player " << id << ":";
    for (auto& v : vals) os << " " << v.get<uint64_t>();
    os << "\n";
  }
  os << "rounds: " << rep["metrics"]["rounds"].get<int>() << "\n";
  os << "messages: " << rep["metrics"]["messages"].get<uint64_t>() << "\n";
  os << "total_bits: " << rep["metrics"]["total_bits"].get<uint64_t>() << "\n";
  return os.str();
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << body;
}

int cmd_run(const std::string& cfg_path, const std::string& out_dir) {
  std::ifstream in(cfg_path);
  if (!in) {
    std::cerr << "cannot read config " << cfg_path << "\n";
    return 1;
  }
  json cfg = json::parse(in);
  Field f = parse_field(need(cfg, "field"));
  SimOptions opt = parse_sim(cfg, f);
  RunOutcome out = run_config(cfg);
  json rep = report_json(cfg, out, opt);
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "report.json", rep.dump(2) + "\n");
  write_file(fs::path(out_dir) / "report.txt", report_text(rep));
  write_file(fs::path(out_dir) / "trace.txt", out.ex.trace_text());
  std::cout << report_text(rep);
  return out.rejected ? 2 : 0;
}

// ---- sweeps ----

struct SweepRow {
  std::string cell;
  uint64_t param = 0;
  uint64_t trials = 0;
  double rate = 0;
  double mean_rounds = 0;
  double mean_bits = 0;
};

// batched mismatch authentications in a single simulation per modulus
SweepRow password_cell(uint64_t modulus, int n, int t, uint64_t seed, uint64_t trials) {
  Field f(FieldSpec::prime(modulus));
  SimOptions opt;
  opt.seed = seed;
  auto ex = run_protocol(n, [&](Ctx& ctx) {
    third::Party P(ctx, f, t);
    apps::PasswordStore st;
    apps::password_init(P, st, "user", 1, 2 % modulus);
    auto at = third::share_plain(P, 2, 1);
    auto v = third::linear_combine(P, {{1, st.pw["user"]}, {f.sub(0, 1), at}}, 0);
    auto rs = third::rand_secret_many(P, int(trials));
    std::vector<std::pair<third::Secret, third::Secret>> pairs;
    for (auto& r : rs) pairs.push_back({v, r});
    auto ws = third::reveal_many(P, third::multiply_many(P, pairs));
    uint64_t zeros = 0;
    for (uint64_t w : ws) zeros += w == 0;
    ctx.output({zeros});
  }, opt);
  SweepRow row{"password", modulus, trials};
  row.rate = double(ex.outputs[1][0]) / double(trials);
  row.mean_rounds = ex.metrics.rounds;
  row.mean_bits = double(ex.metrics.total_bits);
  return row;
}

SweepRow fairness_cell(int k, uint64_t seed, uint64_t trials) {
  Field f(FieldSpec::prime(5));
  SweepRow row{"fairness", uint64_t(k), trials};
  uint64_t wrong = 0, rounds = 0, bits = 0;
  for (uint64_t tr = 0; tr < trials; ++tr) {
    Rng rng = Rng::derive(seed, tr);
    uint64_t s1 = rng.bit(), s2 = rng.bit();
    SimOptions opt;
    opt.seed = rng.next();
    opt.tpe_registry[fair::kTpeCoins] = fair::make_coin_tpe();
    auto ex = run_protocol(2, [&](Ctx& ctx) {
      fair::Party P(ctx, f);
      auto r = fair::fair_disclose(P, ctx.id == 1 ? s1 : s2, k);
      ctx.output({uint64_t(r.guess)});
    }, opt);
    wrong += ex.outputs[1][0] != (s1 ^ s2);
    rounds += uint64_t(ex.metrics.rounds);
    bits += ex.metrics.total_bits;
  }
  row.rate = double(wrong) / double(trials);
  row.mean_rounds = double(rounds) / double(trials);
  row.mean_bits = double(bits) / double(trials);
  return row;
}

int cmd_sweep(const std::string& cfg_path, uint64_t trials_flag, const std::string& out_dir) {
  std::ifstream in(cfg_path);
  if (!in) {
    std::cerr << "cannot read config " << cfg_path << "\n";
    return 1;
  }
  json cfg = json::parse(in);
  uint64_t seed = need(cfg, "seed").get<uint64_t>();
  uint64_t trials = trials_flag ? trials_flag : cfg.value("trials", uint64_t(100));
  std::string kind = need(cfg, "sweep").get<std::string>();

  std::vector<SweepRow> rows;
  if (kind == "password") {
    int n = cfg.value("n", 4), t = cfg.value("t", 1);
    check_suite_bound("third", n, t);
    for (uint64_t m : need(cfg, "moduli").get<std::vector<uint64_t>>())
      rows.push_back(password_cell(m, n, t, seed, trials));
  } else if (kind == "fairness") {
    for (int k : need(cfg, "ks").get<std::vector<int>>())
      rows.push_back(fairness_cell(k, seed, trials));
  } else {
    throw ConfigError("unknown sweep kind: " + kind);
  }

  std::ostringstream csv;
  csv << "cell,param,trials,rate,mean_rounds,mean_bits\n";
  json jrows = json::array();
  for (auto& r : rows) {
    csv << r.cell << "," << r.param << "," << r.trials << "," << r.rate << ","
        << r.mean_rounds << "," << r.mean_bits << "\n";
    jrows.push_back({{"cell", r.cell},
                     {"param", r.param},
                     {"trials", r.trials},
                     {"rate", r.rate},
                     {"mean_rounds", r.mean_rounds},
                     {"mean_bits", r.mean_bits}});
  }
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "sweep.csv", csv.str());
  write_file(fs::path(out_dir) / "sweep.json", jrows.dump(2) + "\n");
  std::cout << csv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secure-computation workbench experiment runner"};
  app.require_subcommand(1);

  std::string cfg_path, out_dir = ".";
  uint64_t trials = 0;

  auto* run = app.add_subcommand("run", "execute one configured protocol");
  run->add_option("config", cfg_path, "JSON experiment config")->required();
  run->add_option("--out", out_dir, "output directory")->envname("MPCW_OUT");

  auto* sweep = app.add_subcommand("sweep", "aggregate statistics over a parameter range");
  sweep->add_option("config", cfg_path, "JSON sweep config")->required();
  sweep->add_option("--trials", trials, "trials per cell (overrides config)");
  sweep->add_option("--out", out_dir, "output directory")->envname("MPCW_OUT");

  CLI11_PARSE(app, argc, argv);
  try {
    if (app.got_subcommand(run)) return cmd_run(cfg_path, out_dir);
    return cmd_sweep(cfg_path, trials, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
