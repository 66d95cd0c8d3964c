#include "mpcw/apps.h"

#include <stdexcept>

namespace mpcw::apps {

using third::Secret;

void password_init(third::Party& P, PasswordStore& st, const std::string& user, int owner,
                   uint64_t password) {
  st.pw[user] = third::vss_deal(P, owner, password);
}

AuthResult password_authenticate(third::Party& P, PasswordStore& st, const std::string& user,
                                 int requester, uint64_t attempt, AuthMode mode,
                                 int max_tries) {
  const Field& f = P.f;
  Secret pw = st.pw.at(user);
  Secret at = third::share_plain(P, requester, attempt);
  Secret v = third::linear_combine(P, {{1, pw}, {f.sub(0, 1), at}}, 0);

  AuthResult res;
  for (int tries = 0; tries < max_tries; ++tries) {
    if (mode == AuthMode::Fast) {
      Secret r = third::rand_secret(P);
      res.w = third::reveal(P, third::multiply(P, v, r));
      res.accept = res.w == 0;
      return res;
    }
    auto rs = third::rand_secret_many(P, 2);
    auto prods = third::multiply_many(P, {{rs[0], rs[1]}, {v, rs[0]}});
    auto opened = third::reveal_many(P, prods);
    if (opened[0] == 0) {  // r*s = 0: no certificate that r != 0, redraw
      res.retried = true;
      continue;
    }
    res.w = opened[1];
    res.accept = res.w == 0;
    return res;
  }
  res.exhausted = true;
  return res;
}

BallotResult secret_ballot(third::Party& P, uint64_t my_vote) {
  const Field& f = P.f;
  std::vector<std::pair<int, uint64_t>> deals;
  for (int i = 1; i <= P.n; ++i) deals.push_back({i, my_vote});
  auto votes = third::vss_deal_many(P, deals);

  std::vector<std::pair<Secret, Secret>> pairs;
  for (int i = 0; i < P.n; ++i) {
    Secret xm1 = third::linear_combine(P, {{1, votes[i]}}, f.sub(0, 1));
    pairs.push_back({votes[i], xm1});
  }
  auto zsec = third::multiply_many(P, pairs);
  BallotResult res;
  res.z = third::reveal_many(P, zsec);
  std::vector<std::pair<uint64_t, Secret>> terms;
  for (int i = 0; i < P.n; ++i) {
    if (res.z[i] != 0) res.invalid.insert(i + 1);
    else terms.push_back({1, votes[i]});
  }
  Secret sum = third::linear_combine(P, terms, 0);
  res.tally = third::reveal(P, sum);
  return res;
}

UnanimousResult unanimous_vote(third::Party& P, uint64_t my_vote) {
  const Field& f = P.f;
  if (f.order() <= uint64_t(P.n)) throw std::invalid_argument("field too small for the voters");
  std::vector<std::pair<int, uint64_t>> deals;
  for (int i = 1; i <= P.n; ++i) deals.push_back({i, my_vote});
  auto votes = third::vss_deal_many(P, deals);
  std::vector<std::pair<uint64_t, Secret>> terms;
  for (auto& v : votes) terms.push_back({1, v});
  // d = sum - n, then d^(order-1) by a square-and-multiply chain; the
  // square and the conditional multiply of one exponent bit share a layer
  Secret d = third::linear_combine(P, terms, f.sub(0, f.from_int(P.n)));
  uint64_t e = f.order() - 1;
  Secret acc{1, true};  // the constant-polynomial sharing of 1
  Secret cur = d;
  while (e) {
    if (e & 1) {
      auto r = third::multiply_many(P, {{acc, cur}, {cur, cur}});
      acc = r[0];
      cur = r[1];
    } else {
      cur = third::multiply(P, cur, cur);
    }
    e >>= 1;
  }
  UnanimousResult res;
  res.revealed = third::reveal(P, acc);
  res.unanimous = res.revealed == 0;
  return res;
}

MailResult anonymous_mail(third::Party& P, MailMode mode, uint64_t my_message, int my_dest,
                          bool limited_espionage) {
  const Field& f = P.f;
  const int n = P.n;
  // each player deals its message and its indicator row in one batch
  std::vector<std::pair<int, uint64_t>> deals;
  for (int i = 1; i <= n; ++i) {
    deals.push_back({i, my_message});
    for (int j = 1; j <= n; ++j) deals.push_back({i, j == my_dest ? uint64_t(1) : 0});
  }
  auto sh = third::share_plain_many(P, deals);
  auto msg = [&](int i) { return sh[(i - 1) * (n + 1)]; };
  auto ind = [&](int i, int j) { return sh[(i - 1) * (n + 1) + j]; };

  MailResult res;
  if (!limited_espionage) {
    // per-box sums (and per-sender row sums in permutation mode)
    std::vector<Secret> sums;
    for (int j = 1; j <= n; ++j) {
      std::vector<std::pair<uint64_t, Secret>> t;
      for (int i = 1; i <= n; ++i) t.push_back({1, ind(i, j)});
      sums.push_back(third::linear_combine(P, t, 0));
    }
    if (mode == MailMode::Permutation)
      for (int i = 1; i <= n; ++i) {
        std::vector<std::pair<uint64_t, Secret>> t;
        for (int j = 1; j <= n; ++j) t.push_back({1, ind(i, j)});
        sums.push_back(third::linear_combine(P, t, 0));
      }
    auto opened = third::reveal_many(P, sums);
    res.box_flags.assign(opened.begin(), opened.begin() + n);
    for (uint64_t s : opened)
      if (s != 1) return res;  // collision (or an invalid row): reject, retry
  }

  std::vector<std::pair<Secret, Secret>> pairs;
  for (int j = 1; j <= n; ++j)
    for (int i = 1; i <= n; ++i) pairs.push_back({msg(i), ind(i, j)});
  auto prods = third::multiply_many(P, pairs);
  std::vector<Secret> boxes;
  for (int j = 0; j < n; ++j) {
    std::vector<std::pair<uint64_t, Secret>> t;
    for (int i = 0; i < n; ++i) t.push_back({1, prods[j * n + i]});
    boxes.push_back(third::linear_combine(P, t, 0));
  }
  for (int j = 1; j <= n; ++j) {
    auto got = third::reveal_to(P, boxes[j - 1], j);
    if (j == P.ctx.id) res.received = got;
  }
  (void)f;
  res.ok = true;
  return res;
}

}  // namespace mpcw::apps
