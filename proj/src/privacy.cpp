#include "mpcw/privacy.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mpcw::privacy {

FunctionTable FunctionTable::parse_csv(const std::string& text) {
  FunctionTable t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string cell;
    size_t cols = 0;
    while (std::getline(row, cell, ',')) {
      t.v.push_back(std::stoull(cell));
      ++cols;
    }
    if (t.nx == 0) t.ny = cols;
    else if (cols != t.ny) throw std::invalid_argument("ragged table");
    ++t.nx;
  }
  if (t.nx == 0 || t.ny == 0) throw std::invalid_argument("empty table");
  return t;
}

std::string FunctionTable::to_csv() const {
  std::ostringstream out;
  for (size_t x = 0; x < nx; ++x) {
    for (size_t y = 0; y < ny; ++y) out << (y ? "," : "") << at(x, y);
    out << "\n";
  }
  return out.str();
}

std::string Witness::print(int indent) const {
  std::ostringstream out;
  std::string pad(2 * indent, ' ');
  if (kind == Kind::Constant) {
    out << pad << "const " << value << "\n";
    return out.str();
  }
  out << pad << (kind == Kind::SplitCols ? "cols" : "rows");
  for (int s : side) out << ' ' << s;
  out << "\n";
  for (const auto& c : children) out << c->print(indent + 1);
  return out.str();
}

namespace {

struct Uf {
  std::vector<int> p;
  explicit Uf(size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int a) { return p[a] == a ? a : p[a] = find(p[a]); }
  void join(int a, int b) { p[find(a)] = find(b); }
};

// groups forced together: two columns (axis=1) sharing a value in some row
// must land in the same part, symmetrically for rows
std::vector<int> forced_groups(const FunctionTable& t, const std::vector<size_t>& rows,
                               const std::vector<size_t>& cols, bool split_cols) {
  const auto& own = split_cols ? cols : rows;
  const auto& other = split_cols ? rows : cols;
  Uf uf(own.size());
  for (size_t i = 0; i < own.size(); ++i)
    for (size_t j = i + 1; j < own.size(); ++j)
      for (size_t o = 0; o < other.size(); ++o) {
        uint64_t a = split_cols ? t.at(other[o], own[i]) : t.at(own[i], other[o]);
        uint64_t b = split_cols ? t.at(other[o], own[j]) : t.at(own[j], other[o]);
        if (a == b) {
          uf.join(int(i), int(j));
          break;
        }
      }
  std::vector<int> side(own.size());
  std::map<int, int> label;
  for (size_t i = 0; i < own.size(); ++i) {
    int r = uf.find(int(i));
    auto it = label.find(r);
    if (it == label.end()) it = label.emplace(r, int(label.size())).first;
    side[i] = it->second;
  }
  return side;
}

std::unique_ptr<Witness> solve(const FunctionTable& t, const std::vector<size_t>& rows,
                               const std::vector<size_t>& cols) {
  bool constant = true;
  for (size_t r : rows)
    for (size_t c : cols) constant = constant && t.at(r, c) == t.at(rows[0], cols[0]);
  if (constant) {
    auto w = std::make_unique<Witness>();
    w->value = t.at(rows[0], cols[0]);
    return w;
  }
  for (bool split_cols : {true, false}) {  // column splits preferred
    auto side = forced_groups(t, rows, cols, split_cols);
    int groups = 1 + *std::max_element(side.begin(), side.end());
    if (groups < 2) continue;
    auto w = std::make_unique<Witness>();
    w->kind = split_cols ? Witness::Kind::SplitCols : Witness::Kind::SplitRows;
    w->side = side;
    bool all_ok = true;
    for (int g = 0; g < groups && all_ok; ++g) {
      std::vector<size_t> sub;
      const auto& own = split_cols ? cols : rows;
      for (size_t i = 0; i < own.size(); ++i)
        if (side[i] == g) sub.push_back(own[i]);
      auto child = split_cols ? solve(t, rows, sub) : solve(t, sub, cols);
      if (!child) all_ok = false;
      else w->children.push_back(std::move(child));
    }
    if (all_ok) return w;
  }
  return nullptr;
}

bool check(const FunctionTable& t, const Witness& w, const std::vector<size_t>& rows,
           const std::vector<size_t>& cols) {
  if (w.kind == Witness::Kind::Constant) {
    for (size_t r : rows)
      for (size_t c : cols)
        if (t.at(r, c) != w.value) return false;
    return true;
  }
  bool split_cols = w.kind == Witness::Kind::SplitCols;
  const auto& own = split_cols ? cols : rows;
  const auto& other = split_cols ? rows : cols;
  if (w.side.size() != own.size()) return false;
  int groups = 1 + *std::max_element(w.side.begin(), w.side.end());
  if (groups < 2 || w.children.size() != size_t(groups)) return false;
  // no value shared across groups within one opposite coordinate
  for (size_t i = 0; i < own.size(); ++i)
    for (size_t j = 0; j < own.size(); ++j) {
      if (w.side[i] == w.side[j]) continue;
      for (size_t o = 0; o < other.size(); ++o) {
        uint64_t a = split_cols ? t.at(other[o], own[i]) : t.at(own[i], other[o]);
        uint64_t b = split_cols ? t.at(other[o], own[j]) : t.at(own[j], other[o]);
        if (a == b) return false;
      }
    }
  for (int g = 0; g < groups; ++g) {
    std::vector<size_t> sub;
    for (size_t i = 0; i < own.size(); ++i)
      if (w.side[i] == g) sub.push_back(own[i]);
    if (sub.empty()) return false;
    bool ok = split_cols ? check(t, *w.children[g], rows, sub)
                         : check(t, *w.children[g], sub, cols);
    if (!ok) return false;
  }
  return true;
}

struct Cursor {
  const Witness* node;
  std::vector<size_t> rows, cols;
};

// descend the witness along the announced group ids
Cursor locate(const FunctionTable& t, const Witness& root, const std::vector<uint64_t>& tr) {
  Cursor c;
  c.node = &root;
  c.rows.resize(t.nx);
  c.cols.resize(t.ny);
  std::iota(c.rows.begin(), c.rows.end(), 0);
  std::iota(c.cols.begin(), c.cols.end(), 0);
  for (uint64_t g : tr) {
    bool split_cols = c.node->kind == Witness::Kind::SplitCols;
    auto& own = split_cols ? c.cols : c.rows;
    std::vector<size_t> sub;
    for (size_t i = 0; i < own.size(); ++i)
      if (c.node->side[i] == int(g)) sub.push_back(own[i]);
    own = sub;
    c.node = c.node->children.at(g).get();
  }
  return c;
}

}  // namespace

std::unique_ptr<Witness> is_partitionable(const FunctionTable& t) {
  if (t.nx == 0 || t.ny == 0) throw std::invalid_argument("empty table");
  std::vector<size_t> rows(t.nx), cols(t.ny);
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  return solve(t, rows, cols);
}

bool witness_valid(const FunctionTable& t, const Witness& w) {
  std::vector<size_t> rows(t.nx), cols(t.ny);
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  return check(t, w, rows, cols);
}

std::vector<uint64_t> run_transcript(const TwoPartyProtocol& p, uint64_t x, uint64_t y,
                                     uint64_t tape1, uint64_t tape2) {
  std::vector<uint64_t> tr;
  for (;;) {
    int s = p.next_speaker(tr);
    if (s == 0) return tr;
    tr.push_back(p.speak(s, s == 1 ? x : y, tr, s == 1 ? tape1 : tape2));
  }
}

TwoPartyProtocol synthesize_protocol(const FunctionTable& t, const Witness& w) {
  if (!witness_valid(t, w)) throw std::invalid_argument("witness does not fit the table");
  auto table = std::make_shared<FunctionTable>(t);
  // children are copied into a shared immutable tree
  std::function<std::unique_ptr<Witness>(const Witness&)> clone = [&](const Witness& n) {
    auto c = std::make_unique<Witness>();
    c->kind = n.kind;
    c->value = n.value;
    c->side = n.side;
    for (const auto& ch : n.children) c->children.push_back(clone(*ch));
    return c;
  };
  auto root = std::shared_ptr<Witness>(clone(w).release());

  TwoPartyProtocol p;
  p.next_speaker = [table, root](const std::vector<uint64_t>& tr) {
    Cursor c = locate(*table, *root, tr);
    if (c.node->kind == Witness::Kind::Constant) return 0;
    return c.node->kind == Witness::Kind::SplitCols ? 2 : 1;
  };
  p.speak = [table, root](int speaker, uint64_t input, const std::vector<uint64_t>& tr,
                          uint64_t) {
    Cursor c = locate(*table, *root, tr);
    const auto& own = speaker == 2 ? c.cols : c.rows;
    for (size_t i = 0; i < own.size(); ++i)
      if (own[i] == input) return uint64_t(c.node->side[i]);
    throw std::out_of_range("input outside the table");
  };
  p.output = [table, root](int, uint64_t, const std::vector<uint64_t>& tr) {
    Cursor c = locate(*table, *root, tr);
    return c.node->value;
  };
  return p;
}

AuditReport privacy_audit(const TwoPartyProtocol& p, const FunctionTable& t) {
  AuditReport rep;
  if (p.tape_bits1 + p.tape_bits2 > 8) {
    rep.unauditable = true;
    return rep;
  }
  uint64_t n1 = uint64_t(1) << p.tape_bits1, n2 = uint64_t(1) << p.tape_bits2;
  auto dist = [&](uint64_t x, uint64_t y) {
    std::map<std::vector<uint64_t>, int> d;
    for (uint64_t t1 = 0; t1 < n1; ++t1)
      for (uint64_t t2 = 0; t2 < n2; ++t2) ++d[run_transcript(p, x, y, t1, t2)];
    return d;
  };
  // privacy against party 2: same column output, x vs x'
  for (size_t y = 0; y < t.ny; ++y)
    for (size_t x = 0; x < t.nx; ++x)
      for (size_t x2 = x + 1; x2 < t.nx; ++x2)
        if (t.at(x, y) == t.at(x2, y) && dist(x, y) != dist(x2, y))
          rep.violations.push_back({2, uint64_t(y), uint64_t(x), uint64_t(x2)});
  // privacy against party 1: same row output, y vs y'
  for (size_t x = 0; x < t.nx; ++x)
    for (size_t y = 0; y < t.ny; ++y)
      for (size_t y2 = y + 1; y2 < t.ny; ++y2)
        if (t.at(x, y) == t.at(x, y2) && dist(x, y) != dist(x, y2))
          rep.violations.push_back({1, uint64_t(x), uint64_t(y), uint64_t(y2)});
  return rep;
}

}  // namespace mpcw::privacy
