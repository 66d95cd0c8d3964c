#pragma once
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mpcw/field.h"

// Two-party privacy characterization for finite function tables: a table
// admits a deterministic private protocol exactly when it is partitionable,
// i.e. constant or splittable by rows or columns into groups that never
// share a value in any single column (resp. row), recursively.
namespace mpcw::privacy {

struct FunctionTable {
  size_t nx = 0, ny = 0;            // rows = party 1 inputs, cols = party 2
  std::vector<uint64_t> v;          // row-major
  uint64_t at(size_t x, size_t y) const { return v.at(x * ny + y); }
  // CSV, one row per line, comma-separated integer values.
  static FunctionTable parse_csv(const std::string& text);
  std::string to_csv() const;
};

// Partition-tree witness. side[i] is the group id of row i (SplitRows) or
// column i (SplitCols) of the subtable at this node; children follow group
// ids in order.
struct Witness {
  enum class Kind { Constant, SplitRows, SplitCols };
  Kind kind = Kind::Constant;
  uint64_t value = 0;
  std::vector<int> side;
  std::vector<std::unique_ptr<Witness>> children;
  std::string print(int indent = 0) const;  // nested structured text
};

// nullptr when the table is not partitionable. Column splits are preferred
// when both directions work at a node.
std::unique_ptr<Witness> is_partitionable(const FunctionTable& t);
// Independent recheck: every split is proper and no two groups share a
// value within any single row/column; constants really are constant.
bool witness_valid(const FunctionTable& t, const Witness& w);

// Generic deterministic-schedule two-party protocol. The schedule may
// depend only on the transcript; tapes are uniform bit strings enumerated
// exactly by the audit.
struct TwoPartyProtocol {
  // 0 = halt, else id of the player who speaks next
  std::function<int(const std::vector<uint64_t>&)> next_speaker;
  std::function<uint64_t(int speaker, uint64_t input, const std::vector<uint64_t>& transcript,
                         uint64_t tape)> speak;
  std::function<uint64_t(int party, uint64_t input, const std::vector<uint64_t>& transcript)>
      output;
  int tape_bits1 = 0, tape_bits2 = 0;
};
std::vector<uint64_t> run_transcript(const TwoPartyProtocol& p, uint64_t x, uint64_t y,
                                     uint64_t tape1 = 0, uint64_t tape2 = 0);

// Announce-the-split protocol from a witness: the owning side broadcasts
// its group id at each node, nothing at a constant leaf. Throws
// std::invalid_argument when the witness does not fit the table.
TwoPartyProtocol synthesize_protocol(const FunctionTable& t, const Witness& w);

struct AuditReport {
  bool unauditable = false;  // randomness beyond the enumerable budget
  struct Violation {
    int against = 0;       // 1: party 1 could distinguish, 2: party 2 could
    uint64_t fixed = 0;    // the shared coordinate
    uint64_t a = 0, b = 0; // the two same-output inputs with different views
  };
  std::vector<Violation> violations;
  bool ok() const { return !unauditable && violations.empty(); }
};
// Exhaustive comparison of transcript distributions across same-output
// pairs in every row and column; tapes of combined length > 8 bits make
// the protocol unauditable.
AuditReport privacy_audit(const TwoPartyProtocol& p, const FunctionTable& t);

}  // namespace mpcw::privacy
