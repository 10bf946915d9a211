#pragma once

// Self-check suite: every module's invariants exercised at desk scale with
// hand-computable oracles (closed forms, brute-force enumerations, finite
// differences, exact floating-point symmetries).  The quick level sticks to
// scalar identities and n = 1 grids and finishes in seconds; the full level
// adds the n = 2 grid checks up to 64 x 128 and stays well under ten
// minutes.  Cases run in a fixed order and never throw out of the suite: an
// unexpected exception fails its row with the message as detail.

#include <string>
#include <vector>

namespace curvflow {

struct CheckResult {
  std::string name;     // dotted path, module first (e.g. "grid.circle-...")
  bool pass = false;
  double measured = 0;  // the quantity the check bounds
  double bound = 0;     // pass iff measured <= bound (and finite)
  std::string detail;   // extra context: expected/got, ratios, messages
  double seconds = 0;   // wall time of this case
};

enum class ValidateLevel { quick, full };

std::vector<CheckResult> run_validation(ValidateLevel level);

bool all_passed(const std::vector<CheckResult>& results);

// One fixed-width line per check plus a summary line; failures carry their
// detail so a broken invariant is named in the output.
std::string format_check_table(const std::vector<CheckResult>& results);

}  // namespace curvflow
