#pragma once

#include <string>
#include <vector>

namespace repqkd::example {

// Bundled worked example over F_11: a fixed dealer polynomial, the
// published session-key and sub-share values it implies, one scripted
// distribution round (27 unanimous triples, three two-equal, three all
// distinct) and the dealer-checked extension that keeps exactly one of
// the three candidates.
//
// The reference tables this scenario reproduces contain a handful of
// values that direct evaluation of the defining polynomial contradicts.
// Those are probed separately: a probe passes when the runtime detects
// the mismatch and reports it as a discrepancy instead of matching it.

struct CheckLine {
  std::string name;
  std::string expected;
  std::string actual;
  bool pass = false;
};

struct DiscrepancyLine {
  std::string name;
  std::string reference;  // value the reference tables print
  std::string computed;   // value direct evaluation yields
  bool flagged = false;   // true when the runtime detected the mismatch
};

struct ExampleReport {
  std::vector<CheckLine> checks;
  std::vector<DiscrepancyLine> discrepancies;

  bool all_passed() const;
  std::string text() const;
};

ExampleReport run_example_scenario();

}  // namespace repqkd::example
