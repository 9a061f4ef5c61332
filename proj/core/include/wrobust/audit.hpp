#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wrobust {

struct PropertyResult {
  std::string name;
  long trials = 0;
  /// Worst observed margin; negative or zero means within tolerance for
  /// bound-style properties, and is the max error for equality-style ones.
  double worst = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double seconds = 0.0;
};

struct AuditReport {
  std::vector<PropertyResult> results;
  bool all_pass() const;
};

/// Runs one of the fixed-seed property suites:
/// gradients | lipschitz | projections | transport | duality | all.
AuditReport run_audit_suite(const std::string& suite);

void print_report(const AuditReport& report, std::ostream& out);

}  // namespace wrobust
