#pragma once

#include <functional>
#include <string>
#include <vector>

namespace gibbslab {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// "acceptance" (all criteria) or "gaussian" (criteria on Gaussian models only).
std::vector<int> suite_criteria(const std::string& name);

CriterionResult run_criterion(int id);
std::vector<CriterionResult> run_suite(const std::vector<int>& ids,
                                       const std::function<void(const CriterionResult&)>& on_result = {});

/// One line: "PASS  3  title: detail (0.12 s)".
std::string summary_line(const CriterionResult& r);

}  // namespace gibbslab
