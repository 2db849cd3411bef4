#pragma once

#include "dini/config.hpp"
#include "dini/expansion.hpp"
#include "dini/frequency.hpp"
#include "dini/report.hpp"
#include "dini/scenario.hpp"

#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace dini {

struct CriterionInfo {
  std::string id;  // AC01 .. AC12
  std::string name;
  double time_limit = 0;  // seconds; 0 means none
};

const std::vector<CriterionInfo>& criteria();
const CriterionInfo& criterion(const std::string& id);

// Runs the acceptance criteria AC01..AC11 on one configuration. Results of the
// curved-chart pipeline are shared between criteria and computed on first use.
class CriteriaSuite {
 public:
  explicit CriteriaSuite(RunConfig cfg, std::ostream* log = nullptr);
  ~CriteriaSuite();

  // Errors raised by the numerics are caught and reported as a failed check naming the exception.
  Check run(const std::string& id);

 private:
  struct Pipeline;
  Pipeline& curved(bool fine);
  void ensure_frequency(Pipeline& p);
  void ensure_tangent(Pipeline& p);
  void ensure_expansion(Pipeline& p);

  Check frame_correctness();
  Check graph_identity();
  Check sandwich();
  Check euler_identity();
  Check footnote_orders();
  Check doubling_bands();
  Check blowup_rate();
  Check route_agreement();
  Check error_bands();
  Check tangent_continuity_check();
  Check modulus_limits();

  RunConfig cfg_;
  std::ostream* log_;
  std::map<bool, std::unique_ptr<Pipeline>> pipelines_;
};

// Runs full-verify twice with the same seed (the second time with `threads` OpenMP threads)
// into dir/a and dir/b and compares every report byte for byte.
Check determinism_check(RunConfig cfg, const std::string& dir, int threads = 2, std::ostream* log = nullptr);

}  // namespace dini
