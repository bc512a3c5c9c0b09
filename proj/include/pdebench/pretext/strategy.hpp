#pragma once

#include <string>
#include <vector>

namespace pdebench {

// Pretraining strategies. `none` means training from scratch; `transfer`
// trains the downstream prediction objective on the pretraining split.
enum class Strategy {
  none,
  transfer,
  binary,
  timesort,
  spacesort,
  jigsaw,
  coefficient,
  derivative,
  masked,
  picl,
};

// Downstream fine-tuning objectives.
enum class DownstreamTask { fixed_future, autoregressive };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);
std::string to_string(DownstreamTask t);
DownstreamTask task_from_string(const std::string& s);

// All strategy names, in canonical reporting order.
const std::vector<std::string>& strategy_names();

// True for the strategies that train a projection head on top of the
// backbone (none / transfer / picl operate on raw backbone outputs).
bool strategy_uses_head(Strategy s);

}  // namespace pdebench
