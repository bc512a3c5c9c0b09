#include "pdebench/pretext/strategy.hpp"

#include "pdebench/core/errors.hpp"

namespace pdebench {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::none: return "none";
    case Strategy::transfer: return "transfer";
    case Strategy::binary: return "binary";
    case Strategy::timesort: return "timesort";
    case Strategy::spacesort: return "spacesort";
    case Strategy::jigsaw: return "jigsaw";
    case Strategy::coefficient: return "coefficient";
    case Strategy::derivative: return "derivative";
    case Strategy::masked: return "masked";
    case Strategy::picl: return "picl";
  }
  throw ConfigError("unknown strategy enum value");
}

const std::vector<std::string>& strategy_names() {
  static const std::vector<std::string> names = {
      "none",        "transfer",   "binary", "timesort", "spacesort",
      "jigsaw",      "coefficient", "derivative", "masked", "picl"};
  return names;
}

Strategy strategy_from_string(const std::string& s) {
  const auto& names = strategy_names();
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == s) return static_cast<Strategy>(i);
  std::string valid;
  for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown strategy '" + s + "' (valid: " + valid + ")");
}

std::string to_string(DownstreamTask t) {
  return t == DownstreamTask::fixed_future ? "fixed_future" : "autoregressive";
}

DownstreamTask task_from_string(const std::string& s) {
  if (s == "fixed_future") return DownstreamTask::fixed_future;
  if (s == "autoregressive") return DownstreamTask::autoregressive;
  throw ConfigError("unknown task '" + s +
                    "' (valid: fixed_future, autoregressive)");
}

bool strategy_uses_head(Strategy s) {
  switch (s) {
    case Strategy::binary:
    case Strategy::timesort:
    case Strategy::spacesort:
    case Strategy::jigsaw:
    case Strategy::coefficient:
    case Strategy::derivative:
    case Strategy::masked:
      return true;
    default:
      return false;
  }
}

}  // namespace pdebench
