#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chronograph/problem_io.hpp"

namespace chronograph {

enum class ScenarioId {
    Periodic,
    PhaseShift,
    JumpCondition,
    Tadpole,
    Splitting,
    Superposition,
    Cycle,
    MultiLoop,
    TimeTravel,
    TimeTravelMultiverse,
    Groundhog,
    LionsChain,
    FrequencyShift,
};

[[nodiscard]] std::string_view to_string(ScenarioId id) noexcept;
[[nodiscard]] std::optional<ScenarioId> scenario_from_string(std::string_view name);
[[nodiscard]] const std::vector<ScenarioId>& all_scenarios();

/// Preset knobs. `length` is the base edge length; presets with several
/// lengths scale them from it. `alpha` is the phase-shift factor, `d` the
/// truncation dimension of frequency_shift, `n` the number of lions_chain
/// pieces, and `variant` picks "shift" or "projection" for frequency_shift.
struct ScenarioParams {
    int steps = 100;
    double length = 1.0;
    double alpha = 2.0;
    int d = 8;
    int n = 4;
    std::string variant = "shift";
};

/// Applies "key=value" overrides. Throws ParseError on unknown keys or
/// unparsable values.
[[nodiscard]] ScenarioParams parse_overrides(const std::vector<std::string>& assignments,
                                             ScenarioParams base = {});

/// The preset as a problem document; the "scenario" entry records the id
/// and every parameter so the emitted file is self-describing.
[[nodiscard]] ProblemDocument make_scenario(ScenarioId id, const ScenarioParams& params = {});

}  // namespace chronograph
