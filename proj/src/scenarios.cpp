#include "chronograph/scenarios.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace chronograph {

namespace {

constexpr std::array<std::pair<ScenarioId, std::string_view>, 13> kNames{{
    {ScenarioId::Periodic, "periodic"},
    {ScenarioId::PhaseShift, "phase_shift"},
    {ScenarioId::JumpCondition, "jump_condition"},
    {ScenarioId::Tadpole, "tadpole"},
    {ScenarioId::Splitting, "splitting"},
    {ScenarioId::Superposition, "superposition"},
    {ScenarioId::Cycle, "cycle"},
    {ScenarioId::MultiLoop, "multi_loop"},
    {ScenarioId::TimeTravel, "time_travel"},
    {ScenarioId::TimeTravelMultiverse, "time_travel_multiverse"},
    {ScenarioId::Groundhog, "groundhog"},
    {ScenarioId::LionsChain, "lions_chain"},
    {ScenarioId::FrequencyShift, "frequency_shift"},
}};

Matrix scalar(double x) { return Matrix::Constant(1, 1, x); }
Vector ones(int d) { return Vector::Ones(d); }

class Builder {
public:
    explicit Builder(int steps) : steps_(steps) {}

    std::size_t edge(const std::string& id, double length, Matrix a, ForcingTerm f, Vector g = {}) {
        const int dim = static_cast<int>(a.rows());
        const std::size_t j = doc_.problem.graph.add_edge(id, length, dim);
        doc_.problem.operators.push_back(std::move(a));
        doc_.problem.forcing.push_back(std::move(f));
        doc_.problem.g.push_back(std::move(g));
        doc_.problem.steps.push_back(steps_);
        return j;
    }

    // Block (to, from): the initial value of `to` receives the terminal value of `from`.
    void block(std::size_t to, std::size_t from, Matrix m) { doc_.problem.transmission.set_block(to, from, std::move(m)); }

    ProblemDocument finish(ScenarioId id, const ScenarioParams& params) {
        doc_.scenario = {{"id", std::string(to_string(id))},
                         {"parameters",
                          {{"steps", params.steps},
                           {"length", params.length},
                           {"alpha", params.alpha},
                           {"d", params.d},
                           {"n", params.n},
                           {"variant", params.variant}}}};
        return std::move(doc_);
    }

private:
    int steps_;
    ProblemDocument doc_;
};

ForcingTerm constant(double x, int dim = 1) { return ConstantForcing{Vector::Constant(dim, x)}; }

void build(ScenarioId id, const ScenarioParams& p, Builder& b) {
    const double a = p.length;
    const Matrix decay = scalar(-1.0);
    switch (id) {
        case ScenarioId::Periodic: {
            const auto e = b.edge("e0", a, decay, constant(1.0));
            b.block(e, e, scalar(1.0));
            break;
        }
        case ScenarioId::PhaseShift: {
            const auto e = b.edge("e0", a, decay, constant(1.0));
            b.block(e, e, scalar(p.alpha));
            break;
        }
        case ScenarioId::JumpCondition: {
            // psi(0) = psi(a) + 1
            const auto e = b.edge("e0", a, decay, ZeroForcing{}, ones(1));
            b.block(e, e, scalar(1.0));
            break;
        }
        case ScenarioId::Tadpole: {
            const auto head = b.edge("head", a, decay, constant(1.0));
            const auto tail = b.edge("tail", a, decay, ZeroForcing{});
            b.block(head, head, scalar(1.0));
            b.block(tail, head, scalar(1.0));
            break;
        }
        case ScenarioId::Splitting: {
            const auto root = b.edge("root", a, decay, constant(1.0), ones(1));
            const auto left = b.edge("left", a, decay, constant(1.0));
            const auto right = b.edge("right", a, decay, constant(1.0));
            b.block(left, root, scalar(1.0));
            b.block(right, root, scalar(1.0));
            break;
        }
        case ScenarioId::Superposition: {
            const auto first = b.edge("first", a, decay, constant(1.0), ones(1));
            const auto second = b.edge("second", a, decay, constant(1.0), ones(1));
            const auto merged = b.edge("merged", a, decay, constant(1.0));
            b.block(merged, first, scalar(1.0));
            b.block(merged, second, scalar(1.0));
            break;
        }
        case ScenarioId::Cycle: {
            // Split into two parallel arcs and merge them again.
            const auto in = b.edge("in", a, decay, constant(1.0), ones(1));
            const auto upper = b.edge("upper", a, decay, constant(1.0));
            const auto lower = b.edge("lower", 0.5 * a, decay, constant(1.0));
            const auto out = b.edge("out", a, decay, constant(1.0));
            b.block(upper, in, scalar(0.5));
            b.block(lower, in, scalar(0.5));
            b.block(out, upper, scalar(1.0));
            b.block(out, lower, scalar(1.0));
            break;
        }
        case ScenarioId::MultiLoop: {
            const auto in = b.edge("in", a, decay, constant(1.0), ones(1));
            std::array<std::size_t, 3> loops{};
            const std::array<double, 3> scale{0.5, 1.0, 1.5};
            for (std::size_t k = 0; k < loops.size(); ++k) {
                loops[k] = b.edge("loop" + std::to_string(k), scale[k] * a, decay, constant(1.0));
                b.block(loops[k], loops[k], scalar(1.0));
                b.block(loops[k], in, scalar(1.0));
            }
            const auto out = b.edge("out", a, decay, constant(1.0));
            for (auto l : loops) b.block(out, l, scalar(1.0 / 3.0));
            break;
        }
        case ScenarioId::TimeTravel: {
            std::array<std::size_t, 4> e{};
            for (std::size_t k = 0; k < 4; ++k)
                e[k] = b.edge("e" + std::to_string(k + 1), a, decay, constant(1.0), k == 0 ? ones(1) : Vector());
            b.block(e[1], e[0], scalar(1.0));
            b.block(e[1], e[3], scalar(1.0));
            b.block(e[2], e[1], scalar(1.0));
            b.block(e[3], e[1], scalar(1.0));
            break;
        }
        case ScenarioId::TimeTravelMultiverse: {
            std::array<std::size_t, 5> e{};
            for (std::size_t k = 0; k < 5; ++k)
                e[k] = b.edge("e" + std::to_string(k + 1), a, decay, constant(1.0), k == 0 ? ones(1) : Vector());
            b.block(e[1], e[0], scalar(1.0));
            b.block(e[2], e[1], scalar(1.0));
            b.block(e[3], e[1], scalar(1.0));
            b.block(e[4], e[0], scalar(1.0));
            b.block(e[4], e[3], scalar(1.0));
            break;
        }
        case ScenarioId::Groundhog: {
            // State (world, character): the world decays, the character rotates.
            // Each pass through the loop resets the world to the day's start
            // and carries the character over.
            Matrix gen = Matrix::Zero(3, 3);
            gen(0, 0) = -1.0;
            gen(1, 2) = 1.0;
            gen(2, 1) = -1.0;
            Matrix world = Matrix::Zero(3, 3);
            world(0, 0) = 1.0;
            const Matrix character = Matrix::Identity(3, 3) - world;
            Vector start(3);
            start << 1.0, 1.0, 0.0;
            const auto before = b.edge("before", a, gen, constant(1.0, 3), start);
            const auto day = b.edge("day", a, gen, constant(1.0, 3));
            const auto after = b.edge("after", a, gen, constant(1.0, 3));
            b.block(day, before, world);
            b.block(day, day, character);
            b.block(after, day, Matrix::Identity(3, 3));
            break;
        }
        case ScenarioId::LionsChain: {
            // A(t) piecewise constant on n pieces of [0, a].
            std::vector<std::size_t> pieces;
            for (int k = 0; k < p.n; ++k) {
                const double s = static_cast<double>(k);
                Matrix m(2, 2);
                m << -(1.0 + 0.5 * s), 0.5 + 0.25 * s, -0.25 * (1.0 + s), -(1.5 + 0.25 * s);
                Vector g;
                if (k == 0) {
                    g = Vector::Zero(2);
                    g(0) = 1.0;
                }
                pieces.push_back(b.edge("piece" + std::to_string(k), a / p.n, m, constant(1.0, 2), g));
                if (k > 0) b.block(pieces[k], pieces[k - 1], Matrix::Identity(2, 2));
            }
            break;
        }
        case ScenarioId::FrequencyShift: {
            const int d = p.d;
            Matrix gen = Matrix::Zero(d, d);
            for (int k = 0; k < d; ++k) gen(k, k) = -0.5 * (k + 1);
            if (p.variant == "shift") {
                Matrix shift = Matrix::Zero(d, d);
                for (int k = 0; k + 1 < d; ++k) shift(k, k + 1) = 1.0;  // top mode maps to zero
                b.edge("source", a, gen, constant(1.0, d), ones(d));
                const auto loop = b.edge("shifted", a, gen, constant(1.0, d));
                b.block(loop, loop, shift);
            } else {
                auto projection = [d](auto keep) {
                    Matrix m = Matrix::Zero(d, d);
                    for (int k = 0; k < d; ++k)
                        if (keep(k)) m(k, k) = 1.0;
                    return m;
                };
                const Matrix low = projection([d](int k) { return k < d / 2; });
                const Matrix high = projection([d](int k) { return k >= d / 2; });
                const Matrix even = projection([](int k) { return k % 2 == 0; });
                const Matrix odd = projection([](int k) { return k % 2 == 1; });
                const auto src = b.edge("source", a, gen, constant(1.0, d), ones(d));
                const auto lo = b.edge("low", a, gen, constant(1.0, d));
                const auto hi = b.edge("high", a, gen, constant(1.0, d));
                const auto out = b.edge("merged", a, gen, constant(1.0, d));
                b.block(lo, src, low);
                b.block(hi, src, high);
                b.block(out, lo, even);
                b.block(out, hi, odd);
            }
            break;
        }
    }
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw ParseError("--set " + key + ": cannot parse \"" + text + "\"");
    return value;
}

}  // namespace

std::string_view to_string(ScenarioId id) noexcept {
    for (const auto& [k, name] : kNames)
        if (k == id) return name;
    return "unknown";
}

std::optional<ScenarioId> scenario_from_string(std::string_view name) {
    for (const auto& [k, n] : kNames)
        if (n == name) return k;
    return std::nullopt;
}

const std::vector<ScenarioId>& all_scenarios() {
    static const std::vector<ScenarioId> ids = [] {
        std::vector<ScenarioId> out;
        for (const auto& [k, name] : kNames) out.push_back(k);
        return out;
    }();
    return ids;
}

ScenarioParams parse_overrides(const std::vector<std::string>& assignments, ScenarioParams base) {
    for (const auto& kv : assignments) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ParseError("--set expects key=value, got \"" + kv + "\"");
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        if (key == "steps")
            base.steps = parse_number<int>(key, value);
        else if (key == "length")
            base.length = parse_number<double>(key, value);
        else if (key == "alpha")
            base.alpha = parse_number<double>(key, value);
        else if (key == "d")
            base.d = parse_number<int>(key, value);
        else if (key == "n")
            base.n = parse_number<int>(key, value);
        else if (key == "variant")
            base.variant = value;
        else
            throw ParseError("--set: unknown key \"" + key + "\"");
    }
    return base;
}

ProblemDocument make_scenario(ScenarioId id, const ScenarioParams& params) {
    std::vector<Violation> bad;
    if (params.d < 1) bad.push_back({"d", "must be >= 1"});
    if (params.n < 1) bad.push_back({"n", "must be >= 1"});
    if (params.variant != "shift" && params.variant != "projection")
        bad.push_back({"variant", "must be shift or projection"});
    if (!bad.empty()) throw ValidationError(std::move(bad));
    Builder b(params.steps);
    build(id, params, b);
    return b.finish(id, params);
}

}  // namespace chronograph
