#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "chronograph/problem.hpp"

namespace chronograph {

enum class ProblemMode { Parabolic, Schrodinger };

/// A parsed problem file. In Schrodinger mode the edge matrices are the
/// Hermitian H_j and the generator used is i H_j.
struct ProblemDocument {
    TimeGraphProblem problem;
    ProblemMode mode = ProblemMode::Parabolic;
    nlohmann::json options = nlohmann::json::object();
    nlohmann::json scenario;  // null unless the file came from a preset
};

/// Default substeps per edge when a file omits "steps".
inline constexpr int kDefaultSteps = 100;

/// Throws ParseError for structural problems (wrong types, unknown keys)
/// and ValidationError for inconsistent content.
[[nodiscard]] ProblemDocument parse_problem(const nlohmann::json& doc);
[[nodiscard]] ProblemDocument parse_problem_text(const std::string& text);
[[nodiscard]] ProblemDocument load_problem(const std::filesystem::path& path);

/// Canonical form: sorted keys, shortest round-trip doubles, complex
/// entries as [re, im] only when the imaginary part is nonzero.
[[nodiscard]] nlohmann::json to_json(const ProblemDocument& doc);
[[nodiscard]] std::string canonical_text(const nlohmann::json& j);

[[nodiscard]] nlohmann::json complex_to_json(Complex z);
[[nodiscard]] nlohmann::json matrix_to_json(const Matrix& m);
[[nodiscard]] nlohmann::json vector_to_json(const Vector& v);

/// Writes through a temporary file in the same directory and renames it
/// into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace chronograph
