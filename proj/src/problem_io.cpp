#include "chronograph/problem_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

namespace chronograph {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ParseError(where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.count(key)) fail(where, "unknown key \"" + key + "\"");
    }
}

Complex parse_complex(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    fail(where, "expected a number or [re, im]");
}

Vector parse_vector(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = parse_complex(v[i], where + "[" + std::to_string(i) + "]");
    return out;
}

// An array of arrays is a list of rows. A flat array of real numbers is
// reshaped to rows x cols when the count fits, otherwise kept as one row so
// that validation reports the shape.
Matrix parse_matrix(const json& v, int rows, int cols, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array");
    if (v.empty()) return Matrix(0, 0);
    if (v[0].is_array()) {
        const auto r = static_cast<Eigen::Index>(v.size());
        const auto c = static_cast<Eigen::Index>(v[0].size());
        Matrix m(r, c);
        for (Eigen::Index i = 0; i < r; ++i) {
            const json& row = v[static_cast<std::size_t>(i)];
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) fail(where, "ragged rows");
            for (Eigen::Index j = 0; j < c; ++j)
                m(i, j) = parse_complex(row[static_cast<std::size_t>(j)], where);
        }
        return m;
    }
    Vector flat(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail(where, "flat matrices take real entries only; use rows for complex");
        flat(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    if (flat.size() == static_cast<Eigen::Index>(rows) * cols) {
        Matrix m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = flat(i * cols + j);
        return m;
    }
    return flat.transpose();
}

ForcingTerm parse_forcing(const json& f, int dim, const std::string& where) {
    check_keys(f, where, {"kind", "value"});
    if (!f.contains("kind") || !f["kind"].is_string()) fail(where, "missing \"kind\"");
    const auto kind = f["kind"].get<std::string>();
    if (kind == "zero") return ZeroForcing{};
    if (!f.contains("value")) fail(where, "missing \"value\"");
    if (kind == "constant") return ConstantForcing{parse_vector(f["value"], where + ".value")};
    if (kind == "samples") {
        const json& v = f["value"];
        if (!v.is_array()) fail(where + ".value", "expected an array of samples");
        SampledForcing s;
        for (std::size_t k = 0; k < v.size(); ++k) {
            // Scalar edges may list plain numbers.
            if (dim == 1 && v[k].is_number())
                s.values.push_back(Vector::Constant(1, parse_complex(v[k], where)));
            else
                s.values.push_back(parse_vector(v[k], where + ".value[" + std::to_string(k) + "]"));
        }
        return s;
    }
    fail(where + ".kind", "must be zero, constant or samples");
}

int parse_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<int>();
}

double parse_double(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

std::string parse_string(const json& v, const std::string& where) {
    if (!v.is_string()) fail(where, "expected a string");
    return v.get<std::string>();
}

}  // namespace

ProblemDocument parse_problem(const json& doc) {
    check_keys(doc, "problem", {"edges", "blocks", "mode", "options", "scenario"});
    ProblemDocument out;
    TimeGraphProblem& p = out.problem;

    if (!doc.contains("edges") || !doc["edges"].is_array()) fail("edges", "expected an array");
    const json& edges = doc["edges"];
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const json& e = edges[i];
        const std::string where = "edges[" + std::to_string(i) + "]";
        check_keys(e, where, {"id", "length", "dim", "A", "f", "g", "steps"});
        for (const char* key : {"id", "length", "dim", "A"})
            if (!e.contains(key)) fail(where, std::string("missing \"") + key + "\"");
        const std::string id = parse_string(e["id"], where + ".id");
        const double length = parse_double(e["length"], where + ".length");
        const int dim = parse_int(e["dim"], where + ".dim");
        p.graph.add_edge(id, length, dim);
        const int d = std::max(dim, 0);
        p.operators.push_back(parse_matrix(e["A"], d, d, where + ".A"));
        p.forcing.push_back(e.contains("f") ? parse_forcing(e["f"], dim, where + ".f") : ForcingTerm{ZeroForcing{}});
        p.g.push_back(e.contains("g") ? parse_vector(e["g"], where + ".g") : Vector());
        p.steps.push_back(e.contains("steps") ? parse_int(e["steps"], where + ".steps") : kDefaultSteps);
    }

    std::vector<Violation> unknown;
    if (doc.contains("blocks")) {
        const json& blocks = doc["blocks"];
        if (!blocks.is_array()) fail("blocks", "expected an array");
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            const json& b = blocks[k];
            const std::string where = "blocks[" + std::to_string(k) + "]";
            check_keys(b, where, {"from", "to", "matrix"});
            for (const char* key : {"from", "to", "matrix"})
                if (!b.contains(key)) fail(where, std::string("missing \"") + key + "\"");
            const std::string from = parse_string(b["from"], where + ".from");
            const std::string to = parse_string(b["to"], where + ".to");
            const auto col = p.graph.index_of(from);
            const auto row = p.graph.index_of(to);
            if (!col) unknown.push_back({where + ".from", "unknown edge id \"" + from + "\""});
            if (!row) unknown.push_back({where + ".to", "unknown edge id \"" + to + "\""});
            if (!col || !row) continue;
            if (p.transmission.blocks().count({*row, *col}))
                unknown.push_back({where, "duplicate block " + to + " <- " + from});
            p.transmission.set_block(*row, *col,
                                     parse_matrix(b["matrix"], std::max(p.graph.dim(*row), 0),
                                                  std::max(p.graph.dim(*col), 0), where + ".matrix"));
        }
    }

    if (doc.contains("mode")) {
        const std::string mode = parse_string(doc["mode"], "mode");
        if (mode == "parabolic")
            out.mode = ProblemMode::Parabolic;
        else if (mode == "schrodinger")
            out.mode = ProblemMode::Schrodinger;
        else
            fail("mode", "must be parabolic or schrodinger");
    }
    if (doc.contains("options")) {
        if (!doc["options"].is_object()) fail("options", "expected an object");
        out.options = doc["options"];
    }
    if (doc.contains("scenario")) out.scenario = doc["scenario"];

    auto violations = validate(p);
    violations.insert(violations.begin(), unknown.begin(), unknown.end());
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return out;
}

ProblemDocument parse_problem_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    return parse_problem(doc);
}

ProblemDocument load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_text(buf.str());
}

json complex_to_json(Complex z) {
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

json matrix_to_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_to_json(m.row(i).transpose()));
    return out;
}

json to_json(const ProblemDocument& doc) {
    const TimeGraphProblem& p = doc.problem;
    json edges = json::array();
    for (std::size_t j = 0; j < p.edge_count(); ++j) {
        const auto& e = p.graph.edge(j);
        json ej = {{"id", e.id}, {"length", e.length}, {"dim", e.dim}, {"A", matrix_to_json(p.operators[j])}};
        std::visit(
            [&](const auto& f) {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, ZeroForcing>) {
                    ej["f"] = {{"kind", "zero"}};
                } else if constexpr (std::is_same_v<T, ConstantForcing>) {
                    ej["f"] = {{"kind", "constant"}, {"value", vector_to_json(f.value)}};
                } else {
                    json samples = json::array();
                    for (const auto& v : f.values) samples.push_back(vector_to_json(v));
                    ej["f"] = {{"kind", "samples"}, {"value", samples}};
                }
            },
            p.forcing[j]);
        if (j < p.g.size() && p.g[j].size() != 0) ej["g"] = vector_to_json(p.g[j]);
        ej["steps"] = p.steps[j];
        edges.push_back(std::move(ej));
    }
    json blocks = json::array();
    for (const auto& [key, block] : p.transmission.blocks()) {
        blocks.push_back({{"from", p.graph.edge(key.second).id},
                          {"to", p.graph.edge(key.first).id},
                          {"matrix", matrix_to_json(block)}});
    }
    json out = {{"edges", edges},
                {"blocks", blocks},
                {"mode", doc.mode == ProblemMode::Schrodinger ? "schrodinger" : "parabolic"},
                {"options", doc.options}};
    if (!doc.scenario.is_null()) out["scenario"] = doc.scenario;
    return out;
}

std::string canonical_text(const json& j) { return j.dump(2) + "\n"; }

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    fs::path tmp = dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
    }
}

}  // namespace chronograph
