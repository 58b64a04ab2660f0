#include "lagdeform/problem.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lagdeform/errors.hpp"

namespace lagdeform {

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& where)
{
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(where.empty() ? key : where + "." + key, "missing");
    return *it;
}

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) throw SchemaError(where.empty() ? k : where + "." + k, "unknown key");
}

double number(const json& v, const std::string& field)
{
    if (!v.is_number()) throw SchemaError(field, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw SchemaError(field, "must be finite");
    return d;
}

std::string text(const json& v, const std::string& field)
{
    if (!v.is_string()) throw SchemaError(field, "expected an expression string");
    return v.get<std::string>();
}

std::vector<std::string> text_list(const json& v, const std::string& field, int n)
{
    if (!v.is_array()) throw SchemaError(field, "expected an array of expression strings");
    if (static_cast<int>(v.size()) != n)
        throw SchemaError(field, "arity: expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(text(v[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

bool identifier(const std::string& s)
{
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c))) return false;
    return true;
}

} // namespace

ProblemSpec parse_problem(std::string_view json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError("<document>", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("<document>", "expected an object");
    only_keys(doc,
              {"name", "dim", "params", "spray", "lagrangian", "sigma", "dissipation", "homogeneity", "box",
               "sampling", "tolerances"},
              "");

    ProblemSpec spec;
    const auto& name = require(doc, "name", "");
    if (!name.is_string()) throw SchemaError("name", "expected a string");
    spec.name = name.get<std::string>();

    const auto& dim = require(doc, "dim", "");
    if (!dim.is_number_integer() || dim.get<long long>() < 1 || dim.get<long long>() > 64)
        throw SchemaError("dim", "expected an integer in [1, 64]");
    spec.dim = static_cast<int>(dim.get<long long>());
    const int n = spec.dim;
    const auto chart = chart_variables(n);
    std::set<std::string> declared(chart.begin(), chart.end());

    const auto& params = require(doc, "params", "");
    if (!params.is_object()) throw SchemaError("params", "expected an object");
    for (const auto& [k, v] : params.items()) {
        if (!identifier(k)) throw SchemaError("params." + k, "not an identifier");
        if (declared.count(k)) throw SchemaError("params." + k, "clashes with a chart coordinate");
        spec.params[k] = number(v, "params." + k);
    }
    for (const auto& [k, v] : spec.params) declared.insert(k);

    std::map<std::string, Expression> constants;
    for (const auto& [k, v] : spec.params) constants[k] = Expression(v);
    auto compile = [&](const std::string& src) { return substitute(parse(src, declared), constants); };

    spec.spray_source = text_list(require(doc, "spray", ""), "spray", n);
    spec.lagrangian_source = text(require(doc, "lagrangian", ""), "lagrangian");
    if (auto it = doc.find("sigma"); it != doc.end()) spec.sigma_source = text_list(*it, "sigma", n);
    if (auto it = doc.find("dissipation"); it != doc.end()) spec.dissipation_source = text(*it, "dissipation");
    if (auto it = doc.find("homogeneity"); it != doc.end()) spec.homogeneity = number(*it, "homogeneity");

    const auto& box = require(doc, "box", "");
    if (!box.is_object()) throw SchemaError("box", "expected an object");
    for (const auto& [k, v] : box.items()) {
        const std::string field = "box." + k;
        if (!std::count(chart.begin(), chart.end(), k)) throw SchemaError(field, "not a chart coordinate");
        if (!v.is_array() || v.size() != 2) throw SchemaError(field, "expected [lo, hi]");
        const double lo = number(v[0], field + "[0]");
        const double hi = number(v[1], field + "[1]");
        if (!(lo < hi)) throw SchemaError(field, "degenerate interval");
        spec.plan.box[k] = {lo, hi};
    }
    for (const auto& c : chart)
        if (!spec.plan.box.count(c)) throw SchemaError("box." + c, "missing");

    const auto& sampling = require(doc, "sampling", "");
    if (!sampling.is_object()) throw SchemaError("sampling", "expected an object");
    only_keys(sampling, {"count", "seed", "guard"}, "sampling");
    const auto& count = require(sampling, "count", "sampling");
    if (!count.is_number_integer() || count.get<long long>() < 8)
        throw SchemaError("sampling.count", "expected an integer >= 8");
    spec.plan.count = static_cast<std::size_t>(count.get<long long>());
    const auto& seed = require(sampling, "seed", "sampling");
    if (!seed.is_number_unsigned()) throw SchemaError("sampling.seed", "expected a non-negative integer");
    spec.plan.seed = seed.get<std::uint64_t>();
    spec.plan.guard = number(require(sampling, "guard", "sampling"), "sampling.guard");
    if (!(spec.plan.guard > 0.0)) throw SchemaError("sampling.guard", "must be positive");

    if (auto it = doc.find("tolerances"); it != doc.end()) {
        if (!it->is_object()) throw SchemaError("tolerances", "expected an object");
        only_keys(*it, {"identity", "classification", "trajectory", "dependence"}, "tolerances");
        auto read = [&](const char* key, double& dst) {
            if (auto t = it->find(key); t != it->end()) {
                dst = number(*t, std::string("tolerances.") + key);
                if (!(dst > 0.0)) throw SchemaError(std::string("tolerances.") + key, "must be positive");
            }
        };
        read("identity", spec.tolerances.identity);
        read("classification", spec.tolerances.classification);
        read("trajectory", spec.tolerances.trajectory);
        read("dependence", spec.tolerances.dependence);
    }

    std::vector<Expression> G;
    for (const auto& s : spec.spray_source) G.push_back(compile(s));
    spec.spray = make_spray(std::move(G));
    spec.lagrangian = {n, compile(spec.lagrangian_source)};
    if (spec.sigma_source) {
        std::vector<Expression> comps;
        for (const auto& s : *spec.sigma_source) comps.push_back(compile(s));
        spec.sigma = make_form(std::move(comps));
    }
    if (spec.dissipation_source) spec.dissipation = ScalarField{n, compile(*spec.dissipation_source)};
    return spec;
}

ProblemSpec load_problem(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw SchemaError("<file>", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str());
}

} // namespace lagdeform
