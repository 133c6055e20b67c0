#include "ando/report.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace ando::io {

static std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

static Json to_json(double v) { return Json(v); }

static Json to_json(const UnitaryPureBound& b) {
    return {{"fine", b.fine}, {"coarse", b.coarse}, {"ill_conditioned", b.ill_conditioned}};
}

static Json to_json(const TwoUnitaryBound& b) {
    Json omega = Json::array();
    for (const auto& [z, w] : b.omega) omega.push_back(Json::array({to_json(z), to_json(w)}));
    return {{"value", b.value}, {"omega", std::move(omega)}};
}

static Json to_json(const GeneralBound& b) {
    Json blocks = Json::array();
    for (const auto& v : b.blocks) blocks.push_back(v ? Json(*v) : Json(nullptr));
    return {{"value", b.value}, {"blocks", std::move(blocks)}, {"ill_conditioned", b.ill_conditioned}};
}

static Json to_json(const TorusBracket& t) { return {{"lo", t.lo}, {"hi", t.hi}, {"grid", t.grid}}; }

template <class T>
static Json optional_json(const std::optional<T>& v) {
    return v ? to_json(*v) : Json(nullptr);
}

static Json to_json(const UnitaryColligation& col) {
    const ColligationShape& s = col.shape;
    return {{"extension", col.spec.label()},
            {"shape",
             {{"d1", s.d1}, {"d1p", s.d1p}, {"d2", s.d2}, {"n1", s.n1}, {"n2", s.n2}, {"pad_a", s.pad_a},
              {"pad_b", s.pad_b}, {"pad_k", s.pad_k}}},
            {"A", to_json(col.a)},
            {"B", to_json(col.b)},
            {"C", to_json(col.c)},
            {"D", to_json(col.d)},
            {"unitarity_residual", col.unitarity_residual},
            {"restriction_residual", col.restriction_residual}};
}

// Readers used by replay. They are strict: a report that does not match the writer is an input error.
static const Json& need(const Json& j, const std::string& path, const std::string& key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(path + "/" + key, "missing field \"" + key + "\"");
    return j[key];
}

static double need_number(const Json& j, const std::string& path, const std::string& key) {
    const Json& v = need(j, path, key);
    if (!v.is_number()) throw InputError(path + "/" + key, "expected a number");
    return v.get<double>();
}

static bool need_bool(const Json& j, const std::string& path, const std::string& key) {
    const Json& v = need(j, path, key);
    if (!v.is_boolean()) throw InputError(path + "/" + key, "expected a boolean");
    return v.get<bool>();
}

static Am3Bound read_am3(const Json& j, const std::string& path) {
    Am3Bound b;
    b.value = need_number(j, path, "value");
    b.ill_conditioned = need_bool(j, path, "ill_conditioned");
    const Json& ext = need(j, path, "extensions");
    if (!ext.is_array()) throw InputError(path + "/extensions", "expected an array");
    for (std::size_t i = 0; i < ext.size(); ++i) {
        const std::string p = path + "/extensions/" + std::to_string(i);
        ExtensionBound e;
        const Json& label = need(ext[i], p, "label");
        if (!label.is_string()) throw InputError(p + "/label", "expected a string");
        e.label = label.get<std::string>();
        e.seed = need(ext[i], p, "seed").get<std::uint64_t>();
        e.value = need_number(ext[i], p, "value");
        b.extensions.push_back(std::move(e));
    }
    return b;
}

static std::vector<std::string> read_strings(const Json& j, const std::string& path) {
    if (!j.is_array()) throw InputError(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string()) throw InputError(path + "/" + std::to_string(i), "expected a string");
        out.push_back(j[i].get<std::string>());
    }
    return out;
}

static VerdictStatus read_status(const Json& j, const std::string& path) {
    const std::string s = j.is_string() ? j.get<std::string>() : "";
    if (s == "pass") return VerdictStatus::Pass;
    if (s == "fail") return VerdictStatus::Fail;
    if (s == "advisory") return VerdictStatus::Advisory;
    throw InputError(path, "unknown verdict status");
}


Json report_header(const std::string& command) {
    return {{"schema_version", kSchemaVersion}, {"command", command}, {"generated_at", utc_timestamp()}};
}

Json to_json(const DilationCertificates& c) {
    return {{"isometry", c.isometry},       {"first", c.first},         {"second", c.second},
            {"commutation", c.commutation}, {"symbol_norm", c.symbol_norm}, {"unitarity", c.unitarity},
            {"restriction", c.restriction}, {"ok", c.ok()}};
}

Json to_json(const Am3Bound& b) {
    Json ext = Json::array();
    for (const auto& e : b.extensions) ext.push_back({{"label", e.label}, {"seed", e.seed}, {"value", e.value}});
    return {{"value", b.value},
            {"ill_conditioned", b.ill_conditioned},
            {"extensions", std::move(ext)},
            {"worst_certificates", to_json(b.worst)}};
}

Json to_json(const Verdict& v) {
    return {{"inequality", v.inequality},
            {"lhs", v.lhs},
            {"rhs", v.rhs},
            {"margin", v.margin},
            {"status", to_string(v.status)}};
}

Json bound_report_json(const BoundReport& r, const BoundConfig& config) {
    Json j = report_header("bound");
    j["config"] = {{"grid", config.grid},
                   {"extensions", config.extensions},
                   {"seed", config.seed},
                   {"chain_tol", config.chain_tol},
                   {"tolerances", to_json(config.tol)}};
    j["direct_norm"] = r.direct_norm;
    j["am3"] = {{"order12", optional_json(r.am3_order12)},
                {"order21", optional_json(r.am3_order21)},
                {"min_sampled_extensions", optional_json(r.min_sampled_extensions)},
                {"sample_count", r.sample_count},
                {"seeds", r.seeds}};
    j["unitary_pure"] = optional_json(r.unitary_pure);
    j["two_unitary_exact"] = optional_json(r.two_unitary_exact);
    j["general_composite"] = optional_json(r.general_composite);
    j["torus"] = to_json(r.torus);
    j["certified"] = r.certified;
    j["skipped"] = r.skipped;
    Json verdicts = Json::array();
    for (const auto& v : r.verdicts) verdicts.push_back(to_json(v));
    j["verdicts"] = std::move(verdicts);
    j["ill_conditioned"] = r.ill_conditioned();
    j["passed"] = r.passed();
    return j;
}

ReplayInput parse_bound_report(const Json& j) {
    if (!j.is_object()) throw InputError("", "expected a report object");
    const Json& version = need(j, "", "schema_version");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
        throw InputError("/schema_version", "unsupported schema version");
    ReplayInput in;
    in.chain_tol = need_number(need(j, "", "config"), "/config", "chain_tol");
    BoundReport& r = in.report;
    r.direct_norm = need_number(j, "", "direct_norm");

    const Json& am3 = need(j, "", "am3");
    if (!am3["order12"].is_null()) r.am3_order12 = read_am3(am3["order12"], "/am3/order12");
    if (!am3["order21"].is_null()) r.am3_order21 = read_am3(am3["order21"], "/am3/order21");
    if (!am3["min_sampled_extensions"].is_null())
        r.min_sampled_extensions = need_number(am3, "/am3", "min_sampled_extensions");
    r.sample_count = need(am3, "/am3", "sample_count").get<int>();
    r.seeds = need(am3, "/am3", "seeds").get<std::vector<std::uint64_t>>();

    const Json& up = need(j, "", "unitary_pure");
    if (!up.is_null())
        r.unitary_pure = UnitaryPureBound{need_number(up, "/unitary_pure", "fine"),
                                          need_number(up, "/unitary_pure", "coarse"),
                                          need_bool(up, "/unitary_pure", "ill_conditioned")};
    const Json& tu = need(j, "", "two_unitary_exact");
    if (!tu.is_null()) {
        TwoUnitaryBound b;
        b.value = need_number(tu, "/two_unitary_exact", "value");
        const Json& omega = need(tu, "/two_unitary_exact", "omega");
        for (std::size_t i = 0; i < omega.size(); ++i) {
            const std::string p = "/two_unitary_exact/omega/" + std::to_string(i);
            b.omega.emplace_back(parse_complex(omega[i].at(0), p + "/0"), parse_complex(omega[i].at(1), p + "/1"));
        }
        r.two_unitary_exact = b;
    }
    const Json& gc = need(j, "", "general_composite");
    if (!gc.is_null()) {
        GeneralBound b;
        b.value = need_number(gc, "/general_composite", "value");
        b.ill_conditioned = need_bool(gc, "/general_composite", "ill_conditioned");
        const Json& blocks = need(gc, "/general_composite", "blocks");
        for (std::size_t i = 0; i < b.blocks.size() && i < blocks.size(); ++i)
            if (!blocks[i].is_null()) b.blocks[i] = blocks[i].get<double>();
        r.general_composite = b;
    }
    const Json& torus = need(j, "", "torus");
    r.torus.lo = need_number(torus, "/torus", "lo");
    r.torus.hi = need_number(torus, "/torus", "hi");
    r.torus.grid = need(torus, "/torus", "grid").get<int>();
    r.certified = read_strings(need(j, "", "certified"), "/certified");
    r.skipped = read_strings(need(j, "", "skipped"), "/skipped");

    const Json& verdicts = need(j, "", "verdicts");
    if (!verdicts.is_array()) throw InputError("/verdicts", "expected an array");
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        const std::string p = "/verdicts/" + std::to_string(i);
        Verdict v;
        const Json& name = need(verdicts[i], p, "inequality");
        if (!name.is_string()) throw InputError(p + "/inequality", "expected a string");
        v.inequality = name.get<std::string>();
        v.lhs = need_number(verdicts[i], p, "lhs");
        v.rhs = need_number(verdicts[i], p, "rhs");
        v.margin = need_number(verdicts[i], p, "margin");
        v.status = read_status(need(verdicts[i], p, "status"), p + "/status");
        r.verdicts.push_back(std::move(v));
    }
    return in;
}

Json dilation_json(const AndoDilation& d, const ModelSpace& model) {
    Json roots = Json::array();
    for (const auto& root : model.blaschke.roots)
        roots.push_back({{"value", to_json(root.value)}, {"multiplicity", root.multiplicity}});
    Json j = report_header("dilate");
    j["model"] = {{"roots", std::move(roots)},
                  {"size", model.size()},
                  {"shift", to_json(model.shift)},
                  {"annihilation", model.annihilation},
                  {"gram_condition", model.gram_condition},
                  {"ill_conditioned", model.ill_conditioned}};
    j["colligation"] = to_json(d.colligation);
    j["kernel"] = to_json(d.kernel);
    j["v1"] = to_json(d.v1);
    j["v2"] = to_json(d.v2);
    j["certificates"] = to_json(d.certificates);
    j["ill_conditioned"] = d.ill_conditioned;
    return j;
}

Json decomposition_json(const StructureDecomposition& s) {
    static const char* names[] = {"unitary_unitary", "unitary_cnu", "cnu_unitary", "cnu_cnu"};
    Json blocks = Json::array();
    for (std::size_t k = 0; k < 4; ++k)
        blocks.push_back({{"name", names[k]},
                          {"dim", s.bases[k].cols()},
                          {"basis", to_json(s.bases[k])},
                          {"T1", to_json(s.t1_blocks[k])},
                          {"T2", to_json(s.t2_blocks[k])}});
    Json j = report_header("decompose");
    j["blocks"] = std::move(blocks);
    return j;
}

Json lift_json(const CommutantLift& lift, int taylor_terms) {
    Json coeffs = Json::array();
    for (const Matrix& c : transfer_taylor(lift.colligation, taylor_terms)) coeffs.push_back(to_json(lift.scale * c));
    Json j = report_header("lift");
    j["scale"] = lift.scale;
    j["exact_model"] = lift.exact_model;
    j["interpolation_residual"] = lift.interpolation_residual;
    j["interpolation_bound"] = lift.interpolation_bound;
    j["grid_norm"] = lift.grid_norm;
    j["sup_norm"] = lift.sup_norm;
    j["taylor_coefficients"] = std::move(coeffs);
    j["colligation"] = to_json(lift.colligation);
    return j;
}

Json fock_verify_json(const IntertwiningDilationReport& r, const UnitaryColligation& col) {
    Json j = report_header("fock-verify");
    j["max_len"] = r.max_len;
    j["residuals"] = Json::array({
        {{"name", "first"}, {"residual", r.first}, {"bound", r.first_bound}},
        {{"name", "second"}, {"residual", r.second}, {"bound", r.second_bound}},
        {{"name", "symbol"}, {"residual", r.symbol}, {"bound", r.symbol_bound}},
        {{"name", "series"}, {"residual", r.series}, {"bound", r.series_bound}},
    });
    j["colligation"] = to_json(col);
    j["ok"] = r.ok();
    return j;
}

}  // namespace ando::io
