#include "ando/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ando::io {

namespace {

std::string at(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string at(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

const Json& field(const Json& j, const std::string& path, const std::string& key) {
    if (!j.is_object()) throw InputError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw InputError(at(path, key), "missing field \"" + key + "\"");
    return *it;
}

int parse_int(const Json& j, const std::string& path, int min_value) {
    if (!j.is_number_integer()) throw InputError(path, "expected an integer");
    const auto v = j.get<long long>();
    if (v < min_value || v > 1000000) throw InputError(path, "integer out of range");
    return static_cast<int>(v);
}

Word parse_word(const Json& j, const std::string& path) {
    if (!j.is_array()) throw InputError(path, "expected a word (array of generator indices)");
    Word w;
    for (std::size_t i = 0; i < j.size(); ++i) w.push_back(parse_int(j[i], at(path, i), 1));
    return w;
}

bool is_complex_literal(const Json& j) {
    return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number();
}

// A single matrix has complex literals two levels down; a list of matrices three.
bool looks_like_matrix(const Json& j) {
    if (!j.is_array() || j.empty()) return false;
    if (!j[0].is_array()) return false;
    return j[0].empty() || is_complex_literal(j[0][0]);
}

std::vector<Matrix> parse_tuple(const Json& j, const std::string& path, Eigen::Index rows, Eigen::Index cols) {
    std::vector<Matrix> out;
    auto check = [&](const Matrix& m, const std::string& p) {
        if (m.rows() != rows || m.cols() != cols)
            throw InputError(p, "expected a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix, got " +
                                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    };
    if (looks_like_matrix(j)) {
        out.push_back(parse_matrix(j, path));
        check(out.back(), path);
        return out;
    }
    if (!j.is_array() || j.empty()) throw InputError(path, "expected a matrix or a nonempty list of matrices");
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(parse_matrix(j[i], at(path, i)));
        check(out.back(), at(path, i));
    }
    return out;
}

Tolerances optional_tolerances(const Json& j) {
    if (j.is_object() && j.contains("tolerances")) return parse_tolerances(j["tolerances"], "/tolerances");
    return {};
}

// Construction failures that describe the input rather than the numerics are reported as input errors.
template <class F>
auto located(const std::string& path, F&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotCommuting || e.kind() == ErrorKind::NotIntertwining ||
            e.kind() == ErrorKind::InvalidInput || e.kind() == ErrorKind::ShapeMismatch)
            throw InputError(path, e.what());
        throw;
    }
}

}  // namespace

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return Json::parse(ss.str());
    } catch (const Json::parse_error& e) {
        throw InputError("", path + ": invalid JSON: " + e.what());
    }
}

Complex parse_complex(const Json& j, const std::string& path) {
    if (!is_complex_literal(j)) throw InputError(path, "expected a complex number [re, im]");
    const double re = j[0].get<double>();
    const double im = j[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im)) throw InputError(path, "non-finite complex number");
    return {re, im};
}

Matrix parse_matrix(const Json& j, const std::string& path) {
    if (!j.is_array()) throw InputError(path, "expected a matrix (array of rows)");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Matrix(0, 0);
    if (!j[0].is_array()) throw InputError(at(path, 0), "expected a row");
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const Json& row = j[r];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw InputError(at(path, r), "rows must have equal length");
        for (std::size_t c = 0; c < row.size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_complex(row[c], at(at(path, r), c));
    }
    return m;
}

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Tolerances parse_tolerances(const Json& j, const std::string& path, Tolerances base) {
    if (!j.is_object()) throw InputError(path, "expected an object of tolerances");
    for (const auto& [key, value] : j.items()) {
        double* slot = nullptr;
        if (key == "contraction_slack") slot = &base.contraction_slack;
        if (key == "hermitian_psd_clamp") slot = &base.hermitian_psd_clamp;
        if (key == "unimodular_margin") slot = &base.unimodular_margin;
        if (key == "residual_tol") slot = &base.residual_tol;
        if (key == "rank_tol") slot = &base.rank_tol;
        if (!slot) throw InputError(at(path, key), "unknown tolerance \"" + key + "\"");
        if (!value.is_number()) throw InputError(at(path, key), "expected a number");
        *slot = value.get<double>();
    }
    try {
        base.validate();
    } catch (const Error& e) {
        throw InputError(path, e.what());
    }
    return base;
}

Json to_json(const Tolerances& t) {
    return {{"contraction_slack", t.contraction_slack},
            {"hermitian_psd_clamp", t.hermitian_psd_clamp},
            {"unimodular_margin", t.unimodular_margin},
            {"residual_tol", t.residual_tol},
            {"rank_tol", t.rank_tol}};
}

PairFile parse_pair(const Json& j) {
    if (!j.is_object()) throw InputError("", "expected a pair object");
    const int dim = parse_int(field(j, "", "dim"), "/dim", 0);
    PairFile out;
    out.tol = optional_tolerances(j);
    const auto t1 = parse_tuple(field(j, "", "T1"), "/T1", dim, dim);
    const auto t2 = parse_tuple(field(j, "", "T2"), "/T2", dim, dim);
    const RowContraction r1 = located("/T1", [&] { return RowContraction::make(t1, out.tol); });
    const RowContraction r2 = located("/T2", [&] { return RowContraction::make(t2, out.tol); });
    out.pair = located("/T2", [&] { return CommutingPair::make(r1, r2, out.tol); });
    return out;
}

TripleFile parse_triple(const Json& j) {
    if (!j.is_object()) throw InputError("", "expected a triple object");
    TripleFile out;
    out.tol = optional_tolerances(j);
    const Json& j1 = field(j, "", "T1");
    const Matrix first = looks_like_matrix(j1) ? parse_matrix(j1, "/T1") : parse_matrix(j1.at(0), "/T1/0");
    const Eigen::Index dim = first.rows();
    const auto t1 = parse_tuple(j1, "/T1", dim, dim);
    Eigen::Index dimp = dim;
    std::vector<Matrix> t1p = t1;
    if (j.contains("T1p")) {
        const Json& jp = j["T1p"];
        const Matrix fp = looks_like_matrix(jp) ? parse_matrix(jp, "/T1p") : parse_matrix(jp.at(0), "/T1p/0");
        dimp = fp.rows();
        t1p = parse_tuple(jp, "/T1p", dimp, dimp);
    }
    const auto t2 = parse_tuple(field(j, "", "T2"), "/T2", dim, dimp);
    const RowContraction r1 = located("/T1", [&] { return RowContraction::make(t1, out.tol); });
    const RowContraction r1p = located("/T1p", [&] { return RowContraction::make(t1p, out.tol); });
    const RowContraction r2 = located("/T2", [&] { return RowContraction::make(t2, out.tol); });
    out.triple = located("/T2", [&] { return IntertwiningTriple::make(r1, r1p, r2, out.tol); });
    return out;
}

LiftFile parse_lift(const Json& j) {
    if (!j.is_object()) throw InputError("", "expected a lifting object");
    LiftFile out;
    out.tol = optional_tolerances(j);
    out.t = parse_matrix(field(j, "", "T"), "/T");
    out.tp = j.contains("Tp") ? parse_matrix(j["Tp"], "/Tp") : out.t;
    out.a = parse_matrix(field(j, "", "A"), "/A");
    if (out.t.rows() != out.t.cols()) throw InputError("/T", "T must be square");
    if (out.tp.rows() != out.tp.cols()) throw InputError("/Tp", "Tp must be square");
    if (out.a.rows() != out.t.rows() || out.a.cols() != out.tp.rows())
        throw InputError("/A", "A must map the Tp space into the T space");
    return out;
}

std::string poly_kind(const Json& j) {
    const Json& k = field(j, "", "kind");
    if (!k.is_string()) throw InputError("/kind", "expected a string");
    const std::string kind = k.get<std::string>();
    if (kind != "bivariate" && kind != "free" && kind != "hereditary")
        throw InputError("/kind", "unknown polynomial kind \"" + kind + "\"");
    return kind;
}

namespace {

void parse_bivariate_terms(const Json& terms, const std::string& path, BivariatePoly& p) {
    if (!terms.is_array()) throw InputError(path, "expected a list of terms");
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const std::string tp = at(path, t);
        const int z = parse_int(field(terms[t], tp, "z"), at(tp, "z"), 0);
        const int w = parse_int(field(terms[t], tp, "w"), at(tp, "w"), 0);
        const Complex c = parse_complex(field(terms[t], tp, "c"), at(tp, "c"));
        p.add_term(z, w, c);
    }
}

}  // namespace

BivariatePolyMatrix parse_bivariate(const Json& j) {
    if (poly_kind(j) != "bivariate") throw InputError("/kind", "expected a bivariate polynomial");
    if (j.contains("terms")) {
        BivariatePoly p;
        parse_bivariate_terms(j["terms"], "/terms", p);
        return BivariatePolyMatrix::scalar(p);
    }
    const int rows = parse_int(field(j, "", "rows"), "/rows", 1);
    const int cols = parse_int(field(j, "", "cols"), "/cols", 1);
    const Json& entries = field(j, "", "entries");
    if (!entries.is_array() || static_cast<int>(entries.size()) != rows)
        throw InputError("/entries", "expected " + std::to_string(rows) + " rows");
    BivariatePolyMatrix out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const Json& row = entries[static_cast<std::size_t>(r)];
        const std::string rp = at("/entries", static_cast<std::size_t>(r));
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw InputError(rp, "expected " + std::to_string(cols) + " entries");
        for (int s = 0; s < cols; ++s)
            parse_bivariate_terms(row[static_cast<std::size_t>(s)], at(rp, static_cast<std::size_t>(s)), out.at(r, s));
    }
    return out;
}

FreePoly parse_free(const Json& j) {
    if (poly_kind(j) != "free") throw InputError("/kind", "expected a free polynomial");
    const Json& terms = field(j, "", "terms");
    if (!terms.is_array()) throw InputError("/terms", "expected a list of terms");
    FreePoly p;
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const std::string tp = at("/terms", t);
        p.terms.push_back({parse_word(field(terms[t], tp, "x"), at(tp, "x")),
                           parse_word(field(terms[t], tp, "y"), at(tp, "y")),
                           parse_complex(field(terms[t], tp, "c"), at(tp, "c"))});
    }
    return p;
}

HereditaryPoly parse_hereditary(const Json& j) {
    if (poly_kind(j) != "hereditary") throw InputError("/kind", "expected a hereditary polynomial");
    const Json& terms = field(j, "", "terms");
    if (!terms.is_array()) throw InputError("/terms", "expected a list of terms");
    HereditaryPoly p;
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const std::string tp = at("/terms", t);
        p.terms.push_back({parse_word(field(terms[t], tp, "x"), at(tp, "x")),
                           parse_word(field(terms[t], tp, "y"), at(tp, "y")),
                           parse_word(field(terms[t], tp, "ys"), at(tp, "ys")),
                           parse_word(field(terms[t], tp, "xs"), at(tp, "xs")),
                           parse_complex(field(terms[t], tp, "c"), at(tp, "c"))});
    }
    return p;
}

Json to_json(const BivariatePolyMatrix& p) {
    Json entries = Json::array();
    for (int r = 0; r < p.rows(); ++r) {
        Json row = Json::array();
        for (int s = 0; s < p.cols(); ++s) {
            Json terms = Json::array();
            for (const auto& [key, c] : p.at(r, s).terms())
                terms.push_back({{"z", key.first}, {"w", key.second}, {"c", to_json(c)}});
            row.push_back(std::move(terms));
        }
        entries.push_back(std::move(row));
    }
    return {{"kind", "bivariate"}, {"rows", p.rows()}, {"cols", p.cols()}, {"entries", std::move(entries)}};
}

}  // namespace ando::io
