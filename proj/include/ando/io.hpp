#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ando/cmatrix.hpp"
#include "ando/contraction.hpp"
#include "ando/polynomial.hpp"

namespace ando::io {

using Json = nlohmann::json;

/// Malformed input, located by a JSON pointer into the offending document.
class InputError : public std::runtime_error {
public:
    InputError(std::string path, const std::string& msg) : std::runtime_error(msg), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

Json read_json_file(const std::string& path);

Complex parse_complex(const Json& j, const std::string& path);
Matrix parse_matrix(const Json& j, const std::string& path);
Json to_json(Complex z);
Json to_json(const Matrix& m);

Tolerances parse_tolerances(const Json& j, const std::string& path, Tolerances base = {});
Json to_json(const Tolerances& t);

/// {"dim": n, "T1": [matrices] | matrix, "T2": [matrices] | matrix, "tolerances": {...}}
struct PairFile {
    CommutingPair pair;
    Tolerances tol;
};
PairFile parse_pair(const Json& j);

/// {"T1": [...], "T1p": [...] (defaults to T1), "T2": [...]}: T2 entries map the T1' space into the T1 space.
struct TripleFile {
    IntertwiningTriple triple;
    Tolerances tol;
};
TripleFile parse_triple(const Json& j);

/// {"T": matrix, "Tp": matrix (defaults to T), "A": matrix}
struct LiftFile {
    Matrix t;
    Matrix tp;
    Matrix a;
    Tolerances tol;
};
LiftFile parse_lift(const Json& j);

/// "bivariate": {"rows", "cols", "entries": [[ [ {"z", "w", "c"} ] ]]} or a scalar "terms" list.
BivariatePolyMatrix parse_bivariate(const Json& j);
FreePoly parse_free(const Json& j);
HereditaryPoly parse_hereditary(const Json& j);
std::string poly_kind(const Json& j);
Json to_json(const BivariatePolyMatrix& p);

}  // namespace ando::io
