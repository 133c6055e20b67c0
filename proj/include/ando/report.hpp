#pragma once

#include <string>

#include "ando/bounds.hpp"
#include "ando/contraction.hpp"
#include "ando/dilation.hpp"
#include "ando/io.hpp"

namespace ando::io {

inline constexpr int kSchemaVersion = 1;

/// Common header: schema version, command name and the timestamp. The timestamp is the
/// only field that differs between two runs with identical flags.
Json report_header(const std::string& command);

Json to_json(const DilationCertificates& c);
Json to_json(const Am3Bound& b);
Json to_json(const Verdict& v);

Json bound_report_json(const BoundReport& r, const BoundConfig& config);

struct ReplayInput {
    BoundReport report;  // verdicts as stored in the file
    double chain_tol = 1e-7;
};
/// Reads back a report produced by bound_report_json.
ReplayInput parse_bound_report(const Json& j);

Json dilation_json(const AndoDilation& d, const ModelSpace& model);
Json decomposition_json(const StructureDecomposition& s);
Json lift_json(const CommutantLift& lift, int taylor_terms);
Json fock_verify_json(const IntertwiningDilationReport& r, const UnitaryColligation& col);

}  // namespace ando::io
