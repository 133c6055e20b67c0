#include "ando/cli.hpp"

#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ando/bounds.hpp"
#include "ando/dilation.hpp"
#include "ando/fock.hpp"
#include "ando/io.hpp"
#include "ando/report.hpp"

namespace ando::cli {

namespace {

using io::Json;

struct Output {
    std::string path;

    void emit(const Json& j, std::ostream& out) const {
        const std::string text = j.dump(2) + "\n";
        if (path.empty()) {
            out << text;
            return;
        }
        std::ofstream f(path);
        if (!f) throw io::InputError("", "cannot write " + path);
        f << text;
    }
};

struct BoundArgs {
    std::string pair_file;
    std::string poly_file;
    std::string replay_file;
    BoundConfig config;
    Output output;
};

void add_bound_options(CLI::App* cmd, BoundArgs& a) {
    cmd->add_option("--grid", a.config.grid, "torus grid points per axis")->check(CLI::Range(1, 1 << 16));
    cmd->add_option("--extensions", a.config.extensions, "sampled unitary extensions")->check(CLI::Range(0, 4096));
    cmd->add_option("--seed", a.config.seed, "first extension seed");
    cmd->add_option("--chain-tol", a.config.chain_tol, "allowance for the chain inequalities")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", a.output.path, "write the report here instead of stdout");
}

BivariatePolyMatrix read_bivariate(const std::string& file) {
    const Json j = io::read_json_file(file);
    if (io::poly_kind(j) != "bivariate") throw io::InputError("/kind", "bounds need a bivariate polynomial");
    return io::parse_bivariate(j);
}

BoundReport compute_report(BoundArgs& a) {
    const io::PairFile pf = io::parse_pair(io::read_json_file(a.pair_file));
    const BivariatePolyMatrix p = read_bivariate(a.poly_file);
    a.config.tol = pf.tol;
    return verify_chain(pf.pair, p, a.config);
}

int cmd_bound(BoundArgs& a, std::ostream& out) {
    const BoundReport r = compute_report(a);
    a.output.emit(io::bound_report_json(r, a.config), out);
    return kPass;
}

bool same_verdicts(const std::vector<Verdict>& a, const std::vector<Verdict>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].inequality != b[i].inequality || a[i].status != b[i].status || a[i].lhs != b[i].lhs ||
            a[i].rhs != b[i].rhs || a[i].margin != b[i].margin)
            return false;
    }
    return true;
}

int cmd_verify(BoundArgs& a, std::ostream& out, std::ostream& err) {
    if (!a.replay_file.empty()) {
        const io::ReplayInput in = io::parse_bound_report(io::read_json_file(a.replay_file));
        const std::vector<Verdict> recomputed = chain_verdicts(in.report, in.chain_tol);
        const bool consistent = same_verdicts(recomputed, in.report.verdicts);
        BoundReport replayed = in.report;
        replayed.verdicts = recomputed;
        Json j = io::report_header("verify");
        j["replay"] = a.replay_file;
        j["consistent"] = consistent;
        Json verdicts = Json::array();
        for (const auto& v : recomputed) verdicts.push_back(io::to_json(v));
        j["verdicts"] = std::move(verdicts);
        j["passed"] = replayed.passed() && consistent;
        a.output.emit(j, out);
        if (!consistent) err << "replay: stored verdicts differ from the recomputed ones\n";
        return replayed.passed() && consistent ? kPass : kVerificationFailure;
    }
    if (a.pair_file.empty() || a.poly_file.empty())
        throw io::InputError("", "verify needs PAIR and POLY, or --replay REPORT");
    const BoundReport r = compute_report(a);
    Json j = io::bound_report_json(r, a.config);
    j["command"] = "verify";
    a.output.emit(j, out);
    for (const auto& v : r.verdicts)
        if (v.status == VerdictStatus::Fail) err << "failed: " << v.inequality << " (margin " << v.margin << ")\n";
    return r.passed() ? kPass : kVerificationFailure;
}

ExtensionSpec extension_from(const std::optional<std::uint64_t>& seed) {
    return seed ? ExtensionSpec::sampled(*seed) : ExtensionSpec::canonical();
}

int cmd_dilate(const std::string& file, const std::optional<std::uint64_t>& seed, const Output& o,
               std::ostream& out) {
    const io::PairFile pf = io::parse_pair(io::read_json_file(file));
    const AndoDilationFactory factory(pf.pair, pf.tol);
    const AndoDilation d = factory.make(extension_from(seed));
    o.emit(io::dilation_json(d, factory.model()), out);
    return d.certificates.ok() ? kPass : kVerificationFailure;
}

int cmd_decompose(const std::string& file, const Output& o, std::ostream& out) {
    const io::PairFile pf = io::parse_pair(io::read_json_file(file));
    o.emit(io::decomposition_json(structure_decomposition(pf.pair, pf.tol)), out);
    return kPass;
}

int cmd_lift(const std::string& file, const std::optional<std::uint64_t>& seed, int terms, const Output& o,
             std::ostream& out) {
    const Json j = io::read_json_file(file);
    io::LiftFile lf;
    if (j.is_object() && j.contains("A")) {
        lf = io::parse_lift(j);
    } else {
        const io::TripleFile tf = io::parse_triple(j);
        if (tf.triple.t1.size() != 1 || tf.triple.t1p.size() != 1 || tf.triple.t2.size() != 1)
            throw io::InputError("", "lifting needs single matrices T1, T1p, T2");
        lf = {tf.triple.t1[0], tf.triple.t1p[0], tf.triple.t2[0], tf.tol};
    }
    const CommutantLift lift = commutant_lift(lf.t, lf.tp, lf.a, extension_from(seed), lf.tol);
    o.emit(io::lift_json(lift, terms), out);
    return kPass;
}

int cmd_fock_verify(const std::string& file, const std::optional<std::uint64_t>& seed, int max_len, const Output& o,
                    std::ostream& out) {
    const io::TripleFile tf = io::parse_triple(io::read_json_file(file));
    const DefectMaps maps = intertwining_isometry(tf.triple, tf.tol);
    const UnitaryColligation col = unitary_extension(maps, extension_from(seed), tf.tol);
    const TruncatedFock space(static_cast<int>(tf.triple.t1.size()), max_len);
    const IntertwiningDilationReport r = verify_intertwining_dilation(tf.triple, col, space, tf.tol);
    o.emit(io::fock_verify_json(r, col), out);
    return r.ok() ? kPass : kVerificationFailure;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput:
        case ErrorKind::ShapeMismatch:
        case ErrorKind::NotCommuting:
        case ErrorKind::NotIntertwining: return kInvalidInput;
        default: return kNumericalFailure;
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dilation-based bounds for polynomials in commuting contractions", "ando_lab"};
    app.require_subcommand(1);

    BoundArgs bound_args;
    CLI::App* bound = app.add_subcommand("bound", "compute every applicable bound and write a report");
    bound->add_option("pair", bound_args.pair_file, "pair JSON")->required();
    bound->add_option("poly", bound_args.poly_file, "bivariate polynomial JSON")->required();
    add_bound_options(bound, bound_args);

    BoundArgs verify_args;
    CLI::App* verify = app.add_subcommand("verify", "check the chain of inequalities; exit 1 on a violation");
    verify->add_option("pair", verify_args.pair_file, "pair JSON");
    verify->add_option("poly", verify_args.poly_file, "bivariate polynomial JSON");
    verify->add_option("--replay", verify_args.replay_file, "recompute the verdicts of a stored report");
    add_bound_options(verify, verify_args);

    std::string pair_file;
    std::optional<std::uint64_t> seed;
    Output output;
    int max_len = 8;
    int terms = 8;

    CLI::App* dilate = app.add_subcommand("dilate", "build the dilation and its certificates");
    dilate->add_option("pair", pair_file, "pair JSON")->required();
    dilate->add_option("--seed", seed, "use a sampled extension instead of the canonical one");
    dilate->add_option("--out", output.path, "write here instead of stdout");

    CLI::App* decompose = app.add_subcommand("decompose", "split into unitary and c.n.u. blocks");
    decompose->add_option("pair", pair_file, "pair JSON")->required();
    decompose->add_option("--out", output.path, "write here instead of stdout");

    CLI::App* lift = app.add_subcommand("lift", "lift an intertwiner to a bounded analytic symbol");
    lift->add_option("input", pair_file, "lifting JSON (T, Tp, A) or single-matrix triple")->required();
    lift->add_option("--seed", seed, "use a sampled extension instead of the canonical one");
    lift->add_option("--terms", terms, "Taylor coefficients to report")->check(CLI::Range(1, 1000));
    lift->add_option("--out", output.path, "write here instead of stdout");

    CLI::App* fock = app.add_subcommand("fock-verify", "residuals of the intertwining dilation on truncated Fock space");
    fock->add_option("triple", pair_file, "triple JSON")->required();
    fock->add_option("--max-len", max_len, "longest word")->check(CLI::Range(0, 24));
    fock->add_option("--seed", seed, "use a sampled extension instead of the canonical one");
    fock->add_option("--out", output.path, "write here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kPass : kInvalidInput;
    }

    try {
        if (bound->parsed()) return cmd_bound(bound_args, out);
        if (verify->parsed()) return cmd_verify(verify_args, out, err);
        if (dilate->parsed()) return cmd_dilate(pair_file, seed, output, out);
        if (decompose->parsed()) return cmd_decompose(pair_file, output, out);
        if (lift->parsed()) return cmd_lift(pair_file, seed, terms, output, out);
        if (fock->parsed()) return cmd_fock_verify(pair_file, seed, max_len, output, out);
    } catch (const io::InputError& e) {
        err << "invalid input";
        if (!e.path().empty()) err << " at " << e.path();
        err << ": " << e.what() << "\n";
        return kInvalidInput;
    } catch (const Json::exception& e) {
        err << "invalid input: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_code_for(e.kind());
    }
    return kInvalidInput;
}

}  // namespace ando::cli
