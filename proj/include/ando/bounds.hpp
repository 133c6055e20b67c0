#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ando/cmatrix.hpp"
#include "ando/contraction.hpp"
#include "ando/dilation.hpp"
#include "ando/polynomial.hpp"

namespace ando {

struct BoundConfig {
    int grid = 2048;
    int extensions = 16;  // sampled extensions in addition to the canonical one
    std::uint64_t seed = 0;
    double chain_tol = 1e-7;
    Tolerances tol;
};

struct ExtensionBound {
    std::string label;
    std::uint64_t seed = 0;
    double value = 0.0;
};

struct Am3Bound {
    double value = 0.0;  // min over the extensions
    bool ill_conditioned = false;
    std::vector<ExtensionBound> extensions;
    DilationCertificates worst;  // componentwise max over the extensions
};

/// Dilations for the canonical extension and `samples` seeded ones (seeds seed, seed+1, ...).
/// The sampled dilations are built in parallel; `parallel = false` runs the serial reference.
class Am3Engine {
public:
    Am3Engine(const CommutingPair& pair, int samples, std::uint64_t seed, const Tolerances& tol = {},
              bool parallel = true);
    Am3Bound evaluate(const BivariatePolyMatrix& p) const;
    const std::vector<AndoDilation>& dilations() const { return dilations_; }

private:
    std::vector<AndoDilation> dilations_;
    bool ill_conditioned_ = false;
    Tolerances tol_;
};

Am3Bound bound_am3(const CommutingPair& pair, const BivariatePolyMatrix& p, int samples, std::uint64_t seed,
                   const Tolerances& tol = {});
Am3Bound bound_am3_serial(const CommutingPair& pair, const BivariatePolyMatrix& p, int samples, std::uint64_t seed,
                          const Tolerances& tol = {});

struct BothOrders {
    Am3Bound order12;
    Am3Bound order21;  // roles of T1 and T2 exchanged, P(w, z)
    double value = 0.0;
};
BothOrders bound_min_both_orders(const CommutingPair& pair, const BivariatePolyMatrix& p, int samples,
                                 std::uint64_t seed, const Tolerances& tol = {});

/// Joint data of a unitary matrix: one orthonormal eigenbasis block per distinct eigenvalue.
struct Eigenspace {
    Complex value;
    Matrix basis;
};
/// Throws MarginViolation unless the matrix is unitary.
std::vector<Eigenspace> unitary_eigenspaces(const Matrix& u, const Tolerances& tol = {});

struct UnitaryPureBound {
    double fine = 0.0;    // max over eigenvalues of T1 of ||P(lambda, B_{2,lambda})||
    double coarse = 0.0;  // max over eigenvalues of ||P(lambda, B_2)|| with the full model of T2
    bool ill_conditioned = false;
};

class UnitaryPureEngine {
public:
    UnitaryPureEngine(const CommutingPair& pair, const Tolerances& tol = {});
    UnitaryPureBound evaluate(const BivariatePolyMatrix& p) const;

private:
    std::vector<Complex> values_;
    std::vector<Matrix> fine_models_;
    Matrix coarse_model_;
    bool ill_conditioned_ = false;
    Tolerances tol_;
};
UnitaryPureBound bound_unitary_pure(const CommutingPair& pair, const BivariatePolyMatrix& p,
                                    const Tolerances& tol = {});

struct TwoUnitaryBound {
    double value = 0.0;
    std::vector<std::pair<Complex, Complex>> omega;  // joint eigenvalue pairs with nonzero joint eigenspace
};

class TwoUnitaryEngine {
public:
    TwoUnitaryEngine(const CommutingPair& pair, const Tolerances& tol = {});
    TwoUnitaryBound evaluate(const BivariatePolyMatrix& p) const;

private:
    std::vector<std::pair<Complex, Complex>> omega_;
};
TwoUnitaryBound bound_two_unitary_exact(const CommutingPair& pair, const BivariatePolyMatrix& p,
                                        const Tolerances& tol = {});

struct GeneralBound {
    double value = 0.0;
    std::array<std::optional<double>, 4> blocks;  // order of StructureDecomposition
    bool ill_conditioned = false;
};

class GeneralEngine {
public:
    GeneralEngine(const CommutingPair& pair, int samples, std::uint64_t seed, const Tolerances& tol = {});
    GeneralBound evaluate(const BivariatePolyMatrix& p) const;

private:
    std::optional<TwoUnitaryEngine> uu_;
    std::optional<UnitaryPureEngine> uc_;
    std::optional<UnitaryPureEngine> cu_;  // built on the swapped pair
    std::optional<Am3Engine> cc12_;
    std::optional<Am3Engine> cc21_;
};
GeneralBound bound_general(const CommutingPair& pair, const BivariatePolyMatrix& p, int samples = 0,
                           std::uint64_t seed = 0, const Tolerances& tol = {});

enum class VerdictStatus { Pass, Fail, Advisory };
std::string to_string(VerdictStatus s);

struct Verdict {
    std::string inequality;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs + allowance - lhs; negative means violated
    VerdictStatus status = VerdictStatus::Pass;
};

struct BoundReport {
    double direct_norm = 0.0;
    std::optional<Am3Bound> am3_order12;
    std::optional<Am3Bound> am3_order21;
    std::optional<double> min_sampled_extensions;
    int sample_count = 0;
    std::vector<std::uint64_t> seeds;
    std::optional<UnitaryPureBound> unitary_pure;
    std::optional<TwoUnitaryBound> two_unitary_exact;
    std::optional<GeneralBound> general_composite;
    TorusBracket torus;
    std::vector<std::string> certified;  // hypotheses that were certified
    std::vector<std::string> skipped;    // "name: reason"
    std::vector<Verdict> verdicts;

    bool ill_conditioned() const;
    bool passed() const;  // no verdict failed
};

/// Recomputes the verdict list from the numbers stored in the report.
std::vector<Verdict> chain_verdicts(const BoundReport& report, double chain_tol);

/// Per-pair precomputation shared by every polynomial evaluated on the pair.
class PairAnalysis {
public:
    PairAnalysis(const CommutingPair& pair, const BoundConfig& config);
    BoundReport report(const BivariatePolyMatrix& p) const;

private:
    CommutingPair pair_;
    BoundConfig config_;
    std::optional<Am3Engine> am3_12_;
    std::optional<Am3Engine> am3_21_;
    std::optional<UnitaryPureEngine> unitary_pure_;
    std::optional<TwoUnitaryEngine> two_unitary_;
    std::optional<GeneralEngine> general_;
    std::vector<std::string> certified_;
    std::vector<std::string> skipped_;
};

BoundReport verify_chain(const CommutingPair& pair, const BivariatePolyMatrix& p, const BoundConfig& config = {});

}  // namespace ando
