#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ando/cmatrix.hpp"
#include "ando/contraction.hpp"
#include "ando/fock.hpp"
#include "ando/model_space.hpp"
#include "ando/polynomial.hpp"

namespace ando {

/// Dimensions of the colligation blocks. Padded spaces: e1 = d1 + pad_a carries the first
/// defect space, e1p = d1p + pad_b each output copy, e2 = d2 + pad_k each auxiliary copy.
struct ColligationShape {
    Eigen::Index d1 = 0;
    Eigen::Index d1p = 0;
    Eigen::Index d2 = 0;
    int n1 = 1;
    int n2 = 1;
    Eigen::Index pad_a = 0;
    Eigen::Index pad_b = 0;
    Eigen::Index pad_k = 0;

    Eigen::Index e1() const { return d1 + pad_a; }
    Eigen::Index e1p() const { return d1p + pad_b; }
    Eigen::Index e2() const { return d2 + pad_k; }
    Eigen::Index in_dim() const { return e1() + n1 * e2(); }
    Eigen::Index out_dim() const { return n2 * e1p() + e2(); }
};

/// Column maps of the defect isometry X h -> Y h, already padded to equal ambient dimension.
struct DefectMaps {
    Matrix x;  // in_dim x dim H
    Matrix y;  // out_dim x dim H
    ColligationShape shape;
    DefectSpace d1;   // of T1
    DefectSpace d1p;  // of T1'
    DefectSpace d2;   // of the row T2
    Matrix coords1;   // e1 x dim H, padded coordinates of the first defect space
    Matrix coords1p;  // e1p x dim H'
    double energy_residual = 0.0;  // ||X*X - Y*Y||
};

DefectMaps intertwining_isometry(const IntertwiningTriple& triple, const Tolerances& tol = {});
DefectMaps intertwining_isometry(const CommutingPair& pair, const Tolerances& tol = {});

struct ExtensionSpec {
    enum class Mode { Canonical, Sampled };
    Mode mode = Mode::Canonical;
    std::uint64_t seed = 0;

    static ExtensionSpec canonical() { return {}; }
    static ExtensionSpec sampled(std::uint64_t seed) { return {Mode::Sampled, seed}; }
    std::string label() const;
};

/// U = [[A, B], [C, D]] with U X = Y.
struct UnitaryColligation {
    Matrix a;  // n2*e1p x e1
    Matrix b;  // n2*e1p x n1*e2
    Matrix c;  // e2 x e1
    Matrix d;  // e2 x n1*e2
    ColligationShape shape;
    ExtensionSpec spec;
    double unitarity_residual = 0.0;
    double restriction_residual = 0.0;

    Matrix u() const;
    Matrix b_block(int i) const;  // B_i, 0-based
    Matrix d_block(int i) const;  // D_i, 0-based
};

/// Haar-distributed unitary from a seed (splitmix-scrambled mt19937_64).
Matrix haar_unitary(Eigen::Index n, std::uint64_t seed);

UnitaryColligation unitary_extension(const DefectMaps& maps, const ExtensionSpec& spec, const Tolerances& tol = {});

/// phi(z) = A* + z C* (I - z D*)^{-1} B*, one generator only.
Matrix transfer_eval_scalar(const UnitaryColligation& col, Complex z);
/// phi(M) = I(x)A* + (I(x)C*)(I - M(x)D*)^{-1}(M(x)B*).
Matrix transfer_eval_at_matrix(const UnitaryColligation& col, const Matrix& m);
/// c_0 = A*, c_k = C* (D*)^{k-1} B*.
std::vector<Matrix> transfer_taylor(const UnitaryColligation& col, int count);
/// Coefficients of the multi-analytic symbol for all words of length <= space.max_len().
MultiAnalyticOp transfer_series_fock(const UnitaryColligation& col, const TruncatedFock& space);

/// Max of ||phi(z)|| over `points` equally spaced z on |z| = radius.
double transfer_grid_norm(const UnitaryColligation& col, double radius, int points = 512);
/// Estimate of sup_{|z|<1} ||phi(z)||: boundary-adjacent grid refined by golden-section search.
double transfer_sup_norm(const UnitaryColligation& col, int points = 512);

struct IsometryCheck {
    bool is_isometry_likely = false;
    bool exact = false;  // decided by the unitary/c.n.u. split of D
    std::vector<double> radii;
    std::vector<double> scores;  // (1 - r^2) sup_x ||(I - r D* Gamma)^{-1} B* x||^2
};
IsometryCheck isometry_condition_check(const UnitaryColligation& col, std::vector<double> radii = {0.9, 0.99, 0.999},
                                       const Tolerances& tol = {});

struct DilationCertificates {
    double isometry = 0.0;        // ||K*K - I||
    double first = 0.0;           // ||K T1* - (B1* (x) I) K||
    double second = 0.0;          // ||K T2* - phi(B1)* K||
    double commutation = 0.0;     // ||[B1 (x) I, phi(B1)]||
    double symbol_norm = 0.0;     // ||phi(B1)||
    double unitarity = 0.0;
    double restriction = 0.0;

    bool ok() const;
};

struct AndoDilation {
    Matrix v1;      // B1 (x) I
    Matrix v2;      // phi(B1)
    Matrix kernel;  // constrained Poisson kernel H -> N (x) D_T1
    UnitaryColligation colligation;
    DilationCertificates certificates;
    bool ill_conditioned = false;
};

/// Everything in the dilation that does not depend on the chosen extension.
class AndoDilationFactory {
public:
    AndoDilationFactory(const CommutingPair& pair, const Tolerances& tol = {});

    const ModelSpace& model() const { return model_; }
    const DefectMaps& maps() const { return maps_; }
    const Matrix& kernel() const { return kernel_; }
    const Matrix& v1() const { return v1_; }

    AndoDilation make(const ExtensionSpec& spec) const;

private:
    CommutingPair pair_;
    Tolerances tol_;
    ModelSpace model_;
    DefectMaps maps_;
    Matrix kernel_;
    Matrix v1_;
};

AndoDilation ando_dilation_pair(const CommutingPair& pair, const ExtensionSpec& spec = {}, const Tolerances& tol = {});

/// ||(I(x)K) P(T1,T2)* - P(V1,V2)* (I(x)K)||: the kernel intertwines adjoints, so P(T) is the
/// compression K* P(V) K.
double polynomial_intertwining_residual(const AndoDilation& dil, const CommutingPair& pair,
                                        const BivariatePolyMatrix& p, const Tolerances& tol = {});

struct CommutantLift {
    double scale = 0.0;  // ||A||; the lift is scale * phi
    UnitaryColligation colligation;
    bool exact_model = false;  // false: truncated Fock kernels were used
    double interpolation_residual = 0.0;
    double interpolation_bound = 0.0;  // tail allowance (0 for exact models)
    double grid_norm = 0.0;            // max ||Psi|| on the radius 0.99 grid
    double sup_norm = 0.0;             // refined boundary estimate of ||Psi||_inf

    Matrix eval(Complex z) const;
};

/// A T'_i = T_i A for pure single contractions T (on H) and T' (on H'), A: H' -> H.
CommutantLift commutant_lift(const Matrix& t, const Matrix& tp, const Matrix& a, const ExtensionSpec& spec = {},
                             const Tolerances& tol = {});

struct IntertwiningDilationReport {
    int max_len = 0;
    double first = 0.0;       // max_i ||K1 T1_i* - (S_i* (x) I) K1||
    double first_bound = 0.0;
    double second = 0.0;      // max_i ||K1' T1'_i* - (S_i* (x) I) K1'||
    double second_bound = 0.0;
    double symbol = 0.0;      // max_j ||K1' T2_j* - phi_j(R)* K1||
    double symbol_bound = 0.0;
    double series = 0.0;      // partial sums of the defect series up to p = L
    double series_bound = 0.0;

    bool ok(double slack = 1e-8) const;
};

/// Partial sum sum_{p=0}^{m} of the defect series, one block e2 per generator.
Matrix defect_series_partial_sum(const UnitaryColligation& col, const RowContraction& t1, const Matrix& coords1,
                                 int m);

IntertwiningDilationReport verify_intertwining_dilation(const IntertwiningTriple& triple,
                                                        const UnitaryColligation& col, const TruncatedFock& space,
                                                        const Tolerances& tol = {});

}  // namespace ando
