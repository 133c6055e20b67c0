#pragma once

#include <utility>
#include <vector>

#include "ando/cmatrix.hpp"
#include "ando/contraction.hpp"

namespace ando {

struct BlaschkeRoot {
    Complex value;
    int multiplicity = 1;
};

/// Roots of a finite Blaschke product, i.e. of a minimal polynomial with roots in the disk.
struct BlaschkeData {
    std::vector<BlaschkeRoot> roots;

    static BlaschkeData make(std::vector<BlaschkeRoot> roots, const Tolerances& tol = {});
    int size() const;  // N = sum of multiplicities
    double max_modulus() const;
    /// Least common multiple: union of roots with the larger multiplicity.
    BlaschkeData lcm(const BlaschkeData& other) const;
};

struct MinimalPolynomial {
    BlaschkeData blaschke;
    double annihilation_residual = 0.0;  // ||m_T(T)|| relative to (1 + ||T||)^N
};

/// Roots and largest Jordan block sizes of a c.n.u. contraction matrix.
MinimalPolynomial minimal_polynomial(const Matrix& t, const Tolerances& tol = {});

/// Finite model of the compressed shift on H^2 minus b H^2.
///
/// The orthonormal basis is the Gram-Schmidt (Cholesky) orthonormalization of the
/// kernel-derivative basis in label order. It coincides, up to the unimodular `phases`, with the
/// basis of normalized kernels times partial Blaschke products, which is where `shift` and the
/// constrained kernel are evaluated in closed form; no Gram inverse enters either of them.
struct ModelSpace {
    BlaschkeData blaschke;
    std::vector<std::pair<int, int>> labels;  // basis vector (root index, derivative order)
    std::vector<Complex> nodes;               // root of each basis vector
    Vector phases;                            // Cholesky basis = phases * product basis
    Matrix gram;                              // gram(r, c) = <v_c, v_r>
    Matrix chol;                              // lower triangular, gram = chol chol*; empty if not PD
    double gram_condition = 0.0;              // of the diagonally scaled Gram matrix
    Matrix shift;                             // B in the orthonormal basis (lower triangular)
    bool ill_conditioned = false;
    double annihilation = 0.0;  // ||b(B)||

    int size() const { return static_cast<int>(labels.size()); }
    Matrix blaschke_at(const Matrix& m) const;
};

ModelSpace build_model_space(const BlaschkeData& b, const Tolerances& tol = {});

/// Taylor coefficients of the raw basis vector v^i_j up to degree `degree` (test and oracle use).
Vector raw_basis_coefficients(const ModelSpace& ms, int column, int degree);

/// (P_N (x) I) K_T in the orthonormal model basis, with the defect space in the given coordinates
/// (coords: d x dim, usually DefectSpace::coords). Rows are model index major, defect index minor.
Matrix constrained_poisson_kernel_1d(const Matrix& t, const ModelSpace& ms, const Matrix& coords);
Matrix constrained_poisson_kernel_1d(const Matrix& t, const ModelSpace& ms, const Tolerances& tol = {});

}  // namespace ando
