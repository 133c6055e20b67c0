#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ando/error.hpp"

namespace ando {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct Tolerances {
    double contraction_slack = 1e-9;
    double hermitian_psd_clamp = 1e-10;
    double unimodular_margin = 1e-8;
    double residual_tol = 1e-8;
    double rank_tol = 1e-10;  // relative to the largest singular value

    /// Throws InvalidInput unless every field is strictly positive and finite.
    void validate() const;
};

bool is_finite(const Matrix& m);
void require_finite(const Matrix& m, const char* what);

/// Largest singular value (0 for empty matrices).
double operator_norm(const Matrix& m);
std::vector<double> singular_values(const Matrix& m);  // descending

/// PSD square root of a Hermitian matrix; eigenvalues in [-clamp, 0) are set to 0.
Matrix hermitian_sqrt(const Matrix& p, const Tolerances& tol = {});

/// Orthonormal basis of the orthogonal complement of the (orthonormal) columns of v,
/// by column-pivoted Gram-Schmidt on I - v v*. Ties in pivot choice go to the lowest index.
Matrix orthonormal_complement(const Matrix& v);

/// Unitary U with U v = w; complements are paired in pivot order.
Matrix unitary_completion(const Matrix& v, const Matrix& w, const Tolerances& tol = {});

/// Orthonormal basis of range(m) from the SVD, dropping singular values <= rank_tol * s_max.
Matrix range_basis(const Matrix& m, double rank_tol);
/// Orthonormal basis of ker(m) from the SVD (same threshold).
Matrix kernel_basis(const Matrix& m, double rank_tol);
int numerical_rank(const Matrix& m, double rank_tol);

Matrix kron(const Matrix& a, const Matrix& b);
Matrix identity(Eigen::Index n);
Matrix commutator(const Matrix& a, const Matrix& b);

std::vector<Complex> eigenvalues(const Matrix& m);
double spectral_radius(const Matrix& m);

/// Complex Schur form m = q t q* (deterministic; Eigen's QR iteration).
struct Schur {
    Matrix q;
    Matrix t;
};
Schur schur(const Matrix& m);

/// Groups values whose chains of pairwise distances stay within radius; clusters are
/// ordered by first appearance after sorting by (real, imag).
struct Cluster {
    Complex center;  // arithmetic mean of the members
    std::vector<int> members;
};
std::vector<Cluster> cluster_values(const std::vector<Complex>& values, double radius);

/// Nearest matrix with orthonormal columns (polar factor).
Matrix polar_orthonormalize(const Matrix& m);

}  // namespace ando
