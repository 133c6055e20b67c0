#pragma once

#include <map>
#include <utility>
#include <vector>

#include "ando/cmatrix.hpp"
#include "ando/contraction.hpp"
#include "ando/word.hpp"

namespace ando {

/// Scalar polynomial in commuting z, w; coefficients keyed by (zdeg, wdeg).
class BivariatePoly {
public:
    using Key = std::pair<int, int>;

    BivariatePoly() = default;
    static BivariatePoly constant(Complex c);
    static BivariatePoly monomial(int zdeg, int wdeg, Complex c = 1.0);

    void add_term(int zdeg, int wdeg, Complex c);  // merges duplicates
    const std::map<Key, Complex>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    int total_degree() const;
    int z_degree() const;
    int w_degree() const;
    Complex operator()(Complex z, Complex w) const;

    BivariatePoly swapped() const;  // p(w, z)
    BivariatePoly operator*(const BivariatePoly& other) const;
    BivariatePoly operator+(const BivariatePoly& other) const;
    BivariatePoly scaled(Complex c) const;

private:
    std::map<Key, Complex> terms_;
};

/// k_rows x k_cols matrix of bivariate polynomials, stored row-major.
class BivariatePolyMatrix {
public:
    BivariatePolyMatrix() = default;
    BivariatePolyMatrix(int rows, int cols);
    static BivariatePolyMatrix scalar(BivariatePoly p);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    BivariatePoly& at(int r, int s) { return entries_[static_cast<std::size_t>(r * cols_ + s)]; }
    const BivariatePoly& at(int r, int s) const { return entries_[static_cast<std::size_t>(r * cols_ + s)]; }

    int total_degree() const;
    int z_degree() const;
    int w_degree() const;
    BivariatePolyMatrix swapped() const;
    BivariatePolyMatrix scaled(Complex c) const;
    Matrix at_point(Complex z, Complex w) const;

private:
    int rows_ = 1;
    int cols_ = 1;
    std::vector<BivariatePoly> entries_ = std::vector<BivariatePoly>(1);
};

/// [p_rs(M1, M2)] as a block matrix, Horner in z then w. M1 and M2 must commute.
Matrix eval_bivariate(const BivariatePolyMatrix& p, const Matrix& m1, const Matrix& m2, const Tolerances& tol = {});

struct FreeTerm {
    Word x;
    Word y;
    Complex coeff;
};
struct FreePoly {
    std::vector<FreeTerm> terms;
    static FreePoly from_bivariate(const BivariatePoly& p);
};

struct HereditaryTerm {
    Word x;   // alpha
    Word y;   // beta
    Word ys;  // sigma, applied as Y_sigma*
    Word xs;  // gamma, applied as X_gamma*
    Complex coeff;
};
struct HereditaryPoly {
    std::vector<HereditaryTerm> terms;
};

Matrix eval_free(const FreePoly& p, const RowContraction& t1, const RowContraction& t2);
Matrix eval_hereditary(const HereditaryPoly& q, const RowContraction& t1, const RowContraction& t2);

struct TorusBracket {
    double lo = 0.0;
    double hi = 0.0;
    int grid = 0;
};

/// Certified bracket for the sup of ||[p_rs]|| over the torus from a grid x grid sample.
/// The grid max is an OpenMP max-reduction; the serial variant is the reference kernel.
TorusBracket torus_sup_norm(const BivariatePolyMatrix& p, int grid);
TorusBracket torus_sup_norm_serial(const BivariatePolyMatrix& p, int grid);
double torus_bracket_slack(int degree, int grid);

BivariatePolyMatrix fejer_smooth(const BivariatePolyMatrix& p, int m);

}  // namespace ando
