#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ando/cmatrix.hpp"
#include "ando/word.hpp"

namespace ando {

/// An n-tuple [T_1 ... T_n] of equally shaped matrices with row norm at most 1 + slack.
/// Entries are usually square; rectangular entries house maps between two spaces.
class RowContraction {
public:
    RowContraction() = default;
    static RowContraction make(std::vector<Matrix> entries, const Tolerances& tol = {});
    static RowContraction single(Matrix t, const Tolerances& tol = {});

    std::size_t size() const { return entries_.size(); }
    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    Eigen::Index dim() const { return rows_; }
    bool is_square() const { return rows_ == cols_; }

    const Matrix& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<Matrix>& entries() const { return entries_; }

    Matrix row_gram() const;  // sum T_i T_i*
    double row_norm() const;

    /// T_alpha = T_{a1} ... T_{ak}; letters are 1-based. Square tuples only.
    Matrix word(const Word& alpha) const;

private:
    std::vector<Matrix> entries_;
    Eigen::Index rows_ = 0;
    Eigen::Index cols_ = 0;
};

struct CommutingPair {
    RowContraction t1;
    RowContraction t2;

    static CommutingPair make(RowContraction t1, RowContraction t2, const Tolerances& tol = {});
    static CommutingPair single(Matrix t1, Matrix t2, const Tolerances& tol = {});
    Eigen::Index dim() const { return t1.dim(); }
    CommutingPair swapped() const { return {t2, t1}; }
};

/// T1 on H, T1' on H', and T2 with entries H' -> H satisfying T2_j T1'_i = T1_i T2_j.
struct IntertwiningTriple {
    RowContraction t1;
    RowContraction t1p;
    RowContraction t2;

    static IntertwiningTriple make(RowContraction t1, RowContraction t1p, RowContraction t2,
                                   const Tolerances& tol = {});
    double intertwining_residual() const;
};

Matrix defect(const RowContraction& t, double r = 1.0, const Tolerances& tol = {});

/// The defect operator together with an orthonormal basis of its range and the
/// coordinate map h -> basis* Delta h, which is how defect spaces are represented downstream.
struct DefectSpace {
    Matrix op;      // dim x dim
    Matrix basis;   // dim x d
    Matrix coords;  // d x dim, equals basis* op
    Eigen::Index size() const { return basis.cols(); }
};
DefectSpace defect_space(const RowContraction& t, double r = 1.0, const Tolerances& tol = {});

struct PurityCertificate {
    bool pure = false;
    std::vector<double> tails;  // tails[k] = ||sum_{|a|=k} T_a T_a*||, nonincreasing in k
    double decay_ratio = 1.0;   // geometric rate over the last 10 iterates

    /// ||X_L||; past the computed horizon the last value is returned (still an upper bound).
    double tail(std::size_t len) const;
};
PurityCertificate is_pure(const RowContraction& t, std::size_t horizon = 0);

struct UnitaryCnuSplit {
    Matrix unitary_basis;  // dim x du
    Matrix cnu_basis;      // dim x dc
};
UnitaryCnuSplit unitary_cnu_split(const Matrix& t, const Tolerances& tol = {});

enum class PartClass { Unitary, Cnu };

struct StructureDecomposition {
    /// Blocks in the order (u,u), (u,cnu), (cnu,u), (cnu,cnu) for (T1, T2).
    std::array<Matrix, 4> bases;
    std::array<Matrix, 4> t1_blocks;
    std::array<Matrix, 4> t2_blocks;

    static constexpr std::array<std::array<PartClass, 2>, 4> pattern = {{
        {PartClass::Unitary, PartClass::Unitary},
        {PartClass::Unitary, PartClass::Cnu},
        {PartClass::Cnu, PartClass::Unitary},
        {PartClass::Cnu, PartClass::Cnu},
    }};
};
StructureDecomposition structure_decomposition(const CommutingPair& pair, const Tolerances& tol = {});

/// Both sides of the energy identity for the intertwining setup at h.
struct EnergyBalance {
    double lhs = 0.0;
    double rhs = 0.0;
};
EnergyBalance energy_balance(const IntertwiningTriple& triple, const Vector& h, const Tolerances& tol = {});

}  // namespace ando
