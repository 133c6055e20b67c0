#pragma once

#include <map>

#include "ando/cmatrix.hpp"
#include "ando/contraction.hpp"
#include "ando/word.hpp"

namespace ando {

enum class Side { Left, Right };

/// Words of length <= L over n generators, ordered by length and then lexicographically.
/// Overflowing words are truncated to 0 by every operator built on this space.
class TruncatedFock {
public:
    TruncatedFock(int generators, int max_len);

    int generators() const { return n_; }
    int max_len() const { return max_len_; }
    Eigen::Index dim() const { return offsets_.back(); }

    Eigen::Index offset(int len) const { return offsets_[static_cast<std::size_t>(len)]; }
    Eigen::Index count(int len) const { return powers_[static_cast<std::size_t>(len)]; }
    Eigen::Index power(int k) const { return powers_[static_cast<std::size_t>(k)]; }
    int length(Eigen::Index idx) const;

    Eigen::Index index(const Word& w) const;
    Word word(Eigen::Index idx) const;
    /// Position of the word inside its length class.
    Eigen::Index rank_in_length(const Word& w) const;

private:
    int n_;
    int max_len_;
    std::vector<Eigen::Index> powers_;
    std::vector<Eigen::Index> offsets_;  // offsets_[k] = number of words shorter than k
};

/// Dense S_i (left: e_a -> e_{g_i a}) or R_i (right: e_a -> e_{a g_i}).
Matrix creation_matrix(Side side, int i, const TruncatedFock& space);

/// (S_alpha* (x) I) applied to a block column of blocks of height `block`; for the right side
/// R_alpha* is used. Blocks follow the word order of the space.
Matrix creation_adjoint_apply(Side side, const Word& alpha, const TruncatedFock& space, const Matrix& x,
                              Eigen::Index block);

/// Sum over alpha of R_alpha (x) theta_alpha (right) or S_alpha (x) theta_alpha (left).
struct MultiAnalyticOp {
    Eigen::Index in_dim = 0;
    Eigen::Index out_dim = 0;
    std::map<Word, Matrix> coeffs;

    int max_len() const;
    /// x has space.dim()*in_dim rows; the result has space.dim()*out_dim rows.
    Matrix apply(Side side, const TruncatedFock& space, const Matrix& x) const;
    Matrix apply_adjoint(Side side, const TruncatedFock& space, const Matrix& y) const;
    Matrix dense(Side side, const TruncatedFock& space) const;
    /// Reads the coefficients off the block column of e_{g0}.
    static MultiAnalyticOp from_dense(Side side, const TruncatedFock& space, const Matrix& m, Eigen::Index in_dim,
                                      Eigen::Index out_dim);
};

Matrix apply_multi_analytic(const MultiAnalyticOp& m, Side side, const TruncatedFock& space, const Matrix& x);

/// Block column of r^{|a|} coords T_a*, one block of coords.rows() rows per word.
Matrix poisson_blocks(const RowContraction& t, double r, const TruncatedFock& space, const Matrix& coords);

struct PoissonKernel {
    Matrix kernel;               // space.dim()*d x dim
    DefectSpace defect;
    bool pure = false;
    double isometry_tail = 0.0;      // ||K*K - I|| exactly, up to roundoff
    double intertwining_tail = 0.0;  // bound on the residual of K (r^{|a|} T_a*) = (S_a* (x) I) K
};
PoissonKernel poisson_kernel(const RowContraction& t, double r, const TruncatedFock& space, const Tolerances& tol = {});

/// Orthogonal projection onto symmetrized words (equal letter multisets), length by length.
Matrix constrained_projection_symmetric(const TruncatedFock& space);

}  // namespace ando
