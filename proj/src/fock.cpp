#include "ando/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ando {

TruncatedFock::TruncatedFock(int generators, int max_len) : n_(generators), max_len_(max_len) {
    if (generators < 1) fail(ErrorKind::InvalidInput, "Fock space needs at least one generator");
    if (max_len < 0) fail(ErrorKind::InvalidInput, "negative truncation length");
    powers_.push_back(1);
    offsets_.push_back(0);
    for (int k = 0; k <= max_len; ++k) {
        offsets_.push_back(offsets_.back() + powers_.back());
        if (offsets_.back() > (Eigen::Index{1} << 31)) fail(ErrorKind::InvalidInput, "Fock truncation too large");
        powers_.push_back(powers_.back() * generators);
    }
}

int TruncatedFock::length(Eigen::Index idx) const {
    if (idx < 0 || idx >= dim()) fail(ErrorKind::InvalidInput, "Fock index out of range");
    int len = 0;
    while (offsets_[static_cast<std::size_t>(len + 1)] <= idx) ++len;
    return len;
}

Eigen::Index TruncatedFock::rank_in_length(const Word& w) const {
    Eigen::Index r = 0;
    for (int letter : w) {
        if (letter < 1 || letter > n_) fail(ErrorKind::InvalidInput, "letter " + std::to_string(letter) + " out of range");
        r = r * n_ + (letter - 1);
    }
    return r;
}

Eigen::Index TruncatedFock::index(const Word& w) const {
    if (static_cast<int>(w.size()) > max_len_) fail(ErrorKind::InvalidInput, "word longer than the truncation");
    return offset(static_cast<int>(w.size())) + rank_in_length(w);
}

Word TruncatedFock::word(Eigen::Index idx) const {
    const int len = length(idx);
    Eigen::Index r = idx - offset(len);
    Word w(static_cast<std::size_t>(len));
    for (int p = len - 1; p >= 0; --p) {
        w[static_cast<std::size_t>(p)] = static_cast<int>(r % n_) + 1;
        r /= n_;
    }
    return w;
}

Matrix creation_matrix(Side side, int i, const TruncatedFock& space) {
    if (i < 1 || i > space.generators()) fail(ErrorKind::InvalidInput, "generator index out of range");
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    for (int len = 0; len < space.max_len(); ++len) {
        for (Eigen::Index r = 0; r < space.count(len); ++r) {
            const Eigen::Index target = side == Side::Left ? (i - 1) * space.power(len) + r : r * space.generators() + (i - 1);
            m(space.offset(len + 1) + target, space.offset(len) + r) = 1.0;
        }
    }
    return m;
}

namespace {

// Index of the image of word (len, r) under S_alpha (left: alpha beta) or R_alpha (right: beta reverse(alpha)).
inline Eigen::Index shifted_index(Side side, const TruncatedFock& space, int len, Eigen::Index r, int alpha_len,
                                  Eigen::Index alpha_rank) {
    const Eigen::Index inner = side == Side::Left ? alpha_rank * space.power(len) + r : r * space.power(alpha_len) + alpha_rank;
    return space.offset(len + alpha_len) + inner;
}

// For the right side the appended word is reverse(alpha).
Eigen::Index attached_rank(Side side, const TruncatedFock& space, const Word& alpha) {
    return side == Side::Left ? space.rank_in_length(alpha) : space.rank_in_length(reversed(alpha));
}

}  // namespace

Matrix creation_adjoint_apply(Side side, const Word& alpha, const TruncatedFock& space, const Matrix& x,
                              Eigen::Index block) {
    if (x.rows() != space.dim() * block) fail(ErrorKind::ShapeMismatch, "block column does not match the Fock space");
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    const int k = static_cast<int>(alpha.size());
    if (k > space.max_len()) return out;
    const Eigen::Index ar = attached_rank(side, space, alpha);
    for (int len = 0; len + k <= space.max_len(); ++len) {
        for (Eigen::Index r = 0; r < space.count(len); ++r) {
            const Eigen::Index src = shifted_index(side, space, len, r, k, ar);
            out.middleRows((space.offset(len) + r) * block, block) = x.middleRows(src * block, block);
        }
    }
    return out;
}

int MultiAnalyticOp::max_len() const {
    int m = 0;
    for (const auto& [w, c] : coeffs) m = std::max(m, static_cast<int>(w.size()));
    return m;
}

namespace {

void check_coeff_shapes(const MultiAnalyticOp& m) {
    for (const auto& [w, c] : m.coeffs) {
        if (c.rows() != m.out_dim || c.cols() != m.in_dim)
            fail(ErrorKind::ShapeMismatch, "coefficient " + to_string(w) + " has the wrong shape");
    }
}

}  // namespace

Matrix MultiAnalyticOp::apply(Side side, const TruncatedFock& space, const Matrix& x) const {
    if (x.rows() != space.dim() * in_dim) fail(ErrorKind::ShapeMismatch, "input does not match the Fock space");
    check_coeff_shapes(*this);
    Matrix out = Matrix::Zero(space.dim() * out_dim, x.cols());
    for (const auto& [alpha, theta] : coeffs) {
        const int k = static_cast<int>(alpha.size());
        if (k > space.max_len()) continue;
        const Eigen::Index ar = attached_rank(side, space, alpha);
        for (int len = 0; len + k <= space.max_len(); ++len) {
            for (Eigen::Index r = 0; r < space.count(len); ++r) {
                const Eigen::Index dst = shifted_index(side, space, len, r, k, ar);
                out.middleRows(dst * out_dim, out_dim).noalias() +=
                    theta * x.middleRows((space.offset(len) + r) * in_dim, in_dim);
            }
        }
    }
    return out;
}

Matrix MultiAnalyticOp::apply_adjoint(Side side, const TruncatedFock& space, const Matrix& y) const {
    if (y.rows() != space.dim() * out_dim) fail(ErrorKind::ShapeMismatch, "input does not match the Fock space");
    check_coeff_shapes(*this);
    Matrix out = Matrix::Zero(space.dim() * in_dim, y.cols());
    for (const auto& [alpha, theta] : coeffs) {
        const int k = static_cast<int>(alpha.size());
        if (k > space.max_len()) continue;
        const Eigen::Index ar = attached_rank(side, space, alpha);
        const Matrix theta_star = theta.adjoint();
        for (int len = 0; len + k <= space.max_len(); ++len) {
            for (Eigen::Index r = 0; r < space.count(len); ++r) {
                const Eigen::Index src = shifted_index(side, space, len, r, k, ar);
                out.middleRows((space.offset(len) + r) * in_dim, in_dim).noalias() +=
                    theta_star * y.middleRows(src * out_dim, out_dim);
            }
        }
    }
    return out;
}

Matrix MultiAnalyticOp::dense(Side side, const TruncatedFock& space) const {
    return apply(side, space, identity(space.dim() * in_dim));
}

MultiAnalyticOp MultiAnalyticOp::from_dense(Side side, const TruncatedFock& space, const Matrix& m, Eigen::Index in_dim,
                                            Eigen::Index out_dim) {
    if (m.rows() != space.dim() * out_dim || m.cols() != space.dim() * in_dim)
        fail(ErrorKind::ShapeMismatch, "dense operator does not match the Fock space");
    MultiAnalyticOp op;
    op.in_dim = in_dim;
    op.out_dim = out_dim;
    for (Eigen::Index idx = 0; idx < space.dim(); ++idx) {
        const Word w = space.word(idx);
        const Word alpha = side == Side::Left ? w : reversed(w);
        op.coeffs[alpha] = m.block(idx * out_dim, 0, out_dim, in_dim);
    }
    return op;
}

Matrix apply_multi_analytic(const MultiAnalyticOp& m, Side side, const TruncatedFock& space, const Matrix& x) {
    return m.apply(side, space, x);
}

Matrix poisson_blocks(const RowContraction& t, double r, const TruncatedFock& space, const Matrix& coords) {
    if (!t.is_square()) fail(ErrorKind::ShapeMismatch, "Poisson kernel needs square entries");
    if (static_cast<int>(t.size()) != space.generators())
        fail(ErrorKind::ShapeMismatch, "tuple size differs from the number of Fock generators");
    if (coords.cols() != t.dim()) fail(ErrorKind::ShapeMismatch, "defect coordinates do not match the tuple");
    const Eigen::Index d = coords.rows();
    Matrix k(space.dim() * d, t.dim());
    k.topRows(d) = coords;
    std::vector<Matrix> adj;
    for (const Matrix& e : t.entries()) adj.push_back(r * e.adjoint());
    // Word i.beta has block r * block(beta) * T_i*.
    for (int len = 1; len <= space.max_len(); ++len) {
        const Eigen::Index tail = space.count(len - 1);
        for (int i = 1; i <= space.generators(); ++i) {
            for (Eigen::Index b = 0; b < tail; ++b) {
                const Eigen::Index dst = space.offset(len) + (i - 1) * tail + b;
                const Eigen::Index src = space.offset(len - 1) + b;
                k.middleRows(dst * d, d).noalias() = k.middleRows(src * d, d) * adj[static_cast<std::size_t>(i - 1)];
            }
        }
    }
    return k;
}

PoissonKernel poisson_kernel(const RowContraction& t, double r, const TruncatedFock& space, const Tolerances& tol) {
    PoissonKernel out;
    out.defect = defect_space(t, r, tol);
    out.kernel = poisson_blocks(t, r, space, out.defect.coords);
    const PurityCertificate cert = is_pure(t, static_cast<std::size_t>(space.max_len()) + 1);
    out.pure = cert.pure;
    const double tail = std::pow(r, 2.0 * (space.max_len() + 1)) * cert.tail(static_cast<std::size_t>(space.max_len()) + 1);
    out.isometry_tail = tail;
    out.intertwining_tail = std::sqrt(tail);
    return out;
}

Matrix constrained_projection_symmetric(const TruncatedFock& space) {
    Matrix p = Matrix::Zero(space.dim(), space.dim());
    for (int len = 0; len <= space.max_len(); ++len) {
        std::map<Word, std::vector<Eigen::Index>> classes;
        for (Eigen::Index r = 0; r < space.count(len); ++r) {
            const Eigen::Index idx = space.offset(len) + r;
            Word key = space.word(idx);
            std::sort(key.begin(), key.end());
            classes[key].push_back(idx);
        }
        for (const auto& [key, members] : classes) {
            const double w = 1.0 / static_cast<double>(members.size());
            for (Eigen::Index a : members)
                for (Eigen::Index b : members) p(a, b) = w;
        }
    }
    return p;
}

}  // namespace ando
