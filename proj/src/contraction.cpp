#include "ando/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace ando {

Word reversed(const Word& w) { return Word(w.rbegin(), w.rend()); }

Word concat(const Word& a, const Word& b) {
    Word out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

std::string to_string(const Word& w) {
    if (w.empty()) return "g0";
    std::ostringstream os;
    for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "." : "") << w[i];
    return os.str();
}

RowContraction RowContraction::make(std::vector<Matrix> entries, const Tolerances& tol) {
    if (entries.empty()) fail(ErrorKind::InvalidInput, "a row contraction needs at least one entry");
    RowContraction t;
    t.rows_ = entries.front().rows();
    t.cols_ = entries.front().cols();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].rows() != t.rows_ || entries[i].cols() != t.cols_)
            fail(ErrorKind::ShapeMismatch, "entry " + std::to_string(i + 1) + " has a different shape");
        require_finite(entries[i], "row contraction entry");
    }
    t.entries_ = std::move(entries);
    const double norm = t.row_norm();
    if (norm > 1.0 + tol.contraction_slack)
        fail(ErrorKind::NotContraction, "row norm " + std::to_string(norm) + " exceeds 1");
    return t;
}

RowContraction RowContraction::single(Matrix t, const Tolerances& tol) {
    return make(std::vector<Matrix>{std::move(t)}, tol);
}

Matrix RowContraction::row_gram() const {
    Matrix g = Matrix::Zero(rows_, rows_);
    for (const Matrix& e : entries_) g.noalias() += e * e.adjoint();
    return g;
}

double RowContraction::row_norm() const { return std::sqrt(operator_norm(row_gram())); }

Matrix RowContraction::word(const Word& alpha) const {
    if (!is_square()) fail(ErrorKind::ShapeMismatch, "word products need square entries");
    Matrix out = identity(rows_);
    for (int letter : alpha) {
        if (letter < 1 || static_cast<std::size_t>(letter) > entries_.size())
            fail(ErrorKind::InvalidInput, "letter " + std::to_string(letter) + " out of range");
        out = out * entries_[static_cast<std::size_t>(letter - 1)];
    }
    return out;
}

namespace {

double commute_scale(const Matrix& a, const Matrix& b, const Tolerances& tol) {
    return tol.residual_tol * (1.0 + operator_norm(a)) * (1.0 + operator_norm(b));
}

}  // namespace

CommutingPair CommutingPair::make(RowContraction t1, RowContraction t2, const Tolerances& tol) {
    if (!t1.is_square() || !t2.is_square() || t1.dim() != t2.dim())
        fail(ErrorKind::ShapeMismatch, "a commuting pair needs square entries of one size");
    for (std::size_t i = 0; i < t1.size(); ++i) {
        for (std::size_t j = 0; j < t2.size(); ++j) {
            const double c = operator_norm(commutator(t1[i], t2[j]));
            if (c > commute_scale(t1[i], t2[j], tol))
                fail(ErrorKind::NotCommuting, "T1[" + std::to_string(i) + "] and T2[" + std::to_string(j) +
                                                  "] do not commute (residual " + std::to_string(c) + ")");
        }
    }
    return {std::move(t1), std::move(t2)};
}

CommutingPair CommutingPair::single(Matrix t1, Matrix t2, const Tolerances& tol) {
    return make(RowContraction::single(std::move(t1), tol), RowContraction::single(std::move(t2), tol), tol);
}

IntertwiningTriple IntertwiningTriple::make(RowContraction t1, RowContraction t1p, RowContraction t2,
                                            const Tolerances& tol) {
    if (!t1.is_square() || !t1p.is_square())
        fail(ErrorKind::ShapeMismatch, "T1 and T1' need square entries");
    if (t1.size() != t1p.size()) fail(ErrorKind::ShapeMismatch, "T1 and T1' need the same number of entries");
    if (t2.rows() != t1.dim() || t2.cols() != t1p.dim())
        fail(ErrorKind::ShapeMismatch, "T2 entries must map the T1' space into the T1 space");
    for (std::size_t i = 0; i < t1.size(); ++i) {
        for (std::size_t j = 0; j < t2.size(); ++j) {
            const double r = operator_norm(t2[j] * t1p[i] - t1[i] * t2[j]);
            if (r > commute_scale(t1[i], t2[j], tol))
                fail(ErrorKind::NotIntertwining, "T2[" + std::to_string(j) + "] T1'[" + std::to_string(i) +
                                                     "] != T1[" + std::to_string(i) + "] T2[" +
                                                     std::to_string(j) + "] (residual " + std::to_string(r) + ")");
        }
    }
    return {std::move(t1), std::move(t1p), std::move(t2)};
}

double IntertwiningTriple::intertwining_residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < t1.size(); ++i)
        for (std::size_t j = 0; j < t2.size(); ++j)
            worst = std::max(worst, operator_norm(t2[j] * t1p[i] - t1[i] * t2[j]));
    return worst;
}

namespace {

// Eigenvalues of Delta^2 at or below this are treated as exact zeros of the defect.
constexpr double kDefectFloor = 1e-12;

void check_radius(double r) {
    if (!(r > 0.0 && r <= 1.0)) fail(ErrorKind::InvalidInput, "radius must lie in (0, 1]");
}

}  // namespace

DefectSpace defect_space(const RowContraction& t, double r, const Tolerances& tol) {
    check_radius(r);
    const Eigen::Index n = t.rows();
    if (t.row_norm() > 1.0 + tol.contraction_slack) fail(ErrorKind::NotContraction, "row norm exceeds 1");
    Matrix g = identity(n) - r * r * t.row_gram();
    g = 0.5 * (g + g.adjoint());
    DefectSpace out;
    if (n == 0) {
        out.op = g;
        out.basis = Matrix(0, 0);
        out.coords = Matrix(0, 0);
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    Eigen::VectorXd ev = es.eigenvalues();
    const double clamp = tol.hermitian_psd_clamp + 2.0 * tol.contraction_slack;
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -clamp) fail(ErrorKind::NotPSD, "defect square has eigenvalue " + std::to_string(ev(i)));
        ev(i) = std::max(ev(i), 0.0);
        if (ev(i) > kDefectFloor) kept.push_back(i);
    }
    const Matrix& v = es.eigenvectors();
    Eigen::VectorXd root = ev.cwiseSqrt();
    out.op = v * root.cast<Complex>().asDiagonal() * v.adjoint();
    out.op = 0.5 * (out.op + out.op.adjoint());
    // Largest defect directions first, so coordinates are stable under tiny perturbations.
    std::reverse(kept.begin(), kept.end());
    out.basis.resize(n, static_cast<Eigen::Index>(kept.size()));
    out.coords.resize(static_cast<Eigen::Index>(kept.size()), n);
    for (std::size_t c = 0; c < kept.size(); ++c) {
        const Eigen::Index col = static_cast<Eigen::Index>(c);
        out.basis.col(col) = v.col(kept[c]);
        out.coords.row(col) = root(kept[c]) * v.col(kept[c]).adjoint();
    }
    return out;
}

Matrix defect(const RowContraction& t, double r, const Tolerances& tol) { return defect_space(t, r, tol).op; }

double PurityCertificate::tail(std::size_t len) const {
    if (tails.empty()) return 1.0;
    return len < tails.size() ? tails[len] : tails.back();
}

PurityCertificate is_pure(const RowContraction& t, std::size_t horizon) {
    if (!t.is_square()) fail(ErrorKind::ShapeMismatch, "purity needs square entries");
    const std::size_t dim = static_cast<std::size_t>(t.dim());
    const std::size_t steps = std::max({horizon, 4 * dim, std::size_t{100}});
    PurityCertificate cert;
    cert.tails.reserve(steps + 1);
    Matrix x = identity(t.dim());
    cert.tails.push_back(dim ? 1.0 : 0.0);
    bool hit_zero = dim == 0;
    for (std::size_t k = 1; k <= steps; ++k) {
        Matrix next = Matrix::Zero(t.dim(), t.dim());
        for (const Matrix& e : t.entries()) next.noalias() += e * x * e.adjoint();
        x = 0.5 * (next + next.adjoint());
        const double nk = std::min(operator_norm(x), cert.tails.back());
        cert.tails.push_back(nk);
        if (nk < 1e-12 && k <= 4 * dim) hit_zero = true;
    }
    const std::size_t last = cert.tails.size() - 1;
    const double a = cert.tails[last - 10];
    const double b = cert.tails[last];
    cert.decay_ratio = a > 0.0 ? std::pow(b / a, 0.1) : 0.0;
    cert.pure = hit_zero || cert.decay_ratio < 1.0 - 1e-9;
    return cert;
}

namespace {

// Unimodular eigenvalues of a contraction are semisimple and well conditioned, so only
// roundoff separates them from the circle.
double unimodular_roundoff(const Tolerances& tol) { return 1e-3 * tol.unimodular_margin; }

}  // namespace

UnitaryCnuSplit unitary_cnu_split(const Matrix& t, const Tolerances& tol) {
    if (t.rows() != t.cols()) fail(ErrorKind::ShapeMismatch, "unitary_cnu_split needs a square matrix");
    const Eigen::Index n = t.rows();
    UnitaryCnuSplit out;
    if (n == 0) {
        out.unitary_basis = Matrix(0, 0);
        out.cnu_basis = Matrix(0, 0);
        return out;
    }
    const double tn = operator_norm(t);
    if (tn > 1.0 + tol.contraction_slack) fail(ErrorKind::NotContraction, "matrix norm exceeds 1");

    std::vector<Complex> unimodular;
    for (const Complex& z : eigenvalues(t)) {
        const double m = std::abs(z);
        if (m >= 1.0 - unimodular_roundoff(tol)) {
            unimodular.push_back(z);
        } else if (m > 1.0 - tol.unimodular_margin) {
            fail(ErrorKind::MarginViolation,
                 "eigenvalue modulus " + std::to_string(m) + " lies inside the unimodular margin band");
        }
    }

    Matrix u(n, 0);
    const double scale = tol.residual_tol * (1.0 + tn);
    for (const Cluster& c : cluster_values(unimodular, 1e-7)) {
        const Complex mu = c.center / std::abs(c.center);
        const Eigen::Index k = static_cast<Eigen::Index>(c.members.size());
        Matrix stacked(2 * n, n);
        stacked.topRows(n) = t - mu * identity(n);
        stacked.bottomRows(n) = t.adjoint() - std::conj(mu) * identity(n);
        Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        if (s(n - k) > scale)
            fail(ErrorKind::MarginViolation, "unimodular eigenvalue without a joint eigenspace of T and T*");
        Matrix block(n, u.cols() + k);
        block << u, svd.matrixV().rightCols(k);
        u = block;
    }
    if (u.cols() > 0) u = polar_orthonormalize(u);
    const Matrix c = orthonormal_complement(u);

    if (u.cols() > 0 && c.cols() > 0) {
        const double leak = std::max(operator_norm(c.adjoint() * t * u), operator_norm(u.adjoint() * t * c));
        if (leak > scale) fail(ErrorKind::MarginViolation, "unitary part does not reduce the matrix");
    }
    if (u.cols() > 0) {
        const Matrix tu = u.adjoint() * t * u;
        if (operator_norm(tu.adjoint() * tu - identity(u.cols())) > tol.residual_tol)
            fail(ErrorKind::MarginViolation, "restriction to the unimodular eigenspaces is not unitary");
    }
    if (c.cols() > 0 && spectral_radius(c.adjoint() * t * c) > 1.0 - tol.unimodular_margin)
        fail(ErrorKind::MarginViolation, "completely non-unitary part has an eigenvalue near the circle");
    out.unitary_basis = u;
    out.cnu_basis = c;
    return out;
}

namespace {

// Restricts m to the span of the orthonormal columns q after checking q reduces m.
Matrix reduced_block(const Matrix& m, const Matrix& q, const Tolerances& tol, ErrorKind kind, const char* what) {
    if (q.cols() == 0) return Matrix(0, 0);
    const Matrix p = q * q.adjoint();
    const Matrix off = m * p - p * m;
    if (operator_norm(off) > tol.residual_tol * (1.0 + operator_norm(m)))
        fail(kind, std::string(what) + " does not reduce the other matrix");
    return q.adjoint() * m * q;
}

}  // namespace

StructureDecomposition structure_decomposition(const CommutingPair& pair, const Tolerances& tol) {
    if (pair.t1.size() != 1 || pair.t2.size() != 1)
        fail(ErrorKind::InvalidInput, "structure_decomposition needs single matrices");
    const Matrix& t1 = pair.t1[0];
    const Matrix& t2 = pair.t2[0];
    const UnitaryCnuSplit s1 = unitary_cnu_split(t1, tol);

    StructureDecomposition out;
    const Matrix* outer[2] = {&s1.unitary_basis, &s1.cnu_basis};
    for (int side = 0; side < 2; ++side) {
        const Matrix& q = *outer[side];
        const Matrix a2 = reduced_block(t2, q, tol, ErrorKind::NotCommuting, "T1 part");
        Matrix inner_u(q.cols(), 0), inner_c(q.cols(), 0);
        if (q.cols() > 0) {
            const UnitaryCnuSplit s2 = unitary_cnu_split(a2, tol);
            inner_u = s2.unitary_basis;
            inner_c = s2.cnu_basis;
        }
        out.bases[static_cast<std::size_t>(2 * side)] = q * inner_u;
        out.bases[static_cast<std::size_t>(2 * side + 1)] = q * inner_c;
    }
    Matrix r1 = Matrix::Zero(t1.rows(), t1.cols());
    Matrix r2 = r1;
    for (std::size_t i = 0; i < 4; ++i) {
        const Matrix& q = out.bases[i];
        if (q.cols() == 0) {
            out.t1_blocks[i] = Matrix(0, 0);
            out.t2_blocks[i] = Matrix(0, 0);
            continue;
        }
        out.t1_blocks[i] = reduced_block(t1, q, tol, ErrorKind::MarginViolation, "block");
        out.t2_blocks[i] = reduced_block(t2, q, tol, ErrorKind::MarginViolation, "block");
        r1 += q * out.t1_blocks[i] * q.adjoint();
        r2 += q * out.t2_blocks[i] * q.adjoint();
    }
    if (operator_norm(r1 - t1) > tol.residual_tol * (1.0 + operator_norm(t1)) ||
        operator_norm(r2 - t2) > tol.residual_tol * (1.0 + operator_norm(t2)))
        fail(ErrorKind::MarginViolation, "block reconstruction failed");
    return out;
}

EnergyBalance energy_balance(const IntertwiningTriple& triple, const Vector& h, const Tolerances& tol) {
    const Matrix d1 = defect(triple.t1, 1.0, tol);
    const Matrix d1p = defect(triple.t1p, 1.0, tol);
    const Matrix d2 = defect(triple.t2, 1.0, tol);
    EnergyBalance e;
    e.lhs = (d1 * h).squaredNorm();
    for (const Matrix& a : triple.t1.entries()) e.lhs += (d2 * (a.adjoint() * h)).squaredNorm();
    for (const Matrix& b : triple.t2.entries()) e.rhs += (d1p * (b.adjoint() * h)).squaredNorm();
    e.rhs += (d2 * h).squaredNorm();
    return e;
}

}  // namespace ando
