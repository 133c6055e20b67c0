#include "ando/cmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ando {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput: return "InvalidInput";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::NotPSD: return "NotPSD";
        case ErrorKind::NotContraction: return "NotContraction";
        case ErrorKind::NotCommuting: return "NotCommuting";
        case ErrorKind::NotIntertwining: return "NotIntertwining";
        case ErrorKind::NotPure: return "NotPure";
        case ErrorKind::NotCNU: return "NotCNU";
        case ErrorKind::MarginViolation: return "MarginViolation";
        case ErrorKind::IllConditioned: return "IllConditioned";
        case ErrorKind::PadFailure: return "PadFailure";
        case ErrorKind::InternalError: return "InternalError";
    }
    return "Unknown";
}

void Tolerances::validate() const {
    const double fields[] = {contraction_slack, hermitian_psd_clamp, unimodular_margin, residual_tol,
                             rank_tol};
    for (double f : fields) {
        if (!(f > 0.0) || !std::isfinite(f)) fail(ErrorKind::InvalidInput, "tolerances must be positive");
    }
}

bool is_finite(const Matrix& m) { return m.allFinite(); }

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) fail(ErrorKind::InvalidInput, std::string(what) + " has non-finite entries");
}

std::vector<double> singular_values(const Matrix& m) {
    if (m.size() == 0) return {};
    require_finite(m, "matrix");
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    return std::vector<double>(s.data(), s.data() + s.size());
}

double operator_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    require_finite(m, "matrix");
    const Eigen::Index small = std::min(m.rows(), m.cols());
    if (small <= 4) {
        Eigen::JacobiSVD<Matrix> svd(m);
        return svd.singularValues()(0);
    }
    // Gram route for larger operands: the top eigenvalue is relatively accurate.
    Matrix g = m.rows() < m.cols() ? Matrix(m * m.adjoint()) : Matrix(m.adjoint() * m);
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

Matrix hermitian_sqrt(const Matrix& p, const Tolerances& tol) {
    if (p.rows() != p.cols()) fail(ErrorKind::ShapeMismatch, "hermitian_sqrt needs a square matrix");
    if (p.size() == 0) return p;
    require_finite(p, "hermitian_sqrt input");
    const double scale = operator_norm(p);
    if (operator_norm(p - p.adjoint()) > tol.residual_tol * std::max(scale, 1e-300))
        fail(ErrorKind::InvalidInput, "hermitian_sqrt input is not Hermitian");
    Matrix h = 0.5 * (p + p.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -tol.hermitian_psd_clamp)
            fail(ErrorKind::NotPSD, "eigenvalue " + std::to_string(ev(i)) + " below clamp");
        ev(i) = ev(i) > 0.0 ? std::sqrt(ev(i)) : 0.0;
    }
    const Matrix& v = es.eigenvectors();
    Matrix q = v * ev.cast<Complex>().asDiagonal() * v.adjoint();
    return 0.5 * (q + q.adjoint());
}

Matrix orthonormal_complement(const Matrix& v) {
    const Eigen::Index n = v.rows();
    const Eigen::Index k = v.cols();
    if (k > n) fail(ErrorKind::ShapeMismatch, "more orthonormal columns than the ambient dimension");
    Matrix work = identity(n) - v * v.adjoint();
    Matrix out(n, n - k);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (Eigen::Index t = 0; t < n - k; ++t) {
        Eigen::Index best = -1;
        double best_norm = -1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            const double nj = work.col(j).norm();
            if (nj > best_norm * (1.0 + 1e-12)) {
                best = j;
                best_norm = nj;
            }
        }
        if (best < 0 || best_norm < 1e-8)
            fail(ErrorKind::InternalError, "complement basis lost rank (input not orthonormal?)");
        used[static_cast<std::size_t>(best)] = true;
        Vector q = work.col(best) / best_norm;
        for (int pass = 0; pass < 2; ++pass) {
            if (k > 0) q -= v * (v.adjoint() * q);
            if (t > 0) q -= out.leftCols(t) * (out.leftCols(t).adjoint() * q);
            q.normalize();
        }
        out.col(t) = q;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!used[static_cast<std::size_t>(j)]) work.col(j) -= q * q.dot(work.col(j));
        }
    }
    return out;
}

Matrix unitary_completion(const Matrix& v, const Matrix& w, const Tolerances& tol) {
    if (v.rows() != w.rows()) fail(ErrorKind::ShapeMismatch, "unitary_completion needs n == m");
    if (v.cols() != w.cols()) fail(ErrorKind::ShapeMismatch, "unitary_completion needs equal column counts");
    require_finite(v, "V");
    require_finite(w, "W");
    const Eigen::Index k = v.cols();
    if (k > 0) {
        if (operator_norm(v.adjoint() * v - identity(k)) > tol.residual_tol ||
            operator_norm(w.adjoint() * w - identity(k)) > tol.residual_tol)
            fail(ErrorKind::InvalidInput, "unitary_completion inputs must have orthonormal columns");
    }
    const Matrix vc = orthonormal_complement(v);
    const Matrix wc = orthonormal_complement(w);
    Matrix u = w * v.adjoint() + wc * vc.adjoint();
    return u;
}

namespace {

struct Svd {
    Eigen::JacobiSVD<Matrix> svd;
    int rank = 0;
};

Svd full_svd(const Matrix& m, double rank_tol) {
    require_finite(m, "matrix");
    Svd out{Eigen::JacobiSVD<Matrix>(m, Eigen::ComputeFullU | Eigen::ComputeFullV), 0};
    const auto& s = out.svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    const double threshold = rank_tol * std::max(1.0, smax);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > threshold) ++out.rank;
    }
    return out;
}

}  // namespace

int numerical_rank(const Matrix& m, double rank_tol) {
    if (m.size() == 0) return 0;
    return full_svd(m, rank_tol).rank;
}

Matrix range_basis(const Matrix& m, double rank_tol) {
    if (m.size() == 0) return Matrix(m.rows(), 0);
    Svd s = full_svd(m, rank_tol);
    return s.svd.matrixU().leftCols(s.rank);
}

Matrix kernel_basis(const Matrix& m, double rank_tol) {
    if (m.cols() == 0) return Matrix(0, 0);
    if (m.rows() == 0) return identity(m.cols());
    Svd s = full_svd(m, rank_tol);
    return s.svd.matrixV().rightCols(m.cols() - s.rank);
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

std::vector<Complex> eigenvalues(const Matrix& m) {
    if (m.rows() != m.cols()) fail(ErrorKind::ShapeMismatch, "eigenvalues of a non-square matrix");
    if (m.size() == 0) return {};
    require_finite(m, "matrix");
    Eigen::ComplexEigenSolver<Matrix> es(m, false);
    if (es.info() != Eigen::Success) fail(ErrorKind::InternalError, "eigenvalue iteration did not converge");
    const auto& ev = es.eigenvalues();
    return std::vector<Complex>(ev.data(), ev.data() + ev.size());
}

double spectral_radius(const Matrix& m) {
    double r = 0.0;
    for (const Complex& z : eigenvalues(m)) r = std::max(r, std::abs(z));
    return r;
}

Schur schur(const Matrix& m) {
    if (m.rows() != m.cols()) fail(ErrorKind::ShapeMismatch, "Schur form of a non-square matrix");
    if (m.size() == 0) return {m, m};
    require_finite(m, "matrix");
    Eigen::ComplexSchur<Matrix> cs(m);
    if (cs.info() != Eigen::Success) fail(ErrorKind::InternalError, "Schur iteration did not converge");
    return {cs.matrixU(), cs.matrixT()};
}

std::vector<Cluster> cluster_values(const std::vector<Complex>& values, double radius) {
    const std::size_t n = values.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const Complex& x = values[static_cast<std::size_t>(a)];
        const Complex& y = values[static_cast<std::size_t>(b)];
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
        return x;
    };
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (std::abs(values[a] - values[b]) <= radius) {
                const int ra = find(static_cast<int>(a));
                const int rb = find(static_cast<int>(b));
                if (ra != rb) parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
            }
        }
    }
    std::vector<Cluster> clusters;
    std::vector<int> slot(n, -1);
    for (int idx : order) {
        const int root = find(idx);
        if (slot[static_cast<std::size_t>(root)] < 0) {
            slot[static_cast<std::size_t>(root)] = static_cast<int>(clusters.size());
            clusters.push_back({});
        }
        clusters[static_cast<std::size_t>(slot[static_cast<std::size_t>(root)])].members.push_back(idx);
    }
    for (Cluster& c : clusters) {
        Complex sum = 0.0;
        for (int i : c.members) sum += values[static_cast<std::size_t>(i)];
        c.center = sum / static_cast<double>(c.members.size());
    }
    return clusters;
}

Matrix polar_orthonormalize(const Matrix& m) {
    if (m.size() == 0) return m;
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace ando
