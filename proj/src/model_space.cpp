#include "ando/model_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace ando {

namespace {

constexpr double kClusterRadius = 1e-7;
// Farthest apart two computed eigenvalues may be and still be tested as one defective root.
constexpr double kMergeReach = 1e-2;
constexpr double kIllConditionedRadius = 1.0 - 1e-4;

double falling(int m, int j) {
    double f = 1.0;
    for (int t = 0; t < j; ++t) f *= static_cast<double>(m - t);
    return f;
}

double factorial(int n) { return falling(n, n); }

double binomial(int n, int k) { return falling(n, k) / factorial(k); }

Complex ipow(Complex z, int k) {
    Complex out = 1.0;
    for (int i = 0; i < k; ++i) out *= z;
    return out;
}

Matrix matrix_power(const Matrix& m, int k) {
    Matrix out = identity(m.rows());
    for (int i = 0; i < k; ++i) out = out * m;
    return out;
}

void check_roots_in_disk(const std::vector<Complex>& ev, const Tolerances& tol) {
    for (const Complex& z : ev) {
        const double m = std::abs(z);
        if (m >= 1.0 - 1e-3 * tol.unimodular_margin)
            fail(ErrorKind::NotCNU, "unimodular eigenvalue (modulus " + std::to_string(m) + ")");
        if (m > 1.0 - tol.unimodular_margin)
            fail(ErrorKind::MarginViolation, "eigenvalue modulus " + std::to_string(m) + " inside the margin band");
    }
}

}  // namespace

BlaschkeData BlaschkeData::make(std::vector<BlaschkeRoot> roots, const Tolerances& tol) {
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const BlaschkeRoot& r = roots[i];
        if (r.multiplicity < 1) fail(ErrorKind::InvalidInput, "root multiplicity must be positive");
        if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()))
            fail(ErrorKind::InvalidInput, "non-finite root");
        if (std::abs(r.value) > 1.0 - tol.unimodular_margin)
            fail(ErrorKind::InvalidInput, "Blaschke root outside the disk margin");
        for (std::size_t j = 0; j < i; ++j) {
            if (roots[j].value == r.value) fail(ErrorKind::InvalidInput, "Blaschke roots must be distinct");
        }
    }
    return BlaschkeData{std::move(roots)};
}

int BlaschkeData::size() const {
    int n = 0;
    for (const auto& r : roots) n += r.multiplicity;
    return n;
}

double BlaschkeData::max_modulus() const {
    double m = 0.0;
    for (const auto& r : roots) m = std::max(m, std::abs(r.value));
    return m;
}

BlaschkeData BlaschkeData::lcm(const BlaschkeData& other) const {
    BlaschkeData out = *this;
    for (const BlaschkeRoot& r : other.roots) {
        auto it = std::find_if(out.roots.begin(), out.roots.end(),
                               [&](const BlaschkeRoot& q) { return std::abs(q.value - r.value) <= kClusterRadius; });
        if (it == out.roots.end()) {
            out.roots.push_back(r);
        } else {
            it->multiplicity = std::max(it->multiplicity, r.multiplicity);
        }
    }
    return out;
}

MinimalPolynomial minimal_polynomial(const Matrix& t, const Tolerances& tol) {
    if (t.rows() != t.cols()) fail(ErrorKind::ShapeMismatch, "minimal polynomial of a non-square matrix");
    const Eigen::Index n = t.rows();
    MinimalPolynomial out;
    if (n == 0) return out;
    if (operator_norm(t) > 1.0 + tol.contraction_slack) fail(ErrorKind::NotContraction, "matrix norm exceeds 1");
    const std::vector<Complex> ev = eigenvalues(t);
    check_roots_in_disk(ev, tol);

    std::vector<std::vector<int>> groups;
    for (const Cluster& c : cluster_values(ev, kClusterRadius)) groups.push_back(c.members);
    auto center = [&](const std::vector<int>& g) {
        Complex s = 0.0;
        for (int i : g) s += ev[static_cast<std::size_t>(i)];
        return s / static_cast<double>(g.size());
    };
    auto rank_of_power = [&](Complex mu, int j) {
        return numerical_rank(matrix_power(t - mu * identity(n), j), tol.rank_tol);
    };

    // Defective roots come back from the eigensolver spread out like eps^(1/k), and only the mean
    // of the whole spread is accurate. Single-linkage clusters are grown reach by reach; a cluster
    // replaces the groups it contains once the rank of (T - mu)^m confirms an m-fold root at its mean.
    std::vector<double> reaches;
    for (std::size_t a = 0; a < ev.size(); ++a)
        for (std::size_t b = a + 1; b < ev.size(); ++b) {
            const double d = std::abs(ev[a] - ev[b]);
            if (d > kClusterRadius && d <= kMergeReach) reaches.push_back(d);
        }
    std::sort(reaches.begin(), reaches.end());
    reaches.erase(std::unique(reaches.begin(), reaches.end()), reaches.end());
    std::set<std::vector<int>> tested;
    for (double reach : reaches) {
        for (const Cluster& c : cluster_values(ev, reach)) {
            std::vector<int> members = c.members;
            std::sort(members.begin(), members.end());
            if (members.size() < 2 || !tested.insert(members).second) continue;
            const bool known = std::any_of(groups.begin(), groups.end(), [&](std::vector<int> g) {
                std::sort(g.begin(), g.end());
                return g == members;
            });
            if (known) continue;
            const int m = static_cast<int>(members.size());
            if (rank_of_power(center(members), m) > n - m) continue;
            std::erase_if(groups, [&](const std::vector<int>& g) {
                return std::binary_search(members.begin(), members.end(), g.front());
            });
            groups.push_back(c.members);
        }
    }

    std::vector<BlaschkeRoot> roots;
    for (const auto& g : groups) {
        const Complex mu = center(g);
        const int m = static_cast<int>(g.size());
        int mult = m;
        int prev = rank_of_power(mu, 1);
        for (int j = 1; j < m; ++j) {
            const int next = rank_of_power(mu, j + 1);
            if (next == prev) {
                mult = j;
                break;
            }
            prev = next;
        }
        roots.push_back({mu, mult});
    }
    std::sort(roots.begin(), roots.end(), [](const BlaschkeRoot& a, const BlaschkeRoot& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    out.blaschke = BlaschkeData::make(std::move(roots), tol);

    Matrix prod = identity(n);
    for (const BlaschkeRoot& r : out.blaschke.roots) prod = prod * matrix_power(t - r.value * identity(n), r.multiplicity);
    out.annihilation_residual = operator_norm(prod) / std::pow(1.0 + operator_norm(t), out.blaschke.size());
    return out;
}

Matrix ModelSpace::blaschke_at(const Matrix& m) const {
    const Eigen::Index n = m.rows();
    Matrix num = identity(n);
    Matrix den = identity(n);
    for (const BlaschkeRoot& r : blaschke.roots) {
        num = num * matrix_power(m - r.value * identity(n), r.multiplicity);
        den = den * matrix_power(identity(n) - std::conj(r.value) * m, r.multiplicity);
    }
    return Eigen::PartialPivLU<Matrix>(den).solve(num);
}

ModelSpace build_model_space(const BlaschkeData& b, const Tolerances& tol) {
    ModelSpace ms;
    ms.blaschke = BlaschkeData::make(b.roots, tol);
    const auto& roots = ms.blaschke.roots;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        for (int j = 0; j < roots[i].multiplicity; ++j) {
            ms.labels.emplace_back(static_cast<int>(i), j);
            ms.nodes.push_back(roots[i].value);
        }
    }
    const Eigen::Index n = ms.size();
    ms.ill_conditioned = b.max_modulus() > kIllConditionedRadius;
    ms.phases = Vector::Ones(n);
    if (n == 0) {
        ms.gram = ms.chol = ms.shift = Matrix(0, 0);
        return ms;
    }

    // <v_c, v_r> = d^a/dx^a d^b/dy^b (1 - x y)^{-1} at x = conj(lambda_c), y = lambda_r.
    ms.gram.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            const auto [ir, b_] = ms.labels[static_cast<std::size_t>(r)];
            const auto [ic, a] = ms.labels[static_cast<std::size_t>(c)];
            const Complex x = std::conj(roots[static_cast<std::size_t>(ic)].value);
            const Complex y = roots[static_cast<std::size_t>(ir)].value;
            const Complex base = 1.0 / (1.0 - x * y);
            Complex sum = 0.0;
            for (int t = 0; t <= std::min(a, b_); ++t) {
                sum += binomial(a, t) * falling(b_, t) * factorial(a + b_ - t) * ipow(x, b_ - t) * ipow(y, a - t) *
                       ipow(base, a + b_ + 1 - t);
            }
            ms.gram(r, c) = sum;
        }
    }
    ms.gram = 0.5 * (ms.gram + ms.gram.adjoint());
    const Eigen::VectorXd scale = ms.gram.diagonal().real().cwiseSqrt().cwiseInverse();
    const Matrix scaled = scale.cast<Complex>().asDiagonal() * ms.gram * scale.cast<Complex>().asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> es(scaled, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    ms.gram_condition = lo > 0.0 ? es.eigenvalues().maxCoeff() / lo : std::numeric_limits<double>::infinity();
    Eigen::LLT<Matrix> llt(ms.gram);
    ms.chol = llt.info() == Eigen::Success ? Matrix(llt.matrixL()) : Matrix(0, 0);

    // <v_k, e_k> > 0 fixes the Cholesky phase of each product-basis vector e_k; its sign is that of
    // the earlier Blaschke factors evaluated at the node.
    for (Eigen::Index k = 0; k < n; ++k) {
        const int i = ms.labels[static_cast<std::size_t>(k)].first;
        const Complex lam = roots[static_cast<std::size_t>(i)].value;
        Complex v = 1.0;
        for (int q = 0; q < i; ++q) {
            const Complex mu = roots[static_cast<std::size_t>(q)].value;
            v *= ipow((lam - mu) / (1.0 - std::conj(mu) * lam), roots[static_cast<std::size_t>(q)].multiplicity);
        }
        ms.phases(k) = std::conj(v) / std::abs(v);
    }

    ms.shift = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Complex ak = ms.nodes[static_cast<std::size_t>(k)];
        ms.shift(k, k) = ak;
        Complex chain = 1.0;
        for (Eigen::Index j = k - 1; j >= 0; --j) {
            const Complex aj = ms.nodes[static_cast<std::size_t>(j)];
            ms.shift(k, j) = std::conj(ms.phases(k)) * ms.phases(j) * std::sqrt(1.0 - std::norm(aj)) *
                             std::sqrt(1.0 - std::norm(ak)) * chain;
            chain *= -std::conj(aj);
        }
    }

    ms.annihilation = operator_norm(ms.blaschke_at(ms.shift));
    if (ms.annihilation > 1e-9) fail(ErrorKind::IllConditioned, "b(B) does not vanish (" + std::to_string(ms.annihilation) + ")");
    if (operator_norm(ms.shift) > 1.0 + 1e-10) fail(ErrorKind::IllConditioned, "compressed shift is not contractive");
    if (spectral_radius(ms.shift) >= 1.0) fail(ErrorKind::IllConditioned, "compressed shift has spectral radius >= 1");
    return ms;
}

Vector raw_basis_coefficients(const ModelSpace& ms, int column, int degree) {
    const auto [i, j] = ms.labels.at(static_cast<std::size_t>(column));
    const Complex lb = std::conj(ms.blaschke.roots[static_cast<std::size_t>(i)].value);
    Vector v = Vector::Zero(degree + 1);
    for (int m = j; m <= degree; ++m) v(m) = falling(m, j) * ipow(lb, m - j);
    return v;
}

Matrix constrained_poisson_kernel_1d(const Matrix& t, const ModelSpace& ms, const Matrix& coords) {
    if (t.rows() != t.cols() || coords.cols() != t.rows())
        fail(ErrorKind::ShapeMismatch, "constrained kernel shapes do not match");
    const Eigen::Index dim = t.rows();
    const Eigen::Index d = coords.rows();
    const Eigen::Index n = ms.size();
    const Matrix ts = t.adjoint();
    const Matrix id = identity(dim);
    // Component k is coords * e~_k(T*), where e~_k has the conjugated Taylor coefficients of e_k:
    // sqrt(1 - |a_k|^2) (1 - a_k w)^{-1} prod_{m<k} (w - conj(a_m)) (1 - a_m w)^{-1}.
    Matrix k_out(n * d, dim);
    Matrix partial = id;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Complex ak = ms.nodes[static_cast<std::size_t>(k)];
        Eigen::PartialPivLU<Matrix> lu(id - ak * ts);
        if (dim > 0 && lu.rcond() < 1e-12) fail(ErrorKind::IllConditioned, "resolvent condition number exceeds 1e12");
        const Matrix res = lu.inverse();
        k_out.middleRows(k * d, d) = std::conj(ms.phases(k)) * std::sqrt(1.0 - std::norm(ak)) * (coords * partial * res);
        partial = partial * (ts - std::conj(ak) * id) * res;
    }
    return k_out;
}

Matrix constrained_poisson_kernel_1d(const Matrix& t, const ModelSpace& ms, const Tolerances& tol) {
    return constrained_poisson_kernel_1d(t, ms, defect_space(RowContraction::single(t, tol), 1.0, tol).coords);
}

}  // namespace ando
