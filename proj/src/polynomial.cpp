#include "ando/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ando/parallel.hpp"

namespace ando {

BivariatePoly BivariatePoly::constant(Complex c) { return monomial(0, 0, c); }

BivariatePoly BivariatePoly::monomial(int zdeg, int wdeg, Complex c) {
    BivariatePoly p;
    p.add_term(zdeg, wdeg, c);
    return p;
}

void BivariatePoly::add_term(int zdeg, int wdeg, Complex c) {
    if (zdeg < 0 || wdeg < 0) fail(ErrorKind::InvalidInput, "exponents must be nonnegative");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) fail(ErrorKind::InvalidInput, "non-finite coefficient");
    terms_[{zdeg, wdeg}] += c;
}

int BivariatePoly::total_degree() const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k.first + k.second);
    return d;
}

int BivariatePoly::z_degree() const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k.first);
    return d;
}

int BivariatePoly::w_degree() const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k.second);
    return d;
}

Complex BivariatePoly::operator()(Complex z, Complex w) const {
    Complex sum = 0.0;
    for (const auto& [k, c] : terms_) sum += c * std::pow(z, k.first) * std::pow(w, k.second);
    return sum;
}

BivariatePoly BivariatePoly::swapped() const {
    BivariatePoly out;
    for (const auto& [k, c] : terms_) out.add_term(k.second, k.first, c);
    return out;
}

BivariatePoly BivariatePoly::operator*(const BivariatePoly& other) const {
    BivariatePoly out;
    for (const auto& [a, ca] : terms_)
        for (const auto& [b, cb] : other.terms_) out.add_term(a.first + b.first, a.second + b.second, ca * cb);
    return out;
}

BivariatePoly BivariatePoly::operator+(const BivariatePoly& other) const {
    BivariatePoly out = *this;
    for (const auto& [k, c] : other.terms_) out.add_term(k.first, k.second, c);
    return out;
}

BivariatePoly BivariatePoly::scaled(Complex c) const {
    BivariatePoly out;
    for (const auto& [k, v] : terms_) out.add_term(k.first, k.second, c * v);
    return out;
}

BivariatePolyMatrix::BivariatePolyMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(std::max(rows * cols, 0))) {
    if (rows < 1 || cols < 1) fail(ErrorKind::InvalidInput, "polynomial matrix dimensions must be positive");
}

BivariatePolyMatrix BivariatePolyMatrix::scalar(BivariatePoly p) {
    BivariatePolyMatrix m(1, 1);
    m.at(0, 0) = std::move(p);
    return m;
}

int BivariatePolyMatrix::total_degree() const {
    int d = 0;
    for (const auto& e : entries_) d = std::max(d, e.total_degree());
    return d;
}

int BivariatePolyMatrix::z_degree() const {
    int d = 0;
    for (const auto& e : entries_) d = std::max(d, e.z_degree());
    return d;
}

int BivariatePolyMatrix::w_degree() const {
    int d = 0;
    for (const auto& e : entries_) d = std::max(d, e.w_degree());
    return d;
}

BivariatePolyMatrix BivariatePolyMatrix::swapped() const {
    BivariatePolyMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = entries_[i].swapped();
    return out;
}

BivariatePolyMatrix BivariatePolyMatrix::scaled(Complex c) const {
    BivariatePolyMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = entries_[i].scaled(c);
    return out;
}

Matrix BivariatePolyMatrix::at_point(Complex z, Complex w) const {
    Matrix out(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
        for (int s = 0; s < cols_; ++s) out(r, s) = at(r, s)(z, w);
    return out;
}

namespace {

// q(M) for q given by coefficients c[0..d], Horner.
Matrix horner(const std::vector<Complex>& c, const Matrix& m) {
    const Eigen::Index n = m.rows();
    Matrix acc = Matrix::Zero(n, n);
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * m;
        acc.diagonal().array() += *it;
    }
    return acc;
}

Matrix eval_entry(const BivariatePoly& p, const Matrix& m1, const Matrix& m2) {
    const Eigen::Index n = m1.rows();
    const int dw = p.w_degree();
    const int dz = p.z_degree();
    std::vector<std::vector<Complex>> by_w(static_cast<std::size_t>(dw + 1),
                                           std::vector<Complex>(static_cast<std::size_t>(dz + 1), 0.0));
    for (const auto& [k, c] : p.terms())
        by_w[static_cast<std::size_t>(k.second)][static_cast<std::size_t>(k.first)] += c;
    Matrix acc = Matrix::Zero(n, n);
    for (int b = dw; b >= 0; --b) acc = acc * m2 + horner(by_w[static_cast<std::size_t>(b)], m1);
    return acc;
}

}  // namespace

Matrix eval_bivariate(const BivariatePolyMatrix& p, const Matrix& m1, const Matrix& m2, const Tolerances& tol) {
    if (m1.rows() != m1.cols() || m2.rows() != m2.cols() || m1.rows() != m2.rows())
        fail(ErrorKind::ShapeMismatch, "eval_bivariate needs two square matrices of one size");
    require_finite(m1, "M1");
    require_finite(m2, "M2");
    const double c = operator_norm(commutator(m1, m2));
    if (c > tol.residual_tol * (1.0 + operator_norm(m1)) * (1.0 + operator_norm(m2)))
        fail(ErrorKind::NotCommuting, "eval_bivariate arguments do not commute (residual " + std::to_string(c) + ")");
    const Eigen::Index n = m1.rows();
    Matrix out(p.rows() * n, p.cols() * n);
    for (int r = 0; r < p.rows(); ++r)
        for (int s = 0; s < p.cols(); ++s) out.block(r * n, s * n, n, n) = eval_entry(p.at(r, s), m1, m2);
    return out;
}

FreePoly FreePoly::from_bivariate(const BivariatePoly& p) {
    FreePoly out;
    for (const auto& [k, c] : p.terms())
        out.terms.push_back({Word(static_cast<std::size_t>(k.first), 1), Word(static_cast<std::size_t>(k.second), 1), c});
    return out;
}

namespace {

void check_word(const Word& w, std::size_t n, const char* which) {
    for (int letter : w) {
        if (letter < 1 || static_cast<std::size_t>(letter) > n)
            fail(ErrorKind::InvalidInput, std::string(which) + " word letter " + std::to_string(letter) + " out of range");
    }
}

void check_pair_shapes(const RowContraction& t1, const RowContraction& t2) {
    if (!t1.is_square() || !t2.is_square() || t1.dim() != t2.dim())
        fail(ErrorKind::ShapeMismatch, "polynomial evaluation needs square tuples of one size");
}

}  // namespace

Matrix eval_free(const FreePoly& p, const RowContraction& t1, const RowContraction& t2) {
    check_pair_shapes(t1, t2);
    Matrix out = Matrix::Zero(t1.dim(), t1.dim());
    for (const FreeTerm& term : p.terms) {
        check_word(term.x, t1.size(), "X");
        check_word(term.y, t2.size(), "Y");
        out += term.coeff * (t1.word(term.x) * t2.word(term.y));
    }
    return out;
}

Matrix eval_hereditary(const HereditaryPoly& q, const RowContraction& t1, const RowContraction& t2) {
    check_pair_shapes(t1, t2);
    Matrix out = Matrix::Zero(t1.dim(), t1.dim());
    for (const HereditaryTerm& term : q.terms) {
        check_word(term.x, t1.size(), "X");
        check_word(term.y, t2.size(), "Y");
        check_word(term.ys, t2.size(), "Y*");
        check_word(term.xs, t1.size(), "X*");
        out += term.coeff *
               (t1.word(term.x) * t2.word(term.y) * t2.word(term.ys).adjoint() * t1.word(term.xs).adjoint());
    }
    return out;
}

double torus_bracket_slack(int degree, int grid) {
    // Moving to the nearest grid point changes each angle by at most pi/grid, and along that
    // segment p has exponential type <= degree, so lo >= (1 - x) sup.
    const double x = std::numbers::pi * degree / grid;
    return x / (1.0 - x);
}

namespace {

void check_grid(const BivariatePolyMatrix& p, int grid) {
    if (grid < 4 * (p.total_degree() + 1))
        fail(ErrorKind::InvalidInput, "grid " + std::to_string(grid) + " is too coarse for degree " +
                                          std::to_string(p.total_degree()));
}

std::vector<Complex> roots_of_unity(int grid) {
    std::vector<Complex> roots(static_cast<std::size_t>(grid));
    for (int t = 0; t < grid; ++t) {
        const double a = 2.0 * std::numbers::pi * t / grid;
        roots[static_cast<std::size_t>(t)] = {std::cos(a), std::sin(a)};
    }
    return roots;
}

double small_norm(const Complex* m, int rows, int cols) {
    if (rows == 1 || cols == 1) {
        double s = 0.0;
        for (int i = 0; i < rows * cols; ++i) s += std::norm(m[i]);
        return std::sqrt(s);
    }
    if (rows == 2 && cols == 2) {
        const double f = std::norm(m[0]) + std::norm(m[1]) + std::norm(m[2]) + std::norm(m[3]);
        const double det = std::norm(m[0] * m[3] - m[1] * m[2]);
        const double disc = std::max(0.0, f * f - 4.0 * det);
        return std::sqrt(0.5 * (f + std::sqrt(disc)));
    }
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> view(m, rows, cols);
    return operator_norm(Matrix(view));
}

// Coefficient table: coeff[(entry * (dw+1) + b) * (dz+1) + a] for the z^a w^b term of each entry.
struct Dense {
    int rows, cols, dz, dw;
    std::vector<Complex> coeff;
};

Dense densify(const BivariatePolyMatrix& p) {
    Dense d{p.rows(), p.cols(), p.z_degree(), p.w_degree(), {}};
    d.coeff.assign(static_cast<std::size_t>(d.rows * d.cols * (d.dw + 1) * (d.dz + 1)), 0.0);
    for (int r = 0; r < d.rows; ++r)
        for (int s = 0; s < d.cols; ++s)
            for (const auto& [k, c] : p.at(r, s).terms()) {
                const int e = r * d.cols + s;
                d.coeff[static_cast<std::size_t>((e * (d.dw + 1) + k.second) * (d.dz + 1) + k.first)] += c;
            }
    return d;
}

// Max over one theta row of the grid; the shared per-point arithmetic keeps every
// schedule bit-identical.
double row_max(const Dense& d, const std::vector<Complex>& roots, int grid, int i) {
    const int entries = d.rows * d.cols;
    std::vector<Complex> q(static_cast<std::size_t>(entries * (d.dw + 1)), 0.0);
    for (int e = 0; e < entries; ++e) {
        for (int b = 0; b <= d.dw; ++b) {
            Complex acc = 0.0;
            for (int a = d.dz; a >= 0; --a) {
                acc = acc * roots[static_cast<std::size_t>(i)] +
                      d.coeff[static_cast<std::size_t>((e * (d.dw + 1) + b) * (d.dz + 1) + a)];
            }
            q[static_cast<std::size_t>(e * (d.dw + 1) + b)] = acc;
        }
    }
    std::vector<Complex> point(static_cast<std::size_t>(entries));
    double best = 0.0;
    for (int j = 0; j < grid; ++j) {
        const Complex w = roots[static_cast<std::size_t>(j)];
        for (int e = 0; e < entries; ++e) {
            Complex acc = 0.0;
            for (int b = d.dw; b >= 0; --b) acc = acc * w + q[static_cast<std::size_t>(e * (d.dw + 1) + b)];
            point[static_cast<std::size_t>(e)] = acc;
        }
        best = std::max(best, small_norm(point.data(), d.rows, d.cols));
    }
    return best;
}

TorusBracket finish(double lo, const BivariatePolyMatrix& p, int grid) {
    return {lo, lo * (1.0 + torus_bracket_slack(p.total_degree(), grid)), grid};
}

}  // namespace

TorusBracket torus_sup_norm(const BivariatePolyMatrix& p, int grid) {
    check_grid(p, grid);
    const Dense d = densify(p);
    const std::vector<Complex> roots = roots_of_unity(grid);
    double lo = 0.0;
#pragma omp parallel for reduction(max : lo) schedule(static) num_threads(worker_threads())
    for (int i = 0; i < grid; ++i) lo = std::max(lo, row_max(d, roots, grid, i));
    return finish(lo, p, grid);
}

TorusBracket torus_sup_norm_serial(const BivariatePolyMatrix& p, int grid) {
    check_grid(p, grid);
    double lo = 0.0;
    for (int i = 0; i < grid; ++i) {
        const Complex z = std::polar(1.0, 2.0 * std::numbers::pi * i / grid);
        for (int j = 0; j < grid; ++j) {
            const Complex w = std::polar(1.0, 2.0 * std::numbers::pi * j / grid);
            lo = std::max(lo, operator_norm(p.at_point(z, w)));
        }
    }
    return finish(lo, p, grid);
}

BivariatePolyMatrix fejer_smooth(const BivariatePolyMatrix& p, int m) {
    if (m < p.total_degree())
        fail(ErrorKind::InvalidInput, "Fejer order " + std::to_string(m) + " is below the total degree");
    BivariatePolyMatrix out(p.rows(), p.cols());
    for (int r = 0; r < p.rows(); ++r)
        for (int s = 0; s < p.cols(); ++s)
            for (const auto& [k, c] : p.at(r, s).terms())
                out.at(r, s).add_term(k.first, k.second, c * (1.0 - double(k.first + k.second) / (m + 1)));
    return out;
}

}  // namespace ando
