#include "ando/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace ando {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Matrix zero_padded(const Matrix& m, Eigen::Index extra_rows) {
    Matrix out = Matrix::Zero(m.rows() + extra_rows, m.cols());
    out.topRows(m.rows()) = m;
    return out;
}

void require_single_generator(const UnitaryColligation& col) {
    if (col.shape.n1 != 1) fail(ErrorKind::InvalidInput, "this evaluation needs a single generator (n1 = 1)");
}

// phi restricted to the completely non-unitary part of D. The unitary part of D is orthogonal
// to range(B*) and annihilated by C*, so dropping it leaves phi unchanged but keeps the
// resolvent bounded on the circle.
struct ReducedRealization {
    Matrix a_star, b_star, c_star, d_star;
    bool reduced = false;
};

ReducedRealization reduced_realization(const UnitaryColligation& col) {
    ReducedRealization r{col.a.adjoint(), col.b.adjoint(), col.c.adjoint(), col.d.adjoint(), false};
    if (col.d.rows() == 0) return r;
    try {
        const UnitaryCnuSplit split = unitary_cnu_split(col.d);
        if (split.unitary_basis.cols() == 0) {
            r.reduced = true;
            return r;
        }
        const Matrix& q = split.cnu_basis;
        r.b_star = q.adjoint() * r.b_star;
        r.c_star = r.c_star * q;
        r.d_star = q.adjoint() * r.d_star * q;
        r.reduced = true;
    } catch (const Error&) {
    }
    return r;
}

Matrix eval_realization(const ReducedRealization& r, Complex z) {
    if (r.d_star.rows() == 0) return r.a_star;
    const Eigen::Index e = r.d_star.rows();
    Eigen::PartialPivLU<Matrix> lu(identity(e) - z * r.d_star);
    return r.a_star + z * r.c_star * lu.solve(r.b_star);
}

double circle_max(const ReducedRealization& r, double radius, int points) {
    double best = 0.0;
    for (int k = 0; k < points; ++k) {
        const Complex z = std::polar(radius, 2.0 * std::numbers::pi * k / points);
        best = std::max(best, operator_norm(eval_realization(r, z)));
    }
    return best;
}

}  // namespace

DefectMaps intertwining_isometry(const IntertwiningTriple& triple, const Tolerances& tol) {
    const RowContraction& t1 = triple.t1;
    const RowContraction& t1p = triple.t1p;
    const RowContraction& t2 = triple.t2;
    if (t1.size() == 0 || t2.size() == 0) fail(ErrorKind::InvalidInput, "row tuples need at least one entry");
    if (triple.intertwining_residual() > tol.residual_tol * (1.0 + t1.row_norm()) * (1.0 + t2.row_norm()))
        fail(ErrorKind::NotIntertwining, "T2 does not intertwine T1 and T1'");

    DefectMaps out;
    out.d1 = defect_space(t1, 1.0, tol);
    out.d1p = defect_space(t1p, 1.0, tol);
    out.d2 = defect_space(t2, 1.0, tol);

    ColligationShape& s = out.shape;
    s.d1 = out.d1.size();
    s.d1p = out.d1p.size();
    s.d2 = out.d2.size();
    s.n1 = static_cast<int>(t1.size());
    s.n2 = static_cast<int>(t2.size());
    const Eigen::Index left = s.d1 + s.n1 * s.d2;
    const Eigen::Index right = s.n2 * s.d1p + s.d2;
    if (right >= left) {
        s.pad_a = right - left;
    } else {
        s.pad_b = (left - right + s.n2 - 1) / s.n2;
        s.pad_a = s.n2 * s.pad_b - (left - right);
    }
    if (s.in_dim() != s.out_dim()) fail(ErrorKind::PadFailure, "could not equalize the colligation dimensions");

    out.coords1 = zero_padded(out.d1.coords, s.pad_a);
    out.coords1p = zero_padded(out.d1p.coords, s.pad_b);

    const Eigen::Index dim = t1.dim();
    out.x = Matrix::Zero(s.in_dim(), dim);
    out.x.topRows(s.e1()) = out.coords1;
    for (int i = 0; i < s.n1; ++i)
        out.x.middleRows(s.e1() + i * s.e2(), s.d2) = out.d2.coords * t1[static_cast<std::size_t>(i)].adjoint();
    out.y = Matrix::Zero(s.out_dim(), dim);
    for (int j = 0; j < s.n2; ++j)
        out.y.middleRows(j * s.e1p(), s.e1p()) = out.coords1p * t2[static_cast<std::size_t>(j)].adjoint();
    out.y.middleRows(s.n2 * s.e1p(), s.d2) = out.d2.coords;

    out.energy_residual = operator_norm(out.x.adjoint() * out.x - out.y.adjoint() * out.y);
    if (out.energy_residual > tol.residual_tol)
        fail(ErrorKind::InternalError, "defect isometry does not preserve norms (residual " +
                                           std::to_string(out.energy_residual) + ")");
    return out;
}

DefectMaps intertwining_isometry(const CommutingPair& pair, const Tolerances& tol) {
    return intertwining_isometry(IntertwiningTriple::make(pair.t1, pair.t1, pair.t2, tol), tol);
}

std::string ExtensionSpec::label() const {
    return mode == Mode::Canonical ? "canonical" : "sampled:" + std::to_string(seed);
}

Matrix UnitaryColligation::u() const {
    Matrix out(a.rows() + c.rows(), a.cols() + b.cols());
    out << a, b, c, d;
    return out;
}

Matrix UnitaryColligation::b_block(int i) const { return b.middleCols(i * shape.e2(), shape.e2()); }

Matrix UnitaryColligation::d_block(int i) const { return d.middleCols(i * shape.e2(), shape.e2()); }

Matrix haar_unitary(Eigen::Index n, std::uint64_t seed) {
    if (n == 0) return Matrix(0, 0);
    std::mt19937_64 gen(splitmix64(seed));
    std::normal_distribution<double> normal;
    Matrix g(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            const double re = normal(gen);
            const double im = normal(gen);
            g(r, c) = Complex(re, im);
        }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * identity(n);
    const Matrix& rr = qr.matrixQR();
    for (Eigen::Index j = 0; j < n; ++j) {
        const Complex d = rr(j, j);
        if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

UnitaryColligation unitary_extension(const DefectMaps& maps, const ExtensionSpec& spec, const Tolerances& tol) {
    const ColligationShape& s = maps.shape;
    const Eigen::Index n = s.in_dim();
    if (s.out_dim() != n || maps.x.rows() != n || maps.y.rows() != n)
        fail(ErrorKind::PadFailure, "colligation input and output dimensions differ");

    Eigen::JacobiSVD<Matrix> svd(maps.x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > tol.rank_tol * std::max(1.0, smax)) ++rank;
    const Matrix vx = svd.matrixU().leftCols(rank);
    Matrix w = maps.y * svd.matrixV().leftCols(rank);
    for (Eigen::Index k = 0; k < rank; ++k) w.col(k) /= sv(k);
    w = polar_orthonormalize(w);

    Matrix u;
    if (spec.mode == ExtensionSpec::Mode::Canonical) {
        u = unitary_completion(vx, w, tol);
    } else {
        const Matrix vc = orthonormal_complement(vx);
        const Matrix wc = orthonormal_complement(w);
        u = w * vx.adjoint() + wc * haar_unitary(n - rank, spec.seed) * vc.adjoint();
    }

    UnitaryColligation col;
    col.shape = s;
    col.spec = spec;
    const Eigen::Index top = s.n2 * s.e1p();
    col.a = u.block(0, 0, top, s.e1());
    col.b = u.block(0, s.e1(), top, n - s.e1());
    col.c = u.block(top, 0, n - top, s.e1());
    col.d = u.block(top, s.e1(), n - top, n - s.e1());
    col.unitarity_residual = operator_norm(u.adjoint() * u - identity(n));
    col.restriction_residual = operator_norm(u * maps.x - maps.y);
    if (col.unitarity_residual > 1e-10)
        fail(ErrorKind::InternalError, "extension is not unitary (" + std::to_string(col.unitarity_residual) + ")");
    if (col.restriction_residual > 1e-9 * std::max(1.0, operator_norm(maps.y)))
        fail(ErrorKind::InternalError,
             "extension does not restrict to the defect isometry (" + std::to_string(col.restriction_residual) + ")");
    return col;
}

Matrix transfer_eval_scalar(const UnitaryColligation& col, Complex z) {
    require_single_generator(col);
    if (!(std::abs(z) < 1.0)) fail(ErrorKind::InvalidInput, "transfer function argument must lie in the open disk");
    const Eigen::Index e = col.d.rows();
    if (e == 0) return col.a.adjoint();
    Eigen::PartialPivLU<Matrix> lu(identity(e) - z * col.d.adjoint());
    return col.a.adjoint() + z * col.c.adjoint() * lu.solve(col.b.adjoint());
}

Matrix transfer_eval_at_matrix(const UnitaryColligation& col, const Matrix& m) {
    require_single_generator(col);
    if (m.rows() != m.cols()) fail(ErrorKind::ShapeMismatch, "transfer function argument must be square");
    const Eigen::Index n = m.rows();
    const Eigen::Index e = col.d.rows();
    const Matrix base = kron(identity(n), col.a.adjoint());
    if (e == 0 || n == 0) return base;
    const Matrix big = identity(n * e) - kron(m, col.d.adjoint());
    Eigen::PartialPivLU<Matrix> lu(big);
    if (lu.rcond() < 1e-12) fail(ErrorKind::IllConditioned, "resolvent of the transfer function is ill-conditioned");
    return base + kron(identity(n), col.c.adjoint()) * lu.solve(kron(m, col.b.adjoint()));
}

std::vector<Matrix> transfer_taylor(const UnitaryColligation& col, int count) {
    require_single_generator(col);
    std::vector<Matrix> out;
    if (count <= 0) return out;
    out.push_back(col.a.adjoint());
    Matrix p = col.b.adjoint();
    const Matrix cs = col.c.adjoint();
    const Matrix ds = col.d.adjoint();
    for (int k = 1; k < count; ++k) {
        out.push_back(cs * p);
        p = ds * p;
    }
    return out;
}

MultiAnalyticOp transfer_series_fock(const UnitaryColligation& col, const TruncatedFock& space) {
    const ColligationShape& s = col.shape;
    if (space.generators() != s.n1) fail(ErrorKind::ShapeMismatch, "Fock space generators differ from n1");
    MultiAnalyticOp op;
    op.in_dim = s.n2 * s.e1p();
    op.out_dim = s.e1();
    op.coeffs[Word{}] = col.a.adjoint();
    const Matrix cs = col.c.adjoint();
    // tail[idx] = D_{k1}* ... D_{kq}* B_i* for the word (k1, ..., kq, i); theta = C* tail.
    std::vector<Matrix> tail(static_cast<std::size_t>(space.dim()));
    for (int len = 1; len <= space.max_len(); ++len) {
        for (Eigen::Index r = 0; r < space.count(len); ++r) {
            const Eigen::Index idx = space.offset(len) + r;
            const Word w = space.word(idx);
            Matrix& cur = tail[static_cast<std::size_t>(idx)];
            if (len == 1) {
                cur = col.b_block(w[0] - 1).adjoint();
            } else {
                const Word rest(w.begin() + 1, w.end());
                cur = col.d_block(w[0] - 1).adjoint() * tail[static_cast<std::size_t>(space.index(rest))];
            }
            op.coeffs[w] = cs * cur;
        }
    }
    return op;
}

double transfer_grid_norm(const UnitaryColligation& col, double radius, int points) {
    require_single_generator(col);
    if (!(radius >= 0.0 && radius < 1.0)) fail(ErrorKind::InvalidInput, "grid radius must lie in [0, 1)");
    double best = 0.0;
    for (int k = 0; k < points; ++k)
        best = std::max(best, operator_norm(transfer_eval_scalar(col, std::polar(radius, 2.0 * std::numbers::pi * k / points))));
    return best;
}

double transfer_sup_norm(const UnitaryColligation& col, int points) {
    require_single_generator(col);
    const ReducedRealization r = reduced_realization(col);
    // With the unitary part removed the resolvent is regular on the circle itself.
    const double radius = r.reduced ? 1.0 : 1.0 - 1e-9;
    auto f = [&](double theta) { return operator_norm(eval_realization(r, std::polar(radius, theta))); };
    std::vector<double> vals(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) vals[static_cast<std::size_t>(k)] = f(2.0 * std::numbers::pi * k / points);
    double best = *std::max_element(vals.begin(), vals.end());
    const double h = 2.0 * std::numbers::pi / points;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int k = 0; k < points; ++k) {
        const double v = vals[static_cast<std::size_t>(k)];
        if (v < vals[static_cast<std::size_t>((k + points - 1) % points)] ||
            v < vals[static_cast<std::size_t>((k + 1) % points)])
            continue;
        double lo = (k - 1) * h, hi = (k + 1) * h;
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = f(x1), f2 = f(x2);
        for (int it = 0; it < 60; ++it) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = f(x1);
            }
        }
        best = std::max({best, f1, f2});
    }
    return best;
}

IsometryCheck isometry_condition_check(const UnitaryColligation& col, std::vector<double> radii,
                                       const Tolerances& tol) {
    IsometryCheck out;
    out.radii = std::move(radii);
    const Eigen::Index e = col.shape.e2();
    const int n1 = col.shape.n1;
    for (double r : out.radii) {
        if (e == 0) {
            out.scores.push_back(0.0);
            continue;
        }
        Matrix op = identity(e * e);
        for (int j = 0; j < n1; ++j) {
            const Matrix dj = col.d_block(j);
            op -= r * r * kron(dj.conjugate(), dj);
        }
        const Matrix id = identity(e);
        const Vector vec_id = Eigen::Map<const Vector>(id.data(), e * e);
        const Vector g_vec = Eigen::PartialPivLU<Matrix>(op).solve(vec_id);
        const Matrix g = Eigen::Map<const Matrix>(g_vec.data(), e, e);
        Matrix acc = Matrix::Zero(col.b.rows(), col.b.rows());
        for (int i = 0; i < n1; ++i) acc += col.b_block(i) * g * col.b_block(i).adjoint();
        out.scores.push_back((1.0 - r * r) * operator_norm(acc));
    }

    if (n1 == 1) {
        try {
            if (e == 0) {
                out.exact = true;
                out.is_isometry_likely = true;
                return out;
            }
            const UnitaryCnuSplit split = unitary_cnu_split(col.d, tol);
            const double leak =
                split.unitary_basis.cols() == 0 ? 0.0 : operator_norm(split.unitary_basis.adjoint() * col.b.adjoint());
            out.exact = true;
            out.is_isometry_likely = leak <= tol.residual_tol * std::max(1.0, operator_norm(col.b));
            return out;
        } catch (const Error&) {
        }
    }
    const double first = out.scores.empty() ? 0.0 : out.scores.front();
    const double last = out.scores.empty() ? 0.0 : out.scores.back();
    out.is_isometry_likely = last <= 1e-8 || last <= 1e-2 * first;
    return out;
}

bool DilationCertificates::ok() const {
    return isometry <= 1e-9 && first <= 1e-9 && second <= 1e-8 && commutation <= 1e-10 && symbol_norm <= 1.0 + 1e-9 &&
           unitarity <= 1e-10 && restriction <= 1e-9;
}

AndoDilationFactory::AndoDilationFactory(const CommutingPair& pair, const Tolerances& tol) : pair_(pair), tol_(tol) {
    if (pair.t1.size() != 1 || pair.t2.size() != 1)
        fail(ErrorKind::InvalidInput, "the dilation pair needs single contractions");
    const Matrix& t1 = pair.t1[0];
    model_ = build_model_space(minimal_polynomial(t1, tol).blaschke, tol);
    maps_ = intertwining_isometry(pair, tol);
    kernel_ = constrained_poisson_kernel_1d(t1, model_, maps_.coords1);
    v1_ = kron(model_.shift, identity(maps_.shape.e1()));
}

AndoDilation AndoDilationFactory::make(const ExtensionSpec& spec) const {
    AndoDilation out;
    out.colligation = unitary_extension(maps_, spec, tol_);
    out.kernel = kernel_;
    out.v1 = v1_;
    out.v2 = transfer_eval_at_matrix(out.colligation, model_.shift);
    out.ill_conditioned = model_.ill_conditioned;
    const Matrix& t1 = pair_.t1[0];
    const Matrix& t2 = pair_.t2[0];
    DilationCertificates& c = out.certificates;
    c.isometry = operator_norm(kernel_.adjoint() * kernel_ - identity(t1.rows()));
    c.first = operator_norm(kernel_ * t1.adjoint() - v1_.adjoint() * kernel_);
    c.second = operator_norm(kernel_ * t2.adjoint() - out.v2.adjoint() * kernel_);
    c.commutation = operator_norm(commutator(v1_, out.v2));
    c.symbol_norm = operator_norm(out.v2);
    c.unitarity = out.colligation.unitarity_residual;
    c.restriction = out.colligation.restriction_residual;
    return out;
}

AndoDilation ando_dilation_pair(const CommutingPair& pair, const ExtensionSpec& spec, const Tolerances& tol) {
    return AndoDilationFactory(pair, tol).make(spec);
}

double polynomial_intertwining_residual(const AndoDilation& dil, const CommutingPair& pair,
                                        const BivariatePolyMatrix& p, const Tolerances& tol) {
    const Matrix pt = eval_bivariate(p, pair.t1[0], pair.t2[0], tol);
    const Matrix pv = eval_bivariate(p, dil.v1, dil.v2, tol);
    const Matrix kc = kron(identity(p.cols()), dil.kernel);
    const Matrix kr = kron(identity(p.rows()), dil.kernel);
    return operator_norm(kc * pt.adjoint() - pv.adjoint() * kr);
}

Matrix CommutantLift::eval(Complex z) const {
    return scale * transfer_eval_scalar(colligation, z);
}

CommutantLift commutant_lift(const Matrix& t, const Matrix& tp, const Matrix& a, const ExtensionSpec& spec,
                             const Tolerances& tol) {
    if (t.rows() != t.cols() || tp.rows() != tp.cols() || a.rows() != t.rows() || a.cols() != tp.rows())
        fail(ErrorKind::ShapeMismatch, "commutant lifting shapes do not match");
    require_finite(a, "A");
    const double an = operator_norm(a);
    const double residual = operator_norm(a * tp - t * a);
    if (residual > tol.residual_tol * (1.0 + an) * (1.0 + operator_norm(t)))
        fail(ErrorKind::NotIntertwining, "A T' != T A (residual " + std::to_string(residual) + ")");

    const RowContraction rt = RowContraction::single(t, tol);
    const RowContraction rtp = RowContraction::single(tp, tol);
    const PurityCertificate pt = is_pure(rt);
    const PurityCertificate ptp = is_pure(rtp);
    if (!pt.pure || !ptp.pure) fail(ErrorKind::NotPure, "commutant lifting needs pure contractions");

    CommutantLift out;
    out.scale = an;
    const Matrix a2 = an > 0.0 ? Matrix(a / an) : Matrix(a);
    const IntertwiningTriple triple = IntertwiningTriple::make(rt, rtp, RowContraction::single(a2, tol), tol);
    const DefectMaps maps = intertwining_isometry(triple, tol);
    out.colligation = unitary_extension(maps, spec, tol);

    bool done = false;
    try {
        const BlaschkeData b = minimal_polynomial(t, tol).blaschke.lcm(minimal_polynomial(tp, tol).blaschke);
        const ModelSpace ms = build_model_space(b, tol);
        if (!ms.ill_conditioned) {
            const Matrix kt = constrained_poisson_kernel_1d(t, ms, maps.coords1);
            const Matrix ktp = constrained_poisson_kernel_1d(tp, ms, maps.coords1p);
            const Matrix psi = an * transfer_eval_at_matrix(out.colligation, ms.shift);
            out.interpolation_residual = operator_norm(ktp * a.adjoint() - psi.adjoint() * kt);
            out.interpolation_bound = 0.0;
            out.exact_model = true;
            done = true;
        }
    } catch (const Error&) {
    }
    if (!done) {
        int len = 1;
        auto tails_at = [&](int l) {
            const std::size_t h = static_cast<std::size_t>(l) + 1;
            return std::max(is_pure(rt, h).tail(h), is_pure(rtp, h).tail(h));
        };
        while (len < 400 && tails_at(len) > 1e-20) len = std::min(400, len * 2);
        const TruncatedFock space(1, len);
        const Matrix kt = poisson_blocks(rt, 1.0, space, maps.coords1);
        const Matrix ktp = poisson_blocks(rtp, 1.0, space, maps.coords1p);
        const MultiAnalyticOp phi = transfer_series_fock(out.colligation, space);
        const Matrix rhs = an * phi.apply_adjoint(Side::Right, space, kt);
        out.interpolation_residual = operator_norm(ktp * a.adjoint() - rhs);
        out.interpolation_bound = an * std::sqrt(is_pure(rt, static_cast<std::size_t>(len) + 1).tail(static_cast<std::size_t>(len) + 1));
        out.exact_model = false;
    }
    out.grid_norm = an * transfer_grid_norm(out.colligation, 0.99);
    out.sup_norm = an * transfer_sup_norm(out.colligation);
    return out;
}

bool IntertwiningDilationReport::ok(double slack) const {
    return first <= first_bound + slack && second <= second_bound + slack && symbol <= symbol_bound + slack &&
           series <= series_bound + slack;
}

Matrix defect_series_partial_sum(const UnitaryColligation& col, const RowContraction& t1, const Matrix& coords1,
                                 int m) {
    const Eigen::Index e = col.shape.e2();
    const int n1 = col.shape.n1;
    const Eigen::Index dim = t1.dim();
    Matrix z = col.c * coords1;
    Matrix sum = Matrix::Zero(n1 * e, dim);
    Matrix term(n1 * e, dim);
    for (int p = 0; p <= m; ++p) {
        for (int i = 0; i < n1; ++i) term.middleRows(i * e, e) = z * t1[static_cast<std::size_t>(i)].adjoint();
        sum += term;
        z = col.d * term;
    }
    return sum;
}

IntertwiningDilationReport verify_intertwining_dilation(const IntertwiningTriple& triple,
                                                        const UnitaryColligation& col, const TruncatedFock& space,
                                                        const Tolerances& tol) {
    const int len = space.max_len();
    const std::size_t h = static_cast<std::size_t>(len) + 2;
    const PurityCertificate p1 = is_pure(triple.t1, h);
    const PurityCertificate p1p = is_pure(triple.t1p, h);
    if (!p1.pure || !p1p.pure) fail(ErrorKind::NotPure, "T1 and T1' must be pure row contractions");
    const DefectMaps maps = intertwining_isometry(triple, tol);
    const ColligationShape& s = col.shape;
    if (s.n1 != maps.shape.n1 || s.n2 != maps.shape.n2 || s.e1() != maps.shape.e1() || s.e1p() != maps.shape.e1p() ||
        s.e2() != maps.shape.e2())
        fail(ErrorKind::ShapeMismatch, "colligation was built for a different triple");
    if (space.generators() != s.n1) fail(ErrorKind::ShapeMismatch, "Fock space generators differ from n1");

    IntertwiningDilationReport out;
    out.max_len = len;
    const Matrix k1 = poisson_blocks(triple.t1, 1.0, space, maps.coords1);
    const Matrix k1p = poisson_blocks(triple.t1p, 1.0, space, maps.coords1p);
    const double tail1 = std::sqrt(p1.tail(static_cast<std::size_t>(len) + 1));
    const double tail1p = std::sqrt(p1p.tail(static_cast<std::size_t>(len) + 1));
    for (int i = 0; i < s.n1; ++i) {
        const Word g{i + 1};
        out.first = std::max(out.first, operator_norm(k1 * triple.t1[static_cast<std::size_t>(i)].adjoint() -
                                                      creation_adjoint_apply(Side::Left, g, space, k1, s.e1())));
        out.second = std::max(out.second, operator_norm(k1p * triple.t1p[static_cast<std::size_t>(i)].adjoint() -
                                                        creation_adjoint_apply(Side::Left, g, space, k1p, s.e1p())));
    }
    out.first_bound = tail1;
    out.second_bound = tail1p;

    const MultiAnalyticOp phi = transfer_series_fock(col, space);
    const Matrix lifted = phi.apply_adjoint(Side::Right, space, k1);
    const Eigen::Index in = phi.in_dim;
    for (int j = 0; j < s.n2; ++j) {
        Matrix part(space.dim() * s.e1p(), lifted.cols());
        for (Eigen::Index w = 0; w < space.dim(); ++w)
            part.middleRows(w * s.e1p(), s.e1p()) = lifted.middleRows(w * in + j * s.e1p(), s.e1p());
        out.symbol = std::max(out.symbol, operator_norm(k1p * triple.t2[static_cast<std::size_t>(j)].adjoint() - part));
    }
    out.symbol_bound = tail1;

    const Matrix top = maps.y.topRows(s.n2 * s.e1p());
    const Matrix sum = defect_series_partial_sum(col, triple.t1, maps.coords1, len);
    out.series = operator_norm(top - col.a * maps.coords1 - col.b * sum);
    out.series_bound = operator_norm(col.b) * std::sqrt(p1.tail(static_cast<std::size_t>(len) + 2));
    return out;
}

}  // namespace ando
