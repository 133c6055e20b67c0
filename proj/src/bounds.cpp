#include "ando/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "ando/model_space.hpp"
#include "ando/parallel.hpp"

namespace ando {

namespace {

// Singular values of Q1* Q2 at or above this count toward the joint eigenspace dimension.
constexpr double kPrincipalCosine = 1.0 - 1e-8;

void worst_of(DilationCertificates& acc, const DilationCertificates& c) {
    acc.isometry = std::max(acc.isometry, c.isometry);
    acc.first = std::max(acc.first, c.first);
    acc.second = std::max(acc.second, c.second);
    acc.commutation = std::max(acc.commutation, c.commutation);
    acc.symbol_norm = std::max(acc.symbol_norm, c.symbol_norm);
    acc.unitarity = std::max(acc.unitarity, c.unitarity);
    acc.restriction = std::max(acc.restriction, c.restriction);
}

Matrix model_shift(const Matrix& t, const Tolerances& tol, bool& ill) {
    const ModelSpace ms = build_model_space(minimal_polynomial(t, tol).blaschke, tol);
    ill = ill || ms.ill_conditioned;
    return ms.shift;
}

}  // namespace

Am3Engine::Am3Engine(const CommutingPair& pair, int samples, std::uint64_t seed, const Tolerances& tol, bool parallel)
    : tol_(tol) {
    if (samples < 0) fail(ErrorKind::InvalidInput, "sample count must be nonnegative");
    const AndoDilationFactory factory(pair, tol);
    ill_conditioned_ = factory.model().ill_conditioned;
    const int total = samples + 1;
    dilations_.resize(static_cast<std::size_t>(total));
    auto build = [&](int s) {
        const ExtensionSpec spec =
            s == 0 ? ExtensionSpec::canonical() : ExtensionSpec::sampled(seed + static_cast<std::uint64_t>(s - 1));
        dilations_[static_cast<std::size_t>(s)] = factory.make(spec);
    };
    if (!parallel) {
        for (int s = 0; s < total; ++s) build(s);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic) num_threads(worker_threads())
    for (int s = 0; s < total; ++s) {
        try {
            build(s);
        } catch (...) {
            errors[static_cast<std::size_t>(s)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

Am3Bound Am3Engine::evaluate(const BivariatePolyMatrix& p) const {
    Am3Bound out;
    out.ill_conditioned = ill_conditioned_;
    out.value = std::numeric_limits<double>::infinity();
    for (const AndoDilation& d : dilations_) {
        const double v = operator_norm(eval_bivariate(p, d.v1, d.v2, tol_));
        const ExtensionSpec& spec = d.colligation.spec;
        out.extensions.push_back({spec.label(), spec.seed, v});
        out.value = std::min(out.value, v);
        worst_of(out.worst, d.certificates);
    }
    return out;
}

Am3Bound bound_am3(const CommutingPair& pair, const BivariatePolyMatrix& p, int samples, std::uint64_t seed,
                   const Tolerances& tol) {
    return Am3Engine(pair, samples, seed, tol, true).evaluate(p);
}

Am3Bound bound_am3_serial(const CommutingPair& pair, const BivariatePolyMatrix& p, int samples, std::uint64_t seed,
                          const Tolerances& tol) {
    return Am3Engine(pair, samples, seed, tol, false).evaluate(p);
}

BothOrders bound_min_both_orders(const CommutingPair& pair, const BivariatePolyMatrix& p, int samples,
                                 std::uint64_t seed, const Tolerances& tol) {
    BothOrders out;
    out.order12 = bound_am3(pair, p, samples, seed, tol);
    out.order21 = bound_am3(pair.swapped(), p.swapped(), samples, seed, tol);
    out.value = std::min(out.order12.value, out.order21.value);
    return out;
}

std::vector<Eigenspace> unitary_eigenspaces(const Matrix& u, const Tolerances& tol) {
    if (u.rows() != u.cols()) fail(ErrorKind::ShapeMismatch, "unitary_eigenspaces needs a square matrix");
    const Eigen::Index n = u.rows();
    std::vector<Eigenspace> out;
    if (n == 0) return out;
    if (operator_norm(u.adjoint() * u - identity(n)) > tol.residual_tol)
        fail(ErrorKind::MarginViolation, "matrix is not unitary");
    const Schur s = schur(u);
    std::vector<Complex> diag(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = s.t(i, i);
    for (const Cluster& c : cluster_values(diag, 1e-7)) {
        Matrix basis(n, static_cast<Eigen::Index>(c.members.size()));
        for (std::size_t k = 0; k < c.members.size(); ++k) basis.col(static_cast<Eigen::Index>(k)) = s.q.col(c.members[k]);
        out.push_back({c.center / std::abs(c.center), basis});
    }
    return out;
}

UnitaryPureEngine::UnitaryPureEngine(const CommutingPair& pair, const Tolerances& tol) : tol_(tol) {
    if (pair.t1.size() != 1 || pair.t2.size() != 1) fail(ErrorKind::InvalidInput, "needs single matrices");
    const Matrix& t1 = pair.t1[0];
    const Matrix& t2 = pair.t2[0];
    const double scale = tol.residual_tol * (1.0 + operator_norm(t2));
    for (const Eigenspace& e : unitary_eigenspaces(t1, tol)) {
        const Matrix& q = e.basis;
        const Matrix block = q.adjoint() * t2 * q;
        if (operator_norm(t2 * q - q * block) > scale || operator_norm(t2.adjoint() * q - q * block.adjoint()) > scale)
            fail(ErrorKind::NotCommuting, "an eigenspace of T1 does not reduce T2");
        values_.push_back(e.value);
        fine_models_.push_back(model_shift(block, tol, ill_conditioned_));
    }
    coarse_model_ = model_shift(t2, tol, ill_conditioned_);
}

UnitaryPureBound UnitaryPureEngine::evaluate(const BivariatePolyMatrix& p) const {
    UnitaryPureBound out;
    out.ill_conditioned = ill_conditioned_;
    for (std::size_t k = 0; k < values_.size(); ++k) {
        const Complex lam = values_[k];
        const Matrix& fine = fine_models_[k];
        out.fine = std::max(out.fine, operator_norm(eval_bivariate(p, lam * identity(fine.rows()), fine, tol_)));
        out.coarse = std::max(out.coarse, operator_norm(eval_bivariate(p, lam * identity(coarse_model_.rows()),
                                                                       coarse_model_, tol_)));
    }
    return out;
}

UnitaryPureBound bound_unitary_pure(const CommutingPair& pair, const BivariatePolyMatrix& p, const Tolerances& tol) {
    return UnitaryPureEngine(pair, tol).evaluate(p);
}

TwoUnitaryEngine::TwoUnitaryEngine(const CommutingPair& pair, const Tolerances& tol) {
    if (pair.t1.size() != 1 || pair.t2.size() != 1) fail(ErrorKind::InvalidInput, "needs single matrices");
    const std::vector<Eigenspace> e1 = unitary_eigenspaces(pair.t1[0], tol);
    const std::vector<Eigenspace> e2 = unitary_eigenspaces(pair.t2[0], tol);
    for (const Eigenspace& a : e1) {
        for (const Eigenspace& b : e2) {
            const std::vector<double> cosines = singular_values(a.basis.adjoint() * b.basis);
            if (!cosines.empty() && cosines.front() >= kPrincipalCosine) omega_.emplace_back(a.value, b.value);
        }
    }
}

TwoUnitaryBound TwoUnitaryEngine::evaluate(const BivariatePolyMatrix& p) const {
    TwoUnitaryBound out;
    out.omega = omega_;
    for (const auto& [lam, mu] : omega_) out.value = std::max(out.value, operator_norm(p.at_point(lam, mu)));
    return out;
}

TwoUnitaryBound bound_two_unitary_exact(const CommutingPair& pair, const BivariatePolyMatrix& p,
                                        const Tolerances& tol) {
    return TwoUnitaryEngine(pair, tol).evaluate(p);
}

GeneralEngine::GeneralEngine(const CommutingPair& pair, int samples, std::uint64_t seed, const Tolerances& tol) {
    const StructureDecomposition sd = structure_decomposition(pair, tol);
    for (std::size_t i = 0; i < 4; ++i) {
        if (sd.bases[i].cols() == 0) continue;
        const CommutingPair block = CommutingPair::single(sd.t1_blocks[i], sd.t2_blocks[i], tol);
        switch (i) {
            case 0: uu_.emplace(block, tol); break;
            case 1: uc_.emplace(block, tol); break;
            case 2: cu_.emplace(block.swapped(), tol); break;
            default:
                cc12_.emplace(block, samples, seed, tol);
                cc21_.emplace(block.swapped(), samples, seed, tol);
                break;
        }
    }
}

GeneralBound GeneralEngine::evaluate(const BivariatePolyMatrix& p) const {
    GeneralBound out;
    if (uu_) out.blocks[0] = uu_->evaluate(p).value;
    if (uc_) {
        const UnitaryPureBound b = uc_->evaluate(p);
        out.blocks[1] = b.fine;
        out.ill_conditioned = out.ill_conditioned || b.ill_conditioned;
    }
    if (cu_) {
        const UnitaryPureBound b = cu_->evaluate(p.swapped());
        out.blocks[2] = b.fine;
        out.ill_conditioned = out.ill_conditioned || b.ill_conditioned;
    }
    if (cc12_) {
        const Am3Bound a = cc12_->evaluate(p);
        const Am3Bound b = cc21_->evaluate(p.swapped());
        out.blocks[3] = std::min(a.value, b.value);
        out.ill_conditioned = out.ill_conditioned || a.ill_conditioned || b.ill_conditioned;
    }
    for (const auto& b : out.blocks)
        if (b) out.value = std::max(out.value, *b);
    return out;
}

GeneralBound bound_general(const CommutingPair& pair, const BivariatePolyMatrix& p, int samples, std::uint64_t seed,
                           const Tolerances& tol) {
    return GeneralEngine(pair, samples, seed, tol).evaluate(p);
}

std::string to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Pass: return "pass";
        case VerdictStatus::Fail: return "fail";
        case VerdictStatus::Advisory: return "advisory";
    }
    return "fail";
}

bool BoundReport::ill_conditioned() const {
    return (am3_order12 && am3_order12->ill_conditioned) || (am3_order21 && am3_order21->ill_conditioned) ||
           (unitary_pure && unitary_pure->ill_conditioned) ||
           (general_composite && general_composite->ill_conditioned);
}

bool BoundReport::passed() const {
    return std::none_of(verdicts.begin(), verdicts.end(),
                        [](const Verdict& v) { return v.status == VerdictStatus::Fail; });
}

std::vector<Verdict> chain_verdicts(const BoundReport& r, double chain_tol) {
    std::vector<Verdict> out;
    auto add = [&](std::string name, double lhs, double rhs, double allowance, bool ill) {
        Verdict v{std::move(name), lhs, rhs, rhs + allowance - lhs, VerdictStatus::Pass};
        if (ill) {
            v.status = VerdictStatus::Advisory;
        } else if (!(v.margin >= 0.0)) {
            v.status = VerdictStatus::Fail;
        }
        out.push_back(std::move(v));
    };
    struct Named {
        std::string name;
        double value;
        bool ill;
    };
    std::vector<Named> bounds;
    if (r.am3_order12) bounds.push_back({"am3_order12", r.am3_order12->value, r.am3_order12->ill_conditioned});
    if (r.am3_order21) bounds.push_back({"am3_order21", r.am3_order21->value, r.am3_order21->ill_conditioned});
    if (r.min_sampled_extensions) {
        const bool ill = (r.am3_order12 && r.am3_order12->ill_conditioned) ||
                         (r.am3_order21 && r.am3_order21->ill_conditioned);
        bounds.push_back({"min_sampled_extensions", *r.min_sampled_extensions, ill});
    }
    if (r.unitary_pure) {
        bounds.push_back({"unitary_pure", r.unitary_pure->fine, r.unitary_pure->ill_conditioned});
        bounds.push_back({"unitary_pure_coarse", r.unitary_pure->coarse, r.unitary_pure->ill_conditioned});
    }
    if (r.two_unitary_exact) bounds.push_back({"two_unitary_exact", r.two_unitary_exact->value, false});
    if (r.general_composite)
        bounds.push_back({"general_composite", r.general_composite->value, r.general_composite->ill_conditioned});

    for (const Named& b : bounds) add("direct_norm <= " + b.name, r.direct_norm, b.value, chain_tol, b.ill);
    for (const Named& b : bounds) add(b.name + " <= torus_hi", b.value, r.torus.hi, chain_tol, b.ill);
    if (r.unitary_pure)
        add("unitary_pure <= unitary_pure_coarse", r.unitary_pure->fine, r.unitary_pure->coarse, chain_tol,
            r.unitary_pure->ill_conditioned);
    if (r.two_unitary_exact)
        add("two_unitary_exact == direct_norm", std::abs(r.two_unitary_exact->value - r.direct_norm), 0.0,
            1e-10 * std::max(1.0, r.direct_norm), false);
    add("direct_norm <= torus_hi", r.direct_norm, r.torus.hi, chain_tol, false);
    add("torus_lo <= torus_hi", r.torus.lo, r.torus.hi, 0.0, false);
    return out;
}

PairAnalysis::PairAnalysis(const CommutingPair& pair, const BoundConfig& config) : pair_(pair), config_(config) {
    if (pair.t1.size() != 1 || pair.t2.size() != 1) fail(ErrorKind::InvalidInput, "bounds need single matrices");
    auto attempt = [&](const std::string& name, auto&& fn) {
        try {
            fn();
            certified_.push_back(name);
        } catch (const Error& e) {
            skipped_.push_back(name + ": " + e.what());
        }
    };
    const int ext = config.extensions;
    const std::uint64_t seed = config.seed;
    const Tolerances& tol = config.tol;
    attempt("am3_order12", [&] { am3_12_.emplace(pair, ext, seed, tol); });
    attempt("am3_order21", [&] { am3_21_.emplace(pair.swapped(), ext, seed, tol); });
    attempt("unitary_pure", [&] { unitary_pure_.emplace(pair, tol); });
    attempt("two_unitary_exact", [&] { two_unitary_.emplace(pair, tol); });
    attempt("general_composite", [&] { general_.emplace(pair, ext, seed, tol); });
}

BoundReport PairAnalysis::report(const BivariatePolyMatrix& p) const {
    BoundReport r;
    const Tolerances& tol = config_.tol;
    r.direct_norm = operator_norm(eval_bivariate(p, pair_.t1[0], pair_.t2[0], tol));
    if (am3_12_) r.am3_order12 = am3_12_->evaluate(p);
    if (am3_21_) r.am3_order21 = am3_21_->evaluate(p.swapped());
    if (r.am3_order12 || r.am3_order21) {
        double m = std::numeric_limits<double>::infinity();
        if (r.am3_order12) m = std::min(m, r.am3_order12->value);
        if (r.am3_order21) m = std::min(m, r.am3_order21->value);
        r.min_sampled_extensions = m;
    }
    r.sample_count = config_.extensions;
    for (int s = 0; s < config_.extensions; ++s) r.seeds.push_back(config_.seed + static_cast<std::uint64_t>(s));
    if (unitary_pure_) r.unitary_pure = unitary_pure_->evaluate(p);
    if (two_unitary_) r.two_unitary_exact = two_unitary_->evaluate(p);
    if (general_) r.general_composite = general_->evaluate(p);
    const int grid = std::max(config_.grid, 4 * (p.total_degree() + 1));
    r.torus = torus_sup_norm(p, grid);
    r.certified = certified_;
    r.skipped = skipped_;
    r.verdicts = chain_verdicts(r, config_.chain_tol);
    return r;
}

BoundReport verify_chain(const CommutingPair& pair, const BivariatePolyMatrix& p, const BoundConfig& config) {
    return PairAnalysis(pair, config).report(p);
}

}  // namespace ando
