// SPDX-License-Identifier: Apache-2.0
#include "gapclock/instance.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gapclock {

namespace {

constexpr double kPmfSumTol = 1e-12;

std::string fmt_drift_violation(int paper_j) {
    std::ostringstream os;
    os << "drift bound at j=" << paper_j;
    return os.str();
}

}  // namespace

const char* law_kind_name(LawKind kind) {
    switch (kind) {
        case LawKind::Geometric: return "geometric";
        case LawKind::Exponential: return "exponential";
        case LawKind::NegBinomial: return "negbinomial";
        case LawKind::Gamma: return "gamma";
        case LawKind::Deterministic: return "deterministic";
    }
    return "?";
}

std::string ValidationReport::joined() const {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v;
    }
    return out;
}

bool drift_within_bounds(const StateGrid& grid, const Vec& drift) {
    const int M = grid.size();
    for (int j = 1; j + 1 < M; ++j) {
        const double b = drift[j - 1];
        if (!(b > -1.0 / grid.gap(j + 1) && b < 1.0 / grid.gap(j))) return false;
    }
    return true;
}

ValidationReport validate_instance(const Instance& inst) {
    ValidationReport rep;
    const int M = inst.grid.size();
    if (M < 3) {
        rep.violations.push_back("grid needs at least 3 states");
        return rep;
    }
    for (int j = 1; j < M; ++j) {
        if (!(inst.grid.gap(j) > 0.0)) {
            std::ostringstream os;
            os << "grid not strictly increasing at index " << j + 1;
            rep.violations.push_back(os.str());
        }
    }
    if (static_cast<int>(inst.probs.size()) != M) {
        rep.violations.push_back("pmf size does not match grid");
    } else {
        double sum = 0.0;
        for (int j = 0; j < M; ++j) {
            if (!(inst.probs[j] > 0.0)) {
                std::ostringstream os;
                os << "p_" << j + 1 << " not > 0";
                rep.violations.push_back(os.str());
            }
            sum += inst.probs[j];
        }
        if (std::abs(sum - 1.0) > kPmfSumTol) {
            std::ostringstream os;
            os << "pmf sums to " << sum << ", not 1 within 1e-12 (renormalization refused)";
            rep.violations.push_back(os.str());
        }
    }
    if (static_cast<int>(inst.drift.size()) != M - 2) {
        rep.violations.push_back("drift size must be M-2 (interior states only)");
    } else {
        for (int j = 1; j + 1 < M; ++j) {
            const double b = inst.drift[j - 1];
            if (!(b > -1.0 / inst.grid.gap(j + 1) && b < 1.0 / inst.grid.gap(j))) {
                rep.violations.push_back(fmt_drift_violation(j + 1));
            }
        }
    }
    if (static_cast<int>(inst.killing.size()) != M - 2) {
        rep.violations.push_back("killing size must be M-2 (interior states only)");
    } else {
        for (int j = 1; j + 1 < M; ++j) {
            if (!(inst.killing[j - 1] >= 0.0)) {
                std::ostringstream os;
                os << "k_" << j + 1 << " negative";
                rep.violations.push_back(os.str());
            }
        }
    }
    if (!(inst.law.t > 0.0)) rep.violations.push_back("horizon t must be > 0");
    if (inst.law.kind == LawKind::NegBinomial || inst.law.kind == LawKind::Gamma) {
        if (inst.law.r < 1) rep.violations.push_back("law stage count r must be >= 1");
    }
    if (inst.law.kind == LawKind::Geometric || inst.law.kind == LawKind::NegBinomial) {
        if (inst.law.h < 0.0) rep.violations.push_back("law step h must be >= 0");
    }
    return rep;
}

JumpProbs jump_probs(const StateGrid& grid, const Vec& drift) {
    const int M = grid.size();
    if (static_cast<int>(drift.size()) != M - 2)
        throw std::invalid_argument("jump_probs: drift must have size M-2");
    JumpProbs q{Vec(M, 0.0), Vec(M, 0.0)};
    for (int j = 1; j + 1 < M; ++j) {
        const double lo = grid.gap(j), hi = grid.gap(j + 1);
        const double b = drift[j - 1];
        if (!(b > -1.0 / hi && b < 1.0 / lo))
            throw std::invalid_argument("jump_probs: " + fmt_drift_violation(j + 1));
        q.up[j] = lo / (lo + hi) * (1.0 + hi * b);
        q.down[j] = hi / (lo + hi) * (1.0 - lo * b);
    }
    return q;
}

Vec ktilde(const StateGrid& grid, const Vec& killing) {
    const int M = grid.size();
    if (static_cast<int>(killing.size()) != M - 2)
        throw std::invalid_argument("ktilde: killing must have size M-2");
    Vec kt(M, 0.0);
    for (int j = 1; j + 1 < M; ++j) {
        if (!(killing[j - 1] >= 0.0))
            throw std::invalid_argument("ktilde: negative killing at interior index " +
                                        std::to_string(j + 1));
        kt[j] = grid.gap(j + 1) * grid.gap(j) * killing[j - 1];
    }
    return kt;
}

Vec full_drift(const Instance& inst) {
    Vec b(inst.size(), 0.0);
    for (int j = 1; j + 1 < inst.size(); ++j) b[j] = inst.drift[j - 1];
    return b;
}

Vec full_lambda(int M, const Vec& interior) {
    if (static_cast<int>(interior.size()) != M - 2)
        throw std::invalid_argument("full_lambda: interior vector must have size M-2");
    Vec lam(M, 0.0);
    for (int j = 1; j + 1 < M; ++j) lam[j] = interior[j - 1];
    return lam;
}

}  // namespace gapclock
