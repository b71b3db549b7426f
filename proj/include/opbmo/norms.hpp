#pragma once

#include <optional>
#include <string>

#include "opbmo/operators.hpp"

namespace opbmo {

/// Location and directions attaining (or certifying) a reported norm value.
/// Sup-type norms always carry the attaining interval; e and f are unit
/// vectors where the inner maximization is relevant.
struct Witness {
    std::optional<DyadicIndex> interval;
    std::optional<Vec> e;
    std::optional<Vec> f;
};

struct NormReport {
    std::string kind;
    double value = 0.0;
    bool exact = true;  // false marks heuristic lower bounds
    Witness witness;
};

/// sup_I ( (1/|I|) integral over I of ||B - m_I B||_op^2 )^{1/2}.
NormReport bmo_norm(const HaarSymbol& B);

/// sup_I lambda_max( (1/|I|) integral over I of (B - m_I B)*(B - m_I B) )^{1/2}.
NormReport sbmo(const HaarSymbol& B);

/// sbmo(B) + sbmo(B*).
NormReport bmo_so(const HaarSymbol& B);

/// sup over I and unit e, f of the mixed form
/// ( (1/|I|) integral over I |<(B - m_I B) e, f>|^2 )^{1/2}, located by
/// alternating eigenvector ascent from several starts; a certified lower
/// bound, not exact.
NormReport wbmo(const HaarSymbol& B);

/// Operator norm of Lambda_B.
NormReport bmo_mult(const HaarSymbol& B);

/// Operator norm of pi_B.
NormReport bmo_para(const HaarSymbol& B);

/// sup_I lambda_max( (1/|I|) sum_{J inside I} B_J* B_J ); note the value is
/// on the squared scale, equal to sbmo(B)^2.
NormReport gram_sbmo(const HaarSymbol& B);

/// Re-evaluates the quantity a witness claims for the given sup-type kind.
double witness_value(const std::string& kind, const HaarSymbol& B, const Witness& w);

std::vector<NormReport> all_norms(const HaarSymbol& B);

}  // namespace opbmo
