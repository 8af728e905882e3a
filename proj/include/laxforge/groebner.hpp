#pragma once

#include <gmpxx.h>

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace laxforge {

/// Canonical exact rational (positive denominator, reduced).
using Rational = mpq_class;

enum class MonomialOrder { Lex, GrevLex };

inline constexpr std::size_t kMaxVars = 16;
using Exponents = std::array<std::uint16_t, kMaxVars>;

/// Ordered variable names plus the monomial order used to sort terms. The
/// first variable is the largest.
class Ring {
public:
    Ring(std::vector<std::string> names, MonomialOrder order);

    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t size() const noexcept { return names_.size(); }
    MonomialOrder order() const noexcept { return order_; }
    std::size_t index_of(std::string_view name) const;

    /// Strict "a comes after b" in the order, i.e. a > b.
    bool greater(const Exponents& a, const Exponents& b) const;
    bool same_as(const Ring& o) const { return order_ == o.order_ && names_ == o.names_; }

private:
    std::vector<std::string> names_;
    MonomialOrder order_;
};

using RingPtr = std::shared_ptr<const Ring>;

RingPtr make_ring(std::vector<std::string> names, MonomialOrder order = MonomialOrder::Lex);

struct Term {
    Exponents exp{};
    Rational coeff;
};

/// Sparse polynomial with terms sorted descending in the ring order and no
/// zero coefficients.
class MultiPoly {
public:
    explicit MultiPoly(RingPtr ring);
    MultiPoly(RingPtr ring, const Rational& c);

    static MultiPoly variable(RingPtr ring, std::string_view name);
    static MultiPoly variable(RingPtr ring, std::size_t index);
    static MultiPoly monomial(RingPtr ring, const Exponents& exp, const Rational& c);
    /// Any term list; sorted, merged and cleaned of zeros here.
    static MultiPoly from_terms(RingPtr ring, std::vector<Term> terms);

    const RingPtr& ring() const noexcept { return ring_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_constant() const;
    std::size_t size() const noexcept { return terms_.size(); }

    const Term& leading_term() const;
    /// Leading term under another order on the same variables.
    Term leading_term(MonomialOrder order) const;
    unsigned total_degree() const;
    /// Highest exponent of variable `index` over all terms.
    unsigned degree_in(std::size_t index) const;
    bool uses_only(std::span<const std::size_t> indices) const;

    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator-=(const MultiPoly& o);
    MultiPoly& operator*=(const Rational& c);
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator-(MultiPoly a) { return a *= Rational(-1); }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator*(MultiPoly a, const Rational& c) { return a *= c; }
    friend MultiPoly operator*(const Rational& c, MultiPoly a) { return a *= c; }
    friend bool operator==(const MultiPoly& a, const MultiPoly& b);

    MultiPoly pow(unsigned e) const;
    MultiPoly substitute(std::size_t index, const MultiPoly& value) const;
    MultiPoly substitute(std::size_t index, const Rational& value) const;
    MultiPoly substitute(std::string_view name, const MultiPoly& value) const;
    MultiPoly substitute(std::string_view name, const Rational& value) const;
    /// Same polynomial in another ring whose variables include all used ones.
    MultiPoly moved_to(RingPtr other) const;
    MultiPoly monic() const;

    std::complex<double> evaluate(std::span<const std::complex<double>> values) const;

    /// "c * x1^e1 x2 ..." terms joined with + / −, descending in the ring order.
    std::string to_string() const;

private:
    void require_same_ring(const MultiPoly& o) const;
    void normalize();

    RingPtr ring_;
    std::vector<Term> terms_;
};

/// Counters shared across one computation; exceeding either throws ResourceExceeded.
struct Budget {
    std::size_t max_pairs = 200000;
    std::size_t max_term_ops = 10000000;
    std::size_t pairs = 0;
    std::size_t term_ops = 0;
};

MultiPoly s_polynomial(const MultiPoly& f, const MultiPoly& g);

/// Normal form of f by multivariate division against `basis`.
MultiPoly reduce(const MultiPoly& f, std::span<const MultiPoly> basis, Budget* budget = nullptr);

struct GroebnerResult {
    std::vector<MultiPoly> basis;  // reduced, monic, descending by leading monomial
    std::size_t pairs_processed = 0;
    std::size_t term_ops = 0;
    bool verified = false;  // every S-polynomial of the output reduces to zero
};

/// Buchberger with the product and chain criteria and the normal selection
/// strategy. Generators are moved to a ring with `order` if it differs.
GroebnerResult buchberger(std::span<const MultiPoly> generators, MonomialOrder order = MonomialOrder::Lex,
                          Budget budget = {});

bool is_groebner_basis(std::span<const MultiPoly> basis);

bool ideal_member(const MultiPoly& f, std::span<const MultiPoly> groebner_basis);

// ---- the 2×2 ansatz L̇ = [B, L] for ẋ = J·P·x ----

struct AnsatzSystem {
    RingPtr ring;  // b1..b4, a1..a4, y1..y4 (then p1..p4 when symbolic)
    std::vector<MultiPoly> equations;
    bool symmetric = false;
};

/// Equations with P = [[p1,p2],[p3,p4]] as rational constants. Throws
/// PreconditionViolation when symmetric and p3 ≠ p2.
AnsatzSystem build_ansatz_system(const std::array<Rational, 4>& p, bool symmetric,
                                 MonomialOrder order = MonomialOrder::Lex);

/// Same with p1..p4 as ring variables (p3 replaced by p2 when symmetric).
AnsatzSystem build_symbolic_ansatz_system(bool symmetric);

/// The 12-term element in y3, y4 with the given p values, in `ring`.
MultiPoly displayed_basis_element(const RingPtr& ring, const std::array<Rational, 4>& p);

struct GeneralSolutionReport {
    std::array<Rational, 4> a;
    std::array<Rational, 4> b;
    std::array<Rational, 8> residuals;
    bool equations_vanish = false;
    bool q_matches = false;
    bool trace_identity = false;  // Tr(L²) = 4(y2y3 − y1y4)²H / den in ℚ[x1, x2]
    bool ok() const { return equations_vanish && q_matches && trace_identity; }
};

/// Symmetric P = [[p1,p2],[p2,p4]]; throws DenominatorZero when
/// y2(p1y2 − 2p2y1) + p4y1² = 0 or y2y3 − y1y4 = 0.
GeneralSolutionReport verify_general_solution(const Rational& p1, const Rational& p2, const Rational& p4,
                                              const Rational& b4, const std::array<Rational, 4>& y);

/// The closed forms as rational functions: with u, v standing for the two
/// inverse denominators, every equation lies in (u·den − 1, v·(y2y3 − y1y4) − 1).
bool general_solution_identity();

struct DenominatorIdentities {
    bool quadratic_form = false;  // y2(p1y2 − 2p2y1) + p4y1² = (y1,y2)JᵀPJ(y1,y2)ᵀ
    bool cross_form = false;      // y2y3 − y1y4 = (y1,y2)Jᵀ(y3,y4)ᵀ
};

DenominatorIdentities denominator_identities();

struct MembershipReport {
    bool member = false;
    std::size_t basis_size = 0;
    std::size_t pairs_processed = 0;
    std::size_t term_ops = 0;
    MultiPoly element;
    MultiPoly remainder;
    bool has_y3_y4_element = false;  // the basis has a nonzero element in y3, y4 only
};

MembershipReport basis_element_membership(const std::array<Rational, 4>& p, Budget budget = {});

struct DegenerateReport {
    bool l_squared_zero = false;
    bool trace_square_zero = false;
    bool consistent = false;          // ansatz with this L has a solution B
    std::vector<std::string> b_basis;  // Gröbner basis in b1..b4, i (with i² + 1)
    std::array<std::string, 4> particular_b;  // b3 = b4 = 0, over ℚ(i)
    bool particular_solves = false;
    bool ok() const { return l_squared_zero && trace_square_zero && consistent && particular_solves; }
};

/// P = [[p1,p2],[−p2,p1]] and L = [[ix1 − x2, (x2 − ix1)y2], [(ix1 − x2)/y2, x2 − ix1]].
DegenerateReport degenerate_family_check(const Rational& p1, const Rational& p2, const Rational& y2);

}  // namespace laxforge
