#include "laxforge/groebner.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "laxforge/error.hpp"

namespace laxforge {

namespace {

bool divides(const Exponents& a, const Exponents& b) {
    for (std::size_t i = 0; i < kMaxVars; ++i)
        if (a[i] > b[i]) return false;
    return true;
}

Exponents mul_exp(const Exponents& a, const Exponents& b) {
    Exponents r{};
    for (std::size_t i = 0; i < kMaxVars; ++i) r[i] = static_cast<std::uint16_t>(a[i] + b[i]);
    return r;
}

Exponents div_exp(const Exponents& a, const Exponents& b) {
    Exponents r{};
    for (std::size_t i = 0; i < kMaxVars; ++i) r[i] = static_cast<std::uint16_t>(a[i] - b[i]);
    return r;
}

Exponents lcm_exp(const Exponents& a, const Exponents& b) {
    Exponents r{};
    for (std::size_t i = 0; i < kMaxVars; ++i) r[i] = std::max(a[i], b[i]);
    return r;
}

bool coprime(const Exponents& a, const Exponents& b) {
    for (std::size_t i = 0; i < kMaxVars; ++i)
        if (a[i] && b[i]) return false;
    return true;
}

Rational canonical(const Rational& c) {
    Rational r = c;
    r.canonicalize();
    return r;
}

unsigned degree(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0u); }

void charge(Budget* budget, std::size_t ops) {
    if (!budget) return;
    budget->term_ops += ops;
    if (budget->term_ops > budget->max_term_ops) {
        throw Error(ErrorKind::ResourceExceeded,
                    "term operation budget of " + std::to_string(budget->max_term_ops) + " exceeded");
    }
}

// f − c·x^shift·g on sorted term lists.
std::vector<Term> sub_scaled(const Ring& ring, const std::vector<Term>& f, const Rational& c, const Exponents& shift,
                             const std::vector<Term>& g) {
    std::vector<Term> out;
    out.reserve(f.size() + g.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < f.size() || j < g.size()) {
        if (j == g.size()) {
            out.push_back(f[i++]);
            continue;
        }
        const Exponents ge = mul_exp(g[j].exp, shift);
        if (i == f.size() || ring.greater(ge, f[i].exp)) {
            out.push_back({ge, -c * g[j].coeff});
            ++j;
        } else if (ring.greater(f[i].exp, ge)) {
            out.push_back(f[i++]);
        } else {
            Rational v = f[i].coeff - c * g[j].coeff;
            if (sgn(v) != 0) out.push_back({ge, std::move(v)});
            ++i;
            ++j;
        }
    }
    return out;
}

}  // namespace

// ---- Ring ----

Ring::Ring(std::vector<std::string> names, MonomialOrder order) : names_(std::move(names)), order_(order) {
    if (names_.size() > kMaxVars) {
        throw Error(ErrorKind::PreconditionViolation,
                    "at most " + std::to_string(kMaxVars) + " variables, got " + std::to_string(names_.size()));
    }
    for (std::size_t i = 0; i < names_.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (names_[i] == names_[j]) throw Error(ErrorKind::PreconditionViolation, "duplicate variable " + names_[i]);
}

std::size_t Ring::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    throw Error(ErrorKind::RingMismatch, "no variable named " + std::string(name));
}

bool Ring::greater(const Exponents& a, const Exponents& b) const {
    if (order_ == MonomialOrder::Lex) return a > b;
    const unsigned da = degree(a);
    const unsigned db = degree(b);
    if (da != db) return da > db;
    for (std::size_t i = kMaxVars; i-- > 0;)
        if (a[i] != b[i]) return a[i] < b[i];
    return false;
}

RingPtr make_ring(std::vector<std::string> names, MonomialOrder order) {
    return std::make_shared<const Ring>(std::move(names), order);
}

// ---- MultiPoly ----

MultiPoly::MultiPoly(RingPtr ring) : ring_(std::move(ring)) {}

MultiPoly::MultiPoly(RingPtr ring, const Rational& c) : ring_(std::move(ring)) {
    if (sgn(c) != 0) terms_.push_back({Exponents{}, canonical(c)});
}

MultiPoly MultiPoly::variable(RingPtr ring, std::string_view name) {
    const std::size_t i = ring->index_of(name);
    return variable(std::move(ring), i);
}

MultiPoly MultiPoly::variable(RingPtr ring, std::size_t index) {
    if (index >= ring->size()) throw Error(ErrorKind::RingMismatch, "variable index out of range");
    Exponents e{};
    e[index] = 1;
    return monomial(std::move(ring), e, Rational(1));
}

MultiPoly MultiPoly::monomial(RingPtr ring, const Exponents& exp, const Rational& c) {
    MultiPoly p(std::move(ring));
    if (sgn(c) != 0) p.terms_.push_back({exp, canonical(c)});
    return p;
}

MultiPoly MultiPoly::from_terms(RingPtr ring, std::vector<Term> terms) {
    MultiPoly p(std::move(ring));
    p.terms_ = std::move(terms);
    for (auto& t : p.terms_) t.coeff.canonicalize();
    p.normalize();
    return p;
}

bool MultiPoly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && degree(terms_[0].exp) == 0); }

const Term& MultiPoly::leading_term() const {
    if (terms_.empty()) throw Error(ErrorKind::PreconditionViolation, "zero polynomial has no leading term");
    return terms_.front();
}

Term MultiPoly::leading_term(MonomialOrder order) const {
    if (order == ring_->order()) return leading_term();
    if (terms_.empty()) throw Error(ErrorKind::PreconditionViolation, "zero polynomial has no leading term");
    const Ring other(ring_->names(), order);
    const Term* best = &terms_.front();
    for (const auto& t : terms_)
        if (other.greater(t.exp, best->exp)) best = &t;
    return *best;
}

unsigned MultiPoly::total_degree() const {
    unsigned d = 0;
    for (const auto& t : terms_) d = std::max(d, degree(t.exp));
    return d;
}

unsigned MultiPoly::degree_in(std::size_t index) const {
    unsigned d = 0;
    for (const auto& t : terms_) d = std::max<unsigned>(d, t.exp.at(index));
    return d;
}

bool MultiPoly::uses_only(std::span<const std::size_t> indices) const {
    for (const auto& t : terms_)
        for (std::size_t i = 0; i < kMaxVars; ++i)
            if (t.exp[i] && std::find(indices.begin(), indices.end(), i) == indices.end()) return false;
    return true;
}

void MultiPoly::require_same_ring(const MultiPoly& o) const {
    if (ring_ != o.ring_ && !ring_->same_as(*o.ring_)) {
        throw Error(ErrorKind::RingMismatch, "polynomials belong to different rings");
    }
}

void MultiPoly::normalize() {
    const Ring& r = *ring_;
    std::sort(terms_.begin(), terms_.end(), [&r](const Term& a, const Term& b) { return r.greater(a.exp, b.exp); });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
        if (!out.empty() && out.back().exp == t.exp) {
            out.back().coeff += t.coeff;
        } else {
            if (!out.empty() && sgn(out.back().coeff) == 0) out.pop_back();
            out.push_back(std::move(t));
        }
    }
    if (!out.empty() && sgn(out.back().coeff) == 0) out.pop_back();
    terms_ = std::move(out);
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    require_same_ring(o);
    terms_ = sub_scaled(*ring_, terms_, Rational(-1), Exponents{}, o.terms_);
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
    require_same_ring(o);
    terms_ = sub_scaled(*ring_, terms_, Rational(1), Exponents{}, o.terms_);
    return *this;
}

MultiPoly& MultiPoly::operator*=(const Rational& c) {
    if (sgn(c) == 0) {
        terms_.clear();
        return *this;
    }
    const Rational k = canonical(c);
    for (auto& t : terms_) t.coeff *= k;
    return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.require_same_ring(b);
    MultiPoly out(a.ring_);
    for (const auto& t : a.terms_) out.terms_ = sub_scaled(*a.ring_, out.terms_, -t.coeff, t.exp, b.terms_);
    return out;
}

bool operator==(const MultiPoly& a, const MultiPoly& b) {
    a.require_same_ring(b);
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
        if (a.terms_[i].exp != b.terms_[i].exp || a.terms_[i].coeff != b.terms_[i].coeff) return false;
    return true;
}

MultiPoly MultiPoly::pow(unsigned e) const {
    MultiPoly r(ring_, Rational(1));
    for (unsigned k = 0; k < e; ++k) r = r * *this;
    return r;
}

MultiPoly MultiPoly::substitute(std::size_t index, const MultiPoly& value) const {
    require_same_ring(value);
    if (index >= ring_->size()) throw Error(ErrorKind::RingMismatch, "variable index out of range");
    std::vector<MultiPoly> powers{MultiPoly(ring_, Rational(1))};
    MultiPoly out(ring_);
    for (const auto& t : terms_) {
        const unsigned e = t.exp[index];
        while (powers.size() <= e) powers.push_back(powers.back() * value);
        Exponents rest = t.exp;
        rest[index] = 0;
        const auto& pw = powers[e].terms_;
        out.terms_.reserve(out.terms_.size() + pw.size());
        for (const auto& u : pw) out.terms_.push_back({mul_exp(rest, u.exp), t.coeff * u.coeff});
    }
    out.normalize();
    return out;
}

MultiPoly MultiPoly::substitute(std::size_t index, const Rational& value) const {
    return substitute(index, MultiPoly(ring_, value));
}

MultiPoly MultiPoly::substitute(std::string_view name, const MultiPoly& value) const {
    return substitute(ring_->index_of(name), value);
}

MultiPoly MultiPoly::substitute(std::string_view name, const Rational& value) const {
    return substitute(ring_->index_of(name), value);
}

MultiPoly MultiPoly::moved_to(RingPtr other) const {
    std::vector<std::size_t> map(ring_->size());
    std::vector<bool> used(ring_->size(), false);
    for (const auto& t : terms_)
        for (std::size_t i = 0; i < ring_->size(); ++i) used[i] = used[i] || t.exp[i] != 0;
    for (std::size_t i = 0; i < ring_->size(); ++i)
        if (used[i]) map[i] = other->index_of(ring_->names()[i]);
    MultiPoly out(std::move(other));
    for (const auto& t : terms_) {
        Exponents e{};
        for (std::size_t i = 0; i < ring_->size(); ++i)
            if (t.exp[i]) e[map[i]] = t.exp[i];
        out.terms_.push_back({e, t.coeff});
    }
    out.normalize();
    return out;
}

MultiPoly MultiPoly::monic() const {
    if (terms_.empty()) return *this;
    MultiPoly r = *this;
    const Rational inv = 1 / terms_.front().coeff;
    for (auto& t : r.terms_) t.coeff *= inv;
    return r;
}

std::complex<double> MultiPoly::evaluate(std::span<const std::complex<double>> values) const {
    if (values.size() != ring_->size()) throw Error(ErrorKind::DimensionMismatch, "one value per ring variable needed");
    std::complex<double> acc{};
    for (const auto& t : terms_) {
        std::complex<double> v = t.coeff.get_d();
        for (std::size_t i = 0; i < ring_->size(); ++i)
            for (unsigned k = 0; k < t.exp[i]; ++k) v *= values[i];
        acc += v;
    }
    return acc;
}

std::string MultiPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        const auto& t = terms_[k];
        Rational c = t.coeff;
        if (k > 0) {
            s += sgn(c) < 0 ? " - " : " + ";
            c = abs(c);
        }
        s += c.get_str();
        std::string mono;
        for (std::size_t i = 0; i < ring_->size(); ++i) {
            if (!t.exp[i]) continue;
            if (!mono.empty()) mono += ' ';
            mono += ring_->names()[i];
            if (t.exp[i] > 1) mono += "^" + std::to_string(t.exp[i]);
        }
        if (!mono.empty()) s += " * " + mono;
    }
    return s;
}

// ---- Gröbner machinery ----

MultiPoly s_polynomial(const MultiPoly& f, const MultiPoly& g) {
    if (f.ring() != g.ring() && !f.ring()->same_as(*g.ring())) {
        throw Error(ErrorKind::RingMismatch, "polynomials belong to different rings");
    }
    const Term& lf = f.leading_term();
    const Term& lg = g.leading_term();
    const Exponents l = lcm_exp(lf.exp, lg.exp);
    const MultiPoly a = MultiPoly::monomial(f.ring(), div_exp(l, lf.exp), 1 / lf.coeff) * f;
    const MultiPoly b = MultiPoly::monomial(f.ring(), div_exp(l, lg.exp), 1 / lg.coeff) * g;
    return a - b;
}

MultiPoly reduce(const MultiPoly& f, std::span<const MultiPoly> basis, Budget* budget) {
    for (const auto& g : basis)
        if (g.ring() != f.ring() && !g.ring()->same_as(*f.ring())) {
            throw Error(ErrorKind::RingMismatch, "basis and polynomial belong to different rings");
        }
    const Ring& ring = *f.ring();
    std::vector<Term> rest = f.terms();
    std::vector<Term> remainder;
    while (!rest.empty()) {
        const Term& lt = rest.front();
        const MultiPoly* divisor = nullptr;
        for (const auto& g : basis)
            if (!g.is_zero() && divides(g.leading_term().exp, lt.exp)) {
                divisor = &g;
                break;
            }
        if (!divisor) {
            remainder.push_back(lt);
            rest.erase(rest.begin());
            continue;
        }
        const Term& lg = divisor->leading_term();
        const Rational c = lt.coeff / lg.coeff;
        const Exponents shift = div_exp(lt.exp, lg.exp);
        charge(budget, divisor->size());
        rest = sub_scaled(ring, rest, c, shift, divisor->terms());
    }
    return MultiPoly::from_terms(f.ring(), std::move(remainder));
}

namespace {

struct CriticalPair {
    std::size_t i;
    std::size_t j;
    Exponents lcm;
};

std::vector<MultiPoly> reduced_form(std::vector<MultiPoly> g, Budget* budget) {
    // drop elements whose leading monomial is a multiple of another's
    std::vector<MultiPoly> minimal;
    for (std::size_t i = 0; i < g.size(); ++i) {
        bool redundant = false;
        for (std::size_t j = 0; j < g.size() && !redundant; ++j) {
            if (i == j) continue;
            const auto& ei = g[i].leading_term().exp;
            const auto& ej = g[j].leading_term().exp;
            if (divides(ej, ei) && (ei != ej || j < i)) redundant = true;
        }
        if (!redundant) minimal.push_back(g[i]);
    }
    for (std::size_t i = 0; i < minimal.size(); ++i) {
        std::vector<MultiPoly> others;
        for (std::size_t j = 0; j < minimal.size(); ++j)
            if (j != i) others.push_back(minimal[j]);
        minimal[i] = reduce(minimal[i], others, budget).monic();
    }
    const Ring& ring = *minimal.front().ring();
    std::sort(minimal.begin(), minimal.end(), [&ring](const MultiPoly& a, const MultiPoly& b) {
        return ring.greater(a.leading_term().exp, b.leading_term().exp);
    });
    return minimal;
}

}  // namespace

GroebnerResult buchberger(std::span<const MultiPoly> generators, MonomialOrder order, Budget budget) {
    GroebnerResult result;
    if (generators.empty()) {
        result.verified = true;
        return result;
    }
    RingPtr ring = generators.front().ring();
    for (const auto& g : generators)
        if (g.ring() != ring && !g.ring()->same_as(*ring)) {
            throw Error(ErrorKind::RingMismatch, "generators belong to different rings");
        }
    if (ring->order() != order) ring = make_ring(ring->names(), order);

    std::vector<MultiPoly> g;
    for (const auto& f : generators) {
        MultiPoly h = f.ring() == ring ? f : f.moved_to(ring);
        if (!h.is_zero()) g.push_back(h.monic());
    }
    if (g.empty()) {
        result.verified = true;
        return result;
    }

    std::vector<CriticalPair> pending;
    std::vector<std::vector<bool>> in_pending;
    const auto add_element = [&](MultiPoly h) {
        const std::size_t k = g.size();
        g.push_back(std::move(h));
        for (auto& row : in_pending) row.push_back(false);
        in_pending.emplace_back(g.size(), false);
        for (std::size_t i = 0; i < k; ++i) {
            pending.push_back({i, k, lcm_exp(g[i].leading_term().exp, g[k].leading_term().exp)});
            in_pending[i][k] = in_pending[k][i] = true;
        }
    };
    {
        std::vector<MultiPoly> start = std::move(g);
        g.clear();
        for (auto& f : start) add_element(std::move(f));
    }

    while (!pending.empty()) {
        // normal strategy: smallest lcm first
        auto best = pending.begin();
        for (auto it = pending.begin(); it != pending.end(); ++it)
            if (ring->greater(best->lcm, it->lcm)) best = it;
        const CriticalPair cp = *best;
        pending.erase(best);
        in_pending[cp.i][cp.j] = in_pending[cp.j][cp.i] = false;

        if (++budget.pairs > budget.max_pairs) {
            throw Error(ErrorKind::ResourceExceeded, "S-pair budget of " + std::to_string(budget.max_pairs) + " exceeded");
        }
        const Exponents& li = g[cp.i].leading_term().exp;
        const Exponents& lj = g[cp.j].leading_term().exp;
        if (coprime(li, lj)) continue;
        bool chain = false;
        for (std::size_t k = 0; k < g.size() && !chain; ++k) {
            if (k == cp.i || k == cp.j) continue;
            chain = !in_pending[cp.i][k] && !in_pending[cp.j][k] && divides(g[k].leading_term().exp, cp.lcm);
        }
        if (chain) continue;
        MultiPoly r = reduce(s_polynomial(g[cp.i], g[cp.j]), g, &budget);
        if (!r.is_zero()) add_element(r.monic());
    }

    result.basis = reduced_form(std::move(g), &budget);
    result.pairs_processed = budget.pairs;
    result.term_ops = budget.term_ops;
    result.verified = is_groebner_basis(result.basis);
    return result;
}

bool is_groebner_basis(std::span<const MultiPoly> basis) {
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i + 1; j < basis.size(); ++j)
            if (!reduce(s_polynomial(basis[i], basis[j]), basis).is_zero()) return false;
    return true;
}

bool ideal_member(const MultiPoly& f, std::span<const MultiPoly> groebner_basis) {
    return reduce(f, groebner_basis).is_zero();
}

// ---- ansatz ----

namespace {

using Mat2 = std::array<MultiPoly, 4>;  // row-major

Mat2 mul2(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

// Coefficients of x1 and x2 in L(ẋ) − [B, L(x)] for ẋ = J·P·x, where L has
// columns (a1 a2; a3 a4)x and (y1 y2; y3 y4)x.
std::vector<MultiPoly> ansatz_equations(const std::array<MultiPoly, 4>& p, const std::array<MultiPoly, 4>& a,
                                        const std::array<MultiPoly, 4>& y, const std::array<MultiPoly, 4>& b) {
    const Mat2 m{p[2], p[3], -p[0], -p[1]};
    const std::array<Mat2, 2> l{Mat2{a[0], y[0], a[2], y[2]}, Mat2{a[1], y[1], a[3], y[3]}};
    const Mat2 bm{b[0], b[1], b[2], b[3]};
    std::vector<MultiPoly> eqs;
    for (std::size_t k = 0; k < 2; ++k) {
        const Mat2 bl = mul2(bm, l[k]);
        const Mat2 lb = mul2(l[k], bm);
        for (std::size_t e = 0; e < 4; ++e) eqs.push_back(m[k] * l[0][e] + m[2 + k] * l[1][e] - (bl[e] - lb[e]));
    }
    return eqs;
}

std::vector<std::string> ansatz_names() {
    return {"b1", "b2", "b3", "b4", "a1", "a2", "a3", "a4", "y1", "y2", "y3", "y4"};
}

std::array<MultiPoly, 4> vars4(const RingPtr& ring, char prefix) {
    const std::string s(1, prefix);
    return {MultiPoly::variable(ring, s + "1"), MultiPoly::variable(ring, s + "2"), MultiPoly::variable(ring, s + "3"),
            MultiPoly::variable(ring, s + "4")};
}

std::array<MultiPoly, 4> consts4(const RingPtr& ring, const std::array<Rational, 4>& v) {
    return {MultiPoly(ring, v[0]), MultiPoly(ring, v[1]), MultiPoly(ring, v[2]), MultiPoly(ring, v[3])};
}

}  // namespace

AnsatzSystem build_ansatz_system(const std::array<Rational, 4>& p, bool symmetric, MonomialOrder order) {
    if (symmetric && p[2] != p[1]) {
        throw Error(ErrorKind::PreconditionViolation, "symmetric ansatz needs p3 = p2");
    }
    AnsatzSystem sys;
    sys.ring = make_ring(ansatz_names(), order);
    sys.symmetric = symmetric;
    sys.equations = ansatz_equations(consts4(sys.ring, p), vars4(sys.ring, 'a'), vars4(sys.ring, 'y'),
                                     vars4(sys.ring, 'b'));
    return sys;
}

AnsatzSystem build_symbolic_ansatz_system(bool symmetric) {
    auto names = ansatz_names();
    for (const char* n : {"p1", "p2", "p3", "p4"}) names.emplace_back(n);
    AnsatzSystem sys;
    sys.ring = make_ring(names, MonomialOrder::Lex);
    sys.symmetric = symmetric;
    auto p = vars4(sys.ring, 'p');
    if (symmetric) p[2] = p[1];
    sys.equations = ansatz_equations(p, vars4(sys.ring, 'a'), vars4(sys.ring, 'y'), vars4(sys.ring, 'b'));
    return sys;
}

MultiPoly displayed_basis_element(const RingPtr& ring, const std::array<Rational, 4>& p) {
    const RingPtr local = make_ring({"p1", "p2", "p3", "p4", "y3", "y4"});
    const auto v = [&local](const char* n) { return MultiPoly::variable(local, n); };
    const MultiPoly p1 = v("p1"), p2 = v("p2"), p3 = v("p3"), p4 = v("p4"), y3 = v("y3"), y4 = v("y4");
    MultiPoly e = p1 * p1 * p2 * p4 * y4 * y4 - p1 * p1 * p3 * p4 * y4 * y4 - p1 * p2 * p2 * p3 * y4 * y4 -
                  p1 * p2 * p2 * p4 * y3 * y4 + p1 * p2 * p3 * p3 * y4 * y4 + p1 * p2 * p4 * p4 * y3 * y3 +
                  p1 * p3 * p3 * p4 * y3 * y4 - p1 * p3 * p4 * p4 * y3 * y3 + p2 * p2 * p2 * p3 * y3 * y4 -
                  p2 * p2 * p3 * p4 * y3 * y3 - p2 * p3 * p3 * p3 * y3 * y4 + p2 * p3 * p3 * p4 * y3 * y3;
    for (std::size_t k = 0; k < 4; ++k) e = e.substitute(k, p[k]);
    return e.moved_to(ring);
}

GeneralSolutionReport verify_general_solution(const Rational& p1_in, const Rational& p2_in, const Rational& p4_in,
                                              const Rational& b4_in, const std::array<Rational, 4>& y_in) {
    const Rational p1 = canonical(p1_in);
    const Rational p2 = canonical(p2_in);
    const Rational p4 = canonical(p4_in);
    const Rational b4 = canonical(b4_in);
    const std::array<Rational, 4> y{canonical(y_in[0]), canonical(y_in[1]), canonical(y_in[2]), canonical(y_in[3])};
    const Rational& y1 = y[0];
    const Rational& y2 = y[1];
    const Rational& y3 = y[2];
    const Rational& y4 = y[3];
    const Rational den = y2 * (p1 * y2 - 2 * p2 * y1) + p4 * y1 * y1;
    const Rational cross = y2 * y3 - y1 * y4;
    if (sgn(den) == 0) throw Error(ErrorKind::DenominatorZero, "y2(p1y2 - 2p2y1) + p4y1^2 vanishes");
    if (sgn(cross) == 0) throw Error(ErrorKind::DenominatorZero, "y2y3 - y1y4 vanishes");

    GeneralSolutionReport r;
    r.a[0] = -y3;
    r.a[1] = -y4;
    r.a[2] = (p1 * y4 * (y1 * y4 - 2 * y2 * y3) + 2 * p2 * y2 * y3 * y3 - p4 * y1 * y3 * y3) / den;
    r.a[3] = (y4 * y4 * (2 * p2 * y1 - p1 * y2) + p4 * y3 * (y2 * y3 - 2 * y1 * y4)) / den;
    r.b[1] = -(p1 * y2 * y2 - 2 * p2 * y1 * y2 + p4 * y1 * y1) / (2 * cross);
    r.b[2] = (p1 * y4 * y4 - 2 * p2 * y3 * y4 + p4 * y3 * y3) / (2 * cross);
    r.b[0] = (-b4 * y1 * y4 + b4 * y2 * y3 + p1 * y2 * y4 - p2 * y1 * y4 - p2 * y2 * y3 + p4 * y1 * y3) / cross;
    r.b[3] = b4;

    const RingPtr scalars = make_ring({});
    const auto eqs = ansatz_equations(consts4(scalars, {p1, p2, p2, p4}), consts4(scalars, r.a),
                                      consts4(scalars, y), consts4(scalars, r.b));
    r.equations_vanish = true;
    for (std::size_t k = 0; k < 8; ++k) {
        r.residuals[k] = eqs[k].is_zero() ? Rational(0) : eqs[k].terms().front().coeff;
        r.equations_vanish = r.equations_vanish && eqs[k].is_zero();
    }

    const RingPtr xr = make_ring({"x1", "x2"});
    const MultiPoly x1 = MultiPoly::variable(xr, 0);
    const MultiPoly x2 = MultiPoly::variable(xr, 1);
    const MultiPoly q = x1 * ((-p4 * y1 * y3 * y3 + 2 * p2 * y2 * y3 * y3 + p1 * y4 * (y1 * y4 - 2 * y2 * y3)) / den) +
                        x2 * (((2 * p2 * y1 - p1 * y2) * y4 * y4 + p4 * y3 * (y2 * y3 - 2 * y1 * y4)) / den);
    const MultiPoly l11 = x1 * r.a[0] + x2 * r.a[1];
    const MultiPoly l12 = x1 * y1 + x2 * y2;
    const MultiPoly l21 = x1 * r.a[2] + x2 * r.a[3];
    const MultiPoly l22 = x1 * y3 + x2 * y4;
    r.q_matches = q == l21;
    const MultiPoly trace = l11 * l11 + l12 * l21 * Rational(2) + l22 * l22;
    const MultiPoly h = (x1 * x1 * p1 + x1 * x2 * (2 * p2) + x2 * x2 * p4) * Rational(1, 2);
    const Rational scale = 4 * cross * cross / den;
    r.trace_identity = trace == h * scale;
    return r;
}

bool general_solution_identity() {
    const RingPtr ring = make_ring({"u", "v", "b4", "p1", "p2", "p4", "y1", "y2", "y3", "y4"});
    const auto v = [&ring](const char* n) { return MultiPoly::variable(ring, n); };
    const MultiPoly u = v("u"), w = v("v"), b4 = v("b4"), p1 = v("p1"), p2 = v("p2"), p4 = v("p4");
    const MultiPoly y1 = v("y1"), y2 = v("y2"), y3 = v("y3"), y4 = v("y4");
    const Rational two(2);
    const MultiPoly den = y2 * (p1 * y2 - two * p2 * y1) + p4 * y1 * y1;
    const MultiPoly cross = y2 * y3 - y1 * y4;
    const std::array<MultiPoly, 4> a{
        -y3, -y4, u * (p1 * y4 * (y1 * y4 - two * y2 * y3) + two * p2 * y2 * y3 * y3 - p4 * y1 * y3 * y3),
        u * (y4 * y4 * (two * p2 * y1 - p1 * y2) + p4 * y3 * (y2 * y3 - two * y1 * y4))};
    const std::array<MultiPoly, 4> b{
        w * (-b4 * y1 * y4 + b4 * y2 * y3 + p1 * y2 * y4 - p2 * y1 * y4 - p2 * y2 * y3 + p4 * y1 * y3),
        w * (p1 * y2 * y2 - two * p2 * y1 * y2 + p4 * y1 * y1) * Rational(-1, 2),
        w * (p1 * y4 * y4 - two * p2 * y3 * y4 + p4 * y3 * y3) * Rational(1, 2), b4};
    const auto eqs = ansatz_equations({p1, p2, p2, p4}, a, {y1, y2, y3, y4}, b);
    const MultiPoly one(ring, Rational(1));
    const std::vector<MultiPoly> gens{u * den - one, w * cross - one};
    const auto gb = buchberger(gens);
    for (const auto& e : eqs)
        if (!ideal_member(e, gb.basis)) return false;
    return gb.verified;
}

DenominatorIdentities denominator_identities() {
    const RingPtr ring = make_ring({"p1", "p2", "p4", "y1", "y2", "y3", "y4"});
    const auto v = [&ring](const char* n) { return MultiPoly::variable(ring, n); };
    const MultiPoly p1 = v("p1"), p2 = v("p2"), p4 = v("p4"), y1 = v("y1"), y2 = v("y2"), y3 = v("y3"), y4 = v("y4");
    const MultiPoly zero(ring);
    const MultiPoly one(ring, Rational(1));
    const Mat2 j{zero, one, -one, zero};
    const Mat2 jt{zero, -one, one, zero};
    const Mat2 p{p1, p2, p2, p4};
    const Mat2 m = mul2(mul2(jt, p), j);
    const auto form = [](const Mat2& k, const MultiPoly& u1, const MultiPoly& u2, const MultiPoly& v1,
                         const MultiPoly& v2) {
        return u1 * (k[0] * v1 + k[1] * v2) + u2 * (k[2] * v1 + k[3] * v2);
    };
    DenominatorIdentities r;
    r.quadratic_form = form(m, y1, y2, y1, y2) == y2 * (p1 * y2 - Rational(2) * p2 * y1) + p4 * y1 * y1;
    r.cross_form = form(jt, y1, y2, y3, y4) == y2 * y3 - y1 * y4;
    return r;
}

MembershipReport basis_element_membership(const std::array<Rational, 4>& p, Budget budget) {
    const AnsatzSystem sys = build_ansatz_system(p, false);
    const auto gb = buchberger(sys.equations, MonomialOrder::Lex, budget);
    MembershipReport r{false, gb.basis.size(), gb.pairs_processed, gb.term_ops, MultiPoly(sys.ring),
                       MultiPoly(sys.ring), false};
    r.element = displayed_basis_element(sys.ring, p);
    r.remainder = reduce(r.element, gb.basis);
    r.member = gb.verified && r.remainder.is_zero();
    const std::array<std::size_t, 2> y34{sys.ring->index_of("y3"), sys.ring->index_of("y4")};
    for (const auto& g : gb.basis) r.has_y3_y4_element = r.has_y3_y4_element || (!g.is_constant() && g.uses_only(y34));
    return r;
}

DegenerateReport degenerate_family_check(const Rational& p1, const Rational& p2, const Rational& y2) {
    if (sgn(p1) == 0 || sgn(p2) == 0) throw Error(ErrorKind::PreconditionViolation, "needs p1 = p4 != 0, p2 = -p3 != 0");
    if (sgn(y2) == 0) throw Error(ErrorKind::PreconditionViolation, "y2 must be nonzero");
    DegenerateReport r;

    {
        const RingPtr ring = make_ring({"x1", "x2", "i"});
        const MultiPoly x1 = MultiPoly::variable(ring, 0);
        const MultiPoly x2 = MultiPoly::variable(ring, 1);
        const MultiPoly i = MultiPoly::variable(ring, 2);
        const std::vector<MultiPoly> gauss{i * i + MultiPoly(ring, Rational(1))};
        const MultiPoly e = i * x1 - x2;
        const Mat2 l{e, -e * y2, e * (1 / y2), -e};
        const Mat2 l2 = mul2(l, l);
        r.l_squared_zero = true;
        for (const auto& entry : l2) r.l_squared_zero = r.l_squared_zero && reduce(entry, gauss).is_zero();
        r.trace_square_zero = reduce(l2[0] + l2[3], gauss).is_zero();
    }

    const RingPtr ring = make_ring({"b1", "b2", "b3", "b4", "i"});
    const MultiPoly i = MultiPoly::variable(ring, "i");
    const MultiPoly one(ring, Rational(1));
    const std::array<MultiPoly, 4> a{i, -one, i * (1 / y2), one * (-1 / y2)};
    const std::array<MultiPoly, 4> y{i * (-y2), one * y2, -i, one};
    const std::array<MultiPoly, 4> p{one * p1, one * p2, one * (-p2), one * p1};
    const auto b = vars4(ring, 'b');
    std::vector<MultiPoly> gens = ansatz_equations(p, a, y, b);
    const MultiPoly gauss = i * i + one;
    gens.push_back(gauss);

    const auto gb = buchberger(gens);
    r.consistent = gb.verified && !(gb.basis.size() == 1 && gb.basis[0].is_constant());
    for (const auto& g : gb.basis) r.b_basis.push_back(g.to_string());

    auto pinned = gens;
    pinned.push_back(b[2]);
    pinned.push_back(b[3]);
    const auto particular = buchberger(pinned);
    std::array<MultiPoly, 4> values{MultiPoly(ring), MultiPoly(ring), MultiPoly(ring), MultiPoly(ring)};
    std::array<bool, 4> found{};
    for (const auto& g : particular.basis) {
        const Term& lt = g.leading_term();
        for (std::size_t k = 0; k < 4; ++k) {
            Exponents e{};
            e[k] = 1;
            if (lt.exp == e) {
                values[k] = b[k] - g;
                found[k] = true;
            }
        }
    }
    r.particular_solves = particular.verified;
    for (std::size_t k = 0; k < 4; ++k) {
        r.particular_b[k] = values[k].to_string();
        r.particular_solves = r.particular_solves && found[k];
    }
    if (r.particular_solves) {
        const std::vector<MultiPoly> g1{gauss};
        for (const auto& e : ansatz_equations(p, a, y, values))
            r.particular_solves = r.particular_solves && reduce(e, g1).is_zero();
    }
    return r;
}

}  // namespace laxforge
