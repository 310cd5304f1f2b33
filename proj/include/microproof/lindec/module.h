#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "microproof/elab/meta.h"

namespace microproof::lindec {

using elab::Meta;
using elab::MetaContext;
using kernel::Environment;
using kernel::Term;

/// A monomial is a sequence of scalar atom indices. With commutative scalars it
/// is kept sorted; otherwise the order of multiplication is preserved.
using Monomial = std::vector<std::size_t>;

/// Integer-coefficient polynomial over scalar atoms with no zero coefficients.
class ScalarPoly {
public:
    explicit ScalarPoly(bool commutative = true) : commutative_(commutative) {}
    static ScalarPoly constant(long c, bool commutative);
    static ScalarPoly atom(std::size_t index, bool commutative);

    ScalarPoly operator+(const ScalarPoly& o) const;
    ScalarPoly operator-(const ScalarPoly& o) const;
    ScalarPoly operator-() const;
    ScalarPoly operator*(const ScalarPoly& o) const;
    bool operator==(const ScalarPoly& o) const { return terms_ == o.terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool commutative() const { return commutative_; }
    const std::map<Monomial, long>& terms() const { return terms_; }
    void add_term(Monomial m, long c);

private:
    bool commutative_;
    std::map<Monomial, long> terms_;
};

bool poly_equal(const ScalarPoly& p, const ScalarPoly& q);

/// Module atoms (in first-occurrence order) mapped to their coefficients.
class LinCombo {
public:
    explicit LinCombo(bool commutative = true) : commutative_(commutative) {}
    void add(std::size_t atom, const ScalarPoly& coeff);
    LinCombo operator+(const LinCombo& o) const;
    LinCombo operator-() const;
    LinCombo scale(const ScalarPoly& s) const;
    bool operator==(const LinCombo& o) const { return coeffs_ == o.coeffs_; }

    const std::map<std::size_t, ScalarPoly>& coeffs() const { return coeffs_; }

private:
    bool commutative_;
    std::map<std::size_t, ScalarPoly> coeffs_;
};

/// Interprets module and scalar operations over one module type. Atoms are
/// collected into shared tables so that both sides of an equation agree.
class Normalizer {
public:
    Normalizer(Meta& meta, Term module_type, Term scalar_type, bool commutative);

    LinCombo module(const Term& t);
    ScalarPoly scalar(const Term& t);

    const std::vector<Term>& module_atoms() const { return module_atoms_; }
    const std::vector<Term>& scalar_atoms() const { return scalar_atoms_; }
    std::string render(const LinCombo& c) const;
    std::string render(const ScalarPoly& p) const;
    std::string render_monomial_smul(const Monomial& m, std::size_t atom) const;

private:
    std::size_t intern(std::vector<Term>& table, const Term& t);
    bool is_op(const Term& t, const char* name, std::size_t nargs, const Term& type) const;

    Meta& meta_;
    Term module_type_;
    Term scalar_type_;
    bool commutative_;
    std::vector<Term> module_atoms_;
    std::vector<Term> scalar_atoms_;
};

struct ModuleConfig {
    std::vector<std::string>* trace = nullptr;
};

/// Closes `lhs = rhs` at a module type when both sides have the same normal form,
/// assigning a proof built from the module and ring axioms. Throws
/// ModuleNotEqual, NonCommutativeScalars or NotModuleTyped otherwise.
void module_goal(const Environment& env, MetaContext& mctx, std::uint64_t goal, const ModuleConfig& cfg = {});

}  // namespace microproof::lindec
