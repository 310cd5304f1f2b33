#include "microproof/lindec/module.h"

#include <algorithm>
#include <tuple>

#include <fmt/format.h>

#include "microproof/elab/errors.h"
#include "microproof/elab/instances.h"
#include "microproof/elab/printer.h"
#include "microproof/rewriter/simp.h"

namespace microproof::lindec {

using elab::ElabError;
using elab::ErrorKind;
using elab::Printer;
using rewriter::SimpResult;
using namespace kernel;

namespace {

Monomial mul_monomials(const Monomial& a, const Monomial& b, bool commutative) {
    Monomial m = a;
    m.insert(m.end(), b.begin(), b.end());
    if (commutative) std::sort(m.begin(), m.end());
    return m;
}

}  // namespace

ScalarPoly ScalarPoly::constant(long c, bool commutative) {
    ScalarPoly p(commutative);
    p.add_term({}, c);
    return p;
}

ScalarPoly ScalarPoly::atom(std::size_t index, bool commutative) {
    ScalarPoly p(commutative);
    p.add_term({index}, 1);
    return p;
}

void ScalarPoly::add_term(Monomial m, long c) {
    if (commutative_) std::sort(m.begin(), m.end());
    long& slot = terms_[m];
    slot += c;
    if (slot == 0) terms_.erase(m);
}

ScalarPoly ScalarPoly::operator+(const ScalarPoly& o) const {
    ScalarPoly r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
}

ScalarPoly ScalarPoly::operator-() const {
    ScalarPoly r(commutative_);
    for (const auto& [m, c] : terms_) r.add_term(m, -c);
    return r;
}

ScalarPoly ScalarPoly::operator-(const ScalarPoly& o) const { return *this + -o; }

ScalarPoly ScalarPoly::operator*(const ScalarPoly& o) const {
    ScalarPoly r(commutative_);
    for (const auto& [m1, c1] : terms_)
        for (const auto& [m2, c2] : o.terms_) r.add_term(mul_monomials(m1, m2, commutative_), c1 * c2);
    return r;
}

bool poly_equal(const ScalarPoly& p, const ScalarPoly& q) { return p == q; }

void LinCombo::add(std::size_t atom, const ScalarPoly& coeff) {
    auto it = coeffs_.find(atom);
    ScalarPoly sum = it == coeffs_.end() ? coeff : it->second + coeff;
    if (sum.is_zero()) {
        coeffs_.erase(atom);
    } else {
        coeffs_.insert_or_assign(atom, sum);
    }
}

LinCombo LinCombo::operator+(const LinCombo& o) const {
    LinCombo r = *this;
    for (const auto& [a, c] : o.coeffs_) r.add(a, c);
    return r;
}

LinCombo LinCombo::operator-() const {
    LinCombo r(commutative_);
    for (const auto& [a, c] : coeffs_) r.add(a, -c);
    return r;
}

LinCombo LinCombo::scale(const ScalarPoly& s) const {
    LinCombo r(commutative_);
    for (const auto& [a, c] : coeffs_) r.add(a, s * c);
    return r;
}

Normalizer::Normalizer(Meta& meta, Term module_type, Term scalar_type, bool commutative)
    : meta_(meta), module_type_(std::move(module_type)), scalar_type_(std::move(scalar_type)),
      commutative_(commutative) {}

bool Normalizer::is_op(const Term& t, const char* name, std::size_t nargs, const Term& type) const {
    if (!type || !is_app_of(t, name, nargs)) return false;
    return alpha_eq(meta_.instantiate(get_app_args(t)[0]), type);
}

std::size_t Normalizer::intern(std::vector<Term>& table, const Term& t) {
    for (std::size_t i = 0; i < table.size(); ++i)
        if (alpha_eq(table[i], t)) return i;
    table.push_back(t);
    return table.size() - 1;
}

LinCombo Normalizer::module(const Term& t) {
    const Term& M = module_type_;
    if (is_op(t, "AddCommGroup.add", 4, M)) {
        auto a = get_app_args(t);
        return module(a[2]) + module(a[3]);
    }
    if (is_op(t, "AddCommGroup.sub", 4, M)) {
        auto a = get_app_args(t);
        return module(a[2]) + -module(a[3]);
    }
    if (is_op(t, "AddCommGroup.neg", 3, M)) return -module(get_app_args(t)[2]);
    if (is_op(t, "Zero.zero", 2, M)) return LinCombo(commutative_);
    if (is_app_of(t, "Module.smul", 7)) {
        auto a = get_app_args(t);
        if (scalar_type_ && alpha_eq(meta_.instantiate(a[0]), scalar_type_) && alpha_eq(meta_.instantiate(a[1]), M))
            return module(a[6]).scale(scalar(a[5]));
    }
    LinCombo c(commutative_);
    c.add(intern(module_atoms_, t), ScalarPoly::constant(1, commutative_));
    return c;
}

ScalarPoly Normalizer::scalar(const Term& t) {
    const Term& R = scalar_type_;
    if (is_op(t, "AddCommGroup.add", 4, R)) {
        auto a = get_app_args(t);
        return scalar(a[2]) + scalar(a[3]);
    }
    if (is_op(t, "AddCommGroup.sub", 4, R)) {
        auto a = get_app_args(t);
        return scalar(a[2]) - scalar(a[3]);
    }
    if (is_op(t, "AddCommGroup.neg", 3, R)) return -scalar(get_app_args(t)[2]);
    if (is_op(t, "Zero.zero", 2, R)) return ScalarPoly(commutative_);
    if (is_op(t, "Ring.mul", 4, R)) {
        auto a = get_app_args(t);
        return scalar(a[2]) * scalar(a[3]);
    }
    return ScalarPoly::atom(intern(scalar_atoms_, t), commutative_);
}

std::string Normalizer::render_monomial_smul(const Monomial& m, std::size_t atom) const {
    Printer p(meta_.env(), &meta_.mctx());
    std::string out;
    for (auto s : m) out += p.term(scalar_atoms_[s], meta_.lctx()) + " • ";
    return out + p.term(module_atoms_[atom], meta_.lctx());
}

std::string Normalizer::render(const ScalarPoly& poly) const {
    if (poly.is_zero()) return "0";
    Printer p(meta_.env(), &meta_.mctx());
    std::string out;
    for (const auto& [m, c] : poly.terms()) {
        std::string mono;
        for (auto s : m) mono += (mono.empty() ? "" : " * ") + p.term(scalar_atoms_[s], meta_.lctx());
        long mag = c < 0 ? -c : c;
        if (mono.empty()) {
            mono = std::to_string(mag);
        } else if (mag != 1) {
            mono = std::to_string(mag) + " * " + mono;
        }
        if (out.empty()) {
            out = (c < 0 ? "-" : "") + mono;
        } else {
            out += (c < 0 ? " - " : " + ") + mono;
        }
    }
    return out;
}

std::string Normalizer::render(const LinCombo& combo) const {
    if (combo.coeffs().empty()) return "0";
    std::string out;
    for (const auto& [atom, poly] : combo.coeffs()) {
        for (const auto& [m, c] : poly.terms()) {
            long mag = c < 0 ? -c : c;
            std::string t = render_monomial_smul(m, atom);
            if (mag != 1) t = std::to_string(mag) + " • " + t;
            if (out.empty()) {
                out = (c < 0 ? "-" : "") + t;
            } else {
                out += (c < 0 ? " - " : " + ") + t;
            }
        }
    }
    return out;
}

namespace {

using Path = std::vector<std::size_t>;

Term subterm(const Term& t, const Path& path) {
    Term cur = t;
    for (auto i : path) cur = get_app_args(cur)[i];
    return cur;
}

Term replace_at(const Term& t, const Path& path, std::size_t pos, const Term& with) {
    if (pos == path.size()) return with;
    auto args = get_app_args(t);
    args[path[pos]] = replace_at(args[path[pos]], path, pos + 1, with);
    return kernel::mk_app(get_app_fn(t), args);
}

const char* kAlgebraHeads[] = {"AddCommGroup.add", "AddCommGroup.sub", "AddCommGroup.neg", "Zero.zero",
                               "Module.smul",      "Ring.mul"};

const char* kExpandRules[] = {
    "sub_eq_add_neg", "neg_add",     "neg_neg",   "neg_zero", "smul_add",  "add_smul",  "neg_smul",
    "smul_neg",       "smul_smul",   "zero_smul", "smul_zero", "zero_add", "add_zero",  "add_assoc",
    "mul_add",        "add_mul",     "mul_neg",   "neg_mul",  "mul_zero",  "zero_mul",  "mul_assoc",
};

/// One summand of an expanded side: `±(s₁ * … * sₖ) • atom` or `±atom`.
struct Item {
    bool negative = false;
    std::vector<std::size_t> factors;  // scalar atom indices, in product order
    std::size_t atom = 0;
    auto key() const { return std::tie(atom, factors, negative); }
};

/// Proof-producing rewriting of one side, tracking `start = current`.
class Side {
public:
    Side(Meta& meta, const Environment& env, const Term& start) : meta_(meta), env_(env), start_(start), cur_(start) {}

    const Term& current() const { return cur_; }
    const SimpResult& result() const { return acc_; }

    void apply(const SimpResult& r) {
        if (!r.proof) return;
        acc_ = rewriter::chain(meta_, start_, acc_.proof ? acc_ : SimpResult{cur_, std::nullopt}, r);
        cur_ = r.expr;
        acc_.expr = cur_;
    }

    /// Rewrites the subterm at `path` with `rule`; throws if it does not apply.
    void rewrite(const Path& path, const std::string& rule) {
        Term sub = subterm(cur_, path);
        auto r = rewriter::rewrite_once(meta_, rewriter::rule_from_const(env_, rule), sub);
        if (!r)
            throw ElabError(ErrorKind::ModuleNotEqual, fmt::format("module failed to rewrite with {}", rule), {});
        Term next = replace_at(cur_, path, 0, r->expr);
        Term proof = *r->proof;
        if (!path.empty()) {
            Term motive = mk_lam("x", meta_.infer(sub), replace_at(cur_, path, 0, mk_bvar(0)));
            proof = rewriter::mk_congr_arg(meta_, motive, sub, r->expr, proof);
        }
        apply({next, proof});
    }

private:
    Meta& meta_;
    const Environment& env_;
    Term start_;
    Term cur_;
    SimpResult acc_{nullptr, std::nullopt};
};

class Prover {
public:
    Prover(Meta& meta, const Environment& env, Normalizer& norm, Term module_type, bool commutative)
        : meta_(meta), env_(env), norm_(norm), module_type_(std::move(module_type)), commutative_(commutative) {}

    /// `proof : t = nf` with nf a canonical sorted, cancelled sum.
    Side normalize(const Term& t) {
        Side side(meta_, env_, t);
        std::vector<rewriter::SimpRule> rules;
        for (const char* name : kExpandRules) rules.push_back(rewriter::rule_from_const(env_, name));
        rewriter::SimpConfig cfg;
        cfg.descend = [](const std::string& head) {
            return std::find(std::begin(kAlgebraHeads), std::end(kAlgebraHeads), head) != std::end(kAlgebraHeads);
        };
        rewriter::Simplifier simp(meta_, rules, cfg);
        side.apply(simp.simp(t));

        std::vector<Item> items = parse(side.current());
        if (commutative_)
            for (std::size_t j = 0; j < items.size(); ++j) sort_factors(side, items, j);
        sort_items(side, items);
        cancel(side, items);
        return side;
    }

private:
    bool is_add(const Term& t) const { return norm_is(t, "AddCommGroup.add", 4); }
    bool norm_is(const Term& t, const char* name, std::size_t n) const {
        return is_app_of(t, name, n) && alpha_eq(meta_.instantiate(get_app_args(t)[0]), module_type_);
    }

    std::vector<Item> parse(const Term& t) {
        std::vector<Item> out;
        Term cur = t;
        if (norm_is(cur, "Zero.zero", 2)) return out;
        while (is_add(cur)) {
            auto a = get_app_args(cur);
            out.push_back(item(a[2]));
            cur = a[3];
        }
        out.push_back(item(cur));
        return out;
    }

    Item item(const Term& t) {
        Item it;
        Term cur = t;
        if (norm_is(cur, "AddCommGroup.neg", 3)) {
            it.negative = true;
            cur = get_app_args(cur)[2];
        }
        if (is_app_of(cur, "Module.smul", 7)) {
            auto a = get_app_args(cur);
            Term s = a[5];
            while (is_app_of(s, "Ring.mul", 4)) {
                auto m = get_app_args(s);
                it.factors.push_back(atom_index(m[2], true));
                s = m[3];
            }
            it.factors.push_back(atom_index(s, true));
            cur = a[6];
        }
        it.atom = atom_index(cur, false);
        return it;
    }

    std::size_t atom_index(const Term& t, bool scalar) {
        const auto& table = scalar ? norm_.scalar_atoms() : norm_.module_atoms();
        for (std::size_t i = 0; i < table.size(); ++i)
            if (alpha_eq(table[i], t)) return i;
        if (scalar) return norm_.scalar(t).terms().begin()->first.front();
        norm_.module(t);
        return norm_.module_atoms().size() - 1;
    }

    static Path item_path(std::size_t j, std::size_t n) {
        Path p(j, 3);
        if (j + 1 < n) p.push_back(2);
        return p;
    }

    void sort_factors(Side& side, std::vector<Item>& items, std::size_t j) {
        auto& f = items[j].factors;
        if (f.size() < 2) return;
        Path base = item_path(j, items.size());
        if (items[j].negative) base.push_back(2);
        base.push_back(5);
        for (bool swapped = true; swapped;) {
            swapped = false;
            for (std::size_t k = 0; k + 1 < f.size(); ++k) {
                if (f[k] <= f[k + 1]) continue;
                Path p = base;
                p.insert(p.end(), k, 3);
                side.rewrite(p, k + 2 == f.size() ? "mul_comm" : "mul_left_comm");
                std::swap(f[k], f[k + 1]);
                swapped = true;
            }
        }
    }

    void sort_items(Side& side, std::vector<Item>& items) {
        for (bool swapped = true; swapped;) {
            swapped = false;
            for (std::size_t k = 0; k + 1 < items.size(); ++k) {
                if (!(items[k + 1].key() < items[k].key())) continue;
                side.rewrite(Path(k, 3), k + 2 == items.size() ? "add_comm" : "add_left_comm");
                std::swap(items[k], items[k + 1]);
                swapped = true;
            }
        }
    }

    void cancel(Side& side, std::vector<Item>& items) {
        std::size_t k = 0;
        while (k + 1 < items.size()) {
            const Item& a = items[k];
            const Item& b = items[k + 1];
            if (a.atom != b.atom || a.factors != b.factors || a.negative == b.negative) {
                ++k;
                continue;
            }
            bool last = k + 2 == items.size();
            if (last) {
                side.rewrite(Path(k, 3), a.negative ? "neg_add_cancel" : "add_neg_cancel");
                if (k > 0) side.rewrite(Path(k - 1, 3), "add_zero");
            } else {
                side.rewrite(Path(k, 3), a.negative ? "neg_add_cancel_left" : "add_neg_cancel_left");
            }
            items.erase(items.begin() + k, items.begin() + k + 2);
            if (k > 0) --k;
        }
    }

    Meta& meta_;
    const Environment& env_;
    Normalizer& norm_;
    Term module_type_;
    bool commutative_;
};

std::optional<Term> find_scalar_type(const Term& t, const Term& module_type, Meta& meta) {
    std::optional<Term> found;
    for_each(t, [&](const Term& e) {
        if (found) return false;
        if (is_app_of(e, "Module.smul", 7)) {
            auto a = get_app_args(e);
            if (alpha_eq(meta.instantiate(a[1]), module_type)) {
                found = meta.instantiate(a[0]);
                return false;
            }
        }
        return true;
    });
    return found;
}

bool has_instance(Meta& meta, const Term& type) {
    try {
        return elab::synthesize_instance(meta, type).status == elab::InstanceStatus::Success;
    } catch (const elab::InstanceDepthExceeded&) {
        return false;
    }
}

}  // namespace

void module_goal(const Environment& env, MetaContext& mctx, std::uint64_t goal, const ModuleConfig& cfg) {
    Meta meta(env, mctx, mctx.get(goal).lctx);
    Printer printer(env, &mctx);
    Term target = mctx.instantiate(mctx.get(goal).type);
    Term eq = meta.whnf_core(target);
    if (!is_app_of(eq, "Eq", 3)) {
        if (auto u = meta.unfold(target, Transparency::Reducible)) eq = *u;
    }
    if (!is_app_of(eq, "Eq", 3))
        throw ElabError(ErrorKind::NotModuleTyped,
                        "module failed, the goal is not an equation\n  " + printer.term(target, meta.lctx()), {});
    auto args = get_app_args(eq);
    Term M = args[0];
    if (!has_instance(meta, kernel::mk_app(mk_const("AddCommGroup"), M)))
        throw ElabError(ErrorKind::NotModuleTyped,
                        "module failed, the type is not an additive commutative group\n  " +
                            printer.term(M, meta.lctx()),
                        {});
    Term R = find_scalar_type(args[1], M, meta).value_or(find_scalar_type(args[2], M, meta).value_or(nullptr));
    bool comm_ring = R && has_instance(meta, kernel::mk_app(mk_const("CommRing"), R));

    Normalizer nc(meta, M, R, false);
    LinCombo nl = nc.module(args[1]);
    LinCombo nr = nc.module(args[2]);
    bool holds_nc = nl == nr;

    Normalizer cn(meta, M, R, true);
    LinCombo cl = cn.module(args[1]);
    LinCombo cr = cn.module(args[2]);
    if (cfg.trace) {
        cfg.trace->push_back("[module] lhs: " + cn.render(cl));
        cfg.trace->push_back("[module] rhs: " + cn.render(cr));
    }
    if (!holds_nc) {
        if (!(cl == cr))
            throw ElabError(ErrorKind::ModuleNotEqual,
                            fmt::format("module failed, the two sides differ\n  {}\n  ≠\n  {}", cn.render(cl),
                                        cn.render(cr)),
                            {});
        if (!comm_ring) {
            // Per-atom difference in the non-commutative normal form.
            std::string eqs;
            for (std::size_t atom = 0; atom < nc.module_atoms().size(); ++atom) {
                ScalarPoly l = nl.coeffs().count(atom) ? nl.coeffs().at(atom) : ScalarPoly(false);
                ScalarPoly r = nr.coeffs().count(atom) ? nr.coeffs().at(atom) : ScalarPoly(false);
                ScalarPoly diff = r - l;
                if (diff.is_zero()) continue;
                std::vector<std::string> pos, neg;
                for (const auto& [m, c] : diff.terms()) {
                    long mag = c < 0 ? -c : c;
                    for (long i = 0; i < mag; ++i) (c > 0 ? pos : neg).push_back(nc.render_monomial_smul(m, atom));
                }
                auto join = [](const std::vector<std::string>& v) {
                    std::string s;
                    for (const auto& x : v) s += (s.empty() ? "" : " + ") + x;
                    return s.empty() ? std::string("0") : s;
                };
                eqs += "\n  " + join(pos) + " = " + join(neg);
            }
            throw ElabError(ErrorKind::NonCommutativeScalars,
                            "module failed, the scalars are not known to commute; the goal needs" + eqs, {});
        }
    }

    bool commutative = !holds_nc;
    Normalizer atoms(meta, M, R, commutative);
    atoms.module(args[1]);
    atoms.module(args[2]);
    Prover prover(meta, env, atoms, M, commutative);
    Side left = prover.normalize(args[1]);
    Side right = prover.normalize(args[2]);
    if (!alpha_eq(left.current(), right.current()))
        throw ElabError(ErrorKind::ModuleNotEqual,
                        fmt::format("module could not match the normal forms\n  {}\n  {}",
                                    printer.term(left.current(), meta.lctx()),
                                    printer.term(right.current(), meta.lctx())),
                        {});
    Term proof;
    const auto& pl = left.result();
    const auto& pr = right.result();
    if (!pl.proof && !pr.proof) {
        proof = rewriter::mk_eq_refl(meta, args[1]);
    } else if (!pr.proof) {
        proof = *pl.proof;
    } else {
        Term back = rewriter::mk_eq_symm(meta, args[2], right.current(), *pr.proof);
        proof = pl.proof ? rewriter::mk_eq_trans(meta, args[1], left.current(), args[2], *pl.proof, back) : back;
    }
    mctx.assign(goal, proof);
}

}  // namespace microproof::lindec
