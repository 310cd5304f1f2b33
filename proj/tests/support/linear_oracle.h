#pragma once

// Random universal linear identities over at most 3 module atoms and 4 scalar
// variables, with a verdict computed by evaluation in Z^3 over Z.

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace oracle {

inline constexpr const char* kScalarNames[] = {"p", "q", "r", "s"};
inline constexpr const char* kModuleNames[] = {"x", "y", "z"};

struct Scalar;
using ScalarPtr = std::shared_ptr<const Scalar>;
struct Scalar {
    enum Kind { Var, Add, Sub, Neg, Mul } kind;
    int var = 0;
    ScalarPtr a, b;
};

struct Vector;
using VectorPtr = std::shared_ptr<const Vector>;
struct Vector {
    enum Kind { Atom, Zero, Add, Sub, Neg, Smul } kind;
    int atom = 0;
    ScalarPtr coeff;
    VectorPtr a, b;
};

inline ScalarPtr svar(int i) { return std::make_shared<Scalar>(Scalar{Scalar::Var, i, nullptr, nullptr}); }
inline ScalarPtr sop(Scalar::Kind k, ScalarPtr a, ScalarPtr b = nullptr) {
    return std::make_shared<Scalar>(Scalar{k, 0, std::move(a), std::move(b)});
}
inline VectorPtr vatom(int i) { return std::make_shared<Vector>(Vector{Vector::Atom, i, nullptr, nullptr, nullptr}); }
inline VectorPtr vzero() { return std::make_shared<Vector>(Vector{Vector::Zero, 0, nullptr, nullptr, nullptr}); }
inline VectorPtr vop(Vector::Kind k, VectorPtr a, VectorPtr b = nullptr) {
    return std::make_shared<Vector>(Vector{k, 0, nullptr, std::move(a), std::move(b)});
}
inline VectorPtr vsmul(ScalarPtr c, VectorPtr v) {
    return std::make_shared<Vector>(Vector{Vector::Smul, 0, std::move(c), std::move(v), nullptr});
}

inline std::string render(const ScalarPtr& s) {
    switch (s->kind) {
        case Scalar::Var: return kScalarNames[s->var];
        case Scalar::Add: return "(" + render(s->a) + " + " + render(s->b) + ")";
        case Scalar::Sub: return "(" + render(s->a) + " - " + render(s->b) + ")";
        case Scalar::Neg: return "(-" + render(s->a) + ")";
        case Scalar::Mul: return "(" + render(s->a) + " * " + render(s->b) + ")";
    }
    return "";
}

inline std::string render(const VectorPtr& v) {
    switch (v->kind) {
        case Vector::Atom: return kModuleNames[v->atom];
        case Vector::Zero: return "0";
        case Vector::Add: return "(" + render(v->a) + " + " + render(v->b) + ")";
        case Vector::Sub: return "(" + render(v->a) + " - " + render(v->b) + ")";
        case Vector::Neg: return "(-" + render(v->a) + ")";
        case Vector::Smul: return "(" + render(v->coeff) + " • " + render(v->a) + ")";
    }
    return "";
}

using Vec3 = std::array<std::int64_t, 3>;

struct Assignment {
    std::array<std::int64_t, 4> scalars;
    std::array<Vec3, 3> atoms;
};

inline std::int64_t eval(const ScalarPtr& s, const Assignment& env) {
    switch (s->kind) {
        case Scalar::Var: return env.scalars[s->var];
        case Scalar::Add: return eval(s->a, env) + eval(s->b, env);
        case Scalar::Sub: return eval(s->a, env) - eval(s->b, env);
        case Scalar::Neg: return -eval(s->a, env);
        case Scalar::Mul: return eval(s->a, env) * eval(s->b, env);
    }
    return 0;
}

inline Vec3 eval(const VectorPtr& v, const Assignment& env) {
    Vec3 out{0, 0, 0};
    switch (v->kind) {
        case Vector::Atom: return env.atoms[v->atom];
        case Vector::Zero: return out;
        case Vector::Add:
        case Vector::Sub: {
            Vec3 a = eval(v->a, env), b = eval(v->b, env);
            for (int i = 0; i < 3; ++i) out[i] = v->kind == Vector::Add ? a[i] + b[i] : a[i] - b[i];
            return out;
        }
        case Vector::Neg: {
            Vec3 a = eval(v->a, env);
            for (int i = 0; i < 3; ++i) out[i] = -a[i];
            return out;
        }
        case Vector::Smul: {
            std::int64_t c = eval(v->coeff, env);
            Vec3 a = eval(v->a, env);
            for (int i = 0; i < 3; ++i) out[i] = c * a[i];
            return out;
        }
    }
    return out;
}

/// True when both sides agree under `trials` random substitutions.
inline bool agrees(const VectorPtr& lhs, const VectorPtr& rhs, std::mt19937_64& rng, int trials = 5) {
    std::uniform_int_distribution<std::int64_t> val(-20, 20);
    for (int t = 0; t < trials; ++t) {
        Assignment env{};
        for (auto& s : env.scalars) s = val(rng);
        for (auto& a : env.atoms)
            for (auto& c : a) c = val(rng);
        if (eval(lhs, env) != eval(rhs, env)) return false;
    }
    return true;
}

class Generator {
public:
    explicit Generator(std::uint64_t seed) : rng_(seed) {}

    std::mt19937_64& rng() { return rng_; }

    ScalarPtr scalar(int depth) {
        if (depth <= 0 || chance(40)) return svar(pick(4));
        switch (pick(4)) {
            case 0: return sop(Scalar::Add, scalar(depth - 1), scalar(depth - 1));
            case 1: return sop(Scalar::Sub, scalar(depth - 1), scalar(depth - 1));
            case 2: return sop(Scalar::Neg, scalar(depth - 1));
            default: return sop(Scalar::Mul, scalar(depth - 1), scalar(depth - 1));
        }
    }

    VectorPtr vector(int depth) {
        if (depth <= 0 || chance(25)) return chance(10) ? vzero() : vatom(pick(3));
        switch (pick(5)) {
            case 0: return vop(Vector::Add, vector(depth - 1), vector(depth - 1));
            case 1: return vop(Vector::Sub, vector(depth - 1), vector(depth - 1));
            case 2: return vop(Vector::Neg, vector(depth - 1));
            default: return vsmul(scalar(1), vector(depth - 1));
        }
    }

    /// A semantically equal but syntactically different expression.
    VectorPtr rewrite(const VectorPtr& v) {
        VectorPtr w = v;
        switch (v->kind) {
            case Vector::Add: w = vop(Vector::Add, rewrite(v->a), rewrite(v->b)); break;
            case Vector::Sub: w = vop(Vector::Sub, rewrite(v->a), rewrite(v->b)); break;
            case Vector::Neg: w = vop(Vector::Neg, rewrite(v->a)); break;
            case Vector::Smul: w = vsmul(rewrite(v->coeff), rewrite(v->a)); break;
            default: break;
        }
        if (!chance(50)) return w;
        switch (w->kind) {
            case Vector::Add:
                return vop(Vector::Add, w->b, w->a);
            case Vector::Sub:
                return vop(Vector::Add, w->a, vop(Vector::Neg, w->b));
            case Vector::Neg:
                return vop(Vector::Sub, vzero(), w->a);
            case Vector::Smul:
                if (w->a->kind == Vector::Add)
                    return vop(Vector::Add, vsmul(w->coeff, w->a->a), vsmul(w->coeff, w->a->b));
                if (w->a->kind == Vector::Smul) return vsmul(sop(Scalar::Mul, w->coeff, w->a->coeff), w->a->a);
                if (w->coeff->kind == Scalar::Add)
                    return vop(Vector::Add, vsmul(w->coeff->a, w->a), vsmul(w->coeff->b, w->a));
                return vsmul(w->coeff, vop(Vector::Add, w->a, vzero()));
            default:
                return vop(Vector::Add, w, vzero());
        }
    }

    ScalarPtr rewrite(const ScalarPtr& s) {
        if (s->kind == Scalar::Var || !chance(40)) return s;
        if (s->kind == Scalar::Add || s->kind == Scalar::Mul) return sop(s->kind, rewrite(s->b), rewrite(s->a));
        if (s->kind == Scalar::Sub) return sop(Scalar::Add, rewrite(s->a), sop(Scalar::Neg, rewrite(s->b)));
        return s;
    }

    /// A random change that usually breaks the identity.
    VectorPtr perturb(const VectorPtr& v) {
        switch (pick(3)) {
            case 0: return vop(Vector::Add, v, vatom(pick(3)));
            case 1: return vsmul(svar(pick(4)), v);
            default: return replace_atom(v);
        }
    }

    struct Pair {
        VectorPtr lhs, rhs;
        bool identity;  // oracle verdict
    };

    Pair pair() {
        VectorPtr lhs = vector(3);
        VectorPtr rhs = chance(50) ? rewrite(rewrite(lhs)) : rewrite(perturb(lhs));
        bool identity = agrees(lhs, rhs, rng_);
        return {lhs, rhs, identity};
    }

private:
    VectorPtr replace_atom(const VectorPtr& v) {
        switch (v->kind) {
            case Vector::Atom: return vatom((v->atom + 1 + pick(2)) % 3);
            case Vector::Zero: return vatom(pick(3));
            case Vector::Neg: return vop(Vector::Neg, replace_atom(v->a));
            case Vector::Smul: return vsmul(v->coeff, replace_atom(v->a));
            default: return chance(50) ? vop(v->kind, replace_atom(v->a), v->b) : vop(v->kind, v->a, replace_atom(v->b));
        }
    }

    bool chance(int percent) { return std::uniform_int_distribution<int>(0, 99)(rng_) < percent; }
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

    std::mt19937_64 rng_;
};

/// A source file with one `by module` example per line, starting at line 4.
inline std::string module_file(const std::vector<Generator::Pair>& pairs, bool commutative = true) {
    std::string src = "import MiniLib.Module\n";
    src += commutative ? "variable {R M : Type} [CommRing R] [AddCommGroup M] [Module R M]\n"
                       : "variable {R M : Type} [Ring R] [AddCommGroup M] [Module R M]\n";
    src += "\n";
    for (const auto& p : pairs)
        src += "example (p q r s : R) (x y z : M) : (" + render(p.lhs) + " : M) = " + render(p.rhs) + " := by module\n";
    return src;
}

inline constexpr std::uint32_t kFirstExampleLine = 4;

}  // namespace oracle
