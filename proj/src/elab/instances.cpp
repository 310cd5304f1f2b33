#include "microproof/elab/instances.h"

namespace microproof::elab {

using namespace kernel;

namespace {

class Resolver {
public:
    explicit Resolver(Meta& meta) : meta_(meta) {}

    std::optional<Term> solve(const Term& goal, int depth) {
        if (depth > kInstanceDepthLimit) throw InstanceDepthExceeded();
        Term type = meta_.whnf_core(meta_.instantiate(goal));
        const std::string& cls = head_const_name(type);
        if (cls.empty() || !meta_.env().is_class(cls)) return std::nullopt;

        const auto& locals = meta_.lctx().decls();
        for (auto it = locals.rbegin(); it != locals.rend(); ++it) {
            if (head_const_name(meta_.instantiate(it->type)) != cls) continue;
            if (meta_.is_def_eq(it->type, type)) return it->as_term();
        }
        for (const auto& name : meta_.env().instance_set()) {
            const Declaration* d = meta_.env().find(name);
            if (!d || conclusion_head(d->type) != cls) continue;
            if (auto r = try_instance(*d, type, depth)) return r;
        }
        return std::nullopt;
    }

private:
    static std::string conclusion_head(Term t) {
        while (t->is_pi()) t = t->body();
        return head_const_name(t);
    }

    std::optional<Term> try_instance(const Declaration& d, const Term& type, int depth) {
        auto cp = meta_.mctx().checkpoint();
        Term value = mk_const(d.name);
        Term ty = d.type;
        std::vector<Term> subgoals;
        while (ty->is_pi()) {
            Term mv = meta_.new_mvar(ty->binder_type(), ty->name(),
                                     ty->binder_mode() == BinderMode::InstImplicit ? MVarKind::Instance
                                                                                   : MVarKind::Natural);
            if (ty->binder_mode() == BinderMode::InstImplicit) subgoals.push_back(mv);
            value = mk_app(value, mv);
            ty = instantiate1(ty->body(), mv);
        }
        if (!meta_.is_def_eq(ty, type)) {
            meta_.mctx().rollback(cp);
            return std::nullopt;
        }
        for (const auto& sub : subgoals) {
            auto sol = solve(meta_.mctx().get(sub->index()).type, depth + 1);
            if (!sol || !meta_.is_def_eq(sub, *sol)) {
                meta_.mctx().rollback(cp);
                return std::nullopt;
            }
        }
        return meta_.instantiate(value);
    }

    Meta& meta_;
};

}  // namespace

bool is_class_type(Meta& meta, const Term& type) {
    Term t = meta.whnf_core(meta.instantiate(type));
    const std::string& head = head_const_name(t);
    return !head.empty() && meta.env().is_class(head);
}

InstanceResult synthesize_instance(Meta& meta, const Term& type) {
    Term t = meta.instantiate(type);
    if (!is_class_type(meta, t)) return {InstanceStatus::Failure, nullptr};
    if (meta.mctx().has_unassigned(t)) return {InstanceStatus::Stuck, nullptr};
    Resolver r(meta);
    if (auto v = r.solve(t, 0)) return {InstanceStatus::Success, *v};
    return {InstanceStatus::Failure, nullptr};
}

}  // namespace microproof::elab
