#include "microproof/elab/meta_context.h"

#include <stdexcept>
#include <unordered_set>

namespace microproof::elab {

using namespace kernel;

namespace {

Term head_beta(Term f, const std::vector<Term>& args) {
    std::size_t i = 0;
    while (f->is_lam() && i < args.size()) {
        f = instantiate1(f->body(), args[i]);
        ++i;
    }
    return mk_app(f, std::span<const Term>(args.data() + i, args.size() - i));
}

}  // namespace

Term MetaContext::new_mvar(Term type, LocalContext lctx, std::string user_name, MVarKind kind) {
    std::uint64_t id = fresh_id();
    MVarDecl d;
    d.id = id;
    d.type = std::move(type);
    d.lctx = std::move(lctx);
    d.user_name = std::move(user_name);
    d.kind = kind;
    d.creation_index = order_.size();
    decls_.emplace(id, std::move(d));
    order_.push_back(id);
    return mk_mvar(id);
}

const MVarDecl* MetaContext::decl(std::uint64_t id) const {
    auto it = decls_.find(id);
    return it == decls_.end() ? nullptr : &it->second;
}

const MVarDecl& MetaContext::get(std::uint64_t id) const {
    const MVarDecl* d = decl(id);
    if (!d) throw std::logic_error("unknown metavariable");
    return *d;
}

bool MetaContext::is_assigned(std::uint64_t id) const {
    return assignments_.count(id) != 0 || delayed_.count(id) != 0;
}

std::optional<Term> MetaContext::assignment(std::uint64_t id) const {
    if (auto it = assignments_.find(id); it != assignments_.end()) return it->second;
    auto it = delayed_.find(id);
    if (it == delayed_.end()) return std::nullopt;
    Term inner = instantiate(mk_mvar(it->second.inner));
    if (inner->has_mvar() && !unassigned_in(inner).empty()) return std::nullopt;
    const MVarDecl& d = get(it->second.inner);
    std::vector<Term> fvars;
    for (auto f : it->second.fvars) fvars.push_back(mk_fvar(f));
    return instantiate(d.lctx.mk_lambda(fvars, inner));
}

void MetaContext::assign(std::uint64_t id, Term value) {
    if (is_assigned(id)) throw std::logic_error("metavariable assigned twice");
    assignments_[id] = std::move(value);
    trail_.push_back({TrailEntry::Op::Assign, id, {}});
}

void MetaContext::assign_delayed(std::uint64_t id, std::vector<std::uint64_t> fvars, std::uint64_t inner) {
    if (is_assigned(id)) throw std::logic_error("metavariable assigned twice");
    delayed_[id] = DelayedAssignment{std::move(fvars), inner};
    trail_.push_back({TrailEntry::Op::Delayed, id, {}});
}

void MetaContext::set_user_name(std::uint64_t id, std::string name) {
    auto& d = decls_.at(id);
    trail_.push_back({TrailEntry::Op::Rename, id, d.user_name});
    d.user_name = std::move(name);
}

void MetaContext::set_kind(std::uint64_t id, MVarKind kind) {
    auto& d = decls_.at(id);
    trail_.push_back({TrailEntry::Op::Kind, id, {}, d.kind});
    d.kind = kind;
}

void MetaContext::rollback(Checkpoint cp) {
    while (trail_.size() > cp) {
        TrailEntry e = std::move(trail_.back());
        trail_.pop_back();
        switch (e.op) {
            case TrailEntry::Op::Assign: assignments_.erase(e.id); break;
            case TrailEntry::Op::Delayed: delayed_.erase(e.id); break;
            case TrailEntry::Op::Rename: decls_.at(e.id).user_name = std::move(e.old_name); break;
            case TrailEntry::Op::Kind: decls_.at(e.id).kind = e.old_kind; break;
        }
    }
}

Term MetaContext::instantiate(const Term& t) const {
    if (!t->has_mvar()) return t;
    return replace(t, [&](const Term& s, std::uint32_t) -> std::optional<Term> {
        if (!s->has_mvar()) return s;
        if (s->is_mvar()) {
            if (auto v = assignment(s->index())) return instantiate(*v);
            return s;
        }
        if (s->is_app()) {
            const Term& f = get_app_fn(s);
            if (f->is_mvar()) {
                if (auto v = assignment(f->index())) {
                    std::vector<Term> args = get_app_args(s);
                    for (auto& a : args) a = instantiate(a);
                    return instantiate(head_beta(instantiate(*v), args));
                }
            }
        }
        return std::nullopt;
    });
}

std::vector<std::uint64_t> MetaContext::unassigned_in(const Term& t) const {
    std::vector<std::uint64_t> out;
    std::unordered_set<std::uint64_t> seen;
    Term inst = instantiate(t);
    for_each(inst, [&](const Term& s) {
        if (!s->has_mvar()) return false;
        if (s->is_mvar() && seen.insert(s->index()).second) out.push_back(s->index());
        return true;
    });
    return out;
}

std::optional<Term> MetaContext::mvar_type(std::uint64_t id) const {
    const MVarDecl* d = decl(id);
    if (!d) return std::nullopt;
    return d->type;
}

std::optional<Term> MetaContext::mvar_assignment(std::uint64_t id) const { return assignment(id); }

}  // namespace microproof::elab
