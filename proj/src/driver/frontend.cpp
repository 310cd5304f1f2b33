#include "microproof/driver/frontend.h"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "microproof/elab/elaborator.h"
#include "microproof/rewriter/simp.h"
#include "microproof/syntax/parser.h"

namespace microproof::driver {

using elab::Elaborator;
using elab::ErrorKind;
using elab::Meta;
using elab::MetaContext;
using elab::MessageLog;
using elab::Severity;
using kernel::Declaration;
using kernel::DeclKind;
using kernel::LocalContext;
using kernel::LocalDecl;
using syntax::CommandKind;
using syntax::CommandSyntax;
using syntax::TermKind;

std::size_t FileResult::error_count() const {
    return std::count_if(messages.begin(), messages.end(), [](const auto& m) { return m.severity == Severity::Error; });
}

std::size_t FileResult::warning_count() const {
    return std::count_if(messages.begin(), messages.end(),
                         [](const auto& m) { return m.severity == Severity::Warning; });
}

const tactics::Snapshot* snapshot_at(const FileResult& r, std::uint32_t offset) {
    const tactics::Snapshot* best = nullptr;
    for (const auto& s : r.snapshots) {
        if (s.span.begin.offset > offset) continue;
        if (!best || s.span.begin.offset >= best->span.begin.offset) best = &s;
    }
    return best;
}

namespace {

DeclKind decl_kind(CommandKind k, bool has_value) {
    switch (k) {
        case CommandKind::Theorem: return DeclKind::Theorem;
        case CommandKind::Example: return DeclKind::Example;
        case CommandKind::Definition: return DeclKind::Definition;
        case CommandKind::Instance: return has_value ? DeclKind::Definition : DeclKind::Axiom;
        default: return DeclKind::Axiom;
    }
}

bool is_proof_kind(CommandKind k) { return k == CommandKind::Theorem || k == CommandKind::Example; }

void collect_fvars(const Term& t, std::set<std::uint64_t>& out) {
    kernel::for_each(t, [&](const Term& e) {
        if (e->is_fvar()) out.insert(e->index());
        return e->has_fvar();
    });
}

class Checker {
public:
    Checker(const Environment& base, ImportResolver* resolver, const Options& opts, std::string module)
        : env_(base), resolver_(resolver), opts_(opts), module_(std::move(module)) {}

    FileResult run(std::string_view source) {
        auto parsed = syntax::parse_file(source);
        for (const auto& e : parsed.errors) log_.error(ErrorKind::Syntax, e.message, e.span);
        for (const auto& cmd : parsed.commands) {
            try {
                command(cmd);
            } catch (const elab::ElabError& e) {
                log_.error(e);
            } catch (const kernel::KernelError& e) {
                log_.error(ErrorKind::Kernel, e.what(), cmd.span);
            }
        }
        FileResult r;
        r.env = std::make_shared<const Environment>(env_);
        r.messages = log_.messages();
        std::stable_sort(r.messages.begin(), r.messages.end(),
                         [](const auto& a, const auto& b) { return a.span.begin.offset < b.span.begin.offset; });
        r.snapshots = std::move(snapshots_);
        r.searches = std::move(searches_);
        r.trace = std::move(trace_);
        r.decls = std::move(decls_);
        return r;
    }

private:
    void command(const CommandSyntax& cmd) {
        switch (cmd.kind) {
            case CommandKind::Import: import(cmd); return;
            case CommandKind::Variable: variable(cmd); return;
            case CommandKind::Attribute: attribute(cmd); return;
            default: declaration(cmd); return;
        }
    }

    void import(const CommandSyntax& cmd) {
        if (!resolver_) throw elab::ElabError(ErrorKind::UnknownModule, "unknown module '" + cmd.module + "'", cmd.span);
        env_ = resolver_->import_module(env_, cmd.module, cmd.span);
    }

    void variable(const CommandSyntax& cmd) {
        MetaContext mctx;
        Meta meta(env_, mctx);
        MessageLog scratch;
        Elaborator el(meta, scratch);
        el.set_auto_bound(true);
        el.elab_binders(variables_);
        el.elab_binders(cmd.binders);
        el.synthesize_pending(true);
        variables_.insert(variables_.end(), cmd.binders.begin(), cmd.binders.end());
    }

    void attribute(const CommandSyntax& cmd) {
        const Declaration* d = env_.find(cmd.name.name);
        if (!d) throw elab::ElabError(ErrorKind::UnknownIdentifier, "unknown constant '" + cmd.name.name + "'", cmd.name.span);
        for (const auto& a : cmd.attributes) {
            if (a == "simp" && !simp_usable(d->type)) {
                log_.warning(fmt::format("'{}' cannot be used as a simp lemma", cmd.name.name), cmd.name.span);
                continue;
            }
            if (a != "simp" && a != "instance")
                throw elab::ElabError(ErrorKind::Unsupported, "unsupported attribute '" + a + "'", cmd.span);
            env_ = env_.with_attribute(cmd.name.name, a);
        }
    }

    bool simp_usable(const Term& type) {
        MetaContext mctx;
        Meta meta(env_, mctx);
        return rewriter::usable_as_rule(meta, type);
    }

    void declaration(const CommandSyntax& cmd) {
        std::size_t errors_before = log_.error_count();
        auto env_ptr = std::make_shared<const Environment>(env_);
        MetaContext mctx;
        tactics::Config tcfg{opts_.trace_simp, opts_.trace_module, &trace_};
        tactics::Engine engine(env_ptr, mctx, log_, tcfg);
        Meta meta(*env_ptr, mctx);
        Elaborator el(meta, log_, &engine);
        el.set_auto_bound(true);

        el.elab_binders(variables_);
        std::size_t var_count = meta.lctx().size();
        el.elab_binders(cmd.binders);
        bool is_def = cmd.kind == CommandKind::Definition || (cmd.kind == CommandKind::Instance && cmd.value);

        std::optional<Term> type;
        if (cmd.type) {
            type = el.elab_type(cmd.type);
        } else if (cmd.kind == CommandKind::Class) {
            type = kernel::mk_type();
        } else if (!cmd.value) {
            throw elab::ElabError(ErrorKind::Unsupported, "declaration requires a type", cmd.span);
        }
        el.synthesize_pending(true);
        el.set_auto_bound(false);

        std::optional<Term> value;
        if (is_def && cmd.value) {
            value = type ? el.elab_check(cmd.value, *type) : el.elab(cmd.value);
            if (!type) type = meta.infer(*value);
            el.synthesize_pending(true);
            value = meta.instantiate(*value);
        }
        type = meta.instantiate(*type);

        // Variables enter the declaration when mentioned, together with their dependencies.
        const auto& all = meta.lctx().decls();
        std::set<std::uint64_t> used;
        collect_fvars(*type, used);
        if (value) collect_fvars(*value, used);
        for (std::size_t i = var_count; i < all.size(); ++i) used.insert(all[i].fvar);
        for (std::size_t i = all.size(); i-- > 0;)
            if (used.count(all[i].fvar)) collect_fvars(all[i].type, used);
        for (std::size_t i = 0; i < var_count; ++i) {
            if (!all[i].is_instance()) continue;
            std::set<std::uint64_t> deps;
            collect_fvars(all[i].type, deps);
            if (!deps.empty() && std::all_of(deps.begin(), deps.end(), [&](auto id) { return used.count(id) != 0; }))
                used.insert(all[i].fvar);
        }
        LocalContext filtered;
        std::vector<Term> fvars;
        for (const auto& d : all) {
            if (!used.count(d.fvar)) continue;
            filtered.push_decl(d);
            fvars.push_back(d.as_term());
        }

        if (is_proof_kind(cmd.kind) && cmd.value) {
            if (cmd.value->kind == TermKind::By) {
                Term goal = mctx.new_mvar(*type, filtered, "", elab::MVarKind::Goal);
                engine.run(*cmd.value->tactics, goal->index(), cmd.value->span);
                value = mctx.instantiate(goal);
            } else {
                Meta m2(*env_ptr, mctx, filtered);
                Elaborator el2(m2, log_, &engine);
                Term v = el2.elab_check(cmd.value, *type);
                el2.synthesize_pending(true);
                value = mctx.instantiate(v);
            }
        }
        snapshots_.insert(snapshots_.end(), engine.snapshots().begin(), engine.snapshots().end());
        searches_.insert(searches_.end(), engine.searches().begin(), engine.searches().end());

        if (value && mctx.has_unassigned(*value))
            throw elab::ElabError(ErrorKind::UnsolvedMVars, "declaration still contains metavariables", cmd.span);

        Declaration d;
        d.name = cmd.kind == CommandKind::Example ? "_example" : cmd.name.name;
        d.kind = decl_kind(cmd.kind, cmd.value != nullptr);
        d.type = filtered.mk_pi(fvars, *type);
        if (value) d.value = filtered.mk_lambda(fvars, *value);
        d.module = module_;
        if (cmd.kind == CommandKind::Opaque) d.reducibility = kernel::Reducibility::Opaque;
        for (const auto& a : cmd.attributes) {
            if (a == "reducible") {
                d.reducibility = kernel::Reducibility::Reducible;
            } else if (a == "simp") {
                if (simp_usable(d.type)) {
                    d.attributes.insert("simp");
                } else {
                    log_.warning(fmt::format("'{}' cannot be used as a simp lemma", d.name), cmd.name.span);
                }
            } else if (a == "instance") {
                d.attributes.insert("instance");
            } else {
                throw elab::ElabError(ErrorKind::Unsupported, "unsupported attribute '" + a + "'", cmd.span);
            }
        }
        if (cmd.kind == CommandKind::Instance) d.attributes.insert("instance");
        if (cmd.kind == CommandKind::Class) d.attributes.insert("class");

        try {
            env_ = kernel::check_decl(env_, d);
        } catch (const kernel::KernelError& e) {
            log_.error(ErrorKind::Kernel, e.what(), cmd.span);
            return;
        }
        decls_.push_back({d.name, d.kind, d.type, d.value, cmd.span});
        if (engine.used_sorry() && log_.error_count() == errors_before)
            log_.warning("declaration uses 'sorry'", engine.sorry_span());
    }

    Environment env_;
    ImportResolver* resolver_;
    Options opts_;
    std::string module_;
    MessageLog log_;
    std::vector<syntax::Binder> variables_;
    std::vector<tactics::Snapshot> snapshots_;
    std::vector<tactics::SearchRecord> searches_;
    std::vector<std::string> trace_;
    std::vector<CheckedDecl> decls_;
};

}  // namespace

FileResult check_source(std::string_view source, const Environment& base, ImportResolver* resolver,
                        const Options& opts, const std::string& module) {
    return Checker(base, resolver, opts, module).run(source);
}

}  // namespace microproof::driver
