#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "microproof/kernel/expr.h"

namespace microproof::kernel {

enum class DeclKind : std::uint8_t { Axiom, Definition, Theorem, Example };
enum class Reducibility : std::uint8_t { Reducible, Default, Opaque };

std::string to_string(DeclKind k);

struct Declaration {
    std::string name;
    DeclKind kind = DeclKind::Axiom;
    Term type;
    std::optional<Term> value;
    Reducibility reducibility = Reducibility::Default;
    /// Subset of {"simp", "instance", "class"}.
    std::set<std::string> attributes;
    bool uses_sorry = false;
    /// Definitional height, used to pick which side to unfold first in def_eq.
    std::uint32_t height = 0;
    /// Module the declaration came from ("Init" for kernel builtins).
    std::string module;

    bool has_attribute(const std::string& a) const { return attributes.count(a) != 0; }
};

/// Ordered store of checked declarations. Copies are cheap (declarations are
/// shared); every extension goes through check_decl.
class Environment {
public:
    const Declaration* find(const std::string& name) const;
    bool contains(const std::string& name) const { return find(name) != nullptr; }

    const std::vector<std::shared_ptr<const Declaration>>& decls() const { return decls_; }
    std::size_t size() const { return decls_.size(); }
    /// Position of a declaration in environment order.
    std::optional<std::size_t> position(const std::string& name) const;

    const std::vector<std::string>& simp_set() const { return simp_set_; }
    const std::vector<std::string>& instance_set() const { return instance_set_; }
    bool is_class(const std::string& name) const;

    const std::set<std::string>& import_closure() const { return imports_; }
    Environment with_import(const std::string& module) const;

    /// Registers an attribute on an existing declaration. Throws std::invalid_argument
    /// for unknown names or attributes.
    Environment with_attribute(const std::string& name, const std::string& attr) const;

    /// Stable content hash over declaration names, kinds, types, values and attributes.
    std::uint64_t content_hash() const;

private:
    friend Environment check_decl(const Environment&, const Declaration&);
    friend Environment builtin_environment();
    void add_unchecked(Declaration d);

    std::vector<std::shared_ptr<const Declaration>> decls_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> simp_set_;
    std::vector<std::string> instance_set_;
    std::set<std::string> imports_;
};

}  // namespace microproof::kernel
