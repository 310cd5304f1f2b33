#include "microproof/kernel/environment.h"

#include <stdexcept>

namespace microproof::kernel {

std::string to_string(DeclKind k) {
    switch (k) {
        case DeclKind::Axiom: return "axiom";
        case DeclKind::Definition: return "def";
        case DeclKind::Theorem: return "theorem";
        case DeclKind::Example: return "example";
    }
    return "?";
}

const Declaration* Environment::find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : decls_[it->second].get();
}

std::optional<std::size_t> Environment::position(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool Environment::is_class(const std::string& name) const {
    const Declaration* d = find(name);
    return d && d->has_attribute("class");
}

Environment Environment::with_import(const std::string& module) const {
    Environment out = *this;
    out.imports_.insert(module);
    return out;
}

Environment Environment::with_attribute(const std::string& name, const std::string& attr) const {
    if (attr != "simp" && attr != "instance" && attr != "class")
        throw std::invalid_argument("unknown attribute '" + attr + "'");
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("unknown declaration '" + name + "'");
    Environment out = *this;
    auto d = std::make_shared<Declaration>(*decls_[it->second]);
    if (!d->attributes.insert(attr).second) return out;
    out.decls_[it->second] = d;
    if (attr == "simp") out.simp_set_.push_back(name);
    if (attr == "instance") out.instance_set_.push_back(name);
    return out;
}

void Environment::add_unchecked(Declaration d) {
    if (index_.count(d.name)) throw std::logic_error("duplicate declaration '" + d.name + "'");
    const std::string name = d.name;
    const bool simp = d.has_attribute("simp");
    const bool inst = d.has_attribute("instance");
    index_.emplace(name, decls_.size());
    decls_.push_back(std::make_shared<const Declaration>(std::move(d)));
    if (simp) simp_set_.push_back(name);
    if (inst) instance_set_.push_back(name);
}

namespace {

void mix(std::uint64_t& h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
}

std::uint64_t hash_string(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::uint64_t Environment::content_hash() const {
    std::uint64_t h = 0;
    for (const auto& d : decls_) {
        mix(h, hash_string(d->name));
        mix(h, static_cast<std::uint64_t>(d->kind));
        mix(h, static_cast<std::uint64_t>(d->reducibility));
        mix(h, d->type->hash());
        if (d->value) mix(h, (*d->value)->hash());
        for (const auto& a : d->attributes) mix(h, hash_string(a));
        mix(h, d->uses_sorry ? 1 : 0);
    }
    for (const auto& m : imports_) mix(h, hash_string(m));
    return h;
}

}  // namespace microproof::kernel
