#pragma once

#include "gp2/formula.hpp"
#include "gp2/parser.hpp"

#include <string>
#include <vector>

namespace gp2 {

struct Violation {
    std::string subformula;
    std::string reason;

    bool operator==(const Violation&) const = default;
};

namespace detail {

inline void check_guarded(const Formula& f, std::vector<Violation>& out) {
    switch (f.kind()) {
        case Kind::Not:
        case Kind::And:
        case Kind::Or:
        case Kind::Implies:
            for (const auto& c : f.children()) check_guarded(c, out);
            return;
        case Kind::Forall:
        case Kind::Exists: {
            const auto& guard = f.guard();
            if (!guard) {
                // A closed universal sentence ∀x φ(x) is the one unguarded form allowed.
                if (f.kind() != Kind::Forall || f.free_vars() != 0)
                    out.push_back({pretty(f), "quantifier has no guard"});
            } else if (guard->kind == Kind::Equal) {
                out.push_back({pretty(f), "equality cannot serve as a guard"});
            } else {
                const std::uint8_t needed = static_cast<std::uint8_t>(f.body().free_vars() | var_bit(f.bound()));
                if ((needed & ~guard->vars()) != 0)
                    out.push_back({pretty(f), "guard " + pretty(*guard) + " does not cover the variables of the body"});
            }
            check_guarded(f.body(), out);
            return;
        }
        case Kind::Count:
            for (const auto& t : f.count().terms) check_guarded(t.inner, out);
            return;
        default: return;
    }
}

}  // namespace detail

// Checks the guard discipline of the two-variable guarded fragment with
// counting quantifiers.  An empty result means the sentence is well formed.
inline std::vector<Violation> validate_guarded(const Sentence& s) {
    std::vector<Violation> out;
    if (s.free_vars() != 0) out.push_back({pretty(s), "formula has free variables"});
    detail::check_guarded(s, out);
    return out;
}

}  // namespace gp2
