#pragma once

#include "gp2/errors.hpp"
#include "gp2/typespace.hpp"

#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace gp2 {

// An outgoing edge seen from its source: the pair (η, π′) of N_G(π).
struct Neighbor {
    BinaryType eta;
    UnaryType target;
    auto operator<=>(const Neighbor&) const = default;
};

// The graph of compatible unary types and configurations.  Edges are kept
// in both directions, so (π, η, π′) is present iff (π′, η̄, π) is.
class TypeGraph {
public:
    TypeGraph() = default;
    explicit TypeGraph(std::shared_ptr<const TypeSpace> space) : space_(std::move(space)) {}

    const TypeSpace& space() const { return *space_; }
    std::shared_ptr<const TypeSpace> space_ptr() const { return space_; }

    bool empty() const noexcept { return adj_.empty(); }
    std::size_t vertex_count() const noexcept { return adj_.size(); }
    std::size_t edge_count() const noexcept {
        std::size_t n = 0;
        for (const auto& [v, out] : adj_) n += out.size();
        return n;
    }

    bool has_vertex(UnaryType pi) const { return adj_.count(pi) != 0; }
    bool has_edge(const Configuration& e) const {
        auto it = adj_.find(e.source);
        return it != adj_.end() && it->second.count(Neighbor{e.label, e.target}) != 0;
    }

    std::vector<UnaryType> vertices() const {
        std::vector<UnaryType> out;
        for (const auto& [v, n] : adj_) out.push_back(v);
        return out;
    }
    std::vector<Configuration> edges() const {
        std::vector<Configuration> out;
        for (const auto& [v, n] : adj_)
            for (const auto& nb : n) out.push_back({v, nb.eta, nb.target});
        return out;
    }
    const std::set<Neighbor>& neighbors(UnaryType pi) const {
        auto it = adj_.find(pi);
        if (it == adj_.end()) throw Error("not a vertex: " + space_->describe(pi));
        return it->second;
    }

    void add_vertex(UnaryType pi) { adj_[pi]; }

    // Adds e and its reverse; both endpoints must already be vertices.
    void add_edge(const Configuration& e) {
        if (e.label.null()) throw Error("edges carry non-null binary types");
        if (!has_vertex(e.source) || !has_vertex(e.target)) throw Error("edge endpoint is not a vertex");
        adj_[e.source].insert({e.label, e.target});
        adj_[e.target].insert({reverse(e.label), e.source});
    }

    // Adds e without its reverse.  The result may fail symmetric().
    void add_arc(const Configuration& e) {
        if (!has_vertex(e.source) || !has_vertex(e.target)) throw Error("edge endpoint is not a vertex");
        adj_[e.source].insert({e.label, e.target});
    }

    void remove_edge(const Configuration& e) {
        if (!has_edge(e)) throw Error("no such edge");
        adj_[e.source].erase({e.label, e.target});
        adj_[e.target].erase({reverse(e.label), e.source});
    }

    void remove_vertex(UnaryType pi) {
        auto it = adj_.find(pi);
        if (it == adj_.end()) throw Error("no such vertex");
        for (const auto& nb : it->second)
            if (nb.target != pi) adj_[nb.target].erase({reverse(nb.eta), pi});
        adj_.erase(it);
    }

    // The subgraph induced by a vertex subset.
    TypeGraph induced(const std::vector<UnaryType>& keep) const {
        TypeGraph g(space_);
        std::set<UnaryType> ks(keep.begin(), keep.end());
        for (const auto& v : keep) g.adj_[v];
        for (const auto& v : keep)
            for (const auto& nb : neighbors(v))
                if (ks.count(nb.target)) g.adj_[v].insert(nb);
        return g;
    }

    bool symmetric() const {
        for (const auto& [v, out] : adj_)
            for (const auto& nb : out) {
                auto it = adj_.find(nb.target);
                if (it == adj_.end() || !it->second.count({reverse(nb.eta), v})) return false;
            }
        return true;
    }

    // "V <atoms>" per vertex, then "E <src> | <eta> | <dst>" per edge, sorted.
    std::string dump() const {
        std::ostringstream os;
        for (const auto& [v, n] : adj_) os << "V " << space_->describe(v) << '\n';
        for (const auto& [v, n] : adj_)
            for (const auto& nb : n)
                os << "E " << space_->describe(v) << " | " << space_->describe(nb.eta) << " | "
                   << space_->describe(nb.target) << '\n';
        return os.str();
    }

    bool operator==(const TypeGraph& o) const { return adj_ == o.adj_; }

private:
    std::shared_ptr<const TypeSpace> space_;
    std::map<UnaryType, std::set<Neighbor>> adj_;
};

// G_Ψ: compatible unary types and all compatible non-null configurations.
inline constexpr std::size_t default_config_cap = std::size_t{1} << 25;

inline TypeGraph build_graph(const CompiledNormalForm& cnf, std::size_t config_cap = default_config_cap) {
    const TypeSpace& ts = cnf.space();
    TypeGraph g(std::make_shared<const TypeSpace>(ts));
    std::vector<UnaryType> verts;
    for (const auto& pi : ts.all_unary_types())
        if (cnf.compatible_unary(pi)) {
            verts.push_back(pi);
            g.add_vertex(pi);
        }
    const auto etas = ts.non_null_binary_types();
    const double work = 0.5 * static_cast<double>(verts.size()) * static_cast<double>(verts.size() + 1) *
                        static_cast<double>(etas.size());
    if (work > static_cast<double>(config_cap))
        throw CapExceeded(std::to_string(verts.size()) + " unary and " + std::to_string(etas.size()) +
                          " binary types give more configurations than the cap of " + std::to_string(config_cap));
    for (const auto& pi : verts)
        for (const auto& eta : etas)
            for (const auto& pi2 : verts)
                if (pi <= pi2 && cnf.compatible_config(pi, eta, pi2)) g.add_edge({pi, eta, pi2});
    // Configurations with π > π′ are reverses of ones already examined.
    if (!g.symmetric()) throw InternalError("type graph is not symmetric");
    const std::size_t exponent = 2 * ts.n() + 4 * ts.m();
    if (exponent < 63 && g.edge_count() > (std::size_t{1} << exponent))
        throw InternalError("type graph exceeds the edge bound");
    return g;
}

}  // namespace gp2
