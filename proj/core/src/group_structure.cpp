#include <hlasso/group_structure.hpp>

#include <algorithm>
#include <string>
#include <unordered_map>

#include <hlasso/errors.hpp>

namespace hlasso {

GroupStructure GroupStructure::build(std::vector<GroupSpec> spec, Index n_vars)
{
    if (n_vars <= 0) {
        throw InputError("group structure needs at least one variable");
    }
    GroupStructure g;
    g.n_vars_ = n_vars;
    g.memberships_.assign(static_cast<std::size_t>(n_vars), {});

    for (std::size_t k = 0; k < spec.size(); ++k) {
        auto& members = spec[k].members;
        if (members.empty()) {
            throw InputError("group '" + spec[k].id + "' is empty");
        }
        std::vector<Index> sorted = members;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw InputError("group '" + spec[k].id + "' lists a variable twice");
        }
        for (Index j : members) {
            if (j < 0 || j >= n_vars) {
                throw InputError("variable index " + std::to_string(j) + " in group '" + spec[k].id +
                                 "' is outside [0, " + std::to_string(n_vars) + ")");
            }
            auto& m = g.memberships_[static_cast<std::size_t>(j)];
            if (!m.empty()) g.overlapping_ = true;
            m.push_back(static_cast<Index>(k));
        }
        g.groups_.push_back(std::move(members));
        g.ids_.push_back(std::move(spec[k].id));
    }

    for (Index j = 0; j < n_vars; ++j) {
        if (g.memberships_[static_cast<std::size_t>(j)].empty()) {
            throw InputError("variable not assigned to any group: index " + std::to_string(j));
        }
    }
    return g;
}

GroupStructure GroupStructure::build(const std::vector<std::vector<Index>>& groups, Index n_vars)
{
    std::vector<GroupSpec> spec;
    spec.reserve(groups.size());
    for (std::size_t k = 0; k < groups.size(); ++k) {
        spec.push_back({std::to_string(k), groups[k]});
    }
    return build(std::move(spec), n_vars);
}

GroupStructure GroupStructure::contiguous(std::span<const Index> sizes)
{
    std::vector<std::vector<Index>> groups;
    Index next = 0;
    for (Index s : sizes) {
        std::vector<Index> g(static_cast<std::size_t>(std::max<Index>(s, 0)));
        for (auto& j : g) j = next++;
        groups.push_back(std::move(g));
    }
    return build(groups, next);
}

GroupStructure GroupStructure::restrict_to(std::span<const Index> keep) const
{
    std::unordered_map<Index, Index> renumber;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= n_vars_) {
            throw InputError("restricted index " + std::to_string(keep[i]) + " out of range");
        }
        if (!renumber.emplace(keep[i], static_cast<Index>(i)).second) {
            throw InputError("restricted index " + std::to_string(keep[i]) + " listed twice");
        }
    }
    std::vector<GroupSpec> spec;
    for (std::size_t k = 0; k < groups_.size(); ++k) {
        GroupSpec s{ids_[k], {}};
        for (Index j : groups_[k]) {
            if (auto it = renumber.find(j); it != renumber.end()) s.members.push_back(it->second);
        }
        if (!s.members.empty()) spec.push_back(std::move(s));
    }
    return build(std::move(spec), static_cast<Index>(keep.size()));
}

} // namespace hlasso
