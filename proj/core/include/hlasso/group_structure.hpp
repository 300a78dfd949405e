#pragma once

#include <span>
#include <string>
#include <vector>

#include <hlasso/types.hpp>

namespace hlasso {

/// One entry of a group specification: a label and the 0-based column
/// indices of its members.
struct GroupSpec
{
    std::string id;
    std::vector<Index> members;
};

/**
 * Validated mapping from groups to variable indices.
 *
 * Every variable in [0, n_vars) belongs to at least one group and no group is
 * empty. When no index appears in two groups the structure is a partition and
 * `overlapping()` is false; the disjoint solvers require that.
 */
class GroupStructure
{
public:
    /// Throws InputError on empty groups, out-of-range or repeated-in-group
    /// indices, and variables that no group covers.
    static GroupStructure build(std::vector<GroupSpec> spec, Index n_vars);

    /// Convenience overload; group ids become "0", "1", ...
    static GroupStructure build(const std::vector<std::vector<Index>>& groups, Index n_vars);

    /// Consecutive blocks of the given sizes: {[0..s0), [s0..s0+s1), ...}.
    static GroupStructure contiguous(std::span<const Index> sizes);

    Index n_vars() const noexcept { return n_vars_; }
    Index n_groups() const noexcept { return static_cast<Index>(groups_.size()); }
    bool overlapping() const noexcept { return overlapping_; }

    const std::vector<Index>& members(Index k) const { return groups_.at(static_cast<std::size_t>(k)); }
    const std::string& id(Index k) const { return ids_.at(static_cast<std::size_t>(k)); }
    const std::vector<std::vector<Index>>& groups() const noexcept { return groups_; }

    /// Groups containing variable j, in group order.
    const std::vector<Index>& memberships(Index j) const
    {
        return memberships_.at(static_cast<std::size_t>(j));
    }

    /// Owning group of variable j. Only meaningful for disjoint structures.
    Index group_of(Index j) const { return memberships(j).front(); }

    /// Keeps only the listed variables (renumbered in the given order) and
    /// drops groups left empty. Used for support-restricted refits.
    GroupStructure restrict_to(std::span<const Index> keep) const;

private:
    GroupStructure() = default;

    Index n_vars_ = 0;
    bool overlapping_ = false;
    std::vector<std::vector<Index>> groups_;
    std::vector<std::string> ids_;
    std::vector<std::vector<Index>> memberships_;
};

} // namespace hlasso
