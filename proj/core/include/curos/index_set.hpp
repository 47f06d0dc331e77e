#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace curos {

using Index = Eigen::Index;

// Ordered list of distinct indices into a dimension of size `ambient`.
// Order is selection order and is preserved.
class IndexSet {
public:
    IndexSet() = default;
    IndexSet(std::vector<Index> indices, Index ambient);
    IndexSet(std::initializer_list<Index> indices, Index ambient);

    static IndexSet range(Index count, Index ambient);

    Index size() const noexcept { return static_cast<Index>(indices_.size()); }
    bool empty() const noexcept { return indices_.empty(); }
    Index ambient() const noexcept { return ambient_; }
    Index operator[](Index k) const { return indices_[static_cast<std::size_t>(k)]; }
    std::span<const Index> view() const noexcept { return indices_; }
    const std::vector<Index>& indices() const noexcept { return indices_; }

    auto begin() const noexcept { return indices_.begin(); }
    auto end() const noexcept { return indices_.end(); }

    bool contains(Index i) const;

    // First `count` entries.
    IndexSet prefix(Index count) const;

    // Appends an index; throws ArgumentError on duplicates or out-of-range.
    void push_back(Index i);

    friend bool operator==(const IndexSet&, const IndexSet&) = default;

private:
    std::vector<Index> indices_;
    Index ambient_ = 0;
};

} // namespace curos
