#include "curos/index_set.hpp"

#include <algorithm>
#include <string>

#include "curos/errors.hpp"

namespace curos {

IndexSet::IndexSet(std::vector<Index> indices, Index ambient)
    : indices_(std::move(indices)), ambient_(ambient) {
    if (ambient_ < 0) throw ArgumentError("IndexSet: negative ambient dimension");
    std::vector<char> seen(static_cast<std::size_t>(ambient_), 0);
    for (Index i : indices_) {
        if (i < 0 || i >= ambient_)
            throw ArgumentError("IndexSet: index " + std::to_string(i) + " outside [0, " +
                                std::to_string(ambient_) + ")");
        if (seen[static_cast<std::size_t>(i)]++)
            throw ArgumentError("IndexSet: duplicate index " + std::to_string(i));
    }
}

IndexSet::IndexSet(std::initializer_list<Index> indices, Index ambient)
    : IndexSet(std::vector<Index>(indices), ambient) {}

IndexSet IndexSet::range(Index count, Index ambient) {
    std::vector<Index> v(static_cast<std::size_t>(count));
    for (Index k = 0; k < count; ++k) v[static_cast<std::size_t>(k)] = k;
    return IndexSet(std::move(v), ambient);
}

bool IndexSet::contains(Index i) const {
    return std::find(indices_.begin(), indices_.end(), i) != indices_.end();
}

IndexSet IndexSet::prefix(Index count) const {
    if (count < 0 || count > size()) throw ArgumentError("IndexSet::prefix: count out of range");
    IndexSet out;
    out.indices_.assign(indices_.begin(), indices_.begin() + count);
    out.ambient_ = ambient_;
    return out;
}

void IndexSet::push_back(Index i) {
    if (i < 0 || i >= ambient_) throw ArgumentError("IndexSet::push_back: index out of range");
    if (contains(i)) throw ArgumentError("IndexSet::push_back: duplicate index");
    indices_.push_back(i);
}

} // namespace curos
