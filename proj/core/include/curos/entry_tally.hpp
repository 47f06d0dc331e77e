#pragma once

#include <unordered_set>
#include <vector>

#include "curos/index_set.hpp"

namespace curos {

// Counts distinct (i, j) entries covered by full rows, full columns and
// arbitrary cross blocks of an n x s matrix, without an n x s bitmap.
class EntryTally {
public:
    EntryTally(Index n, Index s);

    void add_rows(const IndexSet& p);
    void add_cols(const IndexSet& s);
    void add_block(const IndexSet& p, const IndexSet& s);

    long long count() const;

private:
    Index n_, s_;
    std::vector<char> row_, col_;
    Index nrows_ = 0, ncols_ = 0;
    std::unordered_set<long long> cells_;
};

} // namespace curos
