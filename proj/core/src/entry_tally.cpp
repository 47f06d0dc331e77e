#include "curos/entry_tally.hpp"

#include "curos/errors.hpp"

namespace curos {

EntryTally::EntryTally(Index n, Index s)
    : n_(n), s_(s), row_(static_cast<std::size_t>(n), 0), col_(static_cast<std::size_t>(s), 0) {}

void EntryTally::add_rows(const IndexSet& p) {
    if (p.ambient() != n_) throw ArgumentError("EntryTally: row set ambient mismatch");
    for (Index i : p)
        if (!row_[static_cast<std::size_t>(i)]) {
            row_[static_cast<std::size_t>(i)] = 1;
            ++nrows_;
        }
}

void EntryTally::add_cols(const IndexSet& s) {
    if (s.ambient() != s_) throw ArgumentError("EntryTally: column set ambient mismatch");
    for (Index j : s)
        if (!col_[static_cast<std::size_t>(j)]) {
            col_[static_cast<std::size_t>(j)] = 1;
            ++ncols_;
        }
}

void EntryTally::add_block(const IndexSet& p, const IndexSet& s) {
    if (p.ambient() != n_ || s.ambient() != s_) throw ArgumentError("EntryTally: block ambient mismatch");
    for (Index i : p)
        for (Index j : s) cells_.insert(static_cast<long long>(i) * s_ + j);
}

long long EntryTally::count() const {
    long long total = static_cast<long long>(nrows_) * s_ + static_cast<long long>(ncols_) * n_ -
                      static_cast<long long>(nrows_) * ncols_;
    for (long long c : cells_) {
        const auto i = static_cast<std::size_t>(c / s_);
        const auto j = static_cast<std::size_t>(c % s_);
        if (!row_[i] && !col_[j]) ++total;
    }
    return total;
}

} // namespace curos
