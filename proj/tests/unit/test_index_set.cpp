#include "doctest.h"

#include "curos/entry_tally.hpp"
#include "curos/errors.hpp"
#include "curos/index_set.hpp"

#include <random>
#include <set>

using namespace curos;

TEST_CASE("IndexSet keeps selection order and rejects bad input") {
    IndexSet p({4, 1, 3}, 5);
    CHECK(p.size() == 3);
    CHECK(p[0] == 4);
    CHECK(p[2] == 3);
    CHECK(p.contains(1));
    CHECK_FALSE(p.contains(0));
    CHECK(p.prefix(2) == IndexSet({4, 1}, 5));
    CHECK_THROWS_AS(p.prefix(4), ArgumentError);

    p.push_back(0);
    CHECK(p.size() == 4);
    CHECK_THROWS_AS(p.push_back(0), ArgumentError);
    CHECK_THROWS_AS(p.push_back(5), ArgumentError);

    CHECK_THROWS_AS(IndexSet({1, 1}, 3), ArgumentError);
    CHECK_THROWS_AS(IndexSet({3}, 3), ArgumentError);
    CHECK_THROWS_AS(IndexSet({-1}, 3), ArgumentError);

    const IndexSet r = IndexSet::range(3, 6);
    CHECK(r == IndexSet({0, 1, 2}, 6));
}

TEST_CASE("EntryTally matches a brute-force set of covered cells") {
    std::mt19937_64 g(3);
    for (int trial = 0; trial < 40; ++trial) {
        const Index n = 5 + static_cast<Index>(g() % 20), s = 3 + static_cast<Index>(g() % 15);
        EntryTally tally(n, s);
        std::set<std::pair<Index, Index>> cells;
        auto draw = [&](Index ambient) {
            std::vector<Index> all;
            for (Index i = 0; i < ambient; ++i)
                if (g() % 3 == 0) all.push_back(i);
            return IndexSet(all, ambient);
        };
        for (int op = 0; op < 6; ++op) {
            switch (g() % 3) {
            case 0: {
                const IndexSet p = draw(n);
                tally.add_rows(p);
                for (Index i : p)
                    for (Index j = 0; j < s; ++j) cells.insert({i, j});
                break;
            }
            case 1: {
                const IndexSet c = draw(s);
                tally.add_cols(c);
                for (Index j : c)
                    for (Index i = 0; i < n; ++i) cells.insert({i, j});
                break;
            }
            default: {
                const IndexSet p = draw(n), c = draw(s);
                tally.add_block(p, c);
                for (Index i : p)
                    for (Index j : c) cells.insert({i, j});
            }
            }
        }
        CHECK(tally.count() == static_cast<long long>(cells.size()));
    }
}

TEST_CASE("EntryTally rejects mismatched ambient sizes") {
    EntryTally tally(4, 3);
    CHECK_THROWS_AS(tally.add_rows(IndexSet({0}, 5)), ArgumentError);
    CHECK_THROWS_AS(tally.add_cols(IndexSet({0}, 4)), ArgumentError);
    CHECK_THROWS_AS(tally.add_block(IndexSet({0}, 4), IndexSet({0}, 4)), ArgumentError);
}
