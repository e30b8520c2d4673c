#pragma once

// Ingredient generators: complete designs, round-robin 1-factorizations,
// and a backtracking search for large sets. Every generated object is run
// through the design-model verifiers before it is returned.

#include <tdes/arith.hpp>
#include <tdes/design.hpp>

#include <cstdint>
#include <vector>

namespace tdes {

// All k-subsets of {0..v-1} in canonical (lexicographic) order. k = 0 gives
// the empty design: exactly one empty block.
inline Design complete_design(int v, int k, std::uint64_t budget = 100'000'000) {
    if (k < 0 || v < 0 || k > v) throw contract_error("complete_design: need 0 <= k <= v");
    Int count = binomial(v, k);
    if (count * std::max(k, 1) > budget)
        throw budget_error("complete_design: C(v,k) = " + count.str() + " exceeds budget");
    Design d;
    d.v = v;
    d.k = k;
    if (k == 0) {
        d.blocks.push_back({});
        return d;
    }
    std::vector<int> s(k);
    for (int i = 0; i < k; ++i) s[i] = i;
    do {
        d.blocks.push_back(s);
    } while (detail::next_subset(s, v));
    return d;
}

// index of the pair {a,b} (a < b) in the lexicographic list of 2-subsets
namespace detail {
inline int pair_rank(int a, int b, int v) {
    return a * (2 * v - a - 1) / 2 + (b - a - 1);
}
}  // namespace detail

// The complete 2-design on an even number of points partitioned into v-1
// perfect matchings by the circle method. Verified (1,1) before returning.
inline Resolution round_robin_one_factorization(int v) {
    if (v < 2 || v % 2 != 0)
        throw contract_error("round_robin_one_factorization: v must be even and >= 2");
    Resolution r;
    r.design = complete_design(v, 2);
    r.s = 1;
    r.tau = 1;
    const int n = v - 1;
    for (int round = 0; round < n; ++round) {
        std::vector<int> cls;
        cls.reserve(v / 2);
        int a = round, b = v - 1;
        cls.push_back(detail::pair_rank(std::min(a, b), std::max(a, b), v));
        for (int j = 1; j <= v / 2 - 1; ++j) {
            int x = (round + j) % n;
            int y = (round - j + n) % n;
            cls.push_back(detail::pair_rank(std::min(x, y), std::max(x, y), v));
        }
        r.classes.push_back(std::move(cls));
    }
    ResolutionReport rep = verify_resolution(r);
    if (!rep.ok || rep.tau != 1)
        throw contract_error("round_robin_one_factorization: self-check failed");
    return r;
}

// ---------------------------------------------------------------------------
// Large-set search

enum class SearchOutcome {
    found,
    not_found,        // search space exhausted without a solution
    budget_exceeded,  // inconclusive
};

struct LargeSetSearchResult {
    SearchOutcome outcome = SearchOutcome::not_found;
    Resolution resolution;  // valid when outcome == found
    std::uint64_t nodes = 0;
};

namespace detail {

struct LargeSetSearch {
    int s, k, v;
    long long n_classes;
    std::uint64_t tau;
    std::uint64_t budget;
    Design complete;
    std::vector<std::vector<std::uint64_t>> sub_ranks;  // per block: its s-subset ranks
    std::vector<std::uint64_t> remaining;               // per s-subset: unassigned blocks containing it
    std::vector<std::vector<std::uint64_t>> count;      // per class x subset: covered count
    std::vector<int> assignment;
    std::uint64_t nodes = 0;
    bool out_of_budget = false;

    bool dfs(std::size_t bi, int classes_used) {
        if (bi == complete.blocks.size()) return true;
        if (++nodes > budget) {
            out_of_budget = true;
            return false;
        }
        const auto& subs = sub_ranks[bi];
        for (std::uint64_t sr : subs) --remaining[sr];
        int class_cap = std::min<long long>(n_classes, classes_used + 1);
        for (int c = 0; c < class_cap; ++c) {
            bool fits = true;
            for (std::uint64_t sr : subs)
                if (count[c][sr] >= tau) {
                    fits = false;
                    break;
                }
            if (!fits) continue;
            for (std::uint64_t sr : subs) ++count[c][sr];
            // supply check: every s-subset of this block must still be able
            // to reach tau in every class
            bool feasible = true;
            for (std::uint64_t sr : subs) {
                std::uint64_t deficit = 0;
                for (int c2 = 0; c2 < n_classes; ++c2) deficit += tau - count[c2][sr];
                if (deficit > remaining[sr]) {
                    feasible = false;
                    break;
                }
            }
            if (feasible && dfs(bi + 1, std::max(classes_used, c + 1))) {
                assignment[bi] = c;
                return true;
            }
            for (std::uint64_t sr : subs) --count[c][sr];
            if (out_of_budget) break;
        }
        for (std::uint64_t sr : subs) ++remaining[sr];
        return false;
    }
};

}  // namespace detail

// Depth-first search for an LS[N](s,k,v): a partition of the complete
// design into N classes, each an s-(v,k,tau) design. Deterministic: blocks
// in canonical order, classes tried in index order (with the usual cap that
// a block may only open one new class). Never claims nonexistence.
inline LargeSetSearchResult backtrack_large_set(int s, int k, int v, long long n_classes,
                                                std::uint64_t budget = 50'000'000) {
    if (!(0 < s && s < k && k <= v)) throw contract_error("backtrack_large_set: need 0 < s < k <= v");
    if (n_classes < 1) throw contract_error("backtrack_large_set: need N >= 1");
    Int tau_i = binomial(v - s, k - s);
    if (tau_i % n_classes != 0)
        throw contract_error("backtrack_large_set: N does not divide C(v-s, k-s)");
    detail::LargeSetSearch search;
    search.s = s;
    search.k = k;
    search.v = v;
    search.n_classes = n_classes;
    search.tau = static_cast<std::uint64_t>(tau_i / n_classes);
    search.budget = budget;
    search.complete = complete_design(v, k);

    const std::size_t n_subsets = static_cast<std::size_t>(binomial(v, s));
    search.remaining.assign(n_subsets, 0);
    search.sub_ranks.resize(search.complete.blocks.size());
    std::vector<int> idx(s), sub(s);
    for (std::size_t bi = 0; bi < search.complete.blocks.size(); ++bi) {
        const auto& blk = search.complete.blocks[bi];
        for (int i = 0; i < s; ++i) idx[i] = i;
        for (;;) {
            for (int i = 0; i < s; ++i) sub[i] = blk[idx[i]];
            std::uint64_t rank = detail::colex_rank(sub);
            search.sub_ranks[bi].push_back(rank);
            ++search.remaining[rank];
            if (!detail::next_subset(idx, k)) break;
        }
    }
    search.count.assign(n_classes, std::vector<std::uint64_t>(n_subsets, 0));
    search.assignment.assign(search.complete.blocks.size(), -1);

    LargeSetSearchResult result;
    bool found = search.dfs(0, 0);
    result.nodes = search.nodes;
    if (!found) {
        result.outcome =
            search.out_of_budget ? SearchOutcome::budget_exceeded : SearchOutcome::not_found;
        return result;
    }
    Resolution r;
    r.design = search.complete;
    r.s = s;
    r.tau = search.tau;
    r.classes.assign(n_classes, {});
    for (std::size_t bi = 0; bi < search.assignment.size(); ++bi)
        r.classes[search.assignment[bi]].push_back(static_cast<int>(bi));
    ResolutionReport rep = verify_resolution(r);
    if (!rep.ok || rep.tau != Int(search.tau))
        throw contract_error("backtrack_large_set: verification of found resolution failed");
    result.outcome = SearchOutcome::found;
    result.resolution = std::move(r);
    return result;
}

}  // namespace tdes
