#pragma once

// Explicit designs as block sets, resolutions with ordered classes, the
// cyclic distance on class indices, and the exhaustive verification oracles.
// Verification never trusts declared metadata: it counts.

#include <tdes/arith.hpp>
#include <tdes/parallel.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace tdes {

// X = X1 u X2 with X1 = {0..v1-1}, X2 = {v1..v1+v2-1}.
struct PointPartition {
    int v1 = 0;
    int v2 = 0;
    int v() const { return v1 + v2; }
};

struct Design {
    int v = 0;
    int k = 0;
    std::vector<std::vector<int>> blocks;
};

// Sort points within blocks, then blocks lexicographically. Returns the
// permutation perm with perm[old_index] = new_index, so callers holding
// block indices (resolution classes) can remap them.
inline std::vector<std::size_t> canonicalize(Design& d) {
    for (auto& b : d.blocks) {
        std::sort(b.begin(), b.end());
        if (static_cast<int>(b.size()) != d.k)
            throw contract_error("design block has wrong size");
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (b[i] < 0 || b[i] >= d.v) throw contract_error("design block point out of range");
            if (i > 0 && b[i] == b[i - 1]) throw contract_error("design block has repeated point");
        }
    }
    std::vector<std::size_t> order(d.blocks.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&d](std::size_t a, std::size_t b) {
        return d.blocks[a] < d.blocks[b];
    });
    std::vector<std::vector<int>> sorted;
    sorted.reserve(d.blocks.size());
    std::vector<std::size_t> perm(d.blocks.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        perm[order[pos]] = pos;
        sorted.push_back(std::move(d.blocks[order[pos]]));
    }
    d.blocks = std::move(sorted);
    return perm;
}

inline bool is_canonical(const Design& d) {
    for (const auto& b : d.blocks)
        if (!std::is_sorted(b.begin(), b.end())) return false;
    return std::is_sorted(d.blocks.begin(), d.blocks.end());
}

// No two equal blocks; requires canonical form so equality is adjacency.
inline bool is_simple(const Design& d) {
    if (!is_canonical(d)) throw contract_error("is_simple: design not canonical");
    for (std::size_t i = 1; i < d.blocks.size(); ++i)
        if (d.blocks[i] == d.blocks[i - 1]) return false;
    return true;
}

// Cyclic distance between resolution class indices (1-based, as written
// A_1..A_N everywhere in the interfaces).
inline long long class_distance(long long h, long long j, long long n_classes) {
    if (h < 1 || h > n_classes || j < 1 || j > n_classes)
        throw contract_error("class_distance: class index out of range");
    long long diff = h > j ? h - j : j - h;
    return std::min(diff, n_classes - diff);
}

inline Design complement_design(const Design& d) {
    Design out;
    out.v = d.v;
    out.k = d.v - d.k;
    out.blocks.reserve(d.blocks.size());
    std::vector<char> in_block(d.v);
    for (const auto& b : d.blocks) {
        std::fill(in_block.begin(), in_block.end(), 0);
        for (int p : b) in_block[p] = 1;
        std::vector<int> comp;
        comp.reserve(out.k);
        for (int p = 0; p < d.v; ++p)
            if (!in_block[p]) comp.push_back(p);
        out.blocks.push_back(std::move(comp));
    }
    canonicalize(out);
    return out;
}

// ---------------------------------------------------------------------------
// t-design verification

struct VerifyOptions {
    std::uint64_t budget = 100'000'000;  // counter updates / containment checks
    int workers = 0;                     // 0 = auto
    // 0 = choose the cheaper path, 1 = force subset enumeration,
    // 2 = force the per-block counter sweep
    int force_path = 0;
};

struct VerifyReport {
    bool ok = false;
    Int lambda = 0;             // valid when ok
    std::vector<int> witness;   // first t-set with a deviating count when !ok
    Int witness_count = 0;
    Int expected = 0;           // the count the witness was compared against
    const char* path = "";
};

namespace detail {

// colexicographic rank of a sorted subset
inline std::uint64_t colex_rank(const std::vector<int>& s) {
    Int r = 0;
    for (std::size_t i = 0; i < s.size(); ++i) r += binomial(s[i], static_cast<long long>(i) + 1);
    return static_cast<std::uint64_t>(r);
}

inline std::vector<int> colex_unrank(std::uint64_t rank, int t) {
    std::vector<int> s(t);
    Int rem = rank;
    for (int i = t; i >= 1; --i) {
        int x = i - 1;
        while (binomial(x + 1, i) <= rem) ++x;
        s[i - 1] = x;
        rem -= binomial(x, i);
    }
    return s;
}

// advance a sorted t-subset of {0..v-1} in lexicographic order
inline bool next_subset(std::vector<int>& s, int v) {
    int t = static_cast<int>(s.size());
    for (int i = t - 1; i >= 0; --i) {
        if (s[i] < v - (t - i)) {
            ++s[i];
            for (int j = i + 1; j < t; ++j) s[j] = s[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace detail

// Count, for every t-subset of the point set, the blocks containing it.
// Returns lambda when the count is constant, otherwise the first witness.
// Two independent paths: direct subset enumeration (cost C(v,t) * b) and a
// per-block counter sweep (cost b * C(k,t) plus C(v,t) counters). Refuses
// with budget_error rather than guessing.
inline VerifyReport verify_t_design(const Design& d, int t, const VerifyOptions& opts = {}) {
    if (t < 0 || t > d.k) throw contract_error("verify_t_design: need 0 <= t <= k");
    const std::uint64_t b = d.blocks.size();
    for (const auto& blk : d.blocks)
        if (!std::is_sorted(blk.begin(), blk.end()))
            throw contract_error("verify_t_design: blocks must be sorted");

    const Int subsets = binomial(d.v, t);
    const Int cost_subset = subsets * b;
    const Int cost_sweep = Int(b) * binomial(d.k, t) + subsets;
    const Int mem_cap = Int(1) << 27;

    int path = opts.force_path;
    if (path == 0) path = (cost_sweep <= cost_subset && subsets <= mem_cap) ? 2 : 1;
    const Int cost = path == 2 ? cost_sweep : cost_subset;
    if (cost > opts.budget || (path == 2 && subsets > mem_cap))
        throw budget_error("verify_t_design: cost " + cost.str() + " exceeds budget " +
                           std::to_string(opts.budget));

    VerifyReport rep;
    if (t == 0) {
        rep.ok = true;
        rep.lambda = b;
        rep.path = "trivial";
        return rep;
    }

    if (path == 1) {
        rep.path = "subset";
        std::vector<int> s(t);
        for (int i = 0; i < t; ++i) s[i] = i;
        bool first = true;
        Int lambda = 0;
        do {
            std::uint64_t count = 0;
            for (const auto& blk : d.blocks)
                if (std::includes(blk.begin(), blk.end(), s.begin(), s.end())) ++count;
            if (first) {
                lambda = count;
                first = false;
            } else if (Int(count) != lambda) {
                rep.ok = false;
                rep.witness = s;
                rep.witness_count = count;
                rep.expected = lambda;
                return rep;
            }
        } while (detail::next_subset(s, d.v));
        rep.ok = true;
        rep.lambda = lambda;
        return rep;
    }

    rep.path = "sweep";
    const std::size_t n_counters = static_cast<std::size_t>(subsets);
    int workers = resolve_workers(opts.workers);
    // keep total counter memory bounded
    while (workers > 1 && Int(workers) * subsets > mem_cap) --workers;

    std::vector<std::vector<std::uint64_t>> partial(
        static_cast<std::size_t>(workers > 1 ? workers : 1));
    parallel_chunks(b, workers, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        auto& counters = partial[chunk];
        counters.assign(n_counters, 0);
        std::vector<int> idx(t), sub(t);
        for (std::size_t bi = begin; bi < end; ++bi) {
            const auto& blk = d.blocks[bi];
            for (int i = 0; i < t; ++i) idx[i] = i;
            for (;;) {
                for (int i = 0; i < t; ++i) sub[i] = blk[idx[i]];
                ++counters[detail::colex_rank(sub)];
                if (!detail::next_subset(idx, d.k)) break;
            }
        }
    });
    auto& counters = partial[0];
    for (std::size_t w = 1; w < partial.size(); ++w)
        for (std::size_t i = 0; i < n_counters; ++i) counters[i] += partial[w][i];

    const std::uint64_t lambda = counters.empty() ? 0 : counters[0];
    for (std::size_t i = 0; i < n_counters; ++i) {
        if (counters[i] != lambda) {
            rep.ok = false;
            rep.witness = detail::colex_unrank(i, t);
            rep.witness_count = counters[i];
            rep.expected = lambda;
            return rep;
        }
    }
    rep.ok = true;
    rep.lambda = lambda;
    return rep;
}

// ---------------------------------------------------------------------------
// Resolutions

// A partition of a design's blocks into ordered classes, each an
// s-(v,k,tau) design. Class order is significant: it defines the distance.
// Classes store 0-based block indices; all spoken class indices are 1-based.
struct Resolution {
    Design design;
    int s = 0;
    Int tau = 0;
    std::vector<std::vector<int>> classes;
};

enum class ResolutionIssue {
    ok,
    not_partition,
    empty_class,
    unequal_sizes,
    class_not_design,
    tau_mismatch,
};

struct ResolutionReport {
    bool ok = false;
    ResolutionIssue issue = ResolutionIssue::ok;
    int class_index = -1;  // 1-based offender, when applicable
    int s = 0;
    Int tau = 0;
    VerifyReport detail;
};

inline ResolutionReport verify_resolution(const Resolution& r, const VerifyOptions& opts = {}) {
    ResolutionReport rep;
    rep.s = r.s;
    const std::size_t b = r.design.blocks.size();
    std::vector<char> seen(b, 0);
    std::size_t covered = 0;
    for (std::size_t c = 0; c < r.classes.size(); ++c) {
        if (r.classes[c].empty()) {
            rep.issue = ResolutionIssue::empty_class;
            rep.class_index = static_cast<int>(c) + 1;
            return rep;
        }
        for (int idx : r.classes[c]) {
            if (idx < 0 || static_cast<std::size_t>(idx) >= b || seen[idx]) {
                rep.issue = ResolutionIssue::not_partition;
                rep.class_index = static_cast<int>(c) + 1;
                return rep;
            }
            seen[idx] = 1;
            ++covered;
        }
    }
    if (covered != b || r.classes.empty()) {
        rep.issue = ResolutionIssue::not_partition;
        return rep;
    }
    const std::size_t class_size = r.classes[0].size();
    for (std::size_t c = 1; c < r.classes.size(); ++c) {
        if (r.classes[c].size() != class_size) {
            rep.issue = ResolutionIssue::unequal_sizes;
            rep.class_index = static_cast<int>(c) + 1;
            return rep;
        }
    }

    Int tau = -1;
    for (std::size_t c = 0; c < r.classes.size(); ++c) {
        Design cls;
        cls.v = r.design.v;
        cls.k = r.design.k;
        cls.blocks.reserve(class_size);
        for (int idx : r.classes[c]) cls.blocks.push_back(r.design.blocks[idx]);
        canonicalize(cls);
        VerifyReport v = verify_t_design(cls, r.s, opts);
        if (!v.ok) {
            rep.issue = ResolutionIssue::class_not_design;
            rep.class_index = static_cast<int>(c) + 1;
            rep.detail = v;
            return rep;
        }
        if (tau < 0) {
            tau = v.lambda;
        } else if (v.lambda != tau) {
            rep.issue = ResolutionIssue::tau_mismatch;
            rep.class_index = static_cast<int>(c) + 1;
            rep.detail = v;
            return rep;
        }
    }
    if (r.tau != 0 && r.tau != tau) {
        rep.issue = ResolutionIssue::tau_mismatch;
        return rep;
    }
    rep.ok = true;
    rep.issue = ResolutionIssue::ok;
    rep.tau = tau;
    return rep;
}

}  // namespace tdes
