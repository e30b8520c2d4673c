#pragma once

// Assembles an explicit block set from a solution record plus explicit
// ingredient designs and resolutions, then verifies the result the hard
// way. Simplicity is structural: blocks from different pairs differ in
// |B n X1|, distinct ingredient block pairs give distinct unions, and a
// left/right block pair occurs for at most one class pair. A duplicate
// after canonicalization is therefore a bug and aborts the build.

#include <tdes/arith.hpp>
#include <tdes/design.hpp>
#include <tdes/generators.hpp>
#include <tdes/solver.hpp>

#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace tdes {

// Ingredients for one construction. Right-side objects live on their own
// points 0..v2-1 and are offset by v1 at union time. Complete designs are
// synthesized on demand; everything else must be supplied.
struct IngredientBundle {
    PointPartition partition;
    std::map<int, Design> left_designs;        // ingredient size -> design on X1
    std::map<int, Design> right_designs;       // ingredient size -> design on X2 (0-based)
    std::map<int, Resolution> left_resolutions;   // pair i -> resolution of the left ingredient
    std::map<int, Resolution> right_resolutions;  // pair i -> resolution of the right ingredient
};

// All unions of one left and one right block, the right one offset by v1.
inline std::vector<std::vector<int>> cross_union(const Design& left, const Design& right,
                                                 const PointPartition& partition) {
    if (left.v != partition.v1 || right.v != partition.v2)
        throw contract_error("cross_union: ingredient point counts do not match the partition");
    std::vector<std::vector<int>> out;
    out.reserve(left.blocks.size() * right.blocks.size());
    for (const auto& lb : left.blocks) {
        for (const auto& rb : right.blocks) {
            std::vector<int> block = lb;
            block.reserve(lb.size() + rb.size());
            for (int p : rb) block.push_back(p + partition.v1);
            out.push_back(std::move(block));
        }
    }
    return out;
}

// Unions over class pairs (h, j) whose cyclic distance lies in [eps, w].
inline std::vector<std::vector<int>> resolution_union(const Resolution& res_left,
                                                      const Resolution& res_right, int eps,
                                                      long long w,
                                                      const PointPartition& partition) {
    if (res_left.classes.size() != res_right.classes.size())
        throw contract_error("resolution_union: class counts differ (condition N_i = N_{k-i})");
    if (res_left.design.v != partition.v1 || res_right.design.v != partition.v2)
        throw contract_error("resolution_union: point counts do not match the partition");
    if (eps != 0 && eps != 1) throw contract_error("resolution_union: eps must be 0 or 1");
    const long long n = static_cast<long long>(res_left.classes.size());
    if (w < 0 || 2 * w > n) throw contract_error("resolution_union: need 0 <= w <= N/2");
    std::vector<std::vector<int>> out;
    for (long long h = 1; h <= n; ++h) {
        for (long long j = 1; j <= n; ++j) {
            long long d = class_distance(h, j, n);
            if (d < eps || d > w) continue;
            for (int li : res_left.classes[h - 1]) {
                const auto& lb = res_left.design.blocks[li];
                for (int rj : res_right.classes[j - 1]) {
                    const auto& rb = res_right.design.blocks[rj];
                    std::vector<int> block = lb;
                    block.reserve(lb.size() + rb.size());
                    for (int p : rb) block.push_back(p + partition.v1);
                    out.push_back(std::move(block));
                }
            }
        }
    }
    return out;
}

struct PredictedCounts {
    std::vector<Int> L;               // L_{r,t-r} for r = 0..t
    std::map<int, Int> pair_blocks;   // pair i -> block count contributed
};

// Pure recomputation of the L table and the per-pair family sizes.
inline PredictedCounts predicted_counts(const ProblemSpec& spec, const SolutionRecord& rec) {
    PredictedCounts out;
    out.L = evaluate_L(spec, rec);
    for (int i = 0; i <= spec.k; ++i) {
        if (rec.u[i] == 0) continue;
        Int bl = containment_count(spec.v1, i, spec.t,
                                   detail::record_side_lambda(spec, rec, i, true), 0);
        Int br = containment_count(spec.v2, spec.k - i, spec.t,
                                   detail::record_side_lambda(spec, rec, i, false), 0);
        if (spec.pairs[i].in_R) {
            long long n = spec.pairs[i].n_classes;
            out.pair_blocks[i] = bl / n * (br / n) * n * rec.z.at(i);
        } else {
            out.pair_blocks[i] = bl * br;
        }
    }
    return out;
}

struct AssembleOptions {
    std::uint64_t budget = 100'000'000;
    int workers = 0;
    std::uint64_t sample = 2000;  // sampled t-sets when the full sweep is over budget
    std::uint64_t seed = 1;
};

struct PairBuild {
    int i = 0;
    bool resolved = false;
    long long z = 0, w = 0;
    int eps = 0;
    Int blocks = 0;
};

struct BuildReport {
    std::vector<PairBuild> pairs;
    std::vector<Int> L;
    Int Lambda = 0, m = 0;
    Int block_count = 0;
    bool simple = false;
    bool verified_full = false;   // full verify_t_design ran (vs sampled)
    Int sampled_checks = 0;
    VerifyReport verify;
};

namespace detail {

inline const Design& bundle_side_design(const IngredientBundle& bundle, const ProblemSpec& spec,
                                        const SolutionRecord& rec, int i, bool left,
                                        std::map<int, Design>& synthesized) {
    const int size = left ? i : spec.k - i;
    const int v = left ? spec.v1 : spec.v2;
    const auto& store = left ? bundle.left_designs : bundle.right_designs;
    auto it = store.find(size);
    if (it != store.end()) return it->second;
    // synthesize the complete design when that is what the record calls for
    Int lambda = record_side_lambda(spec, rec, i, left);
    bool complete = size <= spec.t || lambda == lambda_max(spec.t, size, v);
    if (!complete)
        throw contract_error("assemble: missing ingredient (pair i=" + std::to_string(i) +
                             ", " + (left ? "left" : "right") + " size " + std::to_string(size) +
                             ")");
    int key = (left ? 1 : -1) * (size + 1);
    auto [pos, inserted] = synthesized.try_emplace(key);
    if (inserted) pos->second = complete_design(v, size);
    return pos->second;
}

}  // namespace detail

// Build the design for a record. Ingredient indices are verified by
// counting, never trusted; the assembled block set must be simple, have
// exactly Lambda * C(v,t) / C(k,t) blocks, and verify as a t-design with
// index Lambda.
inline std::pair<Design, BuildReport> assemble(const ProblemSpec& spec, const SolutionRecord& rec,
                                               const IngredientBundle& bundle,
                                               const AssembleOptions& opts = {}) {
    validate_problem(spec);
    if (bundle.partition.v1 != spec.v1 || bundle.partition.v2 != spec.v2)
        throw contract_error("assemble: bundle partition does not match the problem");
    if (rec.t != spec.t || rec.k != spec.k || rec.v1 != spec.v1 || rec.v2 != spec.v2)
        throw contract_error("assemble: record does not match the problem");
    if (rec.Lambda <= 0) throw contract_error("assemble: record index Lambda must be positive");

    VerifyOptions vopts;
    vopts.budget = opts.budget;
    vopts.workers = opts.workers;

    BuildReport report;
    std::map<int, Design> synthesized;
    Design out;
    out.v = spec.v();
    out.k = spec.k;

    for (int i = 0; i <= spec.k; ++i) {
        if (rec.u[i] == 0) continue;
        const PairSpec& pair = spec.pairs[i];
        PairBuild pb;
        pb.i = i;
        std::vector<std::vector<int>> family;
        if (pair.in_R) {
            auto lit = bundle.left_resolutions.find(i);
            auto rit = bundle.right_resolutions.find(i);
            if (lit == bundle.left_resolutions.end() || rit == bundle.right_resolutions.end())
                throw contract_error("assemble: missing ingredient (pair i=" + std::to_string(i) +
                                     ", resolution)");
            const Resolution& rl = lit->second;
            const Resolution& rr = rit->second;
            if (static_cast<long long>(rl.classes.size()) != pair.n_classes ||
                static_cast<long long>(rr.classes.size()) != pair.n_classes)
                throw contract_error("assemble: resolution class count differs from the problem (pair i=" +
                                     std::to_string(i) + ")");
            // the resolved ingredients must be the complete designs
            Design cl = complete_design(spec.v1, i);
            Design cr = complete_design(spec.v2, spec.k - i);
            if (rl.design.blocks != cl.blocks || rr.design.blocks != cr.blocks)
                throw contract_error("assemble: resolved ingredient is not the complete design (pair i=" +
                                     std::to_string(i) + ")");
            ResolutionReport vl = verify_resolution(rl, vopts);
            ResolutionReport vr = verify_resolution(rr, vopts);
            if (!vl.ok || vl.s != pair.s_left)
                throw contract_error("assemble: left resolution fails verification (pair i=" +
                                     std::to_string(i) + ")");
            if (!vr.ok || vr.s != pair.s_right)
                throw contract_error("assemble: right resolution fails verification (pair i=" +
                                     std::to_string(i) + ")");
            pb.resolved = true;
            pb.z = rec.z.at(i);
            auto [w, eps] = w_eps_from_z(pb.z, pair.n_classes);
            pb.w = w;
            pb.eps = eps;
            family = resolution_union(rl, rr, eps, w, bundle.partition);
        } else {
            const Design& dl =
                detail::bundle_side_design(bundle, spec, rec, i, true, synthesized);
            const Design& dr =
                detail::bundle_side_design(bundle, spec, rec, i, false, synthesized);
            // verify declared ingredient indices by counting
            for (int side = 0; side < 2; ++side) {
                const Design& d = side == 0 ? dl : dr;
                int size = side == 0 ? i : spec.k - i;
                if (size <= spec.t) continue;
                Int expect = detail::record_side_lambda(spec, rec, i, side == 0);
                VerifyReport vr = verify_t_design(d, spec.t, vopts);
                if (!vr.ok || vr.lambda != expect)
                    throw contract_error("assemble: ingredient index mismatch (pair i=" +
                                         std::to_string(i) + ", " +
                                         (side == 0 ? "left" : "right") + ")");
                if (!is_simple(d))
                    throw contract_error("assemble: non-simple ingredient (pair i=" +
                                         std::to_string(i) + ")");
            }
            family = cross_union(dl, dr, bundle.partition);
        }
        pb.blocks = family.size();
        report.pairs.push_back(pb);
        for (auto& b : family) out.blocks.push_back(std::move(b));
    }

    canonicalize(out);
    for (std::size_t b = 1; b < out.blocks.size(); ++b) {
        if (out.blocks[b] == out.blocks[b - 1]) {
            int in_x1 = 0;
            for (int p : out.blocks[b])
                if (p < spec.v1) ++in_x1;
            throw contract_error("assemble: duplicate block from pair i=" + std::to_string(in_x1) +
                                 "; the construction must never deduplicate");
        }
    }
    report.simple = true;

    PredictedCounts pred = predicted_counts(spec, rec);
    for (const auto& [i, count] : pred.pair_blocks) {
        for (const auto& pb : report.pairs)
            if (pb.i == i && pb.blocks != count)
                throw contract_error("assemble: pair i=" + std::to_string(i) +
                                     " produced " + pb.blocks.str() + " blocks, expected " +
                                     count.str());
    }
    report.L = pred.L;
    report.Lambda = rec.Lambda;
    report.m = rec.m;
    report.block_count = out.blocks.size();
    Int expected_blocks = rec.Lambda * binomial(spec.v(), spec.t) / binomial(spec.k, spec.t);
    if (report.block_count != expected_blocks)
        throw contract_error("assemble: block count " + report.block_count.str() +
                             " differs from Lambda * C(v,t)/C(k,t) = " + expected_blocks.str());

    // exhaustive verification at desk scale, seeded sampling above budget
    Int full_cost = Int(out.blocks.size()) * binomial(out.k, spec.t) + binomial(out.v, spec.t);
    if (full_cost <= opts.budget) {
        report.verify = verify_t_design(out, spec.t, vopts);
        report.verified_full = true;
        if (!report.verify.ok || report.verify.lambda != rec.Lambda)
            throw contract_error("assemble: assembled design does not verify at index Lambda");
    } else {
        std::mt19937_64 rng(opts.seed);
        std::vector<int> points(out.v);
        for (int p = 0; p < out.v; ++p) points[p] = p;
        for (std::uint64_t trial = 0; trial < opts.sample; ++trial) {
            for (int j = 0; j < spec.t; ++j) {
                std::uniform_int_distribution<int> pick(j, out.v - 1);
                std::swap(points[j], points[pick(rng)]);
            }
            std::vector<int> tset(points.begin(), points.begin() + spec.t);
            std::sort(tset.begin(), tset.end());
            Int count = 0;
            for (const auto& blk : out.blocks)
                if (std::includes(blk.begin(), blk.end(), tset.begin(), tset.end())) ++count;
            if (count != rec.Lambda)
                throw contract_error("assemble: sampled t-set has count " + count.str() +
                                     ", expected " + rec.Lambda.str());
        }
        report.verified_full = false;
        report.sampled_checks = opts.sample;
        report.verify.ok = true;
        report.verify.lambda = rec.Lambda;
        report.verify.path = "sampled";
    }
    return {std::move(out), std::move(report)};
}

}  // namespace tdes
