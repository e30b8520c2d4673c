#pragma once

// Enumerates every assignment (u_i, z_i, ingredient indices) for which the
// t+1 containment counts L_{r,t-r} of the block-union construction coincide.
//
// For a pair (i, k-i) combined through resolutions, both ingredients are the
// complete designs and the only unknown is the class-window count z_i; for a
// plain pair, each side of size > t carries an unknown index, enumerated as
// a multiple of lambda_min of that side. Every L value is then linear in the
// unknowns as long as no pair has unknowns on both sides (k <= 2t+1); pairs
// with two unknown sides are handled by enumerating the left index outermost
// and solving the residual linear system.
//
// The linear core: variables with integer box ranges, t homogeneous
// difference equations L_r - L_{r+1} = 0. Gaussian elimination (exact
// rationals, pivots chosen on the widest ranges) leaves a small set of free
// variables; depth-first enumeration over those, with interval pruning from
// both the echelon rows and the monotone L rows, and exact back-substitution
// at the leaves. Every emitted record is re-checked through an independent
// evaluation of all L values.

#include <tdes/arith.hpp>
#include <tdes/catalog.hpp>
#include <tdes/design.hpp>
#include <tdes/parallel.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace tdes {

enum class DedupMode { none, symmetric };

struct PairSpec {
    int i = 0;
    bool in_R = false;
    int s_left = 0;
    int s_right = 0;
    long long n_classes = 0;
    Int max_lambda_left = 0;   // 0 means lambda_max of the side
    Int max_lambda_right = 0;
};

struct ProblemSpec {
    std::string name;
    int t = 0, k = 0, v1 = 0, v2 = 0;
    std::vector<PairSpec> pairs;  // exactly one entry per i = 0..k, ascending
    DedupMode dedup = DedupMode::symmetric;
    Int max_m = 0;  // 0 means no cap

    int v() const { return v1 + v2; }
    bool pair_usable(int i) const { return i <= v1 && k - i <= v2; }
};

inline void validate_problem(const ProblemSpec& spec) {
    if (!(spec.t >= 1)) throw contract_error("problem: need t >= 1");
    if (!(spec.k > spec.t)) throw contract_error("problem: need k > t");
    if (spec.v1 < 0 || spec.v2 < 0 || spec.v() <= spec.k)
        throw contract_error("problem: need v1 + v2 > k");
    if (spec.pairs.size() != static_cast<std::size_t>(spec.k) + 1)
        throw contract_error("problem: pairs must cover exactly i = 0..k");
    for (int i = 0; i <= spec.k; ++i) {
        const PairSpec& p = spec.pairs[i];
        if (p.i != i) throw contract_error("problem: pairs must be listed ascending by i");
        if (!p.in_R) continue;
        if (!spec.pair_usable(i))
            throw contract_error("problem: resolution pair (" + std::to_string(i) +
                                 "," + std::to_string(spec.k - i) + ") exceeds the point classes");
        if (!(0 < p.s_left && p.s_left < spec.t && 0 < p.s_right && p.s_right < spec.t))
            throw contract_error("problem: resolution strengths must satisfy 0 < s < t");
        if (p.s_left > i || p.s_right > spec.k - i)
            throw contract_error("problem: resolution strength exceeds ingredient block size");
        if (p.s_left + p.s_right < 2 * (spec.t / 2))
            throw contract_error("problem: condition s_i + s_{k-i} >= 2*floor(t/2) violated for i=" +
                                 std::to_string(i));
        if (p.n_classes < 1) throw contract_error("problem: resolution pair needs N >= 1");
        if (binomial(spec.v1 - p.s_left, i - p.s_left) % p.n_classes != 0 ||
            binomial(spec.v2 - p.s_right, spec.k - i - p.s_right) % p.n_classes != 0)
            throw contract_error("problem: N does not divide the class size for pair i=" +
                                 std::to_string(i));
    }
}

// ---------------------------------------------------------------------------
// The construction's counting primitives

// z = |{ j : eps <= d(h,j) <= w }|, independent of h.
inline long long z_from_w_eps(long long w, int eps, long long n_classes) {
    if (eps != 0 && eps != 1) throw contract_error("z_from_w_eps: eps must be 0 or 1");
    if (w < 0 || 2 * w > n_classes) throw contract_error("z_from_w_eps: need 0 <= w <= N/2");
    if (2 * w == n_classes) return 2 * w - eps;
    return 2 * w + 1 - eps;
}

// Smallest-w realization of a class-window count z in 1..N.
inline std::pair<long long, int> w_eps_from_z(long long z, long long n_classes) {
    if (z < 1 || z > n_classes) throw contract_error("w_eps_from_z: need 1 <= z <= N");
    for (long long w = 0; 2 * w <= n_classes; ++w)
        for (int eps = 1; eps >= 0; --eps)
            if (z_from_w_eps(w, eps, n_classes) == z) return {w, eps};
    throw contract_error("w_eps_from_z: unreachable");  // every z in 1..N is realizable
}

// Which branch of the resolved-pair count applies for the split (r, t-r).
// The fourth combination cannot occur when s_left + s_right >= 2*floor(t/2).
inline char classify_case(int r, int s_left, int s_right, int t) {
    bool left_ok = r <= s_left;
    bool right_ok = t - r <= s_right;
    if (left_ok && right_ok) return 'a';
    if (left_ok) return 'b';
    if (right_ok) return 'c';
    throw contract_error("classify_case: r > s_left and t-r > s_right cannot both hold");
}

namespace detail {

// blocks of the complete design of the given size through an r-set
inline Int complete_count(int v, int size, int r) { return binomial(v - r, size - r); }

// lambda_r of one resolution class: the class is an s-(v, size, tau) design
// with tau = lambda_s(design)/N.
inline Int class_count(int v, int size, int t, const Int& design_lambda, int s, long long n_classes,
                       int r) {
    if (r > s) throw contract_error("class_count: r > class strength");
    Int lam_s = containment_count(v, size, t, design_lambda, s);
    Rat tau(lam_s, n_classes);
    Rat q = tau * Rat(binomial(v - r, s - r), binomial(size - r, s - r));
    return require_integral(q, "class_count");
}

}  // namespace detail

// Number of blocks of the resolved family B*_(i,k-i) through a fixed t-set
// with |T n X1| = r, for the window count z.
inline Int lambda_star_term(int v1, int v2, int t, int k, const PairSpec& pair, int r,
                            const Int& lambda_left, const Int& lambda_right, long long z) {
    if (!pair.in_R) throw contract_error("lambda_star_term: pair is not in R");
    const int i = pair.i;
    if (z < 0 || z > pair.n_classes) throw contract_error("lambda_star_term: z out of range");
    if (r > i || t - r > k - i) return 0;
    switch (classify_case(r, pair.s_left, pair.s_right, t)) {
        case 'a':
            return detail::class_count(v1, i, t, lambda_left, pair.s_left, pair.n_classes, r) *
                   detail::class_count(v2, k - i, t, lambda_right, pair.s_right, pair.n_classes,
                                       t - r) *
                   pair.n_classes * z;
        case 'b':
            return detail::class_count(v1, i, t, lambda_left, pair.s_left, pair.n_classes, r) *
                   containment_count(v2, k - i, t, lambda_right, t - r) * z;
        default:
            return containment_count(v1, i, t, lambda_left, r) *
                   detail::class_count(v2, k - i, t, lambda_right, pair.s_right, pair.n_classes,
                                       t - r) *
                   z;
    }
}

// Number of blocks of the plain family B_(i,k-i) through such a t-set.
inline Int basic_term(int v1, int v2, int t, int k, int i, int r, const Int& lambda_left,
                      const Int& lambda_right) {
    return containment_count(v1, i, t, lambda_left, r) *
           containment_count(v2, k - i, t, lambda_right, t - r);
}

// ---------------------------------------------------------------------------
// Solution records

struct SolutionRecord {
    int t = 0, k = 0, v1 = 0, v2 = 0;
    std::vector<int> u;                 // k+1 inclusion bits
    std::map<int, long long> z;         // pair i -> z (used resolution pairs only)
    std::map<int, Int> lambda_left;     // ingredient size -> index (used, size > t)
    std::map<int, Int> lambda_right;
    Int Lambda = 0;
    Int m = 0;
    int orbit = 1;
    enum class Flag { yes, unknown, missing } constructible = Flag::unknown;
};

inline const char* to_string(SolutionRecord::Flag f) {
    switch (f) {
        case SolutionRecord::Flag::yes: return "yes";
        case SolutionRecord::Flag::unknown: return "unknown";
        default: return "missing-ingredient";
    }
}

// The index lambda_t of the left/right ingredient of a pair as the direct
// evaluator needs it: 1 for complete small sizes, lambda_max for the
// complete ingredients of resolved pairs, the recorded index otherwise.
namespace detail {
inline Int record_side_lambda(const ProblemSpec& spec, const SolutionRecord& rec, int i, bool left) {
    int size = left ? i : spec.k - i;
    int v = left ? spec.v1 : spec.v2;
    if (size <= spec.t) return 1;
    if (spec.pairs[i].in_R) return lambda_max(spec.t, size, v);
    const auto& m = left ? rec.lambda_left : rec.lambda_right;
    auto it = m.find(size);
    if (it == m.end()) throw contract_error("record is missing an ingredient index");
    return it->second;
}
}  // namespace detail

// Direct recomputation of all t+1 values L_{r,t-r} from a record. This is
// the verification path: it shares no state with the enumerator.
inline std::vector<Int> evaluate_L(const ProblemSpec& spec, const SolutionRecord& rec) {
    std::vector<Int> L(spec.t + 1, 0);
    for (int i = 0; i <= spec.k; ++i) {
        if (rec.u[i] == 0) continue;
        const PairSpec& pair = spec.pairs[i];
        Int ll = detail::record_side_lambda(spec, rec, i, true);
        Int lr = detail::record_side_lambda(spec, rec, i, false);
        for (int r = 0; r <= spec.t; ++r) {
            if (pair.in_R) {
                L[r] += lambda_star_term(spec.v1, spec.v2, spec.t, spec.k, pair, r, ll, lr,
                                         rec.z.at(i));
            } else {
                L[r] += basic_term(spec.v1, spec.v2, spec.t, spec.k, i, r, ll, lr);
            }
        }
    }
    return L;
}

// ---------------------------------------------------------------------------
// Linear system construction

namespace detail {

enum class VarKind { u_bool, z_class, mult_left, mult_right };

struct LinVar {
    VarKind kind;
    int pair_i = 0;
    int size = 0;        // ingredient size for mult kinds
    long long lo = 0;
    long long hi = 0;
    Int unit = 1;        // lambda = value * unit for mult kinds
    std::vector<Int> lcoef;  // t+1 nonnegative coefficients
};

struct LinearSystem {
    std::vector<LinVar> vars;
    Int lambda_unit = 1;  // lambda_min(t,k,v)
    Int lambda_cap = 0;
    std::map<int, Int> fixed_left;  // bilinear outer assignment: pair i -> lambda
};

inline long long checked_range(const Int& m, const char* what) {
    if (m > std::numeric_limits<long long>::max() / 4)
        throw budget_error(std::string(what) + ": index range too large to enumerate");
    return static_cast<long long>(m);
}

// Multiplier range for an unknown ingredient of `size` on v points.
inline std::pair<Int, long long> mult_range(const ProblemSpec& spec, int v, int size,
                                            const Int& cap) {
    Int unit = lambda_min(spec.t, size, v);
    Int top = lambda_max(spec.t, size, v);
    if (cap > 0 && cap < top) top = cap;
    return {unit, checked_range(top / unit, "ingredient")};
}

inline std::vector<Int> z_coefficients(const ProblemSpec& spec, const PairSpec& pair) {
    const int i = pair.i;
    Int ll = i <= spec.t ? Int(1) : lambda_max(spec.t, i, spec.v1);
    Int lr = spec.k - i <= spec.t ? Int(1) : lambda_max(spec.t, spec.k - i, spec.v2);
    std::vector<Int> c(spec.t + 1);
    for (int r = 0; r <= spec.t; ++r)
        c[r] = lambda_star_term(spec.v1, spec.v2, spec.t, spec.k, pair, r, ll, lr, 1);
    return c;
}

// Coefficients of the multiplier of one unknown side; the other side is
// complete. `unit` scales so that every entry is integral.
inline std::vector<Int> mult_coefficients(const ProblemSpec& spec, int i, bool left_unknown,
                                          const Int& unit) {
    std::vector<Int> c(spec.t + 1);
    for (int r = 0; r <= spec.t; ++r) {
        if (left_unknown) {
            Int unknown = containment_count(spec.v1, i, spec.t, unit, r);
            c[r] = unknown * complete_count(spec.v2, spec.k - i, spec.t - r);
        } else {
            Int unknown = containment_count(spec.v2, spec.k - i, spec.t, unit, spec.t - r);
            c[r] = complete_count(spec.v1, i, r) * unknown;
        }
    }
    return c;
}

struct BilinearPair {
    int i;
    Int unit_left;
    long long hi_left;
};

// Builds the linear variables for one assignment of the bilinear pairs'
// left indices (empty assignment when k <= 2t+1).
inline LinearSystem build_system(const ProblemSpec& spec,
                                 const std::map<int, Int>& fixed_left_lambda) {
    LinearSystem sys;
    sys.lambda_unit = lambda_min(spec.t, spec.k, spec.v());
    sys.lambda_cap = lambda_max(spec.t, spec.k, spec.v());
    if (spec.max_m > 0) {
        Int cap = spec.max_m * sys.lambda_unit;
        if (cap < sys.lambda_cap) sys.lambda_cap = cap;
    }
    sys.fixed_left = fixed_left_lambda;
    for (int i = 0; i <= spec.k; ++i) {
        if (!spec.pair_usable(i)) continue;
        const PairSpec& pair = spec.pairs[i];
        const int right_size = spec.k - i;
        if (pair.in_R) {
            LinVar var;
            var.kind = VarKind::z_class;
            var.pair_i = i;
            var.lo = 0;
            var.hi = pair.n_classes;
            var.lcoef = z_coefficients(spec, pair);
            sys.vars.push_back(std::move(var));
            continue;
        }
        const bool left_unknown = i > spec.t;
        const bool right_unknown = right_size > spec.t;
        if (!left_unknown && !right_unknown) {
            LinVar var;
            var.kind = VarKind::u_bool;
            var.pair_i = i;
            var.lo = 0;
            var.hi = 1;
            var.lcoef.resize(spec.t + 1);
            for (int r = 0; r <= spec.t; ++r)
                var.lcoef[r] = complete_count(spec.v1, i, r) *
                               complete_count(spec.v2, right_size, spec.t - r);
            sys.vars.push_back(std::move(var));
            continue;
        }
        if (left_unknown && right_unknown) {
            // bilinear pair: the left index is fixed by the outer loop
            auto it = fixed_left_lambda.find(i);
            if (it == fixed_left_lambda.end())
                throw contract_error("build_system: unassigned bilinear pair");
            if (it->second == 0) continue;  // pair unused in this branch
            auto [unit, hi] = mult_range(spec, spec.v2, right_size, pair.max_lambda_right);
            LinVar var;
            var.kind = VarKind::mult_right;
            var.pair_i = i;
            var.size = right_size;
            var.lo = 1;  // the pair is on, so the right design must exist
            var.hi = hi;
            var.unit = unit;
            var.lcoef.resize(spec.t + 1);
            for (int r = 0; r <= spec.t; ++r)
                var.lcoef[r] = containment_count(spec.v1, i, spec.t, it->second, r) *
                               containment_count(spec.v2, right_size, spec.t, unit, spec.t - r);
            sys.vars.push_back(std::move(var));
            continue;
        }
        LinVar var;
        var.kind = left_unknown ? VarKind::mult_left : VarKind::mult_right;
        var.pair_i = i;
        var.size = left_unknown ? i : right_size;
        auto [unit, hi] = mult_range(spec, left_unknown ? spec.v1 : spec.v2, var.size,
                                     left_unknown ? pair.max_lambda_left : pair.max_lambda_right);
        var.lo = 0;
        var.hi = hi;
        var.unit = unit;
        var.lcoef = mult_coefficients(spec, i, left_unknown, unit);
        sys.vars.push_back(std::move(var));
    }
    return sys;
}

inline std::vector<BilinearPair> bilinear_pairs(const ProblemSpec& spec) {
    std::vector<BilinearPair> out;
    for (int i = 0; i <= spec.k; ++i) {
        if (!spec.pair_usable(i)) continue;
        const PairSpec& pair = spec.pairs[i];
        if (pair.in_R || i <= spec.t || spec.k - i <= spec.t) continue;
        auto [unit, hi] = mult_range(spec, spec.v1, i, pair.max_lambda_left);
        out.push_back({i, unit, hi});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exact echelon form of the homogeneous difference system

struct EchRow {
    int pivot = -1;          // variable index
    Int d = 1;               // pivot coefficient, > 0
    std::vector<Int> coef;   // per free variable, aligned with Echelon::free_vars
};

struct Echelon {
    std::vector<int> free_vars;   // variable indices in DFS order
    std::vector<EchRow> rows;
};

inline Echelon reduce_system(const ProblemSpec& spec, const LinearSystem& sys) {
    const int n = static_cast<int>(sys.vars.size());
    const int t = spec.t;
    std::vector<std::vector<Rat>> m(t, std::vector<Rat>(n, Rat(0)));
    for (int r = 0; r < t; ++r)
        for (int j = 0; j < n; ++j)
            m[r][j] = Rat(sys.vars[j].lcoef[r] - sys.vars[j].lcoef[r + 1]);

    // widest ranges become pivots, so the enumerated free set is smallest
    std::vector<int> col_order(n);
    for (int j = 0; j < n; ++j) col_order[j] = j;
    std::sort(col_order.begin(), col_order.end(), [&sys](int a, int b) {
        long long ra = sys.vars[a].hi - sys.vars[a].lo;
        long long rb = sys.vars[b].hi - sys.vars[b].lo;
        if (ra != rb) return ra > rb;
        return a < b;
    });

    std::vector<int> pivot_of_row(t, -1);
    std::vector<char> row_used(t, 0), col_pivot(n, 0);
    for (int col : col_order) {
        int pr = -1;
        for (int r = 0; r < t; ++r)
            if (!row_used[r] && m[r][col] != 0) {
                pr = r;
                break;
            }
        if (pr < 0) continue;
        row_used[pr] = 1;
        pivot_of_row[pr] = col;
        col_pivot[col] = 1;
        for (int r = 0; r < t; ++r) {
            if (r == pr || m[r][col] == 0) continue;
            Rat f = m[r][col] / m[pr][col];
            for (int j = 0; j < n; ++j) m[r][j] -= f * m[pr][j];
        }
    }

    Echelon ech;
    for (int j = 0; j < n; ++j)
        if (!col_pivot[j]) ech.free_vars.push_back(j);
    std::sort(ech.free_vars.begin(), ech.free_vars.end(), [&sys](int a, int b) {
        long long ra = sys.vars[a].hi - sys.vars[a].lo;
        long long rb = sys.vars[b].hi - sys.vars[b].lo;
        if (ra != rb) return ra < rb;
        return a < b;
    });

    for (int r = 0; r < t; ++r) {
        if (!row_used[r]) continue;
        EchRow row;
        row.pivot = pivot_of_row[r];
        Int den_lcm = 1;
        for (int j = 0; j < n; ++j)
            if (m[r][j] != 0) den_lcm = boost::multiprecision::lcm(den_lcm, denominator_of(m[r][j]));
        Int g = 0;
        auto scaled = [&](int j) { return numerator_of(m[r][j] * Rat(den_lcm)); };
        for (int j = 0; j < n; ++j)
            if (m[r][j] != 0) g = boost::multiprecision::gcd(g, scaled(j));
        if (g == 0) g = 1;
        Int d = scaled(row.pivot) / g;
        Int sign = d < 0 ? -1 : 1;
        row.d = d * sign;
        for (int f : ech.free_vars) row.coef.push_back(scaled(f) / g * sign);
        ech.rows.push_back(std::move(row));
    }
    return ech;
}

// ---------------------------------------------------------------------------
// Depth-first enumeration over the free variables

template <class I>
inline I floor_div(const I& a, const I& b) {
    I q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}
template <class I>
inline I ceil_div(const I& a, const I& b) {
    I q = a / b;
    if (a % b != 0 && ((a < 0) == (b < 0))) ++q;
    return q;
}

template <class I>
struct Engine {
    const LinearSystem* sys = nullptr;
    const Echelon* ech = nullptr;
    int t1 = 0;  // t+1 L rows
    int nfree = 0, nrows = 0;

    // L rows: coefficients per free level, per pivot; static pivot interval
    std::vector<std::vector<I>> lc;       // [row][level]
    std::vector<std::vector<I>> lsuf_lo;  // [row][level] suffix over levels >= level
    std::vector<std::vector<I>> lsuf_hi;
    std::vector<I> lpiv_lo, lpiv_hi;
    std::vector<std::vector<I>> lpivc;    // [row][ech row] coefficient of that pivot var

    // echelon rows
    std::vector<std::vector<I>> ec;       // [row][level]
    std::vector<std::vector<I>> esuf_lo;  // suffix interval of unassigned free terms
    std::vector<std::vector<I>> esuf_hi;
    std::vector<I> ed, epiv_lo, epiv_hi;  // d, d*[lo,hi] of the pivot variable
    std::vector<long long> eplo, ephi;    // pivot variable ranges

    std::vector<long long> flo, fhi;
    I lam_min = 0, lam_cap = 0;

    std::uint64_t nodes = 0;

    void init(const LinearSystem& s, const Echelon& e, int t) {
        sys = &s;
        ech = &e;
        t1 = t + 1;
        nfree = static_cast<int>(e.free_vars.size());
        nrows = static_cast<int>(e.rows.size());
        lam_min = I(static_cast<long long>(s.lambda_unit));
        lam_cap = to_i(s.lambda_cap);

        lc.assign(t1, std::vector<I>(nfree, I(0)));
        lsuf_lo.assign(t1, std::vector<I>(nfree + 1, I(0)));
        lsuf_hi.assign(t1, std::vector<I>(nfree + 1, I(0)));
        lpiv_lo.assign(t1, I(0));
        lpiv_hi.assign(t1, I(0));
        lpivc.assign(t1, std::vector<I>(nrows, I(0)));
        flo.resize(nfree);
        fhi.resize(nfree);
        for (int p = 0; p < nfree; ++p) {
            flo[p] = s.vars[e.free_vars[p]].lo;
            fhi[p] = s.vars[e.free_vars[p]].hi;
        }
        for (int r = 0; r < t1; ++r) {
            for (int p = 0; p < nfree; ++p) lc[r][p] = to_i(s.vars[e.free_vars[p]].lcoef[r]);
            for (int p = nfree - 1; p >= 0; --p) {
                lsuf_lo[r][p] = lsuf_lo[r][p + 1] + lc[r][p] * flo[p];
                lsuf_hi[r][p] = lsuf_hi[r][p + 1] + lc[r][p] * fhi[p];
            }
            for (int q = 0; q < nrows; ++q) {
                const auto& var = s.vars[e.rows[q].pivot];
                I c = to_i(var.lcoef[r]);
                lpivc[r][q] = c;
                lpiv_lo[r] += c * var.lo;
                lpiv_hi[r] += c * var.hi;
            }
        }
        ec.assign(nrows, std::vector<I>(nfree, I(0)));
        esuf_lo.assign(nrows, std::vector<I>(nfree + 1, I(0)));
        esuf_hi.assign(nrows, std::vector<I>(nfree + 1, I(0)));
        ed.resize(nrows);
        epiv_lo.resize(nrows);
        epiv_hi.resize(nrows);
        eplo.resize(nrows);
        ephi.resize(nrows);
        for (int q = 0; q < nrows; ++q) {
            const EchRow& row = e.rows[q];
            ed[q] = to_i(row.d);
            eplo[q] = s.vars[row.pivot].lo;
            ephi[q] = s.vars[row.pivot].hi;
            epiv_lo[q] = ed[q] * eplo[q];
            epiv_hi[q] = ed[q] * ephi[q];
            for (int p = 0; p < nfree; ++p) ec[q][p] = to_i(row.coef[p]);
            for (int p = nfree - 1; p >= 0; --p) {
                I c = ec[q][p];
                I a = c * flo[p], b = c * fhi[p];
                esuf_lo[q][p] = esuf_lo[q][p + 1] + (a < b ? a : b);
                esuf_hi[q][p] = esuf_hi[q][p + 1] + (a < b ? b : a);
            }
        }
    }

    static I to_i(const Int& x) {
        if constexpr (std::is_same_v<I, Int>) {
            return x;
        } else {
            return static_cast<long long>(x);
        }
    }

    // worst-case magnitude reachable by any partial sum; used to pick int64.
    // The pruning arithmetic adds at most three such sums, so stay below 2^61.
    static bool fits_int64(const LinearSystem& s, const Echelon& e, int t) {
        const Int limit = Int(1) << 61;
        for (int r = 0; r <= t; ++r) {
            Int sum = 0;
            for (const auto& var : s.vars) sum += var.lcoef[r] * var.hi;
            if (sum >= limit) return false;
        }
        for (const auto& row : e.rows) {
            Int sum = row.d * s.vars[row.pivot].hi;
            for (std::size_t p = 0; p < row.coef.size(); ++p) {
                Int c = row.coef[p] < 0 ? -row.coef[p] : row.coef[p];
                sum += c * s.vars[e.free_vars[p]].hi;
            }
            if (sum >= limit) return false;
        }
        return true;
    }

    template <class Emit>
    void run(const std::vector<long long>& prefix, Emit&& emit) {
        std::vector<I> pl(t1, I(0)), pe(nrows, I(0));
        std::vector<long long> xs(nfree, 0);
        descend(0, prefix, pl, pe, xs, emit);
    }

    template <class Emit>
    void descend(int level, const std::vector<long long>& prefix, std::vector<I>& pl,
                 std::vector<I>& pe, std::vector<long long>& xs, Emit&& emit) {
        ++nodes;
        if (level == nfree) {
            leaf(pl, pe, xs, emit);
            return;
        }
        long long lo = flo[level], hi = fhi[level];
        // bounds from the echelon rows: c*x must keep d*x_p inside its range
        for (int q = 0; q < nrows && lo <= hi; ++q) {
            const I& c = ec[q][level];
            if (c == 0) continue;
            I rest_lo = pe[q] + esuf_lo[q][level + 1] + epiv_lo[q];
            I rest_hi = pe[q] + esuf_hi[q][level + 1] + epiv_hi[q];
            // c*x in [-rest_hi, -rest_lo]
            I a = -rest_hi, b = -rest_lo;
            long long nlo, nhi;
            if (c > 0) {
                nlo = clamp_ll(ceil_div(a, c));
                nhi = clamp_ll(floor_div(b, c));
            } else {
                nlo = clamp_ll(ceil_div(b, c));
                nhi = clamp_ll(floor_div(a, c));
            }
            if (nlo > lo) lo = nlo;
            if (nhi < hi) hi = nhi;
        }
        // bounds from the monotone L rows against the lambda window
        for (int r = 0; r < t1 && lo <= hi; ++r) {
            const I& c = lc[r][level];
            if (c == 0) continue;
            I base_lo = pl[r] + lsuf_lo[r][level + 1] + lpiv_lo[r];
            I base_hi = pl[r] + lsuf_hi[r][level + 1] + lpiv_hi[r];
            I room_hi = lam_cap - base_lo;
            I room_lo = lam_min - base_hi;
            long long nhi = clamp_ll(floor_div(room_hi, c));
            long long nlo = clamp_ll(ceil_div(room_lo, c));
            if (nlo > lo) lo = nlo;
            if (nhi < hi) hi = nhi;
        }
        if (static_cast<std::size_t>(level) < prefix.size()) {
            long long x = prefix[level];
            if (x < lo || x > hi) return;
            lo = hi = x;
        }
        for (long long x = lo; x <= hi; ++x) {
            std::vector<I> npl(pl), npe(pe);
            for (int r = 0; r < t1; ++r) npl[r] += lc[r][level] * x;
            for (int q = 0; q < nrows; ++q) npe[q] += ec[q][level] * x;
            if (!window_ok(level + 1, npl, npe)) continue;
            xs[level] = x;
            descend(level + 1, prefix, npl, npe, xs, emit);
        }
    }

    bool window_ok(int level, const std::vector<I>& pl, const std::vector<I>& pe) const {
        bool have = false;
        I w_lo{}, w_hi{};
        for (int r = 0; r < t1; ++r) {
            I rl = pl[r] + lsuf_lo[r][level] + lpiv_lo[r];
            I rh = pl[r] + lsuf_hi[r][level] + lpiv_hi[r];
            if (!have) {
                w_lo = rl;
                w_hi = rh;
                have = true;
            } else {
                if (rl > w_lo) w_lo = rl;
                if (rh < w_hi) w_hi = rh;
            }
            if (w_lo > w_hi) return false;
        }
        if (w_hi < lam_min || w_lo > lam_cap) return false;
        for (int q = 0; q < nrows; ++q) {
            I dot_lo = pe[q] + esuf_lo[q][level];
            I dot_hi = pe[q] + esuf_hi[q][level];
            // need d*x_p = -dot for some x_p in range
            if (-dot_hi > epiv_hi[q] || -dot_lo < epiv_lo[q]) return false;
        }
        return true;
    }

    static long long clamp_ll(const I& x) {
        if constexpr (std::is_same_v<I, Int>) {
            if (x > std::numeric_limits<long long>::max()) return std::numeric_limits<long long>::max();
            if (x < std::numeric_limits<long long>::min()) return std::numeric_limits<long long>::min();
            return static_cast<long long>(x);
        } else {
            return x;
        }
    }

    template <class Emit>
    void leaf(const std::vector<I>& pl, const std::vector<I>& pe, std::vector<long long>& xs,
              Emit&& emit) {
        std::vector<long long> pivot_val(nrows);
        for (int q = 0; q < nrows; ++q) {
            I num = -pe[q];
            if (num % ed[q] != 0) return;
            I x = num / ed[q];
            if (x < eplo[q] || x > ephi[q]) return;
            pivot_val[q] = clamp_ll(x);
        }
        I lambda{};
        for (int r = 0; r < t1; ++r) {
            I val = pl[r];
            for (int q = 0; q < nrows; ++q) val += lpivc[r][q] * pivot_val[q];
            if (r == 0) {
                lambda = val;
            } else if (val != lambda) {
                return;
            }
        }
        if (lambda < lam_min || lambda > lam_cap) return;
        emit(xs, pivot_val, lambda);
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Top-level enumeration

struct SolveOptions {
    int workers = 0;      // 0 = auto
    int force_engine = 0; // 0 auto, 1 int64, 2 arbitrary precision
};

struct SolveStats {
    std::uint64_t nodes = 0;
    const char* engine = "";
    int free_vars = 0;
};

struct SolveResult {
    std::vector<SolutionRecord> records;  // raw, deterministically sorted
    SolveStats stats;
};

namespace detail {

inline SolutionRecord make_record(const ProblemSpec& spec, const LinearSystem& sys,
                                  const Echelon& ech, const std::vector<long long>& xs,
                                  const std::vector<long long>& pivot_val, const Int& lambda) {
    SolutionRecord rec;
    rec.t = spec.t;
    rec.k = spec.k;
    rec.v1 = spec.v1;
    rec.v2 = spec.v2;
    rec.u.assign(spec.k + 1, 0);
    auto apply = [&](const LinVar& var, long long x) {
        if (x == 0) return;
        rec.u[var.pair_i] = 1;
        switch (var.kind) {
            case VarKind::u_bool: break;
            case VarKind::z_class: rec.z[var.pair_i] = x; break;
            case VarKind::mult_left: rec.lambda_left[var.size] = Int(x) * var.unit; break;
            case VarKind::mult_right: rec.lambda_right[var.size] = Int(x) * var.unit; break;
        }
    };
    for (std::size_t p = 0; p < ech.free_vars.size(); ++p)
        apply(sys.vars[ech.free_vars[p]], xs[p]);
    for (std::size_t q = 0; q < ech.rows.size(); ++q)
        apply(sys.vars[ech.rows[q].pivot], pivot_val[q]);
    for (const auto& [i, lam] : sys.fixed_left) {
        if (lam == 0) continue;
        rec.u[i] = 1;
        rec.lambda_left[i] = lam;
    }
    rec.Lambda = lambda;
    if (lambda % sys.lambda_unit != 0)
        throw contract_error("solver: Lambda " + lambda.str() + " is not a multiple of lambda_min");
    rec.m = lambda / sys.lambda_unit;
    return rec;
}

template <class I>
void run_engine_tasks(const ProblemSpec& spec, const LinearSystem& sys, const Echelon& ech,
                      int workers, const std::vector<std::vector<long long>>& prefixes,
                      std::vector<std::vector<SolutionRecord>>& task_records,
                      std::vector<std::uint64_t>& task_nodes) {
    std::atomic<std::size_t> cursor{0};
    auto worker_fn = [&]() {
        for (;;) {
            std::size_t id = cursor.fetch_add(1);
            if (id >= prefixes.size()) return;
            Engine<I> eng;
            eng.init(sys, ech, spec.t);
            eng.run(prefixes[id],
                    [&](const std::vector<long long>& xs, const std::vector<long long>& pivots,
                        const I& lambda) {
                        task_records[id].push_back(
                            make_record(spec, sys, ech, xs, pivots, Int(lambda)));
                    });
            task_nodes[id] += eng.nodes;
        }
    };
    int nthreads = static_cast<int>(std::min<std::size_t>(workers, prefixes.size()));
    std::vector<std::thread> pool;
    for (int w = 1; w < nthreads; ++w) pool.emplace_back(worker_fn);
    worker_fn();
    for (auto& th : pool) th.join();
}

// display order: m first, then the table columns left to right
inline std::vector<Int> sort_key(const ProblemSpec& spec, const SolutionRecord& rec) {
    std::vector<Int> key;
    key.push_back(rec.m);
    for (int i = 0; i <= spec.k; ++i)
        if (spec.pairs[i].in_R) key.push_back(rec.z.count(i) ? rec.z.at(i) : 0);
    for (int size = spec.t + 1; size <= spec.k; ++size)
        key.push_back(rec.lambda_left.count(size) ? rec.lambda_left.at(size) : 0);
    for (int size = spec.t + 1; size <= spec.k; ++size)
        key.push_back(rec.lambda_right.count(size) ? rec.lambda_right.at(size) : 0);
    for (int i = 0; i <= spec.k; ++i) key.push_back(rec.u[i]);
    return key;
}

// orbit representative order: the index vectors first
inline std::vector<Int> dedup_key(const ProblemSpec& spec, const SolutionRecord& rec) {
    std::vector<Int> key;
    for (int size = spec.t + 1; size <= spec.k; ++size)
        key.push_back(rec.lambda_left.count(size) ? rec.lambda_left.at(size) : 0);
    for (int size = spec.t + 1; size <= spec.k; ++size)
        key.push_back(rec.lambda_right.count(size) ? rec.lambda_right.at(size) : 0);
    for (int i = 0; i <= spec.k; ++i)
        if (spec.pairs[i].in_R) key.push_back(rec.z.count(i) ? rec.z.at(i) : 0);
    for (int i = 0; i <= spec.k; ++i) key.push_back(rec.u[i]);
    return key;
}

}  // namespace detail

// Exhaustive, deterministic enumeration of all solutions of the equality
// system. Records come out sorted by (m, z columns, index columns) and
// re-verified through evaluate_L.
inline SolveResult enumerate_solutions(const ProblemSpec& spec, const SolveOptions& opts = {}) {
    validate_problem(spec);
    SolveResult result;

    std::vector<detail::BilinearPair> bilinear = detail::bilinear_pairs(spec);
    std::vector<std::map<int, Int>> outer_assignments;
    {
        std::map<int, Int> current;
        std::function<void(std::size_t)> rec_build = [&](std::size_t idx) {
            if (idx == bilinear.size()) {
                outer_assignments.push_back(current);
                return;
            }
            const auto& bp = bilinear[idx];
            for (long long ml = 0; ml <= bp.hi_left; ++ml) {
                current[bp.i] = Int(ml) * bp.unit_left;
                rec_build(idx + 1);
            }
            current.erase(bp.i);
        };
        rec_build(0);
    }

    const int workers = resolve_workers(opts.workers);
    for (const auto& fixed : outer_assignments) {
        detail::LinearSystem sys = detail::build_system(spec, fixed);
        detail::Echelon ech = detail::reduce_system(spec, sys);
        result.stats.free_vars = static_cast<int>(ech.free_vars.size());

        bool use_int64 = opts.force_engine != 2 &&
                         detail::Engine<long long>::fits_int64(sys, ech, spec.t);
        if (opts.force_engine == 1 && !use_int64)
            throw contract_error("solver: int64 engine forced but bounds do not fit");
        result.stats.engine = use_int64 ? "int64" : "bigint";

        // split the first free levels into tasks for the workers
        std::vector<std::vector<long long>> prefixes;
        prefixes.emplace_back();
        std::size_t depth = 0;
        while (depth < ech.free_vars.size() && prefixes.size() < static_cast<std::size_t>(workers) * 8 &&
               prefixes.size() < 4096) {
            const auto& var = sys.vars[ech.free_vars[depth]];
            std::vector<std::vector<long long>> next;
            next.reserve(prefixes.size() * (var.hi - var.lo + 1));
            for (const auto& p : prefixes) {
                for (long long x = var.lo; x <= var.hi; ++x) {
                    next.push_back(p);
                    next.back().push_back(x);
                }
            }
            prefixes = std::move(next);
            ++depth;
        }

        std::vector<std::vector<SolutionRecord>> task_records(prefixes.size());
        std::vector<std::uint64_t> task_nodes(prefixes.size(), 0);
        if (use_int64)
            detail::run_engine_tasks<long long>(spec, sys, ech, workers, prefixes, task_records,
                                                task_nodes);
        else
            detail::run_engine_tasks<Int>(spec, sys, ech, workers, prefixes, task_records,
                                          task_nodes);

        for (std::size_t id = 0; id < prefixes.size(); ++id) {
            result.stats.nodes += task_nodes[id];
            for (auto& rec : task_records[id]) result.records.push_back(std::move(rec));
        }
    }

    // emission invariant: independent recomputation of every L value
    for (const auto& rec : result.records) {
        std::vector<Int> L = evaluate_L(spec, rec);
        for (const Int& val : L)
            if (val != rec.Lambda)
                throw contract_error("solver: emitted record fails independent L re-evaluation");
    }

    std::sort(result.records.begin(), result.records.end(),
              [&spec](const SolutionRecord& a, const SolutionRecord& b) {
                  return detail::sort_key(spec, a) < detail::sort_key(spec, b);
              });
    return result;
}

// ---------------------------------------------------------------------------
// Symmetric deduplication and existence filtering

inline bool mirror_symmetric(const ProblemSpec& spec) {
    if (spec.v1 != spec.v2) return false;
    for (int i = 0; i <= spec.k; ++i) {
        const PairSpec& a = spec.pairs[i];
        const PairSpec& b = spec.pairs[spec.k - i];
        if (a.in_R != b.in_R) return false;
        if (a.in_R && (a.s_left != b.s_right || a.s_right != b.s_left ||
                       a.n_classes != b.n_classes))
            return false;
        if (a.max_lambda_left != b.max_lambda_right) return false;
    }
    return true;
}

inline SolutionRecord mirror_record(const ProblemSpec& spec, const SolutionRecord& rec) {
    SolutionRecord out = rec;
    out.u.assign(spec.k + 1, 0);
    out.z.clear();
    out.lambda_left = rec.lambda_right;
    out.lambda_right = rec.lambda_left;
    for (int i = 0; i <= spec.k; ++i) out.u[i] = rec.u[spec.k - i];
    for (const auto& [i, z] : rec.z) out.z[spec.k - i] = z;
    return out;
}

// When v1 = v2, a solution and its left/right swap describe the same
// design; keep one representative per orbit (the lexicographically smaller
// index-vector side) and record the orbit size.
inline std::vector<SolutionRecord> dedup_symmetric(const ProblemSpec& spec,
                                                   const std::vector<SolutionRecord>& records) {
    if (spec.dedup == DedupMode::none || !mirror_symmetric(spec)) {
        auto out = records;
        for (auto& r : out) r.orbit = 1;
        return out;
    }
    std::vector<SolutionRecord> out;
    for (const auto& rec : records) {
        SolutionRecord mir = mirror_record(spec, rec);
        auto key = detail::dedup_key(spec, rec);
        auto mkey = detail::dedup_key(spec, mir);
        if (mkey < key) continue;  // the partner is the representative
        SolutionRecord keep = rec;
        keep.orbit = (mkey == key) ? 1 : 2;
        out.push_back(std::move(keep));
    }
    return out;
}

// Annotates each record with ingredient availability. Never drops records.
// An ingredient is available when it is the complete design or when the
// catalog lists its multiplier; a missing catalog entry for the parameter
// triple is reported as missing rather than unknown.
inline void filter_by_existence(const ProblemSpec& spec, const Catalog& catalog,
                                std::vector<SolutionRecord>& records) {
    for (auto& rec : records) {
        bool any_unknown = false, any_missing = false;
        for (int i = 0; i <= spec.k; ++i) {
            if (rec.u[i] == 0 || spec.pairs[i].in_R) continue;
            for (int side = 0; side < 2; ++side) {
                int size = side == 0 ? i : spec.k - i;
                int v = side == 0 ? spec.v1 : spec.v2;
                if (size <= spec.t) continue;
                const auto& m = side == 0 ? rec.lambda_left : rec.lambda_right;
                Int lambda = m.at(size);
                if (lambda == lambda_max(spec.t, size, v)) continue;  // complete design
                Int mult = lambda / lambda_min(spec.t, size, v);
                const KnownDesignRecord* known = catalog.lookup_known(spec.t, v, size);
                if (known == nullptr)
                    any_missing = true;
                else if (!catalog.is_known(spec.t, v, size, mult))
                    any_unknown = true;
            }
        }
        rec.constructible = any_missing  ? SolutionRecord::Flag::missing
                            : any_unknown ? SolutionRecord::Flag::unknown
                                          : SolutionRecord::Flag::yes;
    }
}

}  // namespace tdes
