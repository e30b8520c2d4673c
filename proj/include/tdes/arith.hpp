#pragma once

// Exact combinatorial arithmetic on design parameters: binomials, derived
// indices, admissibility bounds, parameter complementation. Everything runs
// on arbitrary-precision integers; intermediates that are not obviously
// integral go through exact rationals and are asserted integral.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tdes {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Raised when input files cannot be parsed or fail schema validation.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when an operation is called outside its contract, or when an
// internal consistency assertion fails. Always a bug or bad input, never
// an expected outcome.
struct contract_error : std::runtime_error {
    explicit contract_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a computation would exceed its enumeration budget. The caller
// gets a refusal, never a partial or sampled answer in disguise.
struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& msg) : std::runtime_error(msg) {}
};

// C(n, r), exact. Out-of-range r (r < 0 or r > n) yields 0, which is the
// convention every counting formula below relies on.
inline Int binomial(long long n, long long r) {
    if (r < 0 || n < 0 || r > n) return 0;
    if (r > n - r) r = n - r;
    Int result = 1;
    for (long long i = 1; i <= r; ++i) {
        result *= (n - r + i);
        result /= i;  // exact: result is C(n-r+i, i) at this point
    }
    return result;
}

inline Int numerator_of(const Rat& q) { return boost::multiprecision::numerator(q); }
inline Int denominator_of(const Rat& q) { return boost::multiprecision::denominator(q); }

inline Int require_integral(const Rat& q, const char* what) {
    if (denominator_of(q) != 1)
        throw contract_error(std::string(what) + ": non-integral value " + q.str());
    return numerator_of(q);
}

// The quadruple of a t-(v,k,lambda) design.
struct ParameterSet {
    int t = 0;
    int v = 0;
    int k = 0;
    Int lambda = 0;
};

// lambda_s = lambda * C(v-s, t-s) / C(k-s, t-s). Non-integral values signal
// an inadmissible parameter set.
inline Int lambda_s(const ParameterSet& p, int s) {
    if (s < 0 || s > p.t) throw contract_error("lambda_s: s out of range 0..t");
    Rat q(p.lambda * binomial(p.v - s, p.t - s), binomial(p.k - s, p.t - s));
    return require_integral(q, "lambda_s");
}

// Smallest positive lambda satisfying C(k-s,t-s) | lambda * C(v-s,t-s) for
// all 0 <= s <= t. Computed as an LCM of reduced denominators; the naive
// scan over lambda = 1, 2, ... lives in the tests as an oracle.
inline Int lambda_min(int t, int k, int v) {
    if (!(v >= k && k >= t && t >= 0)) throw contract_error("lambda_min: need v >= k >= t >= 0");
    Int acc = 1;
    for (int s = 0; s <= t; ++s) {
        Int den = binomial(k - s, t - s);
        Int num = binomial(v - s, t - s);
        Int g = boost::multiprecision::gcd(den, num);
        den /= g;
        acc = boost::multiprecision::lcm(acc, den);
    }
    return acc;
}

// Index of the complete design: C(v-t, k-t).
inline Int lambda_max(int t, int k, int v) {
    if (!(v >= k && k >= t && t >= 0)) throw contract_error("lambda_max: need v >= k >= t >= 0");
    return binomial(v - t, k - t);
}

// Reporting cap floor(lambda_max / (2 lambda_min)); indices above it are
// covered by supplementary designs.
inline Int lim(int t, int k, int v) {
    return lambda_max(t, k, v) / (2 * lambda_min(t, k, v));
}

// t-(v,k,lambda) -> t-(v,v-k,lambda*) by complementing every block.
inline ParameterSet complement_params(const ParameterSet& p) {
    Rat q(p.lambda * binomial(p.v - p.k, p.t), binomial(p.k, p.t));
    return ParameterSet{p.t, p.v, p.v - p.k, require_integral(q, "complement_params")};
}

// True iff lambda is a positive multiple of lambda_min not exceeding
// lambda_max (equivalently: all derived indices are integral).
inline bool is_admissible(const ParameterSet& p) {
    if (!(p.v >= p.k && p.k >= p.t && p.t >= 0)) return false;
    if (p.lambda <= 0) return false;
    if (p.lambda > lambda_max(p.t, p.k, p.v)) return false;
    return p.lambda % lambda_min(p.t, p.k, p.v) == 0;
}

// Number of blocks of an ingredient design on v points with block size
// `size` containing a fixed r-subset. For size <= t the ingredient is the
// complete size-(v,size,1) design, so the count is C(v-r, size-r); this
// covers the empty design (size 0) and the degenerate size == v design.
// For size > t the ingredient is a t-(v,size,lambda) design and the count
// is lambda_r derived from lambda; r must then be <= t.
inline Int containment_count(int v, int size, int t, const Int& lambda, int r) {
    if (r < 0) throw contract_error("containment_count: negative r");
    if (size > v || r > size) return 0;
    if (size <= t) return binomial(v - r, size - r);
    if (r > t) throw contract_error("containment_count: r > t for a non-complete ingredient");
    return lambda_s(ParameterSet{t, v, size, lambda}, r);
}

}  // namespace tdes
