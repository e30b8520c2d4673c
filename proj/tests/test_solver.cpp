#include <catch2/catch_amalgamated.hpp>

#include <tdes/io.hpp>
#include <tdes/solver.hpp>

#include <set>

using namespace tdes;

namespace {

ProblemSpec make_spec(int t, int k, int v1, int v2,
                      std::vector<std::tuple<int, int, int, long long>> resolved) {
    ProblemSpec s;
    s.t = t;
    s.k = k;
    s.v1 = v1;
    s.v2 = v2;
    for (int i = 0; i <= k; ++i) {
        PairSpec p;
        p.i = i;
        s.pairs.push_back(p);
    }
    for (auto [i, sl, sr, n] : resolved) {
        s.pairs[i].in_R = true;
        s.pairs[i].s_left = sl;
        s.pairs[i].s_right = sr;
        s.pairs[i].n_classes = n;
    }
    return s;
}

ProblemSpec spec_5_38_8() { return make_spec(5, 8, 19, 19, {{3, 2, 2, 17}, {4, 2, 2, 17}, {5, 2, 2, 17}}); }

ProblemSpec spec_3_12_4() { return make_spec(3, 4, 6, 6, {{2, 1, 1, 5}}); }

// brute-force oracle: nested enumeration of every assignment, L values from
// the public term functions only (no elimination, no incremental sums)
struct OracleVar {
    int pair_i;
    bool is_z;
    bool left;                // for lambda vars
    int size;
    std::vector<Int> values;  // 0 = pair side off
};

void oracle_enumerate(const ProblemSpec& spec, std::vector<OracleVar>& vars, std::size_t idx,
                      std::map<int, std::pair<Int, Int>>& lambdas, std::map<int, long long>& zs,
                      std::vector<std::vector<Int>>& found_L,
                      std::vector<std::string>& found_sig) {
    if (idx == vars.size()) {
        // pair is on iff every variable attached to it is nonzero, off iff all zero
        std::vector<int> u(spec.k + 1, 0);
        for (int i = 0; i <= spec.k; ++i) {
            if (!spec.pair_usable(i)) continue;
            bool has_var = false, any_zero = false, any_nonzero = false;
            for (const auto& var : vars) {
                if (var.pair_i != i) continue;
                has_var = true;
                Int val = var.is_z ? Int(zs[i]) : (var.left ? lambdas[i].first : lambdas[i].second);
                (val == 0 ? any_zero : any_nonzero) = true;
            }
            if (!has_var)
                u[i] = 1;  // both sides forced: oracle treats u as a variable elsewhere
            else if (any_zero && any_nonzero)
                return;  // half-on pair is not a valid assignment
            else
                u[i] = any_nonzero ? 1 : 0;
        }
        std::vector<Int> L(spec.t + 1, 0);
        for (int i = 0; i <= spec.k; ++i) {
            if (u[i] == 0 || !spec.pair_usable(i)) continue;
            Int ll = i <= spec.t ? Int(1)
                     : spec.pairs[i].in_R ? lambda_max(spec.t, i, spec.v1)
                                          : lambdas[i].first;
            Int lr = spec.k - i <= spec.t ? Int(1)
                     : spec.pairs[i].in_R ? lambda_max(spec.t, spec.k - i, spec.v2)
                                          : lambdas[i].second;
            for (int r = 0; r <= spec.t; ++r) {
                if (spec.pairs[i].in_R)
                    L[r] += lambda_star_term(spec.v1, spec.v2, spec.t, spec.k, spec.pairs[i], r,
                                             ll, lr, zs[i]);
                else
                    L[r] += basic_term(spec.v1, spec.v2, spec.t, spec.k, i, r, ll, lr);
            }
        }
        for (int r = 1; r <= spec.t; ++r)
            if (L[r] != L[0]) return;
        if (L[0] == 0) return;
        std::string sig;
        for (int i = 0; i <= spec.k; ++i) sig += std::to_string(u[i]);
        for (const auto& var : vars) {
            Int val = var.is_z ? Int(zs[var.pair_i])
                               : (var.left ? lambdas[var.pair_i].first : lambdas[var.pair_i].second);
            sig += ":" + val.str();
        }
        found_L.push_back(L);
        found_sig.push_back(sig);
        return;
    }
    OracleVar& var = vars[idx];
    for (const Int& val : var.values) {
        if (var.is_z)
            zs[var.pair_i] = static_cast<long long>(val);
        else if (var.left)
            lambdas[var.pair_i].first = val;
        else
            lambdas[var.pair_i].second = val;
        oracle_enumerate(spec, vars, idx + 1, lambdas, zs, found_L, found_sig);
    }
}

// builds oracle variables: one per resolved pair (z), one per unknown side,
// and one on/off flag value set for both-trivial pairs via a fake z
std::pair<std::vector<std::vector<Int>>, std::vector<std::string>> oracle_solve(
    const ProblemSpec& spec) {
    std::vector<OracleVar> vars;
    for (int i = 0; i <= spec.k; ++i) {
        if (!spec.pair_usable(i)) continue;
        const PairSpec& p = spec.pairs[i];
        if (p.in_R) {
            OracleVar var;
            var.pair_i = i;
            var.is_z = true;
            for (long long z = 0; z <= p.n_classes; ++z) var.values.push_back(z);
            vars.push_back(var);
            continue;
        }
        bool left_unknown = i > spec.t, right_unknown = spec.k - i > spec.t;
        if (!left_unknown && !right_unknown) {
            // representable as a z-style 0/1 switch through a lambda slot
            OracleVar var;
            var.pair_i = i;
            var.is_z = false;
            var.left = true;
            var.values = {0, 1};
            vars.push_back(var);
            continue;
        }
        if (left_unknown) {
            OracleVar var;
            var.pair_i = i;
            var.is_z = false;
            var.left = true;
            Int lmin = lambda_min(spec.t, i, spec.v1), lmax = lambda_max(spec.t, i, spec.v1);
            var.values.push_back(0);
            for (Int lam = lmin; lam <= lmax; lam += lmin) var.values.push_back(lam);
            vars.push_back(var);
        }
        if (right_unknown) {
            OracleVar var;
            var.pair_i = i;
            var.is_z = false;
            var.left = false;
            Int lmin = lambda_min(spec.t, spec.k - i, spec.v2),
                lmax = lambda_max(spec.t, spec.k - i, spec.v2);
            var.values.push_back(0);
            for (Int lam = lmin; lam <= lmax; lam += lmin) var.values.push_back(lam);
            vars.push_back(var);
        }
    }
    std::map<int, std::pair<Int, Int>> lambdas;
    std::map<int, long long> zs;
    for (int i = 0; i <= spec.k; ++i) lambdas[i] = {1, 1};
    std::vector<std::vector<Int>> L;
    std::vector<std::string> sig;
    oracle_enumerate(spec, vars, 0, lambdas, zs, L, sig);
    return {L, sig};
}

std::string record_sig(const ProblemSpec& spec, const SolutionRecord& rec,
                       const std::vector<OracleVar>& layout) {
    std::string sig;
    for (int i = 0; i <= spec.k; ++i) sig += std::to_string(rec.u[i]);
    for (const auto& var : layout) {
        Int val = 0;
        if (var.is_z) {
            if (rec.z.count(var.pair_i)) val = rec.z.at(var.pair_i);
        } else if (var.pair_i <= spec.t && spec.k - var.pair_i <= spec.t) {
            val = rec.u[var.pair_i];
        } else if (var.left) {
            if (rec.lambda_left.count(var.pair_i)) val = rec.lambda_left.at(var.pair_i);
        } else {
            if (rec.lambda_right.count(spec.k - var.pair_i))
                val = rec.lambda_right.at(spec.k - var.pair_i);
        }
        sig += ":" + val.str();
    }
    return sig;
}

}  // namespace

TEST_CASE("z_from_w_eps golden values") {
    CHECK(z_from_w_eps(8, 0, 17) == 17);
    CHECK(z_from_w_eps(1, 1, 5) == 2);
    CHECK(z_from_w_eps(3, 0, 6) == 6);
    CHECK(z_from_w_eps(0, 1, 5) == 0);  // contradictory window
    CHECK_THROWS_AS(z_from_w_eps(3, 0, 5), contract_error);
}

TEST_CASE("w_eps_from_z golden values and inversion") {
    CHECK(w_eps_from_z(2, 5) == std::make_pair(1LL, 1));
    CHECK(w_eps_from_z(1, 9) == std::make_pair(0LL, 0));
    CHECK(w_eps_from_z(17, 17) == std::make_pair(8LL, 0));
    for (long long n = 1; n <= 20; ++n)
        for (long long z = 1; z <= n; ++z) {
            auto [w, eps] = w_eps_from_z(z, n);
            REQUIRE(z_from_w_eps(w, eps, n) == z);
        }
    CHECK_THROWS_AS(w_eps_from_z(0, 5), contract_error);
    CHECK_THROWS_AS(w_eps_from_z(6, 5), contract_error);
}

TEST_CASE("z equals the class-window count for every class, N <= 20") {
    for (long long n = 1; n <= 20; ++n) {
        for (long long z = 1; z <= n; ++z) {
            auto [w, eps] = w_eps_from_z(z, n);
            for (long long h = 1; h <= n; ++h) {
                long long count = 0;
                for (long long j = 1; j <= n; ++j) {
                    long long d = class_distance(h, j, n);
                    if (d >= eps && d <= w) ++count;
                }
                REQUIRE(count == z);
            }
        }
    }
}

TEST_CASE("classify_case golden values") {
    CHECK(classify_case(2, 2, 2, 5) == 'b');
    CHECK(classify_case(0, 2, 5, 5) == 'a');
    CHECK(classify_case(3, 2, 2, 5) == 'c');
    CHECK_THROWS_AS(classify_case(3, 2, 1, 5), contract_error);
}

TEST_CASE("classify_case is total under the strength condition, t <= 8") {
    for (int t = 2; t <= 8; ++t)
        for (int sl = 1; sl < t; ++sl)
            for (int sr = 1; sr < t; ++sr) {
                if (sl + sr < 2 * (t / 2)) continue;
                for (int r = 0; r <= t; ++r) {
                    char c = classify_case(r, sl, sr, t);
                    REQUIRE((c == 'a' || c == 'b' || c == 'c'));
                }
            }
}

TEST_CASE("lambda_star_term matches the worked coefficients") {
    ProblemSpec s = spec_5_38_8();
    Int l3 = 1, l5 = lambda_max(5, 5, 19);  // complete ingredients
    // pair (3,5), r = 1, z = 7: 9 * 15 * 7
    CHECK(lambda_star_term(19, 19, 5, 8, s.pairs[3], 1, l3, l5, 7) == 945);
    // pair (4,4), r = 0: right factor vanishes
    CHECK(lambda_star_term(19, 19, 5, 8, s.pairs[4], 0, 1, 1, 3) == 0);
    // pair (2,2) of the 3-(12,4) scenario, r = 1, z = 2
    ProblemSpec small = spec_3_12_4();
    CHECK(lambda_star_term(6, 6, 3, 4, small.pairs[2], 1, 1, 1, 2) == 2);
}

TEST_CASE("basic_term conventions") {
    // u_1 coefficient 19 for the pair (1,7) with lambda_bar = 35
    CHECK(basic_term(19, 19, 5, 8, 1, 0, 1, 35) == 19 * 35);
    // the empty design contains no nonempty subset
    CHECK(basic_term(19, 19, 5, 8, 0, 1, 1, 28) == 0);
    // coefficient 40 of lambda_bar_6 in L_2 (per unit lambda_min = 2)
    CHECK(basic_term(19, 19, 5, 8, 2, 2, 1, 2) == 80);
}

TEST_CASE("a full-window resolved pair reproduces the plain pair counts") {
    ProblemSpec s = spec_5_38_8();
    for (int i : {3, 4, 5}) {
        Int ll = i <= 5 ? Int(1) : lambda_max(5, i, 19);
        Int lr = 8 - i <= 5 ? Int(1) : lambda_max(5, 8 - i, 19);
        for (int r = 0; r <= 5; ++r)
            REQUIRE(lambda_star_term(19, 19, 5, 8, s.pairs[i], r, ll, lr, 17) ==
                    basic_term(19, 19, 5, 8, i, r, ll, lr));
    }
}

TEST_CASE("3-(12,4) scenario: solver output equals the brute-force oracle") {
    ProblemSpec spec = spec_3_12_4();
    auto [oracle_L, oracle_sigs] = oracle_solve(spec);
    REQUIRE(oracle_sigs.size() == 3);

    SolveResult res = enumerate_solutions(spec);
    REQUIRE(res.records.size() == 3);
    std::set<Int> lams;
    for (const auto& rec : res.records) lams.insert(rec.Lambda);
    CHECK(lams == std::set<Int>{3, 6, 9});

    // exact set equality of assignments
    std::vector<OracleVar> layout;
    for (int i = 0; i <= spec.k; ++i) {
        if (!spec.pair_usable(i)) continue;
        const PairSpec& p = spec.pairs[i];
        if (p.in_R) {
            OracleVar var;
            var.pair_i = i;
            var.is_z = true;
            layout.push_back(var);
        } else if (i <= spec.t && spec.k - i <= spec.t) {
            OracleVar var;
            var.pair_i = i;
            var.is_z = false;
            var.left = true;
            layout.push_back(var);
        } else {
            if (i > spec.t) {
                OracleVar var;
                var.pair_i = i;
                var.is_z = false;
                var.left = true;
                layout.push_back(var);
            }
            if (spec.k - i > spec.t) {
                OracleVar var;
                var.pair_i = i;
                var.is_z = false;
                var.left = false;
                layout.push_back(var);
            }
        }
    }
    std::multiset<std::string> want(oracle_sigs.begin(), oracle_sigs.end());
    std::multiset<std::string> got;
    for (const auto& rec : res.records) got.insert(record_sig(spec, rec, layout));
    REQUIRE(got == want);

    // the two required rows
    bool has6 = false, has9 = false;
    for (const auto& rec : res.records) {
        if (rec.Lambda == 6 && rec.z.at(2) == 2) has6 = true;
        if (rec.Lambda == 9 && rec.z.at(2) == 5) has9 = true;
    }
    CHECK(has6);
    CHECK(has9);
}

TEST_CASE("small basic-construction scenario agrees with the oracle") {
    // t=2, k=3, v1=v2=4: pairs (2,1),(3,0) carry an unknown left index
    ProblemSpec spec = make_spec(2, 3, 4, 4, {});
    auto [oracle_L, oracle_sigs] = oracle_solve(spec);
    SolveResult res = enumerate_solutions(spec);
    REQUIRE(res.records.size() == oracle_sigs.size());
}

TEST_CASE("bilinear pairs (k >= 2t+2) agree with the oracle") {
    // t=2, k=6, v1=v2=6: pair (3,3) has unknowns on both sides
    ProblemSpec spec = make_spec(2, 6, 6, 6, {});
    auto [oracle_L, oracle_sigs] = oracle_solve(spec);
    SolveResult res = enumerate_solutions(spec);
    INFO("oracle " << oracle_sigs.size() << " solver " << res.records.size());
    REQUIRE(res.records.size() == oracle_sigs.size());
    for (const auto& rec : res.records) {
        auto L = evaluate_L(spec, rec);
        for (const auto& val : L) REQUIRE(val == rec.Lambda);
    }
}

TEST_CASE("the all-complete assignment yields the complete design index") {
    ProblemSpec spec = spec_5_38_8();
    SolutionRecord rec;
    rec.t = 5;
    rec.k = 8;
    rec.v1 = rec.v2 = 19;
    rec.u.assign(9, 1);
    for (int i : {3, 4, 5}) rec.z[i] = 17;
    for (int j : {6, 7, 8}) {
        rec.lambda_left[j] = lambda_max(5, j, 19);
        rec.lambda_right[j] = lambda_max(5, j, 19);
    }
    auto L = evaluate_L(spec, rec);
    for (const auto& val : L) REQUIRE(val == lambda_max(5, 8, 38));
    // and the solver emits it
    SolveResult res = enumerate_solutions(spec);
    bool found = false;
    for (const auto& r : res.records)
        if (r.Lambda == lambda_max(5, 8, 38)) found = true;
    CHECK(found);
}

TEST_CASE("5-38-8 headline counts") {
    ProblemSpec spec = spec_5_38_8();
    SolveResult res = enumerate_solutions(spec);
    CHECK(res.records.size() == 33);
    auto ded = dedup_symmetric(spec, res.records);
    CHECK(ded.size() == 33);
    int leq = 0;
    for (const auto& r : ded)
        if (r.m <= 682) ++leq;
    CHECK(leq == 16);
}

TEST_CASE("deduplication keeps one representative per mirror orbit") {
    ProblemSpec spec = make_spec(4, 7, 15, 15, {{3, 2, 2, 13}, {4, 2, 2, 13}});
    SolveResult res = enumerate_solutions(spec);
    auto ded = dedup_symmetric(spec, res.records);
    REQUIRE(res.records.size() == 7);
    REQUIRE(ded.size() == 6);
    int orbit2 = 0;
    for (const auto& r : ded) {
        if (r.orbit == 2) {
            ++orbit2;
            // the kept side has the lexicographically smaller index vectors
            SolutionRecord mir = mirror_record(spec, r);
            REQUIRE(detail::dedup_key(spec, r) < detail::dedup_key(spec, mir));
            // its partner is present in the raw stream
            bool partner = false;
            for (const auto& raw : res.records)
                if (detail::dedup_key(spec, raw) == detail::dedup_key(spec, mir)) partner = true;
            REQUIRE(partner);
        }
    }
    CHECK(orbit2 == 1);
    CHECK(res.records.size() == ded.size() + orbit2);
}

TEST_CASE("asymmetric point splits pass through deduplication") {
    ProblemSpec spec = make_spec(5, 8, 13, 24, {{3, 2, 2, 11}, {4, 2, 2, 11}, {5, 2, 2, 11}});
    SolveResult res = enumerate_solutions(spec);
    auto ded = dedup_symmetric(spec, res.records);
    CHECK(res.records.size() == ded.size());
    for (const auto& r : ded) CHECK(r.orbit == 1);
}

TEST_CASE("solver output is deterministic across worker counts") {
    ProblemSpec spec = make_spec(5, 9, 19, 19,
                                 {{3, 2, 2, 17}, {4, 2, 2, 17}, {5, 2, 2, 17}, {6, 2, 2, 17}});
    SolveOptions one, four;
    one.workers = 1;
    four.workers = 4;
    SolveResult a = enumerate_solutions(spec, one);
    SolveResult b = enumerate_solutions(spec, four);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        REQUIRE(a.records[i].Lambda == b.records[i].Lambda);
        REQUIRE(a.records[i].u == b.records[i].u);
        REQUIRE(a.records[i].z == b.records[i].z);
        REQUIRE(a.records[i].lambda_left == b.records[i].lambda_left);
        REQUIRE(a.records[i].lambda_right == b.records[i].lambda_right);
    }
}

TEST_CASE("the arbitrary-precision engine matches the int64 engine") {
    ProblemSpec spec = spec_3_12_4();
    SolveOptions fast, big;
    fast.force_engine = 1;
    big.force_engine = 2;
    SolveResult a = enumerate_solutions(spec, fast);
    SolveResult b = enumerate_solutions(spec, big);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i)
        REQUIRE(a.records[i].Lambda == b.records[i].Lambda);
    CHECK(std::string(b.stats.engine) == "bigint");
}

TEST_CASE("per-pair index caps restrict the enumeration") {
    ProblemSpec spec = spec_5_38_8();
    spec.pairs[0].max_lambda_right = 112;  // cap lambda_bar_8
    spec.pairs[8].max_lambda_left = 112;
    SolveResult res = enumerate_solutions(spec);
    REQUIRE(res.records.size() < 33);
    for (const auto& r : res.records) {
        if (r.lambda_right.count(8)) REQUIRE(r.lambda_right.at(8) <= 112);
        if (r.lambda_left.count(8)) REQUIRE(r.lambda_left.at(8) <= 112);
    }
}

TEST_CASE("max_m caps the emitted records") {
    ProblemSpec spec = spec_5_38_8();
    spec.max_m = 682;
    SolveResult res = enumerate_solutions(spec);
    CHECK(res.records.size() == 16);
    for (const auto& r : res.records) CHECK(r.m <= 682);
}

TEST_CASE("existence filtering flags, never drops") {
    ProblemSpec spec = spec_5_38_8();
    SolveResult res = enumerate_solutions(spec);
    auto ded = dedup_symmetric(spec, res.records);
    Catalog cat = load_catalog(std::string(TDES_DATA_DIR) + "/catalog/catalog.json");
    std::size_t before = ded.size();
    filter_by_existence(spec, cat, ded);
    REQUIRE(ded.size() == before);
    int yes = 0;
    for (const auto& r : ded)
        if (r.m <= 682 && r.constructible == SolutionRecord::Flag::yes) ++yes;
    CHECK(yes == 5);
    // a record using only complete ingredients is constructible
    for (const auto& r : ded)
        if (r.Lambda == lambda_max(5, 8, 38))
            CHECK(r.constructible == SolutionRecord::Flag::yes);
}

TEST_CASE("missing catalog entries are reported as missing") {
    ProblemSpec spec = make_spec(5, 10, 18, 18, {{5, 2, 2, 7}});
    SolveResult res = enumerate_solutions(spec);
    auto ded = dedup_symmetric(spec, res.records);
    Catalog cat = load_catalog(std::string(TDES_DATA_DIR) + "/catalog/catalog.json");
    filter_by_existence(spec, cat, ded);
    bool any_missing = false;
    for (const auto& r : ded) {
        bool uses_noncomplete = false;
        for (const auto& [size, lam] : r.lambda_left)
            if (lam != lambda_max(5, size, 18)) uses_noncomplete = true;
        for (const auto& [size, lam] : r.lambda_right)
            if (lam != lambda_max(5, size, 18)) uses_noncomplete = true;
        if (uses_noncomplete) {
            REQUIRE(r.constructible == SolutionRecord::Flag::missing);
            any_missing = true;
        } else {
            REQUIRE(r.constructible == SolutionRecord::Flag::yes);
        }
    }
    CHECK(any_missing);
}

TEST_CASE("problem validation rejects broken scenarios") {
    ProblemSpec bad = spec_3_12_4();
    bad.pairs[2].n_classes = 4;  // 4 does not divide C(5,1)
    CHECK_THROWS_AS(validate_problem(bad), contract_error);

    ProblemSpec cond = make_spec(4, 8, 13, 13, {});
    cond.pairs[4].in_R = true;
    cond.pairs[4].s_left = 1;
    cond.pairs[4].s_right = 1;  // 1 + 1 < 2*floor(4/2)
    cond.pairs[4].n_classes = 55;
    CHECK_THROWS_AS(validate_problem(cond), contract_error);

    ProblemSpec strengths = spec_3_12_4();
    strengths.pairs[2].s_left = 3;  // s must stay below t
    CHECK_THROWS_AS(validate_problem(strengths), contract_error);
}
