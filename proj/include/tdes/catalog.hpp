#pragma once

// Data catalogs consumed by solution filtering: known large-set parameters
// (consumed as data, never derived here) and recorded existence of simple
// designs, keyed by the multiplier m with lambda = m * lambda_min.

#include <tdes/arith.hpp>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace tdes {

// An LS[N](s,k,v): s-resolution of the complete design into N classes.
struct LargeSetRecord {
    int s = 0;
    int k = 0;
    int v = 0;
    long long n_classes = 0;
    std::string source;
    bool has_explicit_file = false;
    std::string file;  // resolution file shipped with the catalog, if any

    Int tau() const { return binomial(v - s, k - s) / n_classes; }
};

// Multipliers m for which a simple t-(v,k,m*lambda_min) design is recorded
// to exist. Absence means unknown, never nonexistence.
struct KnownDesignRecord {
    int t = 0;
    int v = 0;
    int k = 0;
    std::vector<Int> known_m;
    std::string source;
};

struct Catalog {
    std::vector<LargeSetRecord> large_sets;
    std::vector<KnownDesignRecord> known_designs;

    std::vector<LargeSetRecord> lookup_large_sets(int s, int k, int v) const {
        std::vector<LargeSetRecord> out;
        for (const auto& r : large_sets)
            if (r.s == s && r.k == k && r.v == v) out.push_back(r);
        return out;
    }

    const KnownDesignRecord* lookup_known(int t, int v, int k) const {
        for (const auto& r : known_designs)
            if (r.t == t && r.v == v && r.k == k) return &r;
        return nullptr;
    }

    bool is_known(int t, int v, int k, const Int& m) const {
        const KnownDesignRecord* rec = lookup_known(t, v, k);
        if (rec == nullptr) return false;
        return std::find(rec->known_m.begin(), rec->known_m.end(), m) != rec->known_m.end();
    }
};

inline void validate_catalog(const Catalog& c) {
    for (const auto& r : c.large_sets) {
        if (!(0 < r.s && r.s < r.k && r.k <= r.v && r.n_classes >= 1))
            throw parse_error("large-set record with impossible parameters");
        if (binomial(r.v - r.s, r.k - r.s) % r.n_classes != 0)
            throw parse_error("large-set record LS[" + std::to_string(r.n_classes) + "](" +
                              std::to_string(r.s) + "," + std::to_string(r.k) + "," +
                              std::to_string(r.v) + "): N does not divide C(v-s,k-s)");
    }
    for (const auto& r : c.known_designs) {
        Int lmin = lambda_min(r.t, r.k, r.v);
        Int lmax = lambda_max(r.t, r.k, r.v);
        for (const Int& m : r.known_m)
            if (m < 1 || m * lmin > lmax)
                throw parse_error("known-design record " + std::to_string(r.t) + "-(" +
                                  std::to_string(r.v) + "," + std::to_string(r.k) +
                                  "): multiplier " + m.str() + " out of admissible range");
    }
}

inline Catalog parse_catalog(const nlohmann::json& j) {
    Catalog c;
    if (j.contains("large_sets")) {
        for (const auto& e : j.at("large_sets")) {
            LargeSetRecord r;
            r.s = e.at("s").get<int>();
            r.k = e.at("k").get<int>();
            r.v = e.at("v").get<int>();
            r.n_classes = e.at("N").get<long long>();
            r.source = e.value("source", "");
            if (e.contains("file")) {
                r.has_explicit_file = true;
                r.file = e.at("file").get<std::string>();
            }
            c.large_sets.push_back(std::move(r));
        }
    }
    if (j.contains("known_designs")) {
        for (const auto& e : j.at("known_designs")) {
            KnownDesignRecord r;
            r.t = e.at("t").get<int>();
            r.v = e.at("v").get<int>();
            r.k = e.at("k").get<int>();
            r.source = e.value("source", "");
            for (const auto& m : e.at("known_m")) r.known_m.push_back(Int(m.get<long long>()));
            std::sort(r.known_m.begin(), r.known_m.end());
            c.known_designs.push_back(std::move(r));
        }
    }
    validate_catalog(c);
    return c;
}

inline Catalog load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open catalog file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("malformed catalog file " + path + ": " + e.what());
    }
    try {
        return parse_catalog(j);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("catalog file " + path + ": " + e.what());
    }
}

}  // namespace tdes
