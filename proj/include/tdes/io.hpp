#pragma once

// File formats. Designs and resolutions are JSON; solver output is JSON
// Lines plus a CSV view laid out like the solution tables (m, z columns,
// left indices, right indices). Index values are serialized as decimal
// strings so nothing silently loses precision. Design files are canonical
// on write and canonicalized on read (class indices are remapped when
// reading reorders blocks).

#include <tdes/catalog.hpp>
#include <tdes/constructor.hpp>
#include <tdes/design.hpp>
#include <tdes/solver.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace tdes {

using json = nlohmann::json;

inline Int int_from_json(const json& j, const char* what) {
    if (j.is_string()) return Int(j.get<std::string>());
    if (j.is_number_integer()) return Int(j.get<long long>());
    if (j.is_number_unsigned()) return Int(j.get<unsigned long long>());
    throw parse_error(std::string(what) + ": expected an integer or a decimal string");
}

inline json int_to_json(const Int& x) { return x.str(); }

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw parse_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

inline void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Designs and resolutions

inline json design_to_json(const Design& d) {
    json j;
    j["v"] = d.v;
    j["k"] = d.k;
    j["blocks"] = d.blocks;
    return j;
}

struct ParsedDesign {
    Design design;
    std::vector<std::size_t> perm;  // old block index -> canonical index
};

inline ParsedDesign design_from_json(const json& j) {
    ParsedDesign out;
    try {
        out.design.v = j.at("v").get<int>();
        out.design.k = j.at("k").get<int>();
        out.design.blocks = j.at("blocks").get<std::vector<std::vector<int>>>();
    } catch (const json::exception& e) {
        throw parse_error(std::string("design: ") + e.what());
    }
    try {
        out.perm = canonicalize(out.design);
    } catch (const contract_error& e) {
        throw parse_error(std::string("design: ") + e.what());
    }
    return out;
}

inline json resolution_to_json(const Resolution& r) {
    json j = design_to_json(r.design);
    j["s"] = r.s;
    j["tau"] = int_to_json(r.tau);
    j["classes"] = r.classes;
    return j;
}

inline Resolution resolution_from_json(const json& j) {
    ParsedDesign parsed = design_from_json(j);
    Resolution r;
    r.design = std::move(parsed.design);
    try {
        r.s = j.at("s").get<int>();
        r.tau = j.contains("tau") ? int_from_json(j.at("tau"), "tau") : Int(0);
        r.classes = j.at("classes").get<std::vector<std::vector<int>>>();
    } catch (const json::exception& e) {
        throw parse_error(std::string("resolution: ") + e.what());
    }
    const std::size_t b = r.design.blocks.size();
    for (auto& cls : r.classes)
        for (auto& idx : cls) {
            if (idx < 0 || static_cast<std::size_t>(idx) >= b)
                throw parse_error("resolution: class index out of range");
            idx = static_cast<int>(parsed.perm[idx]);
        }
    return r;
}

// ---------------------------------------------------------------------------
// Problem specs

inline json problem_to_json(const ProblemSpec& spec) {
    json j;
    if (!spec.name.empty()) j["name"] = spec.name;
    j["t"] = spec.t;
    j["k"] = spec.k;
    j["v1"] = spec.v1;
    j["v2"] = spec.v2;
    j["dedup"] = spec.dedup == DedupMode::symmetric ? "symmetric" : "none";
    if (spec.max_m > 0) j["max_m"] = int_to_json(spec.max_m);
    json pairs = json::array();
    for (const auto& p : spec.pairs) {
        json e;
        e["i"] = p.i;
        if (p.in_R) {
            e["in_R"] = true;
            e["s_left"] = p.s_left;
            e["s_right"] = p.s_right;
            e["N"] = p.n_classes;
        }
        if (p.max_lambda_left > 0) e["max_lambda_left"] = int_to_json(p.max_lambda_left);
        if (p.max_lambda_right > 0) e["max_lambda_right"] = int_to_json(p.max_lambda_right);
        pairs.push_back(std::move(e));
    }
    j["pairs"] = pairs;
    return j;
}

inline ProblemSpec problem_from_json(const json& j) {
    ProblemSpec spec;
    try {
        spec.name = j.value("name", "");
        spec.t = j.at("t").get<int>();
        spec.k = j.at("k").get<int>();
        spec.v1 = j.at("v1").get<int>();
        spec.v2 = j.at("v2").get<int>();
        std::string dd = j.value("dedup", "symmetric");
        if (dd != "symmetric" && dd != "none")
            throw parse_error("problem: dedup must be \"symmetric\" or \"none\"");
        spec.dedup = dd == "symmetric" ? DedupMode::symmetric : DedupMode::none;
        if (j.contains("max_m")) spec.max_m = int_from_json(j.at("max_m"), "max_m");
        spec.pairs.assign(spec.k + 1, PairSpec{});
        std::vector<char> seen(spec.k + 1, 0);
        for (const auto& e : j.at("pairs")) {
            int i = e.at("i").get<int>();
            if (i < 0 || i > spec.k || seen[i]) throw parse_error("problem: bad pair index");
            seen[i] = 1;
            PairSpec p;
            p.i = i;
            p.in_R = e.value("in_R", false);
            if (p.in_R) {
                p.s_left = e.at("s_left").get<int>();
                p.s_right = e.at("s_right").get<int>();
                p.n_classes = e.at("N").get<long long>();
            }
            if (e.contains("max_lambda_left"))
                p.max_lambda_left = int_from_json(e.at("max_lambda_left"), "max_lambda_left");
            if (e.contains("max_lambda_right"))
                p.max_lambda_right = int_from_json(e.at("max_lambda_right"), "max_lambda_right");
            spec.pairs[i] = p;
        }
        for (int i = 0; i <= spec.k; ++i)
            if (!seen[i]) throw parse_error("problem: pairs must cover i = 0..k");
    } catch (const json::exception& e) {
        throw parse_error(std::string("problem: ") + e.what());
    }
    validate_problem(spec);
    return spec;
}

// ---------------------------------------------------------------------------
// Solution records

inline json record_to_json(const SolutionRecord& rec) {
    json j;
    j["t"] = rec.t;
    j["k"] = rec.k;
    j["v1"] = rec.v1;
    j["v2"] = rec.v2;
    j["m"] = int_to_json(rec.m);
    j["Lambda"] = int_to_json(rec.Lambda);
    j["u"] = rec.u;
    json z = json::object();
    for (const auto& [i, zv] : rec.z) z[std::to_string(i)] = zv;
    j["z"] = z;
    json ll = json::object(), lr = json::object();
    for (const auto& [size, lam] : rec.lambda_left) ll[std::to_string(size)] = int_to_json(lam);
    for (const auto& [size, lam] : rec.lambda_right) lr[std::to_string(size)] = int_to_json(lam);
    j["lambda_left"] = ll;
    j["lambda_right"] = lr;
    j["orbit"] = rec.orbit;
    j["constructible"] = to_string(rec.constructible);
    return j;
}

inline SolutionRecord record_from_json(const json& j) {
    SolutionRecord rec;
    try {
        rec.t = j.at("t").get<int>();
        rec.k = j.at("k").get<int>();
        rec.v1 = j.at("v1").get<int>();
        rec.v2 = j.at("v2").get<int>();
        rec.m = int_from_json(j.at("m"), "m");
        rec.Lambda = int_from_json(j.at("Lambda"), "Lambda");
        rec.u = j.at("u").get<std::vector<int>>();
        for (const auto& [key, val] : j.at("z").items())
            rec.z[std::stoi(key)] = val.get<long long>();
        for (const auto& [key, val] : j.at("lambda_left").items())
            rec.lambda_left[std::stoi(key)] = int_from_json(val, "lambda_left");
        for (const auto& [key, val] : j.at("lambda_right").items())
            rec.lambda_right[std::stoi(key)] = int_from_json(val, "lambda_right");
        rec.orbit = j.value("orbit", 1);
        std::string flag = j.value("constructible", "unknown");
        rec.constructible = flag == "yes"              ? SolutionRecord::Flag::yes
                            : flag == "unknown"        ? SolutionRecord::Flag::unknown
                                                       : SolutionRecord::Flag::missing;
    } catch (const json::exception& e) {
        throw parse_error(std::string("solution record: ") + e.what());
    }
    if (rec.u.size() != static_cast<std::size_t>(rec.k) + 1)
        throw parse_error("solution record: u must have k+1 entries");
    return rec;
}

inline void write_records_jsonl(const std::string& path,
                                const std::vector<SolutionRecord>& records) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write " + path);
    for (const auto& rec : records) out << record_to_json(rec).dump() << "\n";
}

inline std::vector<SolutionRecord> read_records_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open " + path);
    std::vector<SolutionRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw parse_error("malformed JSONL in " + path + ": " + e.what());
        }
        out.push_back(record_from_json(j));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ingredient bundles

namespace detail {
inline json bundle_entry_json(const json& val, const std::string& base_dir) {
    if (val.is_string()) {
        std::filesystem::path p(val.get<std::string>());
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        return load_json_file(p.string());
    }
    return val;
}
}  // namespace detail

// Bundle files reference designs by ingredient size and resolutions by pair
// index; entries are inline JSON objects or paths relative to the bundle.
inline IngredientBundle bundle_from_json(const json& j, const std::string& base_dir) {
    IngredientBundle b;
    try {
        b.partition.v1 = j.at("v1").get<int>();
        b.partition.v2 = j.at("v2").get<int>();
        for (int side = 0; side < 2; ++side) {
            const char* key = side == 0 ? "left" : "right";
            if (!j.contains(key)) continue;
            const json& sect = j.at(key);
            if (sect.contains("designs"))
                for (const auto& [size, val] : sect.at("designs").items()) {
                    ParsedDesign d = design_from_json(detail::bundle_entry_json(val, base_dir));
                    (side == 0 ? b.left_designs : b.right_designs)[std::stoi(size)] =
                        std::move(d.design);
                }
            if (sect.contains("resolutions"))
                for (const auto& [pair_i, val] : sect.at("resolutions").items()) {
                    Resolution r = resolution_from_json(detail::bundle_entry_json(val, base_dir));
                    (side == 0 ? b.left_resolutions : b.right_resolutions)[std::stoi(pair_i)] =
                        std::move(r);
                }
        }
    } catch (const json::exception& e) {
        throw parse_error(std::string("bundle: ") + e.what());
    }
    return b;
}

inline IngredientBundle load_bundle(const std::string& path) {
    return bundle_from_json(load_json_file(path),
                            std::filesystem::path(path).parent_path().string());
}

// ---------------------------------------------------------------------------
// CSV table view

// Column layout mirrors the solution tables: m, the z columns ascending by
// pair index, left indices ascending by size, right indices ascending by
// size. An entry 0 means the pair is unused (u_i = 0).
inline std::string emit_table(const ProblemSpec& spec, const std::vector<SolutionRecord>& records) {
    std::vector<int> z_cols, left_sizes, right_sizes;
    for (int i = 0; i <= spec.k; ++i) {
        if (!spec.pair_usable(i)) continue;
        if (spec.pairs[i].in_R) {
            z_cols.push_back(i);
            continue;
        }
        if (i > spec.t) left_sizes.push_back(i);
        if (spec.k - i > spec.t) right_sizes.push_back(spec.k - i);
    }
    std::sort(left_sizes.begin(), left_sizes.end());
    std::sort(right_sizes.begin(), right_sizes.end());

    std::ostringstream out;
    out << "m";
    for (int i : z_cols) out << ",z_" << i;
    for (int s : left_sizes) out << ",lambda_" << s;
    for (int s : right_sizes) out << ",lambda_bar_" << s;
    out << "\n";
    for (const auto& rec : records) {
        out << rec.m.str();
        for (int i : z_cols) out << "," << (rec.z.count(i) ? rec.z.at(i) : 0);
        for (int s : left_sizes)
            out << "," << (rec.lambda_left.count(s) ? rec.lambda_left.at(s).str() : "0");
        for (int s : right_sizes)
            out << "," << (rec.lambda_right.count(s) ? rec.lambda_right.at(s).str() : "0");
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Run summary

inline json summarize(const ProblemSpec& spec, std::size_t raw_count,
                      const std::vector<SolutionRecord>& deduped, bool filtered) {
    Int lmin = lambda_min(spec.t, spec.k, spec.v());
    Int lmax = lambda_max(spec.t, spec.k, spec.v());
    Int limit = lim(spec.t, spec.k, spec.v());
    std::size_t leq = 0, constructible = 0, leq_constructible = 0;
    std::set<Int> distinct, distinct_leq;
    for (const auto& r : deduped) {
        distinct.insert(r.m);
        bool is_leq = r.m <= limit;
        if (is_leq) {
            ++leq;
            distinct_leq.insert(r.m);
        }
        if (filtered && r.constructible == SolutionRecord::Flag::yes) {
            ++constructible;
            if (is_leq) ++leq_constructible;
        }
    }
    json j;
    if (!spec.name.empty()) j["name"] = spec.name;
    j["t"] = spec.t;
    j["k"] = spec.k;
    j["v"] = spec.v();
    j["lambda_min"] = int_to_json(lmin);
    j["lambda_max"] = int_to_json(lmax);
    j["lim"] = int_to_json(limit);
    j["raw_records"] = raw_count;
    j["records"] = deduped.size();
    j["records_leq_lim"] = leq;
    j["distinct_m"] = distinct.size();
    j["distinct_m_leq_lim"] = distinct_leq.size();
    if (filtered) {
        j["constructible"] = constructible;
        j["constructible_leq_lim"] = leq_constructible;
    }
    return j;
}

}  // namespace tdes
