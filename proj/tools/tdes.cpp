// Command-line surface. Exit codes: 0 success, 2 parse error, 3 contract
// violation, 4 verification failure, 5 budget refusal.

#include <tdes/catalog.hpp>
#include <tdes/constructor.hpp>
#include <tdes/generators.hpp>
#include <tdes/io.hpp>
#include <tdes/solver.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace {

constexpr int kExitParse = 2;
constexpr int kExitContract = 3;
constexpr int kExitVerifyFailed = 4;
constexpr int kExitBudget = 5;

std::uint64_t default_budget() {
    if (const char* env = std::getenv("TDES_BUDGET")) {
        long long b = std::atoll(env);
        if (b > 0) return static_cast<std::uint64_t>(b);
    }
    return 100'000'000;
}

struct SolveArgs {
    std::string problem, out_dir, catalog_path, dedup_override;
    long long max_m = -1;
    int workers = 0;
};

int run_solve(const SolveArgs& args) {
    tdes::ProblemSpec spec = tdes::problem_from_json(tdes::load_json_file(args.problem));
    if (!args.dedup_override.empty())
        spec.dedup = args.dedup_override == "none" ? tdes::DedupMode::none
                                                   : tdes::DedupMode::symmetric;
    if (args.max_m >= 0) spec.max_m = args.max_m;

    tdes::SolveOptions opts;
    opts.workers = args.workers;
    tdes::SolveResult result = tdes::enumerate_solutions(spec, opts);
    std::vector<tdes::SolutionRecord> records = tdes::dedup_symmetric(spec, result.records);

    bool filtered = false;
    if (!args.catalog_path.empty()) {
        tdes::Catalog catalog = tdes::load_catalog(args.catalog_path);
        tdes::filter_by_existence(spec, catalog, records);
        filtered = true;
    }

    std::filesystem::create_directories(args.out_dir);
    auto out = [&](const char* name) {
        return (std::filesystem::path(args.out_dir) / name).string();
    };
    tdes::write_records_jsonl(out("solutions.jsonl"), records);
    {
        std::ofstream csv(out("solutions.csv"));
        csv << tdes::emit_table(spec, records);
    }
    tdes::json summary = tdes::summarize(spec, result.records.size(), records, filtered);
    summary["nodes"] = result.stats.nodes;
    summary["engine"] = result.stats.engine;
    tdes::save_json_file(out("summary.json"), summary);
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int run_verify(const std::string& design_path, const std::string& resolution_path, int t,
               std::uint64_t budget, int workers) {
    tdes::VerifyOptions opts;
    opts.budget = budget;
    opts.workers = workers;
    if (!resolution_path.empty()) {
        tdes::Resolution r = tdes::resolution_from_json(tdes::load_json_file(resolution_path));
        tdes::ResolutionReport rep = tdes::verify_resolution(r, opts);
        if (rep.ok) {
            std::cout << "resolution ok: s=" << rep.s << " tau=" << rep.tau
                      << " classes=" << r.classes.size() << "\n";
            return 0;
        }
        std::cout << "resolution FAILED: ";
        switch (rep.issue) {
            case tdes::ResolutionIssue::not_partition: std::cout << "classes do not partition the blocks"; break;
            case tdes::ResolutionIssue::empty_class: std::cout << "empty class"; break;
            case tdes::ResolutionIssue::unequal_sizes: std::cout << "classes have unequal sizes"; break;
            case tdes::ResolutionIssue::class_not_design: std::cout << "class is not an s-design"; break;
            case tdes::ResolutionIssue::tau_mismatch: std::cout << "classes have different indices"; break;
            default: std::cout << "unknown issue"; break;
        }
        if (rep.class_index > 0) std::cout << " (class " << rep.class_index << ")";
        std::cout << "\n";
        return kExitVerifyFailed;
    }
    tdes::ParsedDesign d = tdes::design_from_json(tdes::load_json_file(design_path));
    tdes::VerifyReport rep = tdes::verify_t_design(d.design, t, opts);
    if (rep.ok) {
        std::cout << "design ok: " << t << "-(" << d.design.v << "," << d.design.k << ","
                  << rep.lambda << ")"
                  << (tdes::is_simple(d.design) ? " simple" : " NOT simple") << " blocks="
                  << d.design.blocks.size() << " path=" << rep.path << "\n";
        return 0;
    }
    std::cout << "design FAILED: t-set {";
    for (std::size_t i = 0; i < rep.witness.size(); ++i)
        std::cout << (i ? "," : "") << rep.witness[i];
    std::cout << "} lies in " << rep.witness_count << " blocks, expected " << rep.expected
              << "\n";
    return kExitVerifyFailed;
}

struct ConstructArgs {
    std::string problem, solution, bundle, out_design, out_report;
    int index = 0;
    std::uint64_t budget = 0, sample = 2000, seed = 1;
    int workers = 0;
};

int run_construct(const ConstructArgs& args) {
    tdes::ProblemSpec spec = tdes::problem_from_json(tdes::load_json_file(args.problem));
    tdes::SolutionRecord rec;
    if (args.solution.size() > 6 &&
        args.solution.compare(args.solution.size() - 6, 6, ".jsonl") == 0) {
        auto records = tdes::read_records_jsonl(args.solution);
        if (args.index < 0 || static_cast<std::size_t>(args.index) >= records.size())
            throw tdes::parse_error("construct: --index out of range");
        rec = records[args.index];
    } else {
        rec = tdes::record_from_json(tdes::load_json_file(args.solution));
    }
    tdes::IngredientBundle bundle = tdes::load_bundle(args.bundle);
    tdes::AssembleOptions opts;
    opts.budget = args.budget;
    opts.workers = args.workers;
    opts.sample = args.sample;
    opts.seed = args.seed;
    auto [design, report] = tdes::assemble(spec, rec, bundle, opts);

    if (!args.out_design.empty()) {
        tdes::json dj = tdes::design_to_json(design);
        dj["t"] = spec.t;
        dj["lambda"] = tdes::int_to_json(report.Lambda);
        tdes::save_json_file(args.out_design, dj);
    }
    tdes::json rj;
    rj["v"] = design.v;
    rj["k"] = design.k;
    rj["t"] = spec.t;
    rj["Lambda"] = tdes::int_to_json(report.Lambda);
    rj["m"] = tdes::int_to_json(report.m);
    rj["block_count"] = tdes::int_to_json(report.block_count);
    rj["simple"] = report.simple;
    rj["verified_full"] = report.verified_full;
    if (!report.verified_full) rj["sampled_checks"] = tdes::int_to_json(report.sampled_checks);
    tdes::json lt = tdes::json::array();
    for (const auto& L : report.L) lt.push_back(tdes::int_to_json(L));
    rj["L"] = lt;
    tdes::json pairs = tdes::json::array();
    for (const auto& pb : report.pairs) {
        tdes::json pj;
        pj["i"] = pb.i;
        pj["resolved"] = pb.resolved;
        if (pb.resolved) {
            pj["z"] = pb.z;
            pj["w"] = pb.w;
            pj["eps"] = pb.eps;
        }
        pj["blocks"] = tdes::int_to_json(pb.blocks);
        pairs.push_back(std::move(pj));
    }
    rj["pairs"] = pairs;
    if (!args.out_report.empty()) tdes::save_json_file(args.out_report, rj);
    std::cout << rj.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"recursive construction toolkit for simple t-designs"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "enumerate solutions of a construction scenario");
    solve->add_option("--problem", solve_args.problem, "problem spec JSON")->required();
    solve->add_option("--out", solve_args.out_dir, "output directory")->required();
    solve->add_option("--catalog", solve_args.catalog_path, "existence catalog for filtering");
    solve->add_option("--workers", solve_args.workers, "worker threads (0 = auto)");
    solve->add_option("--dedup", solve_args.dedup_override, "symmetric|none")
        ->check(CLI::IsMember({"symmetric", "none"}));
    solve->add_option("--max-m", solve_args.max_m, "cap on the emitted multiplier m");

    std::string verify_design, verify_resolution_path;
    int verify_t = 0, verify_workers = 0;
    std::uint64_t verify_budget = default_budget();
    auto* verify = app.add_subcommand("verify", "exhaustively verify a design or resolution file");
    verify->add_option("--design", verify_design, "design JSON");
    verify->add_option("--t", verify_t, "strength to verify at");
    verify->add_option("--resolution", verify_resolution_path, "resolution JSON");
    verify->add_option("--budget", verify_budget, "counter-update budget");
    verify->add_option("--workers", verify_workers, "worker threads (0 = auto)");

    ConstructArgs cons;
    cons.budget = default_budget();
    auto* construct = app.add_subcommand("construct", "assemble and verify a design from a solution");
    construct->add_option("--problem", cons.problem, "problem spec JSON")->required();
    construct->add_option("--solution", cons.solution, "solution record JSON or JSONL")->required();
    construct->add_option("--index", cons.index, "record index when --solution is a JSONL file");
    construct->add_option("--bundle", cons.bundle, "ingredient bundle JSON")->required();
    construct->add_option("--out", cons.out_design, "output design file");
    construct->add_option("--report", cons.out_report, "output build report");
    construct->add_option("--budget", cons.budget, "verification budget");
    construct->add_option("--sample", cons.sample, "sampled t-sets above budget");
    construct->add_option("--seed", cons.seed, "seed for sampled verification");
    construct->add_option("--workers", cons.workers, "worker threads (0 = auto)");

    auto* gen = app.add_subcommand("gen", "generate ingredient objects");
    gen->require_subcommand(1);
    int gv = 0, gk = 0, gs = 0;
    long long gn = 0;
    std::uint64_t gen_budget = 50'000'000;
    std::string gen_out;
    auto* gen_complete = gen->add_subcommand("complete", "complete design");
    gen_complete->add_option("--v", gv)->required();
    gen_complete->add_option("--k", gk)->required();
    gen_complete->add_option("--out", gen_out, "output file")->required();
    auto* gen_of = gen->add_subcommand("one-factorization", "round-robin 1-factorization of K_v");
    gen_of->add_option("--v", gv)->required();
    gen_of->add_option("--out", gen_out, "output file")->required();
    auto* gen_ls = gen->add_subcommand("large-set", "backtracking search for an LS[N](s,k,v)");
    gen_ls->add_option("--s", gs)->required();
    gen_ls->add_option("--k", gk)->required();
    gen_ls->add_option("--v", gv)->required();
    gen_ls->add_option("--N", gn)->required();
    gen_ls->add_option("--budget", gen_budget, "search node budget");
    gen_ls->add_option("--out", gen_out, "output file")->required();

    std::string cat_file;
    int cat_s = 0, cat_k = 0, cat_v = 0;
    auto* cat = app.add_subcommand("catalog", "validate or query catalog files");
    cat->require_subcommand(1);
    auto* cat_validate = cat->add_subcommand("validate", "check catalog invariants");
    cat_validate->add_option("--file", cat_file)->required();
    auto* cat_lookup = cat->add_subcommand("lookup", "list large sets for (s,k,v)");
    cat_lookup->add_option("--file", cat_file)->required();
    cat_lookup->add_option("--s", cat_s)->required();
    cat_lookup->add_option("--k", cat_k)->required();
    cat_lookup->add_option("--v", cat_v)->required();

    std::string rep_problem, rep_solutions, rep_csv;
    long long rep_max_m = -1;
    bool rep_constructible = false;
    auto* report = app.add_subcommand("report", "emit a CSV table from solver output");
    report->add_option("--problem", rep_problem, "problem spec JSON")->required();
    report->add_option("--solutions", rep_solutions, "solutions JSONL")->required();
    report->add_option("--csv", rep_csv, "output CSV path")->required();
    report->add_option("--max-m", rep_max_m, "keep only rows with m <= max-m");
    report->add_flag("--constructible-only", rep_constructible, "keep only constructible rows");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return run_solve(solve_args);
        if (verify->parsed()) {
            if (verify_design.empty() == verify_resolution_path.empty())
                throw tdes::parse_error("verify: pass exactly one of --design / --resolution");
            return run_verify(verify_design, verify_resolution_path, verify_t, verify_budget,
                              verify_workers);
        }
        if (construct->parsed()) return run_construct(cons);
        if (gen->parsed()) {
            if (gen_complete->parsed()) {
                tdes::Design d = tdes::complete_design(gv, gk);
                tdes::save_json_file(gen_out, tdes::design_to_json(d));
                std::cout << "wrote " << gen_out << " (" << d.blocks.size() << " blocks)\n";
                return 0;
            }
            if (gen_of->parsed()) {
                tdes::Resolution r = tdes::round_robin_one_factorization(gv);
                tdes::save_json_file(gen_out, tdes::resolution_to_json(r));
                std::cout << "wrote " << gen_out << " (" << r.classes.size() << " classes)\n";
                return 0;
            }
            tdes::LargeSetSearchResult res = tdes::backtrack_large_set(gs, gk, gv, gn, gen_budget);
            if (res.outcome == tdes::SearchOutcome::found) {
                tdes::save_json_file(gen_out, tdes::resolution_to_json(res.resolution));
                std::cout << "wrote " << gen_out << " (nodes " << res.nodes << ")\n";
                return 0;
            }
            if (res.outcome == tdes::SearchOutcome::not_found) {
                std::cout << "search space exhausted, none found (nodes " << res.nodes << ")\n";
                return kExitVerifyFailed;
            }
            std::cout << "budget exhausted, inconclusive (nodes " << res.nodes << ")\n";
            return kExitBudget;
        }
        if (cat->parsed()) {
            tdes::Catalog catalog = tdes::load_catalog(cat_file);
            if (cat_validate->parsed()) {
                std::cout << "catalog ok: " << catalog.large_sets.size() << " large sets, "
                          << catalog.known_designs.size() << " known-design records\n";
                return 0;
            }
            auto found = catalog.lookup_large_sets(cat_s, cat_k, cat_v);
            for (const auto& r : found)
                std::cout << "LS[" << r.n_classes << "](" << r.s << "," << r.k << "," << r.v
                          << ") tau=" << r.tau() << (r.source.empty() ? "" : "  source: " + r.source)
                          << "\n";
            if (found.empty()) std::cout << "no records\n";
            return 0;
        }
        if (report->parsed()) {
            tdes::ProblemSpec spec = tdes::problem_from_json(tdes::load_json_file(rep_problem));
            auto records = tdes::read_records_jsonl(rep_solutions);
            std::vector<tdes::SolutionRecord> kept;
            for (const auto& r : records) {
                if (rep_max_m >= 0 && r.m > rep_max_m) continue;
                if (rep_constructible && r.constructible != tdes::SolutionRecord::Flag::yes)
                    continue;
                kept.push_back(r);
            }
            std::ofstream csv(rep_csv);
            if (!csv) throw tdes::parse_error("cannot write " + rep_csv);
            csv << tdes::emit_table(spec, kept);
            std::cout << "wrote " << rep_csv << " (" << kept.size() << " rows)\n";
            return 0;
        }
    } catch (const tdes::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const tdes::budget_error& e) {
        std::cerr << "budget refused: " << e.what() << "\n";
        return kExitBudget;
    } catch (const tdes::contract_error& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return kExitContract;
    }
    return 0;
}
