#include <CLI11.hpp>

#include <future>
#include <iostream>

#include "qres/io.hpp"
#include "qres/seesaw.hpp"

using namespace qres;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;       // verification / witness check failed
constexpr int kExitValidation = 2; // malformed or inconsistent inputs
constexpr int kExitSolver = 3;     // backend failure

struct CliPaths {
    std::string set, state, povm, povm_b, gset, dpovm, behaviour, witness, instance;
    std::string witness_out, decomposition_out;
};

std::map<std::string, std::string> hash_inputs(const std::vector<std::pair<std::string, std::string>>& files) {
    std::map<std::string, std::string> out;
    for (const auto& [label, path] : files)
        if (!path.empty()) out[label + ":" + path] = file_hash(path);
    return out;
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << j.dump(1) << "\n";
    else
        save_json(j, out_path);
}

int cmd_robustness(const std::string& kind, const std::string& mode, const CliPaths& paths, const RunConfig& cfg) {
    auto settings = cfg.robustness();
    RobustnessResult res;
    std::vector<std::pair<std::string, std::string>> used;
    std::string quantifier = kind;

    if (kind == "incompat") {
        if (!paths.set.empty()) {
            res = rob_incompat_standard(set_from_json(load_json(paths.set)), settings);
            used.emplace_back("set", paths.set);
        } else if (!paths.gset.empty()) {
            auto g = gset_from_json(load_json(paths.gset));
            res = rob_incompat_generalised(g, mode == "seesaw" ? RelaxMode::seesaw_upper : RelaxMode::ppt_lower,
                                           settings);
            used.emplace_back("gset", paths.gset);
        } else {
            throw validation_error("incompat needs --set or --gset");
        }
    } else if (kind == "teleport") {
        if (paths.state.empty()) throw validation_error("teleport needs --state");
        auto rho = state_from_json(load_json(paths.state));
        used.emplace_back("state", paths.state);
        if (!paths.set.empty()) {
            auto set = set_from_json(load_json(paths.set));
            res = rob_teleport_classical_inputs(assemblage_of_standard(set, rho), settings);
            used.emplace_back("set", paths.set);
        } else if (!paths.povm.empty()) {
            auto povm = povm_from_json(load_json(paths.povm));
            res = rob_teleport_choi(povm, rho, mode == "seesaw" ? RelaxMode::seesaw_upper : RelaxMode::ppt_lower,
                                    settings);
            used.emplace_back("povm", paths.povm);
        } else {
            throw validation_error("teleport needs --set or --povm");
        }
    } else if (kind == "buscemi") {
        DistributedPovm mab;
        if (!paths.dpovm.empty()) {
            mab = dpovm_from_json(load_json(paths.dpovm));
            used.emplace_back("dpovm", paths.dpovm);
        } else if (!paths.povm.empty() && !paths.povm_b.empty() && !paths.state.empty()) {
            mab = distributed_povm(povm_from_json(load_json(paths.povm)), povm_from_json(load_json(paths.povm_b)),
                                   state_from_json(load_json(paths.state)));
            used.emplace_back("povm", paths.povm);
            used.emplace_back("povm_b", paths.povm_b);
            used.emplace_back("state", paths.state);
        } else {
            throw validation_error("buscemi needs --dpovm or --povm/--povm-b/--state");
        }
        res = rob_buscemi(mab, mode == "seesaw" ? RelaxMode::seesaw_upper : RelaxMode::ppt_lower, settings);
    } else if (kind == "behaviour") {
        if (paths.behaviour.empty()) throw validation_error("behaviour needs --behaviour");
        res = rob_behaviour(behaviour_from_json(load_json(paths.behaviour)), settings);
        used.emplace_back("behaviour", paths.behaviour);
    } else {
        throw validation_error("unknown robustness kind '" + kind + "'");
    }

    json rep = robustness_report(res, cfg, hash_inputs(used), quantifier);
    if (!paths.witness_out.empty() && res.witness) {
        save_json(witness_to_json(*res.witness), paths.witness_out);
        rep["witness_path"] = paths.witness_out;
    }
    if (!paths.decomposition_out.empty() && res.decomposition) {
        save_json(decomposition_to_json(*res.decomposition), paths.decomposition_out);
        rep["decomposition_path"] = paths.decomposition_out;
    }
    emit(rep, cfg.out_path);
    return kExitOk;
}

std::vector<StandardMeasurementSet> builtin_corpus(uint64_t seed) {
    std::vector<StandardMeasurementSet> out{xz_pair()};
    Rng rng(seed);
    for (int k = 0; k < 20; ++k) out.push_back(random_qubit_set(rng, 2 + k % 2, 2));
    return out;
}

int cmd_verify(int result, const CliPaths& paths, bool corpus, const RunConfig& cfg) {
    auto settings = cfg.robustness();
    std::vector<VerificationReport> reports;

    auto run_one = [&](const StandardMeasurementSet& set, const Povm* ma, const HermitianOperator* rho) {
        switch (result) {
            case 1: return verify_result1(set, settings);
            case 2: {
                if (ma && rho) return verify_result2(*ma, *rho, settings);
                auto g = embed_standard(set);
                return verify_result2(g.parent, max_entangled(set.dim), settings);
            }
            case 3: return verify_result3(set, settings);
            case 4: return verify_result4(set, settings);
            default: throw validation_error("verify: result must be 1, 2, 3 or 4");
        }
    };

    if (corpus) {
        auto sets = builtin_corpus(cfg.seed);
        reports.resize(sets.size());
        std::vector<std::future<VerificationReport>> futs;
        const int jobs = std::max(1, cfg.jobs);
        for (size_t i = 0; i < sets.size(); i += jobs) {
            futs.clear();
            for (size_t k = i; k < std::min(sets.size(), i + jobs); ++k)
                futs.push_back(std::async(std::launch::async, [&, k] { return run_one(sets[k], nullptr, nullptr); }));
            for (size_t k = i; k < std::min(sets.size(), i + jobs); ++k) reports[k] = futs[k - i].get();
        }
    } else if (!paths.povm.empty() && !paths.state.empty() && result == 2) {
        auto povm = povm_from_json(load_json(paths.povm));
        auto rho = state_from_json(load_json(paths.state));
        reports.push_back(run_one(StandardMeasurementSet{}, &povm, &rho));
    } else if (!paths.instance.empty()) {
        reports.push_back(run_one(set_from_json(load_json(paths.instance)), nullptr, nullptr));
    } else if (!paths.set.empty()) {
        reports.push_back(run_one(set_from_json(load_json(paths.set)), nullptr, nullptr));
    } else {
        throw validation_error("verify needs --instance/--set (or --povm/--state for result 2, or --corpus)");
    }

    bool all = true;
    json out = json::array();
    for (const auto& r : reports) {
        std::cout << r.text();
        out.push_back(report_to_json(r));
        all = all && r.all_pass();
    }
    if (!cfg.out_path.empty())
        save_json(json{{"schema", "qres-report/1"}, {"kind", "verification-batch"}, {"pass", all}, {"reports", out},
                       {"config_echo", cfg.to_json()}},
                  cfg.out_path);
    return all ? kExitOk : kExitFail;
}

int cmd_check_witness(const CliPaths& paths, const RunConfig& cfg) {
    if (paths.witness.empty()) throw validation_error("check-witness needs --witness");
    Witness w = witness_from_json(load_json(paths.witness));
    const double stored_value = w.certified_value;
    const double stored_trace = w.trace_sum;

    // never trust stored evidence: recompute everything
    w.trace_sum = 0.0;
    for (const auto& op : w.operators) w.trace_sum += op.trace().real();
    sample_dual_pairings(w, 10000, cfg.seed + 101);

    double recomputed = 0.0;
    std::vector<std::pair<std::string, std::string>> used{{"witness", paths.witness}};
    if (w.kind == Witness::Kind::teleportation) {
        if (paths.povm.empty() || paths.state.empty())
            throw validation_error("check-witness: teleportation witnesses need --povm and --state");
        auto j = choi_teleportation(povm_from_json(load_json(paths.povm)).elements,
                                    state_from_json(load_json(paths.state)));
        recomputed = certify(w, j);
        used.emplace_back("povm", paths.povm);
        used.emplace_back("state", paths.state);
    } else {
        DistributedPovm mab;
        if (!paths.dpovm.empty()) {
            mab = dpovm_from_json(load_json(paths.dpovm));
            used.emplace_back("dpovm", paths.dpovm);
        } else if (!paths.povm.empty() && !paths.povm_b.empty() && !paths.state.empty()) {
            mab = distributed_povm(povm_from_json(load_json(paths.povm)), povm_from_json(load_json(paths.povm_b)),
                                   state_from_json(load_json(paths.state)));
            used.emplace_back("povm", paths.povm);
            used.emplace_back("povm_b", paths.povm_b);
            used.emplace_back("state", paths.state);
        } else {
            throw validation_error("check-witness: buscemi witnesses need --dpovm or --povm/--povm-b/--state");
        }
        recomputed = certify(w, mab);
    }

    const bool trace_ok = w.trace_bound_ok();
    const bool pairings_ok = w.min_sampled_pairing >= -1e-9;
    const bool value_ok = std::abs(recomputed - stored_value) <= 1e-9;
    const bool pass = trace_ok && pairings_ok && value_ok;

    json rep{{"schema", "qres-report/1"},
             {"kind", "witness-check"},
             {"pass", pass},
             {"trace_bound_ok", trace_ok},
             {"trace_sum_recomputed", w.trace_sum},
             {"trace_sum_stored", stored_trace},
             {"trace_bound", w.trace_bound},
             {"min_sampled_pairing", w.min_sampled_pairing},
             {"samples", w.samples_checked},
             {"certified_value_stored", stored_value},
             {"certified_value_recomputed", recomputed},
             {"config_echo", cfg.to_json()},
             {"inputs", hash_inputs(used)}};
    emit(rep, cfg.out_path);
    return pass ? kExitOk : kExitFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"conic-programming toolkit for measurement incompatibility, nonclassical teleportation and "
                 "Buscemi nonlocality"};
    app.require_subcommand(1);

    RunConfig cfg;
    CliPaths paths;
    std::string config_path, kind, mode = "ppt";
    int result = 1;
    bool corpus = false;

    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--seed", cfg.seed, "deterministic seed (default 0)");
    app.add_option("--restarts", cfg.restarts, "see-saw restarts");
    app.add_option("--lambda-card", cfg.lambda_cardinality, "see-saw lambda cardinality (0 = default)");
    app.add_option("--tol-eq", cfg.tol_equality, "equality tolerance");
    app.add_option("--out", cfg.out_path, "report output path (default stdout)");
    app.add_option("--jobs", cfg.jobs, "parallel corpus jobs");

    auto* rob = app.add_subcommand("robustness", "compute a robustness quantifier");
    rob->add_option("--kind", kind, "incompat|teleport|buscemi|behaviour")->required();
    rob->add_option("--mode", mode, "ppt|seesaw (relaxation route where applicable)");
    rob->add_option("--set", paths.set, "standard measurement set file");
    rob->add_option("--state", paths.state, "bipartite state file");
    rob->add_option("--povm", paths.povm, "bipartite POVM file");
    rob->add_option("--povm-b", paths.povm_b, "Bob's bipartite POVM file");
    rob->add_option("--gset", paths.gset, "generalised measurement set file");
    rob->add_option("--dpovm", paths.dpovm, "distributed POVM file");
    rob->add_option("--behaviour", paths.behaviour, "behaviour file");
    rob->add_option("--witness-out", paths.witness_out, "write the dual witness here");
    rob->add_option("--decomposition-out", paths.decomposition_out, "write the free decomposition here");

    auto* ver = app.add_subcommand("verify", "verify one of the paper-level equalities");
    ver->add_option("--result", result, "1|2|3|4")->required();
    ver->add_option("--instance", paths.instance, "measurement-set instance file");
    ver->add_option("--set", paths.set, "alias for --instance");
    ver->add_option("--povm", paths.povm, "bipartite POVM file (result 2)");
    ver->add_option("--state", paths.state, "bipartite state file (result 2)");
    ver->add_flag("--corpus", corpus, "run the seeded built-in corpus");

    auto* chk = app.add_subcommand("check-witness", "independently re-certify a stored witness");
    chk->add_option("--witness", paths.witness, "witness file")->required();
    chk->add_option("--povm", paths.povm, "bipartite POVM file");
    chk->add_option("--povm-b", paths.povm_b, "Bob's POVM file");
    chk->add_option("--state", paths.state, "state file");
    chk->add_option("--dpovm", paths.dpovm, "distributed POVM file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            RunConfig file_cfg = RunConfig::from_json(load_json(config_path));
            // flags already parsed take precedence only when explicitly given;
            // simplest deterministic rule: file first, then explicit flags
            RunConfig merged = file_cfg;
            for (const auto* opt : app.get_options())
                if (opt->count() > 0) {
                    const auto name = opt->get_name();
                    if (name == "--seed") merged.seed = cfg.seed;
                    if (name == "--restarts") merged.restarts = cfg.restarts;
                    if (name == "--lambda-card") merged.lambda_cardinality = cfg.lambda_cardinality;
                    if (name == "--tol-eq") merged.tol_equality = cfg.tol_equality;
                    if (name == "--out") merged.out_path = cfg.out_path;
                    if (name == "--jobs") merged.jobs = cfg.jobs;
                }
            cfg = merged;
        }
        if (rob->parsed()) return cmd_robustness(kind, mode, paths, cfg);
        if (ver->parsed()) return cmd_verify(result, paths, corpus, cfg);
        if (chk->parsed()) return cmd_check_witness(paths, cfg);
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const dimension_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const resource_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const solver_error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
