#include "qres/io.hpp"

#include <fstream>
#include <iostream>

namespace qres {

RobustnessSettings RunConfig::robustness() const {
    RobustnessSettings s;
    s.solver.feas_tol = std::min(1e-10, tol_feasibility / 10.0);
    s.solver.gap_tol = std::min(1e-9, tol_gap / 10.0);
    s.seesaw_restarts = restarts;
    s.lambda_cardinality = lambda_cardinality;
    s.seed = seed;
    s.enumeration_cap = enumeration_cap;
    return s;
}

json RunConfig::to_json() const {
    return json{{"tol_feasibility", tol_feasibility},
                {"tol_gap", tol_gap},
                {"tol_equality", tol_equality},
                {"restarts", restarts},
                {"lambda_cardinality", lambda_cardinality},
                {"seed", seed},
                {"enumeration_cap", enumeration_cap},
                {"jobs", jobs}};
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig c;
    c.tol_feasibility = j.value("tol_feasibility", c.tol_feasibility);
    c.tol_gap = j.value("tol_gap", c.tol_gap);
    c.tol_equality = j.value("tol_equality", c.tol_equality);
    c.restarts = j.value("restarts", c.restarts);
    c.lambda_cardinality = j.value("lambda_cardinality", c.lambda_cardinality);
    c.seed = j.value("seed", c.seed);
    c.enumeration_cap = j.value("enumeration_cap", c.enumeration_cap);
    c.jobs = j.value("jobs", c.jobs);
    return c;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw validation_error("matrix: expected a non-empty array of rows");
    const int n = static_cast<int>(j.size());
    Matrix m(n, static_cast<int>(j.front().size()));
    for (int r = 0; r < n; ++r) {
        if (static_cast<int>(j[r].size()) != m.cols()) throw validation_error("matrix: ragged rows");
        for (int c = 0; c < m.cols(); ++c) {
            const auto& e = j[r][c];
            if (e.is_number()) {
                m(r, c) = e.get<double>();
            } else if (e.is_array() && e.size() == 2) {
                m(r, c) = cxd(e[0].get<double>(), e[1].get<double>());
            } else {
                throw validation_error("matrix: entries must be numbers or [re, im] pairs");
            }
        }
    }
    return m;
}

json operator_to_json(const HermitianOperator& op) {
    return json{{"dims", op.dims()}, {"matrix", matrix_to_json(op.matrix())}};
}

HermitianOperator operator_from_json(const json& j) {
    return HermitianOperator(j.at("dims").get<std::vector<int>>(), matrix_from_json(j.at("matrix")));
}

json set_to_json(const StandardMeasurementSet& s) {
    json elements = json::array();
    for (const auto& row : s.elements) {
        json jrow = json::array();
        for (const auto& el : row) jrow.push_back(matrix_to_json(el.matrix()));
        elements.push_back(std::move(jrow));
    }
    return json{{"dim", s.dim}, {"elements", std::move(elements)}};
}

StandardMeasurementSet set_from_json(const json& j) {
    StandardMeasurementSet s;
    s.dim = j.at("dim").get<int>();
    const auto& els = j.at("elements");
    if (!els.is_array() || els.empty()) throw validation_error("measurement set: empty elements");
    size_t oa = 0;
    for (const auto& row : els) oa = std::max(oa, row.size());
    for (const auto& row : els) {
        std::vector<HermitianOperator> out;
        for (const auto& el : row) out.emplace_back(std::vector<int>{s.dim}, matrix_from_json(el));
        if (out.size() < oa) {
            std::cerr << "[qres] warning: zero-padding a measurement row from " << out.size() << " to " << oa
                      << " outcomes\n";
            while (out.size() < oa) out.push_back(HermitianOperator::zero({s.dim}));
        }
        s.elements.push_back(std::move(out));
    }
    return s;
}

json state_to_json(const HermitianOperator& rho) {
    return json{{"dims", rho.dims()}, {"matrix", matrix_to_json(rho.matrix())}};
}

HermitianOperator state_from_json(const json& j) {
    return HermitianOperator(j.at("dims").get<std::vector<int>>(), matrix_from_json(j.at("matrix")));
}

json povm_to_json(const Povm& p, const std::vector<int>& dims) {
    json els = json::array();
    for (const auto& el : p.elements) els.push_back(matrix_to_json(el.matrix()));
    return json{{"dims", dims}, {"elements", std::move(els)}};
}

Povm povm_from_json(const json& j, std::vector<int>* dims_out) {
    const auto dims = j.at("dims").get<std::vector<int>>();
    if (dims_out) *dims_out = dims;
    Povm p;
    p.dim = product_dim(dims);
    for (const auto& el : j.at("elements")) p.elements.emplace_back(dims, matrix_from_json(el));
    return p;
}

json gset_to_json(const GeneralisedMeasurementSet& g) {
    json states = json::array();
    for (const auto& s : g.inputs.states) states.push_back(matrix_to_json(s.matrix()));
    return json{{"parent", povm_to_json(g.parent, g.parent.elements.front().dims())},
                {"inputs", {{"dim", g.inputs.dim}, {"states", std::move(states)}}}};
}

GeneralisedMeasurementSet gset_from_json(const json& j) {
    Povm parent = povm_from_json(j.at("parent"));
    const auto& ji = j.at("inputs");
    const int dim = ji.at("dim").get<int>();
    std::vector<HermitianOperator> states;
    for (const auto& s : ji.at("states")) states.emplace_back(std::vector<int>{dim}, matrix_from_json(s));
    return GeneralisedMeasurementSet::make(std::move(parent), QuantumInputSet::make(dim, std::move(states)));
}

json dpovm_to_json(const DistributedPovm& d) {
    json els = json::array();
    for (const auto& row : d.elements) {
        json jrow = json::array();
        for (const auto& el : row) jrow.push_back(matrix_to_json(el.matrix()));
        els.push_back(std::move(jrow));
    }
    return json{{"dim_v", d.dim_v}, {"dim_vp", d.dim_vp}, {"elements", std::move(els)}};
}

DistributedPovm dpovm_from_json(const json& j) {
    DistributedPovm d;
    d.dim_v = j.at("dim_v").get<int>();
    d.dim_vp = j.at("dim_vp").get<int>();
    for (const auto& row : j.at("elements")) {
        std::vector<HermitianOperator> out;
        for (const auto& el : row) out.emplace_back(std::vector<int>{d.dim_v, d.dim_vp}, matrix_from_json(el));
        d.elements.push_back(std::move(out));
    }
    return d;
}

json behaviour_to_json(const Behaviour& b) {
    json j;
    j["table"] = b.table;
    auto inputs = [](const std::optional<QuantumInputSet>& q) -> json {
        if (!q) return "classical";
        json states = json::array();
        for (const auto& s : q->states) states.push_back(matrix_to_json(s.matrix()));
        return json{{"dim", q->dim}, {"states", std::move(states)}};
    };
    j["inputs_a"] = inputs(b.inputs_a);
    j["inputs_b"] = inputs(b.inputs_b);
    return j;
}

Behaviour behaviour_from_json(const json& j) {
    Behaviour b;
    b.table = j.at("table").get<decltype(b.table)>();
    auto inputs = [](const json& ji) -> std::optional<QuantumInputSet> {
        if (ji.is_string()) return std::nullopt;
        const int dim = ji.at("dim").get<int>();
        std::vector<HermitianOperator> states;
        for (const auto& s : ji.at("states")) states.emplace_back(std::vector<int>{dim}, matrix_from_json(s));
        return QuantumInputSet::make(dim, std::move(states));
    };
    b.inputs_a = inputs(j.at("inputs_a"));
    b.inputs_b = inputs(j.at("inputs_b"));
    return b;
}

json witness_to_json(const Witness& w) {
    json ops = json::array();
    for (const auto& o : w.operators) ops.push_back(matrix_to_json(o));
    return json{{"kind", w.kind == Witness::Kind::teleportation ? "teleportation" : "buscemi"},
                {"dims", w.dims},
                {"outcomes_a", w.outcomes_a},
                {"outcomes_b", w.outcomes_b},
                {"operators", std::move(ops)},
                {"certified_value", w.certified_value},
                {"trace_bound", w.trace_bound},
                {"trace_sum", w.trace_sum},
                {"min_sampled_pairing", w.min_sampled_pairing},
                {"samples_checked", w.samples_checked}};
}

Witness witness_from_json(const json& j) {
    Witness w;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "teleportation")
        w.kind = Witness::Kind::teleportation;
    else if (kind == "buscemi")
        w.kind = Witness::Kind::buscemi;
    else
        throw validation_error("witness: unknown kind '" + kind + "'");
    w.dims = j.at("dims").get<std::vector<int>>();
    w.outcomes_a = j.at("outcomes_a").get<int>();
    w.outcomes_b = j.at("outcomes_b").get<int>();
    for (const auto& o : j.at("operators")) w.operators.push_back(matrix_from_json(o));
    w.certified_value = j.at("certified_value").get<double>();
    w.trace_bound = j.at("trace_bound").get<double>();
    w.trace_sum = j.value("trace_sum", 0.0);
    w.min_sampled_pairing = j.value("min_sampled_pairing", 0.0);
    w.samples_checked = j.value("samples_checked", 0);
    return w;
}

json decomposition_to_json(const Decomposition& d) {
    json j;
    j["weights"] = d.weights;
    j["residual"] = d.residual;
    j["g"] = json::array();
    for (const auto& m : d.g) j["g"].push_back(matrix_to_json(m));
    j["h"] = json::array();
    for (const auto& row : d.h) {
        json jr = json::array();
        for (const auto& m : row) jr.push_back(matrix_to_json(m));
        j["h"].push_back(std::move(jr));
    }
    j["strategies"] = d.strategies;
    j["noise"] = json::array();
    for (const auto& m : d.noise) j["noise"].push_back(matrix_to_json(m));
    return j;
}

json report_to_json(const VerificationReport& r) {
    json inst = json::array();
    for (const auto& i : r.instances)
        inst.push_back(json{{"description", i.description},
                            {"lhs", i.lhs},
                            {"rhs", i.rhs},
                            {"lhs_bound", i.lhs_bound},
                            {"rhs_bound", i.rhs_bound},
                            {"deviation", i.deviation},
                            {"pass", i.pass},
                            {"applicable", i.applicable},
                            {"details", i.details}});
    return json{{"schema", "qres-report/1"},
                {"kind", "verification"},
                {"result", r.result_id},
                {"tolerance", r.tolerance},
                {"seed", r.seed},
                {"pass", r.all_pass()},
                {"instances", std::move(inst)}};
}

json robustness_report(const RobustnessResult& r, const RunConfig& cfg,
                       const std::map<std::string, std::string>& input_hashes, const std::string& quantifier) {
    json j{{"schema", "qres-report/1"},
           {"kind", "robustness"},
           {"quantifier", quantifier},
           {"program", r.program},
           {"value", r.value},
           {"bound", to_string(r.bound)},
           {"gap", r.diagnostics.gap},
           {"max_residual", r.diagnostics.max_residual},
           {"config_echo", cfg.to_json()},
           {"inputs", input_hashes}};
    if (!r.diagnostics.note.empty()) j["note"] = r.diagnostics.note;
    if (r.diagnostics.restarts_used > 0) {
        j["restarts_used"] = r.diagnostics.restarts_used;
        j["restart_spread"] = r.diagnostics.restart_spread;
    }
    return j;
}

std::string content_hash(const std::string& bytes) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content_hash(bytes);
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw validation_error("malformed JSON in " + path);
    return j;
}

void save_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write " + path);
    out << j.dump(1) << "\n";
}

} // namespace qres
