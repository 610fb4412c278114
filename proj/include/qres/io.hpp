#pragma once

#include <nlohmann/json.hpp>

#include "qres/robustness.hpp"
#include "qres/theorems.hpp"

namespace qres {

using json = nlohmann::json;

// Run-wide configuration carried into every report. Environment variables are
// deliberately never read; everything arrives through flags or --config.
struct RunConfig {
    double tol_feasibility = 1e-8;
    double tol_gap = 1e-7;
    double tol_equality = 1e-6;
    int restarts = 50;
    int lambda_cardinality = 0;
    uint64_t seed = 0;
    long long enumeration_cap = 4096;
    int jobs = 1;
    std::string out_path;

    RobustnessSettings robustness() const;
    json to_json() const;
    static RunConfig from_json(const json& j);
};

// complex numbers as [re, im]; operators as nested row-major arrays
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

json operator_to_json(const HermitianOperator& op);
HermitianOperator operator_from_json(const json& j);

json set_to_json(const StandardMeasurementSet& s);
StandardMeasurementSet set_from_json(const json& j); // zero-pads short rows with a warning

json state_to_json(const HermitianOperator& rho);
HermitianOperator state_from_json(const json& j);

json povm_to_json(const Povm& p, const std::vector<int>& dims);
Povm povm_from_json(const json& j, std::vector<int>* dims_out = nullptr);

json gset_to_json(const GeneralisedMeasurementSet& g);
GeneralisedMeasurementSet gset_from_json(const json& j);

json dpovm_to_json(const DistributedPovm& d);
DistributedPovm dpovm_from_json(const json& j);

json behaviour_to_json(const Behaviour& b);
Behaviour behaviour_from_json(const json& j);

json witness_to_json(const Witness& w);
Witness witness_from_json(const json& j);

json decomposition_to_json(const Decomposition& d);

json report_to_json(const VerificationReport& r);

json robustness_report(const RobustnessResult& r, const RunConfig& cfg,
                       const std::map<std::string, std::string>& input_hashes,
                       const std::string& quantifier);

// FNV-1a 64-bit content hash, hex-encoded; deterministic across runs.
std::string content_hash(const std::string& bytes);
std::string file_hash(const std::string& path);

json load_json(const std::string& path); // throws validation_error on parse failure
void save_json(const json& j, const std::string& path);

} // namespace qres
