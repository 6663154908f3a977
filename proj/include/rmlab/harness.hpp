#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rmlab/greenreg.hpp"

namespace rmlab::harness {

/// Test-set size, either absolute ("32") or an exponent rule ("N^0.5").
struct SetSizeRule {
    bool is_exponent = true;
    double alpha = 0.5;
    int absolute = 16;

    int resolve(int n) const;
    static SetSizeRule parse(const std::string& text);
    std::string str() const;
};

/// Eigenvector index selection: bulk (N/2), edge (smallest eigenvalue), or an
/// explicit 1-based position in the ascending spectrum.
struct IndexRule {
    enum class Kind { bulk, edge, explicit_index };
    Kind kind = Kind::bulk;
    int position = 1;  // 1-based when explicit

    int resolve(int n) const;  // 0-based
    static IndexRule parse(const std::string& text);
    std::string str() const;
};

struct ExperimentConfig {
    std::string experiment = "clt";  // clt | que | identity-suite | flow-check | dbm | reg-compare
    int n = 200;
    SetSizeRule set_size{};
    std::string family = "coord";    // coord | random
    std::string ensemble = "goe";    // goe | wigner:gaussian | wigner:rademacher | wigner:uniform
    double profile_spread = 0.0;
    double ou_time = 0.0;
    IndexRule index{};
    int samples = 100;
    std::uint64_t seed = 1;
    std::string out_dir;
    std::string format = "csv,json";
    unsigned threads = 0;  // 0 = hardware concurrency

    double que_exponent = 0.3;            // que: exceedance threshold N^que_exponent
    int flow_instances = 50;              // flow-check: instances per kind
    int flow_dim = 12;                    // flow-check: frame size
    double flow_step = 1e-4;              // flow-check: finite-difference step
    std::vector<double> time_grid = {0.1, 0.5, 1.0};  // dbm: evolution times
    greenreg::RegParams reg{0.02, 0.50};  // reg-compare: window exponents

    void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

struct Gate {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool no_greater = true;  // pass iff value <= threshold (>= otherwise)
    bool pass = false;
};

struct Row {
    std::int64_t sample_index = 0;
    std::uint64_t seed = 0;
    std::string label;  // identity / flow-kind rows; empty for plain samples
    std::vector<double> values;
};

struct RunRecord {
    ExperimentConfig config;
    std::vector<std::string> columns;  // names of Row::values entries
    std::vector<Row> rows;
    nlohmann::json summary;
    std::vector<Gate> gates;
    double wall_seconds = 0.0;

    bool passed() const;
};

RunRecord run(const ExperimentConfig& cfg);
RunRecord run_clt(const ExperimentConfig& cfg);
RunRecord run_que(const ExperimentConfig& cfg);
RunRecord run_identity_suite(const ExperimentConfig& cfg);
RunRecord run_flow_check(const ExperimentConfig& cfg);
RunRecord run_dbm_diagnostics(const ExperimentConfig& cfg);
RunRecord run_regularized_compare(const ExperimentConfig& cfg);

std::string csv_text(const RunRecord& record);
nlohmann::json summary_json(const RunRecord& record);

/// Writes <experiment>_rows.csv / _summary.json / _hist.svg (per format list)
/// under out_dir, creating it if needed. Returns the paths written.
std::vector<std::string> write_outputs(const RunRecord& record, const std::string& out_dir,
                                       const std::string& format);

/// Standalone histogram SVG with an optional standard normal overlay.
std::string svg_histogram(const std::vector<double>& values, int bins, const std::string& title,
                          bool overlay_std_normal);

}  // namespace rmlab::harness
