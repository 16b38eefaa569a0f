// Experiment orchestration: validated run configuration, the
// (workload x protection x fault-rate) grid, CSV/JSON emission, analytical
// curve export and CSV aggregation.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rtcim/workloads.hpp"

namespace rtcim {

struct ProtectionSpec {
    Protection mode = Protection::None;
    int ecc_t = 0;

    std::string canonical() const;
};
// Accepts none | ecc | ecc1 | ecc2 | ecc3 | mr3 | mr5 | mr7.
ProtectionSpec resolve_protection(const std::string& token, int default_ecc_t);

struct RunConfig {
    DbcGeometry geometry;
    int words_per_row = 8;
    int n_dbcs = 4;

    std::string workload = "synthetic";
    std::vector<double> fault_rates = {0.0};
    std::vector<std::string> protections = {"none"};
    int ecc_t = 1;
    std::uint64_t seed = 1;
    int repetitions = 1;
    int max_reissues = 16;
    int workers = 1;
    CostModel cost;

    SyntheticParams synthetic;
    CounterParams counter;
    AesParams aes;
    MmmParams mmm;
    std::string trace_file;

    std::string out_dir = ".";
    std::string csv_name = "results.csv";
    std::string json_name = "summary.json";

    static RunConfig from_json_file(const std::string& path);
    static RunConfig from_json_text(const std::string& text);
    void validate() const;
};

struct ResultRow {
    std::string workload;
    ProtectionSpec protection;
    double fault_rate = 0.0;
    std::uint64_t seed = 0;
    int rep = 0;
    WorkloadReport report;
    double norm_energy = 1.0;
    double norm_time = 1.0;
};

// Executes the full grid. A no-protection baseline cell always runs for each
// (fault_rate, rep) so normalized metrics are well defined; it is included in
// the output. Cells are reproducible from (config, seed) alone and the output
// order is fixed by the grid, not by completion.
std::vector<ResultRow> run_experiment(const RunConfig& cfg);

// Runs one cell (used by run_experiment and by tests).
ResultRow run_cell(const RunConfig& cfg, const ProtectionSpec& prot, double fault_rate, int rep);

const std::string& csv_header();
void write_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void write_json_summary(const RunConfig& cfg, const std::vector<ResultRow>& rows, std::ostream& out);

// Runs the grid and writes <out_dir>/<csv_name> and <out_dir>/<json_name>.
std::vector<ResultRow> run_experiment_to_files(const RunConfig& cfg);

// Analytical fault-rate curves, columns: p,model,level,rate.
void emit_analytical(const std::vector<double>& ps, std::ostream& out);

// Aggregates a results CSV by (workload, protection, ecc_t, mr_copies,
// fault_rate): row count plus per-column means.
void summarize_csv(std::istream& in, std::ostream& out);

std::string format_double(double v);

}  // namespace rtcim
