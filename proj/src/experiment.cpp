#include "rtcim/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rtcim/analytics.hpp"

namespace rtcim {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string ProtectionSpec::canonical() const {
    if (mode == Protection::Ecc) return "ecc" + std::to_string(ecc_t);
    return to_string(mode);
}

ProtectionSpec resolve_protection(const std::string& token, int default_ecc_t) {
    ProtectionSpec spec;
    if (token == "none") return spec;
    if (token == "ecc" || token == "ecc1" || token == "ecc2" || token == "ecc3") {
        spec.mode = Protection::Ecc;
        spec.ecc_t = token == "ecc" ? default_ecc_t : token[3] - '0';
        if (spec.ecc_t < 1 || spec.ecc_t > 3)
            throw ConfigError("protection 'ecc' requires ecc_t in {1, 2, 3}, got " + std::to_string(spec.ecc_t));
        return spec;
    }
    if (token == "mr3" || token == "mr5" || token == "mr7") {
        spec.mode = protection_from_string(token);
        return spec;
    }
    throw ConfigError("unknown protection token: " + token);
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace {

void reject_unknown_keys(const json& j, const std::vector<std::string>& known, const std::string& scope) {
    if (!j.is_object()) throw ConfigError("config section '" + scope + "' must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown config key: " + (scope.empty() ? key : scope + "." + key));
    }
}

template <typename T>
void load(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    reject_unknown_keys(j, {"workload", "fault_rates", "fault_rate", "protections", "protection", "ecc_t", "seed",
                            "repetitions", "max_reissues", "workers", "geometry", "cost", "synthetic", "counter",
                            "aes", "mmm", "trace_file", "out_dir", "csv_name", "json_name"},
                        "");

    load(j, "workload", cfg.workload);
    if (j.contains("fault_rate")) cfg.fault_rates = {j.at("fault_rate").get<double>()};
    load(j, "fault_rates", cfg.fault_rates);
    if (j.contains("protection")) cfg.protections = {j.at("protection").get<std::string>()};
    load(j, "protections", cfg.protections);
    load(j, "ecc_t", cfg.ecc_t);
    load(j, "seed", cfg.seed);
    load(j, "repetitions", cfg.repetitions);
    load(j, "max_reissues", cfg.max_reissues);
    load(j, "workers", cfg.workers);
    load(j, "trace_file", cfg.trace_file);
    load(j, "out_dir", cfg.out_dir);
    load(j, "csv_name", cfg.csv_name);
    load(j, "json_name", cfg.json_name);

    if (j.contains("geometry")) {
        const json& g = j.at("geometry");
        reject_unknown_keys(g, {"m_columns", "data_len", "overhead_len", "ports", "port_positions", "trd",
                                "words_per_row", "n_dbcs"},
                            "geometry");
        load(g, "data_len", cfg.geometry.data_len);
        load(g, "overhead_len", cfg.geometry.overhead_len);
        load(g, "ports", cfg.geometry.ports);
        load(g, "port_positions", cfg.geometry.ports);
        load(g, "trd", cfg.geometry.trd);
        load(g, "words_per_row", cfg.words_per_row);
        load(g, "n_dbcs", cfg.n_dbcs);
        if (g.contains("m_columns")) {
            // Data-column count; must agree with words_per_row x 64.
            const int m = g.at("m_columns").get<int>();
            if (m != cfg.words_per_row * 64)
                throw ConfigError("geometry.m_columns must equal words_per_row * 64");
        }
    }
    if (j.contains("cost")) {
        const json& c = j.at("cost");
        reject_unknown_keys(c, {"energy", "time"}, "cost");
        const auto load_rates = [](const json& r, CostModel::Rates& out, const std::string& scope) {
            reject_unknown_keys(r, {"tr", "shift_step", "read", "write", "ecc_decode"}, scope);
            load(r, "tr", out.tr);
            load(r, "shift_step", out.shift_step);
            load(r, "read", out.read);
            load(r, "write", out.write);
            load(r, "ecc_decode", out.ecc_decode);
        };
        if (c.contains("energy")) load_rates(c.at("energy"), cfg.cost.energy, "cost.energy");
        if (c.contains("time")) load_rates(c.at("time"), cfg.cost.time, "cost.time");
    }
    if (j.contains("synthetic")) {
        const json& s = j.at("synthetic");
        reject_unknown_keys(s, {"ops", "operands", "distribution"}, "synthetic");
        load(s, "ops", cfg.synthetic.ops);
        load(s, "operands", cfg.synthetic.operands);
        load(s, "distribution", cfg.synthetic.distribution);
    }
    if (j.contains("counter")) {
        const json& s = j.at("counter");
        reject_unknown_keys(s, {"width", "increments"}, "counter");
        load(s, "width", cfg.counter.width);
        load(s, "increments", cfg.counter.increments);
    }
    if (j.contains("aes")) {
        const json& s = j.at("aes");
        reject_unknown_keys(s, {"blocks", "fips_vector"}, "aes");
        load(s, "blocks", cfg.aes.blocks);
        load(s, "fips_vector", cfg.aes.include_fips_vector);
    }
    if (j.contains("mmm")) {
        const json& s = j.at("mmm");
        reject_unknown_keys(s, {"dim", "bitwidth"}, "mmm");
        load(s, "dim", cfg.mmm.dim);
        load(s, "bitwidth", cfg.mmm.bitwidth);
    }
    cfg.validate();
    return cfg;
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

void RunConfig::validate() const {
    geometry.validate();
    cost.validate();
    if (fault_rates.empty()) throw ConfigError("fault_rates must not be empty");
    for (double p : fault_rates)
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("fault_rate outside [0, 1]");
    if (protections.empty()) throw ConfigError("protections must not be empty");
    for (const auto& tok : protections) resolve_protection(tok, ecc_t);
    if (repetitions < 1) throw ConfigError("repetitions must be positive");
    if (max_reissues < 0) throw ConfigError("max_reissues must be non-negative");
    if (workers < 1) throw ConfigError("workers must be positive");
    if (words_per_row < 1) throw ConfigError("geometry.words_per_row must be positive");
    if (n_dbcs < 1) throw ConfigError("geometry.n_dbcs must be positive");
    const std::vector<std::string> known_workloads = {"synthetic", "counter", "aes", "mmm", "trace"};
    if (std::find(known_workloads.begin(), known_workloads.end(), workload) == known_workloads.end())
        throw ConfigError("unknown workload: " + workload);
    if (workload == "trace" && trace_file.empty()) throw ConfigError("trace workload requires trace_file");
}

// ---------------------------------------------------------------------------
// Grid execution
// ---------------------------------------------------------------------------

namespace {

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

EngineConfig make_engine_config(const RunConfig& cfg, const ProtectionSpec& prot, double fault_rate,
                                std::uint64_t stream) {
    EngineConfig ec;
    ec.geometry = cfg.geometry;
    ec.words_per_row = cfg.words_per_row;
    ec.n_dbcs = cfg.n_dbcs;
    ec.protection = prot.mode;
    ec.ecc_t = prot.ecc_t;
    ec.fault_model.p_sense = fault_rate;
    ec.fault_model.seed = cfg.seed;
    ec.fault_model.rng_stream_id = stream;
    ec.cost = cfg.cost;
    ec.policy.max_reissues = cfg.max_reissues;
    return ec;
}

}  // namespace

ResultRow run_cell(const RunConfig& cfg, const ProtectionSpec& prot, double fault_rate, int rep) {
    const std::uint64_t stream =
        fnv1a(cfg.workload + "|" + prot.canonical() + "|" + format_double(fault_rate) + "|" + std::to_string(rep));
    const EngineConfig ec = make_engine_config(cfg, prot, fault_rate, stream);

    ResultRow row;
    row.workload = cfg.workload;
    row.protection = prot;
    row.fault_rate = fault_rate;
    row.seed = cfg.seed;
    row.rep = rep;

    if (cfg.workload == "synthetic") {
        SyntheticParams p = cfg.synthetic;
        p.seed = cfg.seed + static_cast<std::uint64_t>(rep);
        row.report = run_synthetic(p, ec);
    } else if (cfg.workload == "counter") {
        CounterParams p = cfg.counter;
        p.seed = cfg.seed + static_cast<std::uint64_t>(rep);
        row.report = run_counter(p, ec);
    } else if (cfg.workload == "aes") {
        AesParams p = cfg.aes;
        p.seed = cfg.seed + static_cast<std::uint64_t>(rep);
        row.report = run_aes(p, ec);
    } else if (cfg.workload == "mmm") {
        MmmParams p = cfg.mmm;
        p.seed = cfg.seed + static_cast<std::uint64_t>(rep);
        row.report = run_mmm(p, ec);
    } else if (cfg.workload == "trace") {
        row.report = run_trace(load_trace(cfg.trace_file), ec);
    } else {
        throw ConfigError("unknown workload: " + cfg.workload);
    }
    return row;
}

std::vector<ResultRow> run_experiment(const RunConfig& cfg) {
    cfg.validate();

    // Canonical protection list with the no-protection baseline first.
    std::vector<ProtectionSpec> prots;
    prots.push_back(ProtectionSpec{});
    for (const auto& tok : cfg.protections) {
        const ProtectionSpec spec = resolve_protection(tok, cfg.ecc_t);
        const bool dup = std::any_of(prots.begin(), prots.end(), [&](const ProtectionSpec& p) {
            return p.mode == spec.mode && p.ecc_t == spec.ecc_t;
        });
        if (!dup) prots.push_back(spec);
    }

    struct Cell {
        ProtectionSpec prot;
        double fault_rate;
        int rep;
    };
    std::vector<Cell> cells;
    for (const auto& prot : prots)
        for (const double p : cfg.fault_rates)
            for (int rep = 0; rep < cfg.repetitions; ++rep) cells.push_back({prot, p, rep});

    std::vector<ResultRow> rows(cells.size());
    const int workers = std::min<int>(cfg.workers, static_cast<int>(cells.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            rows[i] = run_cell(cfg, cells[i].prot, cells[i].fault_rate, cells[i].rep);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
                        rows[i] = run_cell(cfg, cells[i].prot, cells[i].fault_rate, cells[i].rep);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    // Normalize against the no-protection run of the same (fault_rate, rep).
    std::map<std::pair<double, int>, std::size_t> baseline;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].protection.mode == Protection::None) baseline[{rows[i].fault_rate, rows[i].rep}] = i;
    for (auto& row : rows) {
        const auto it = baseline.find({row.fault_rate, row.rep});
        if (it == baseline.end()) continue;
        const SimStats& base = rows[it->second].report.stats;
        row.norm_energy = base.energy > 0 ? row.report.stats.energy / base.energy : 1.0;
        row.norm_time = base.time > 0 ? row.report.stats.time / base.time : 1.0;
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

const std::string& csv_header() {
    static const std::string header =
        "workload,protection,ecc_t,mr_copies,fault_rate,seed,rep,instructions,outputs,output_bits,"
        "output_bit_errors,tainted_outputs,clean_output_mismatches,oracle_exact,op_trials,row_fault_events,"
        "row_fault_rate,uber,tr_count,shift_count,read_count,write_count,reissue_count,detected_faults,"
        "deterministic_corrections,ambiguous_events,uncorrectable_words,ecc_decode_count,energy,time,"
        "norm_energy,norm_time";
    return header;
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    out << csv_header() << '\n';
    for (const auto& r : rows) {
        const SimStats& s = r.report.stats;
        out << r.workload << ',' << r.protection.canonical() << ',' << r.protection.ecc_t << ','
            << mr_copies(r.protection.mode) << ',' << format_double(r.fault_rate) << ',' << r.seed << ',' << r.rep
            << ',' << r.report.instructions << ',' << r.report.outputs << ',' << r.report.output_bits << ','
            << r.report.output_bit_errors << ',' << r.report.tainted_outputs << ','
            << r.report.clean_output_mismatches << ',' << (r.report.oracle_exact ? 1 : 0) << ',' << s.op_trials << ','
            << s.row_fault_events << ',' << format_double(s.row_fault_rate()) << ',' << format_double(r.report.uber())
            << ',' << s.tr_count << ',' << s.shift_count << ',' << s.read_count << ',' << s.write_count << ','
            << s.reissue_count << ',' << s.detected_faults << ',' << s.deterministic_corrections << ','
            << s.ambiguous_events << ',' << s.uncorrectable_words << ',' << s.ecc_decode_count << ','
            << format_double(s.energy) << ',' << format_double(s.time) << ',' << format_double(r.norm_energy) << ','
            << format_double(r.norm_time) << '\n';
    }
}

void write_json_summary(const RunConfig& cfg, const std::vector<ResultRow>& rows, std::ostream& out) {
    ordered_json j;
    j["config"] = {{"workload", cfg.workload},
                   {"seed", cfg.seed},
                   {"repetitions", cfg.repetitions},
                   {"ecc_t", cfg.ecc_t},
                   {"max_reissues", cfg.max_reissues},
                   {"fault_rates", cfg.fault_rates},
                   {"protections", cfg.protections},
                   {"geometry",
                    {{"data_len", cfg.geometry.data_len},
                     {"overhead_len", cfg.geometry.overhead_len},
                     {"ports", cfg.geometry.ports},
                     {"trd", cfg.geometry.trd},
                     {"words_per_row", cfg.words_per_row},
                     {"n_dbcs", cfg.n_dbcs}}}};
    j["rows"] = ordered_json::array();
    for (const auto& r : rows) {
        const SimStats& s = r.report.stats;
        j["rows"].push_back({{"workload", r.workload},
                             {"protection", r.protection.canonical()},
                             {"fault_rate", r.fault_rate},
                             {"rep", r.rep},
                             {"instructions", r.report.instructions},
                             {"row_fault_rate", s.row_fault_rate()},
                             {"uber", r.report.uber()},
                             {"uncorrectable_words", s.uncorrectable_words},
                             {"reissues", s.reissue_count},
                             {"oracle_exact", r.report.oracle_exact},
                             {"energy", s.energy},
                             {"time", s.time},
                             {"norm_energy", r.norm_energy},
                             {"norm_time", r.norm_time}});
    }
    out << j.dump(2) << '\n';
}

std::vector<ResultRow> run_experiment_to_files(const RunConfig& cfg) {
    const std::vector<ResultRow> rows = run_experiment(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ofstream csv(std::filesystem::path(cfg.out_dir) / cfg.csv_name);
        if (!csv) throw std::runtime_error("cannot write results CSV in " + cfg.out_dir);
        write_csv(rows, csv);
    }
    {
        std::ofstream js(std::filesystem::path(cfg.out_dir) / cfg.json_name);
        if (!js) throw std::runtime_error("cannot write JSON summary in " + cfg.out_dir);
        write_json_summary(cfg, rows, js);
    }
    return rows;
}

void emit_analytical(const std::vector<double>& ps, std::ostream& out) {
    out << "p,model,level,rate\n";
    for (const double p : ps) {
        out << format_double(p) << ",none,0," << format_double(analytics::analytic_row_rate(Protection::None, 0, p))
            << '\n';
        for (int t = 1; t <= 3; ++t)
            out << format_double(p) << ",ecc," << t << ','
                << format_double(analytics::analytic_row_rate(Protection::Ecc, t, p)) << '\n';
        for (const Protection mr : {Protection::Mr3, Protection::Mr5, Protection::Mr7})
            out << format_double(p) << ",mr," << mr_copies(mr) << ','
                << format_double(analytics::analytic_row_rate(mr, 0, p)) << '\n';
    }
}

void summarize_csv(std::istream& in, std::ostream& out) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV input");
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    const std::vector<std::string> key_cols = {"workload", "protection", "ecc_t", "mr_copies", "fault_rate"};
    std::vector<std::size_t> key_idx;
    for (const auto& k : key_cols) {
        const auto it = std::find(cols.begin(), cols.end(), k);
        if (it == cols.end()) throw std::runtime_error("CSV lacks required column: " + k);
        key_idx.push_back(static_cast<std::size_t>(it - cols.begin()));
    }

    struct Agg {
        std::size_t n = 0;
        std::vector<double> sums;
    };
    std::map<std::string, Agg> groups;
    std::vector<std::size_t> numeric_idx;
    for (std::size_t i = 0; i < cols.size(); ++i)
        if (std::find(key_cols.begin(), key_cols.end(), cols[i]) == key_cols.end() && cols[i] != "seed" &&
            cols[i] != "rep" && cols[i] != "workload" && cols[i] != "protection")
            numeric_idx.push_back(i);

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != cols.size()) throw std::runtime_error("CSV row width mismatch");
        std::string key;
        for (const std::size_t i : key_idx) key += fields[i] + ",";
        auto& agg = groups[key];
        if (agg.sums.empty()) agg.sums.assign(numeric_idx.size(), 0.0);
        ++agg.n;
        for (std::size_t i = 0; i < numeric_idx.size(); ++i) agg.sums[i] += std::stod(fields[numeric_idx[i]]);
    }

    out << "workload,protection,ecc_t,mr_copies,fault_rate,n";
    for (const std::size_t i : numeric_idx) out << ",mean_" << cols[i];
    out << '\n';
    for (const auto& [key, agg] : groups) {
        out << key.substr(0, key.size() - 1) << ',' << agg.n;
        for (const double s : agg.sums) out << ',' << format_double(s / static_cast<double>(agg.n));
        out << '\n';
    }
}

}  // namespace rtcim
