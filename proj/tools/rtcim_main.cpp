// Command-line front end: simulation grids, analytical curves, CSV
// aggregation and trace generation.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rtcim/experiment.hpp"

namespace {

using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 1;

// Applies a dotted-path override like geometry.trd=5 onto the config JSON.
void apply_override(json& cfg, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw rtcim::ConfigError("override must look like key=value: " + kv);
    const std::string path = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);

    json* node = &cfg;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw rtcim::ConfigError("empty override key");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];

    json parsed = json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = value;  // plain string
    (*node)[parts.back()] = parsed;
}

std::vector<double> parse_rate_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::vector<std::string> parse_string_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides) {
    json cfg = json::object();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw rtcim::ConfigError("cannot open config file: " + config_path);
        in >> cfg;
    }
    if (const char* env_dir = std::getenv("RTCIM_OUT_DIR"); env_dir && !cfg.contains("out_dir"))
        cfg["out_dir"] = env_dir;
    for (const auto& kv : overrides) apply_override(cfg, kv);

    const rtcim::RunConfig run_cfg = rtcim::RunConfig::from_json_text(cfg.dump());
    const auto rows = rtcim::run_experiment_to_files(run_cfg);
    std::cout << "wrote " << rows.size() << " result rows to " << run_cfg.out_dir << "/" << run_cfg.csv_name
              << std::endl;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"racetrack compute-in-memory fault simulator"};
    app.require_subcommand(1);

    // run ---------------------------------------------------------------
    auto* run = app.add_subcommand("run", "execute a simulation grid and emit CSV/JSON results");
    std::string config_path;
    std::vector<std::string> overrides;
    std::string workload, protections, fault_rates, out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::uint64_t synth_ops = 0;
    int operands = 0, counter_increments = 0, counter_width = 0, aes_blocks = 0, mmm_dim = 0, reps = 0, workers = 0;
    std::string trace_file;
    run->add_option("--config", config_path, "JSON config file");
    run->add_option("--set", overrides, "override a config key, e.g. --set geometry.trd=5")->take_all();
    run->add_option("--workload", workload, "synthetic | counter | aes | mmm | trace");
    run->add_option("--protections", protections, "comma list: none,ecc1,ecc2,ecc3,mr3,mr5,mr7");
    run->add_option("--fault-rates", fault_rates, "comma list of sensing fault rates");
    run->add_option("--seed", seed, "master seed")->each([&](const std::string&) { seed_set = true; });
    run->add_option("--reps", reps, "repetitions per cell");
    run->add_option("--workers", workers, "worker threads for grid cells");
    run->add_option("--ops", synth_ops, "synthetic instruction count");
    run->add_option("--operands", operands, "synthetic TR operand count");
    run->add_option("--counter-width", counter_width, "counter bit width");
    run->add_option("--counter-increments", counter_increments, "counter increments");
    run->add_option("--aes-blocks", aes_blocks, "AES blocks");
    run->add_option("--mmm-dim", mmm_dim, "matrix dimension");
    run->add_option("--trace-file", trace_file, "trace file for the trace workload");
    run->add_option("--out-dir", out_dir, "output directory (default: RTCIM_OUT_DIR or .)");

    // analytic ------------------------------------------------------------
    auto* analytic = app.add_subcommand("analytic", "emit analytical fault-rate curves as CSV");
    std::string analytic_out = "analytic.csv";
    std::string analytic_rates;
    double p_min = 1e-9, p_max = 1e-2;
    int points = 29;
    analytic->add_option("--out", analytic_out, "output CSV path");
    analytic->add_option("--fault-rates", analytic_rates, "explicit comma list of p values");
    analytic->add_option("--p-min", p_min, "grid start (log spaced)");
    analytic->add_option("--p-max", p_max, "grid end");
    analytic->add_option("--points", points, "grid size");

    // summarize -----------------------------------------------------------
    auto* summarize = app.add_subcommand("summarize", "aggregate a results CSV by grid cell");
    std::string sum_in, sum_out;
    summarize->add_option("--in", sum_in, "input results CSV")->required();
    summarize->add_option("--out", sum_out, "output CSV (default: stdout)");

    // trace-gen -----------------------------------------------------------
    auto* trace_gen = app.add_subcommand("trace-gen", "generate a synthetic trace file");
    std::uint64_t tg_ops = 1000, tg_seed = 1;
    int tg_operands = 3, tg_data_len = 32, tg_dbcs = 4;
    std::string tg_out = "trace.txt";
    trace_gen->add_option("--ops", tg_ops, "instruction count");
    trace_gen->add_option("--operands", tg_operands, "TR operand count");
    trace_gen->add_option("--seed", tg_seed, "trace seed");
    trace_gen->add_option("--data-len", tg_data_len, "rows per DBC");
    trace_gen->add_option("--dbcs", tg_dbcs, "number of DBCs");
    trace_gen->add_option("--out", tg_out, "output trace path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (run->parsed()) {
            // Fold simple options into --set form so one code path applies them.
            if (!workload.empty()) overrides.push_back("workload=" + workload);
            if (!protections.empty()) {
                json arr = json::array();
                for (const auto& tok : parse_string_list(protections)) arr.push_back(tok);
                overrides.push_back("protections=" + arr.dump());
            }
            if (!fault_rates.empty()) {
                json arr = json::array();
                for (const double p : parse_rate_list(fault_rates)) arr.push_back(p);
                overrides.push_back("fault_rates=" + arr.dump());
            }
            if (seed_set) overrides.push_back("seed=" + std::to_string(seed));
            if (reps > 0) overrides.push_back("repetitions=" + std::to_string(reps));
            if (workers > 0) overrides.push_back("workers=" + std::to_string(workers));
            if (synth_ops > 0) overrides.push_back("synthetic.ops=" + std::to_string(synth_ops));
            if (operands > 0) overrides.push_back("synthetic.operands=" + std::to_string(operands));
            if (counter_width > 0) overrides.push_back("counter.width=" + std::to_string(counter_width));
            if (counter_increments > 0) overrides.push_back("counter.increments=" + std::to_string(counter_increments));
            if (aes_blocks > 0) overrides.push_back("aes.blocks=" + std::to_string(aes_blocks));
            if (mmm_dim > 0) overrides.push_back("mmm.dim=" + std::to_string(mmm_dim));
            if (!trace_file.empty()) overrides.push_back("trace_file=" + trace_file);
            if (!out_dir.empty()) overrides.push_back("out_dir=" + out_dir);
            return cmd_run(config_path, overrides);
        }
        if (analytic->parsed()) {
            std::vector<double> ps;
            if (!analytic_rates.empty()) {
                ps = parse_rate_list(analytic_rates);
            } else {
                if (points < 2 || p_min <= 0 || p_max < p_min)
                    throw rtcim::ConfigError("analytic grid requires points >= 2 and 0 < p-min <= p-max");
                for (int i = 0; i < points; ++i) {
                    const double f = static_cast<double>(i) / (points - 1);
                    ps.push_back(p_min * std::pow(p_max / p_min, f));
                }
            }
            std::ofstream out(analytic_out);
            if (!out) throw std::runtime_error("cannot open output: " + analytic_out);
            rtcim::emit_analytical(ps, out);
            std::cout << "wrote " << analytic_out << std::endl;
            return 0;
        }
        if (summarize->parsed()) {
            std::ifstream in(sum_in);
            if (!in) throw rtcim::ConfigError("cannot open input CSV: " + sum_in);
            if (sum_out.empty()) {
                rtcim::summarize_csv(in, std::cout);
            } else {
                std::ofstream out(sum_out);
                if (!out) throw std::runtime_error("cannot open output: " + sum_out);
                rtcim::summarize_csv(in, out);
            }
            return 0;
        }
        if (trace_gen->parsed()) {
            const rtcim::Trace t =
                rtcim::gen_synthetic_trace(tg_ops, tg_operands, tg_seed, "uniform", tg_data_len, tg_dbcs);
            rtcim::save_trace(t, tg_out, tg_data_len);
            std::cout << "wrote " << t.instructions.size() << " instructions to " << tg_out << std::endl;
            return 0;
        }
    } catch (const rtcim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitRuntime;
    }
    return 0;
}
