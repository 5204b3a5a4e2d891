#include "smrac/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "smrac/scenario.hpp"
#include "smrac/trace_io.hpp"

namespace smrac {

namespace {

namespace fs = std::filesystem;

bool log_enabled_impl() {
    const char* v = std::getenv("SMRAC_LOG");
    return v != nullptr && *v != '\0';
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file " + path.string());
    return out;
}

template <typename Fn>
int exit_guard(Fn&& fn) {
    try {
        return fn();
    } catch (const NumericalBlowup& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBlowup;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return ss.str();
}

std::string vec_text(const Vector& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.dim(); ++i) {
        if (i) s += ", ";
        s += fmt(v[i]);
    }
    return s + "]";
}

} // namespace

bool log_enabled() { return log_enabled_impl(); }

void log_info(const std::string& message) {
    if (log_enabled_impl()) std::cerr << "[smrac] " << message << '\n';
}

std::string report_to_text(const ConvergenceReport& rep) {
    std::ostringstream out;
    out << "subsystems: " << rep.T_i.size() << "\n";
    for (std::size_t i = 0; i < rep.T_i.size(); ++i) {
        out << "subsystem " << i + 1 << ":\n"
            << "  s_i            = " << rep.s_i[i] << "\n"
            << "  T_i            = " << fmt(rep.T_i[i]) << "\n"
            << "  gamma_i        = " << fmt(rep.gamma_i[i]) << "   (lambda_min of S_Qbar)\n"
            << "  eta_i          = " << fmt(rep.eta_i[i]) << "\n"
            << "  gain_margin    = " << fmt(rep.gain_margin[i])
            << (rep.gain_ok[i] ? "   [ok]" : "   [violated]") << "\n"
            << "  final_phi_err  = " << fmt(rep.final_phi_err[i]) << "\n";
    }
    out << "T_f              = " << fmt(rep.T_f) << "\n"
        << "lambda_m         = " << fmt(rep.lambda_m) << "\n"
        << "lambda_M         = " << fmt(rep.lambda_M) << "\n"
        << "gamma1           = " << fmt(rep.gamma1) << "\n"
        << "gamma2_hat       = " << fmt(rep.gamma2_hat) << "\n"
        << "decay_bound_ok   = " << (rep.decay_bound_ok ? "true" : "false") << "\n"
        << "alpha_reference  = " << fmt(rep.alpha_reference) << "\n"
        << "xi_at_Tf         = " << fmt(rep.xi_at_Tf) << "\n"
        << "xi_final         = " << fmt(rep.xi_final) << "\n"
        << "final_e_norm     = " << fmt(rep.final_e_norm) << "\n"
        << "worst_V_increment = " << fmt(rep.worst_V_increment) << "\n"
        << "v_monotone_budget = " << fmt(rep.v_monotone_budget) << "\n"
        << "v_monotone       = " << (rep.v_monotone ? "true" : "false") << "\n"
        << "sandwich_ok      = " << (rep.sandwich_ok ? "true" : "false") << "\n"
        << "max_uei_residual = " << fmt(rep.max_uei_residual) << "\n"
        << "max_G_residual   = " << fmt(rep.max_gramian_residual) << "\n"
        << "min_lmin_Q       = " << fmt(rep.min_lmin_Q) << "\n"
        << "runtime_seconds  = " << fmt(rep.runtime_seconds) << "\n";
    return out.str();
}

std::string comparison_to_text(const ComparisonSummary& cmp) {
    std::ostringstream out;
    out << "ise_memory                  = " << fmt(cmp.ise_memory) << "\n"
        << "ise_baseline                = " << fmt(cmp.ise_baseline) << "\n"
        << "final_phi_err_sum_memory    = " << fmt(cmp.final_phi_err_sum_memory) << "\n"
        << "final_phi_err_sum_baseline  = " << fmt(cmp.final_phi_err_sum_baseline) << "\n"
        << "memory_no_worse             = " << (cmp.memory_no_worse ? "true" : "false") << "\n";
    for (std::size_t i = 0; i < cmp.final_phi_err_memory.size(); ++i) {
        out << "subsystem " << i + 1
            << ": final_phi_err memory = " << fmt(cmp.final_phi_err_memory[i])
            << ", baseline = " << fmt(cmp.final_phi_err_baseline[i])
            << ", max_delta = " << fmt(cmp.max_phi_err_delta[i]) << "\n";
    }
    return out.str();
}

void emit_outputs(const RunResult& run, const ConvergenceReport& report,
                  const SimulationConfig& cfg, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir);

    auto trace_out = open_output(fs::path(dir) / "trace.csv");
    write_trace_csv(run.trace, trace_out);
    trace_out.close();
    if (!trace_out) throw IoError("write failed for trace.csv");

    auto report_out = open_output(fs::path(dir) / "report.txt");
    report_out << report_to_text(report);
    report_out.close();
    if (!report_out) throw IoError("write failed for report.txt");

    auto plot_out = open_output(fs::path(dir) / "plot.svg");
    write_plot_svg(run.trace, cfg.schedule, plot_out);
    plot_out.close();
    if (!plot_out) throw IoError("write failed for plot.svg");
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir, int decimate) {
    return exit_guard([&] {
        SimulationConfig cfg = load_scenario_file(scenario_path);
        if (decimate > 0) cfg.trace_decimate = decimate;
        log_info("loaded " + scenario_path + ", running to t_end = " + fmt(cfg.t_end));
        const RunResult run = run_scenario(cfg);
        const ConvergenceReport report = build_report(run, cfg);
        emit_outputs(run, report, cfg, out_dir);
        log_info("run finished in " + fmt(run.summary.runtime_seconds) + " s, outputs in " +
                 out_dir);
        return kExitOk;
    });
}

int cmd_compare(const std::string& scenario_path, const std::string& out_dir) {
    return exit_guard([&] {
        SimulationConfig cfg_memory = load_scenario_file(scenario_path);
        cfg_memory.mode = EstimatorMode::memory;
        SimulationConfig cfg_baseline = cfg_memory;
        cfg_baseline.mode = EstimatorMode::baseline;

        log_info("running memory mode");
        const RunResult run_memory = run_scenario(cfg_memory);
        log_info("running baseline mode");
        const RunResult run_baseline = run_scenario(cfg_baseline);
        const ComparisonSummary cmp =
            compare_runs(run_memory, run_baseline, cfg_memory, cfg_baseline);

        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) throw IoError("cannot create output directory " + out_dir);

        auto mem_out = open_output(fs::path(out_dir) / "trace_memory.csv");
        write_trace_csv(run_memory.trace, mem_out);
        auto base_out = open_output(fs::path(out_dir) / "trace_baseline.csv");
        write_trace_csv(run_baseline.trace, base_out);
        auto cmp_out = open_output(fs::path(out_dir) / "comparison.txt");
        cmp_out << comparison_to_text(cmp);
        auto svg_out = open_output(fs::path(out_dir) / "compare.svg");
        write_compare_svg(run_memory.trace, run_baseline.trace, cfg_memory.schedule, svg_out);

        std::cout << comparison_to_text(cmp);
        return kExitOk;
    });
}

int cmd_validate(const std::string& scenario_path) {
    return exit_guard([&] {
        std::ifstream in(scenario_path, std::ios::binary);
        if (!in) throw ConfigError(scenario_path + ": cannot open scenario file");
        std::ostringstream buf;
        buf << in.rdbuf();

        // Parse without engine validation so every violated assumption can be
        // reported rather than only the first one.
        SimulationConfig cfg;
        try {
            cfg = parse_scenario_text(buf.str(), scenario_path, /*validate=*/false);
        } catch (const Error& e) {
            std::cerr << "invalid: " << e.what() << '\n';
            return kExitConfig;
        }

        std::vector<std::string> violations;
        const bool hurwitz_ok = is_hurwitz(cfg.ref.A_m);
        if (!hurwitz_ok) violations.push_back("reference A_m is not Hurwitz (NotHurwitz)");

        for (const auto& sub : cfg.subsystems) {
            try {
                pinv_left(sub.B);
            } catch (const RankDeficient&) {
                violations.push_back("subsystem " + std::to_string(sub.index) +
                                     ": B is rank deficient (full-column-rank assumption)");
                continue;
            }
            if (!hurwitz_ok) continue;
            try {
                const MatchedGains g = solve_matching(sub, cfg.ref);
                std::cout << "subsystem " << sub.index << ": K_x = " << vec_text(vec(g.K_x))
                          << ", K_r = " << vec_text(vec(g.K_r)) << '\n';
            } catch (const MatchingInfeasible& e) {
                violations.push_back(std::string(e.what()) + " (MatchingInfeasible)");
            }
        }

        try {
            SimulationEngine::validate_config(cfg);
        } catch (const Error& e) {
            violations.push_back(e.what());
        }

        if (!violations.empty()) {
            for (const auto& v : violations) std::cerr << "violated: " << v << '\n';
            return kExitConfig;
        }
        std::cout << "scenario ok: " << cfg.subsystems.size() << " subsystems, horizon "
                  << fmt(cfg.t_end) << " s, " << cfg.schedule.instants.size() << " switches\n";
        return kExitOk;
    });
}

} // namespace smrac
