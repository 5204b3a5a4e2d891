#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "smrac/engine.hpp"

namespace smrac {

/// Columns: t, sigma, x_1..x_n, xm_1..xm_n, e_norm, u_1..u_m, V, lmin_Q,
/// then per subsystem i: phihat_i_1..phihat_i_mn, phierr_i, s_i.
/// Doubles are written with 17 significant digits and round-trip bitwise.
void write_trace_csv(const std::vector<TraceRecord>& trace, std::ostream& out);

/// Parses a trace written by write_trace_csv; dimensions come from the header.
std::vector<TraceRecord> read_trace_csv(std::istream& in);

/// Time-series plot of ||e||, V and per-subsystem ||phi_tilde_i|| on a log
/// scale, with vertical markers at the switching instants.
void write_plot_svg(const std::vector<TraceRecord>& trace, const SwitchSchedule& schedule,
                    std::ostream& out);

/// Overlay of per-subsystem ||phi_tilde_i|| for a memory run (solid) and a
/// baseline run (dashed).
void write_compare_svg(const std::vector<TraceRecord>& memory_trace,
                       const std::vector<TraceRecord>& baseline_trace,
                       const SwitchSchedule& schedule, std::ostream& out);

} // namespace smrac
