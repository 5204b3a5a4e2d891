#include "smrac/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

namespace smrac {

namespace {

void append_double(std::string& line, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    line += buf;
}

struct Header {
    std::size_t n = 0, m = 0, M = 0, mn = 0;
};

Header parse_header(const std::string& line) {
    Header h;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.rfind("x_", 0) == 0 && tok.rfind("xm_", 0) != 0) ++h.n;
        else if (tok.rfind("u_", 0) == 0) ++h.m;
        else if (tok.rfind("s_", 0) == 0) ++h.M;
        else if (tok.rfind("phihat_1_", 0) == 0) ++h.mn;
    }
    if (h.n == 0 || h.m == 0 || h.M == 0 || h.mn == 0)
        throw IoError("trace csv: unrecognized header");
    return h;
}

} // namespace

void write_trace_csv(const std::vector<TraceRecord>& trace, std::ostream& out) {
    if (trace.empty()) throw IoError("trace csv: empty trace");
    const std::size_t n = trace[0].x.dim();
    const std::size_t m = trace[0].u.dim();
    const std::size_t M = trace[0].phi_hat.size();
    const std::size_t mn = trace[0].phi_hat[0].dim();

    std::string line = "t,sigma";
    for (std::size_t i = 1; i <= n; ++i) line += ",x_" + std::to_string(i);
    for (std::size_t i = 1; i <= n; ++i) line += ",xm_" + std::to_string(i);
    line += ",e_norm";
    for (std::size_t i = 1; i <= m; ++i) line += ",u_" + std::to_string(i);
    line += ",V,lmin_Q";
    for (std::size_t s = 1; s <= M; ++s) {
        for (std::size_t j = 1; j <= mn; ++j)
            line += ",phihat_" + std::to_string(s) + "_" + std::to_string(j);
        line += ",phierr_" + std::to_string(s);
        line += ",s_" + std::to_string(s);
    }
    out << line << '\n';

    for (const auto& rec : trace) {
        line.clear();
        append_double(line, rec.t);
        line += ',';
        line += std::to_string(rec.sigma);
        for (std::size_t i = 0; i < n; ++i) { line += ','; append_double(line, rec.x[i]); }
        for (std::size_t i = 0; i < n; ++i) { line += ','; append_double(line, rec.x_m[i]); }
        line += ','; append_double(line, rec.e_norm);
        for (std::size_t i = 0; i < m; ++i) { line += ','; append_double(line, rec.u[i]); }
        line += ','; append_double(line, rec.V);
        line += ','; append_double(line, rec.lmin_Q);
        for (std::size_t s = 0; s < M; ++s) {
            for (std::size_t j = 0; j < mn; ++j) {
                line += ','; append_double(line, rec.phi_hat[s][j]);
            }
            line += ','; append_double(line, rec.phi_err[s]);
            line += ',';
            line += std::to_string(rec.s[s]);
        }
        out << line << '\n';
    }
    if (!out) throw IoError("trace csv: write failed");
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("trace csv: missing header");
    const Header h = parse_header(line);

    std::vector<TraceRecord> trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> vals;
        const char* p = line.c_str();
        char* end = nullptr;
        while (*p) {
            vals.push_back(std::strtod(p, &end));
            p = (*end == ',') ? end + 1 : end;
        }
        const std::size_t expected = 5 + 2 * h.n + h.m + h.M * (h.mn + 2);
        if (vals.size() != expected) throw IoError("trace csv: malformed row");

        TraceRecord rec;
        std::size_t k = 0;
        rec.t = vals[k++];
        rec.sigma = static_cast<int>(vals[k++]);
        rec.x = Vector(h.n);
        for (std::size_t i = 0; i < h.n; ++i) rec.x[i] = vals[k++];
        rec.x_m = Vector(h.n);
        for (std::size_t i = 0; i < h.n; ++i) rec.x_m[i] = vals[k++];
        rec.e = rec.x - rec.x_m;
        rec.e_norm = vals[k++];
        rec.u = Vector(h.m);
        for (std::size_t i = 0; i < h.m; ++i) rec.u[i] = vals[k++];
        rec.V = vals[k++];
        rec.lmin_Q = vals[k++];
        double sq = rec.e_norm * rec.e_norm;
        for (std::size_t s = 0; s < h.M; ++s) {
            Vector phi(h.mn);
            for (std::size_t j = 0; j < h.mn; ++j) phi[j] = vals[k++];
            rec.phi_hat.push_back(std::move(phi));
            rec.phi_err.push_back(vals[k++]);
            sq += rec.phi_err.back() * rec.phi_err.back();
            rec.s.push_back(static_cast<int>(vals[k++]));
        }
        rec.xi_norm = std::sqrt(sq);
        trace.push_back(std::move(rec));
    }
    return trace;
}

namespace {

constexpr double kWidth = 960.0, kHeight = 540.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 20.0, kBottom = 45.0;
constexpr double kLogFloor = 1e-12;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Axes {
    double t0 = 0.0, t1 = 1.0;
    double y0 = -12.0, y1 = 2.0; // log10 range

    double px(double t) const {
        return kLeft + (t - t0) / std::max(t1 - t0, 1e-300) * (kWidth - kLeft - kRight);
    }
    double py(double logv) const {
        return kHeight - kBottom -
               (logv - y0) / std::max(y1 - y0, 1e-300) * (kHeight - kTop - kBottom);
    }
};

double log_clamp(double v) { return std::log10(std::max(std::abs(v), kLogFloor)); }

void polyline(std::ostream& out, const std::vector<TraceRecord>& trace, const Axes& ax,
              const char* color, bool dashed,
              const std::function<double(const TraceRecord&)>& value) {
    const std::size_t stride = std::max<std::size_t>(1, trace.size() / 2000);
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\"";
    if (dashed) out << " stroke-dasharray=\"5,4\"";
    out << " points=\"";
    for (std::size_t k = 0; k < trace.size(); k += stride) {
        out << ax.px(trace[k].t) << ',' << ax.py(log_clamp(value(trace[k]))) << ' ';
    }
    const auto& last = trace.back();
    out << ax.px(last.t) << ',' << ax.py(log_clamp(value(last)));
    out << "\"/>\n";
}

void start_svg(std::ostream& out) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void draw_frame(std::ostream& out, const Axes& ax, const SwitchSchedule& schedule) {
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
        << kWidth - kLeft - kRight << "\" height=\"" << kHeight - kTop - kBottom
        << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (double tk : schedule.instants) {
        if (tk < ax.t0 || tk > ax.t1) continue;
        out << "<line x1=\"" << ax.px(tk) << "\" y1=\"" << kTop << "\" x2=\"" << ax.px(tk)
            << "\" y2=\"" << kHeight - kBottom
            << "\" stroke=\"#bbb\" stroke-dasharray=\"2,4\"/>\n";
    }
    for (int d = static_cast<int>(std::ceil(ax.y0)); d <= static_cast<int>(std::floor(ax.y1));
         d += 2) {
        out << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << ax.py(d) << "\" x2=\"" << kLeft
            << "\" y2=\"" << ax.py(d) << "\" stroke=\"#333\"/>\n"
            << "<text x=\"" << kLeft - 8 << "\" y=\"" << ax.py(d) + 4
            << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">1e" << d
            << "</text>\n";
    }
    const int ticks = 6;
    for (int k = 0; k <= ticks; ++k) {
        const double t = ax.t0 + (ax.t1 - ax.t0) * k / ticks;
        out << "<line x1=\"" << ax.px(t) << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
            << ax.px(t) << "\" y2=\"" << kHeight - kBottom + 4 << "\" stroke=\"#333\"/>\n"
            << "<text x=\"" << ax.px(t) << "\" y=\"" << kHeight - kBottom + 18
            << "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">" << t
            << "</text>\n";
    }
    out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 8
        << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">t [s]"
        << "</text>\n";
}

void legend_entry(std::ostream& out, int slot, const char* color, bool dashed,
                  const std::string& label) {
    const double x = kLeft + 12.0, y = kTop + 16.0 + 16.0 * slot;
    out << "<line x1=\"" << x << "\" y1=\"" << y - 4 << "\" x2=\"" << x + 26 << "\" y2=\""
        << y - 4 << "\" stroke=\"" << color << "\" stroke-width=\"1.6\"";
    if (dashed) out << " stroke-dasharray=\"5,4\"";
    out << "/>\n<text x=\"" << x + 32 << "\" y=\"" << y
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << label << "</text>\n";
}

Axes fit_axes(const std::vector<TraceRecord>& trace) {
    Axes ax;
    ax.t0 = trace.front().t;
    ax.t1 = std::max(trace.back().t, ax.t0 + 1e-9);
    double lo = 0.0, hi = -12.0;
    for (const auto& rec : trace) {
        for (double v : {rec.e_norm, rec.V}) {
            lo = std::min(lo, log_clamp(v));
            hi = std::max(hi, log_clamp(v));
        }
        for (double v : rec.phi_err) {
            lo = std::min(lo, log_clamp(v));
            hi = std::max(hi, log_clamp(v));
        }
    }
    ax.y0 = std::floor(lo);
    ax.y1 = std::ceil(hi) + 0.5;
    return ax;
}

} // namespace

void write_plot_svg(const std::vector<TraceRecord>& trace, const SwitchSchedule& schedule,
                    std::ostream& out) {
    if (trace.empty()) throw IoError("plot: empty trace");
    const Axes ax = fit_axes(trace);
    start_svg(out);
    draw_frame(out, ax, schedule);

    polyline(out, trace, ax, kPalette[0], false, [](const TraceRecord& r) { return r.e_norm; });
    legend_entry(out, 0, kPalette[0], false, "|e|");
    polyline(out, trace, ax, kPalette[1], false, [](const TraceRecord& r) { return r.V; });
    legend_entry(out, 1, kPalette[1], false, "V");
    const std::size_t M = trace[0].phi_err.size();
    for (std::size_t i = 0; i < M; ++i) {
        const char* color = kPalette[(2 + i) % 8];
        polyline(out, trace, ax, color, false,
                 [i](const TraceRecord& r) { return r.phi_err[i]; });
        legend_entry(out, static_cast<int>(2 + i), color,
                     false, "|phi_err_" + std::to_string(i + 1) + "|");
    }
    out << "</svg>\n";
    if (!out) throw IoError("plot: write failed");
}

void write_compare_svg(const std::vector<TraceRecord>& memory_trace,
                       const std::vector<TraceRecord>& baseline_trace,
                       const SwitchSchedule& schedule, std::ostream& out) {
    if (memory_trace.empty() || baseline_trace.empty()) throw IoError("plot: empty trace");
    Axes ax = fit_axes(memory_trace);
    const Axes bx = fit_axes(baseline_trace);
    ax.y0 = std::min(ax.y0, bx.y0);
    ax.y1 = std::max(ax.y1, bx.y1);
    start_svg(out);
    draw_frame(out, ax, schedule);

    const std::size_t M = memory_trace[0].phi_err.size();
    for (std::size_t i = 0; i < M; ++i) {
        const char* color = kPalette[i % 8];
        polyline(out, memory_trace, ax, color, false,
                 [i](const TraceRecord& r) { return r.phi_err[i]; });
        polyline(out, baseline_trace, ax, color, true,
                 [i](const TraceRecord& r) { return r.phi_err[i]; });
        legend_entry(out, static_cast<int>(2 * i), color, false,
                     "|phi_err_" + std::to_string(i + 1) + "| memory");
        legend_entry(out, static_cast<int>(2 * i + 1), color, true,
                     "|phi_err_" + std::to_string(i + 1) + "| baseline");
    }
    out << "</svg>\n";
    if (!out) throw IoError("plot: write failed");
}

} // namespace smrac
