#include "spinbath/csv.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace spinbath {

namespace {

void write_config_echo(std::ostream& out, const std::string& text) {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out << "# config: " << line << "\n";
}

std::string hex(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::string format_value(double v) {
    if (std::isnan(v)) return "";
    if (v == 0.0) v = 0.0;  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_time_series(std::ostream& out, const TimeSeries& ts, const std::vector<std::string>& extra_meta) {
    out << "# spinbath time series\n";
    write_config_echo(out, ts.config_text);
    out << "# seed: " << ts.meta.seed << "\n";
    out << "# realization_checksum: " << hex(ts.meta.checksum) << "\n";
    out << "# spectral_window: center=" << format_value(ts.meta.window.center)
        << " half_width=" << format_value(ts.meta.window.half_width) << "\n";
    out << "# propagated_dim: " << ts.meta.sector_dim << "\n";
    out << "# matvecs: " << ts.meta.matvecs << "\n";
    for (const auto& line : extra_meta) out << "# " << line << "\n";
    out << "# wall_time_s: " << format_value(ts.meta.wall_seconds) << "\n";

    out << "t";
    for (const auto& c : ts.columns) out << "," << c.name;
    out << "\n";
    for (std::size_t k = 0; k < ts.times.size(); ++k) {
        out << format_value(ts.times[k]);
        for (const auto& c : ts.columns) out << "," << format_value(c.values[k]);
        out << "\n";
    }
}

void write_sweep(std::ostream& out, const SweepConfig& cfg, const SweepResult& result) {
    out << "# spinbath size sweep\n";
    write_config_echo(out, cfg.to_text());
    out << "# log2_slope: " << format_value(result.log2_slope()) << "\n";
    out << "row,n_e,seed,k_strength,entropy_avg,max_offdiag_avg,max_offdiag_0,max_offdiag_rel\n";
    for (const auto& r : result.rows) {
        out << "job," << r.n_e << "," << r.seed << "," << format_value(r.k_strength) << ","
            << format_value(r.entropy_avg) << "," << format_value(r.max_offdiag_avg) << ","
            << format_value(r.max_offdiag_0) << "," << format_value(r.max_offdiag_rel) << "\n";
    }
    for (const auto& a : result.aggregates) {
        out << "mean," << a.n_e << ",," << format_value(a.k_strength) << "," << format_value(a.entropy_avg) << ",,,"
            << format_value(a.max_offdiag_rel) << "\n";
    }
}

}  // namespace spinbath
