// Deterministic serialization of reports: CSV and JSON-style structured
// text. Numbers are printed with 12 significant digits; key and column order
// are fixed, so serializing the same report twice yields identical bytes.

#pragma once

#include "echomem/model.hpp"
#include "echomem/optimize.hpp"
#include "echomem/spectral.hpp"
#include "echomem/timedomain.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

namespace echomem {

enum class ReportFormat { Csv, Json };

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {

// minimal JSON emitter; enough for flat reports with arrays of numbers
class JsonWriter {
public:
    JsonWriter& begin() { return raw("{"); }
    JsonWriter& end() {
        first_ = false;
        return raw("}");
    }
    JsonWriter& key(const std::string& k) {
        if (!first_) out_ << ",";
        first_ = true;
        out_ << "\"" << k << "\":";
        return *this;
    }
    JsonWriter& value(double v) {
        out_ << format_number(v);
        first_ = false;
        return *this;
    }
    JsonWriter& value(const std::string& s) {
        out_ << "\"" << s << "\"";
        first_ = false;
        return *this;
    }
    JsonWriter& value(bool b) {
        out_ << (b ? "true" : "false");
        first_ = false;
        return *this;
    }
    template <typename T>
    JsonWriter& array(const std::vector<T>& vs) {
        out_ << "[";
        for (std::size_t i = 0; i < vs.size(); ++i) {
            if (i) out_ << ",";
            if constexpr (std::is_same_v<T, bool>)
                out_ << (vs[i] ? "true" : "false");
            else
                out_ << format_number(static_cast<double>(vs[i]));
        }
        out_ << "]";
        first_ = false;
        return *this;
    }
    JsonWriter& raw(const char* s) {
        out_ << s;
        return *this;
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
    bool first_ = true;
};

}  // namespace detail

// --- EfficiencyReport ------------------------------------------------------

inline std::string to_json(const EfficiencyReport& r) {
    detail::JsonWriter w;
    w.begin();
    w.key("per_mode_storage").array(r.per_mode_storage);
    w.key("per_mode_retrieval").array(r.per_mode_retrieval);
    w.key("per_mode_decoherence_factor").array(r.per_mode_decoherence_factor);
    std::vector<bool> warn(r.per_mode_regime_warning.begin(), r.per_mode_regime_warning.end());
    w.key("per_mode_regime_warning").array(warn);
    w.key("total_storage").value(r.total_storage);
    w.key("total_memory").value(r.total_memory);
    w.key("max_quadrature_error").value(r.max_quadrature_error);
    w.end();
    return w.str() + "\n";
}

// One row per mode; the two totals repeat in the last columns so the document
// stays a single flat table.
inline std::string to_csv(const EfficiencyReport& r) {
    std::string out =
        "mode,q_storage,q_retrieval,decoherence_factor,regime_warning,"
        "total_storage,total_memory\n";
    for (std::size_t k = 0; k < r.per_mode_storage.size(); ++k) {
        out += std::to_string(k + 1) + "," + format_number(r.per_mode_storage[k]) + "," +
               format_number(r.per_mode_retrieval[k]) + "," +
               format_number(r.per_mode_decoherence_factor[k]) + "," +
               (r.per_mode_regime_warning[k] ? "1" : "0") + "," +
               format_number(r.total_storage) + "," + format_number(r.total_memory) + "\n";
    }
    return out;
}

// --- ScanResult -------------------------------------------------------------

inline std::string to_csv(const ScanResult& r) {
    std::string out = "M,ratio,q_me,q_min_mode\n";
    for (const auto& row : r.rows) {
        out += std::to_string(row.mode_count) + "," + format_number(row.ratio) + "," +
               format_number(row.q_me) + "," + format_number(row.q_min_mode) + "\n";
    }
    return out;
}

inline std::string to_json(const ScanResult& r) {
    detail::JsonWriter w;
    w.begin();
    w.key("m_grid").array(r.m_grid);
    w.key("ratio_grid").array(r.ratio_grid);
    w.key("rows").raw("[");
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        if (i) w.raw(",");
        const auto& row = r.rows[i];
        w.raw("{");
        w.raw("\"M\":").value(static_cast<double>(row.mode_count));
        w.raw(",\"ratio\":").value(row.ratio);
        w.raw(",\"q_me\":").value(row.q_me);
        w.raw(",\"q_min_mode\":").value(row.q_min_mode);
        w.raw("}");
    }
    w.raw("]");
    w.end();
    return w.str() + "\n";
}

// --- MatchReport -------------------------------------------------------------

inline std::string to_json(const MatchReport& r) {
    detail::JsonWriter w;
    w.begin();
    w.key("gamma1_required").value(r.gamma1_required);
    w.key("gamma1_optimal").value(r.gamma1_optimal);
    w.key("q_optimal").value(r.q_optimal);
    w.key("q_narrowband_at_required").value(r.q_narrowband_at_required);
    w.key("sensitivity_curvature").value(r.sensitivity_curvature);
    if (r.optical_depth) w.key("optical_depth").value(*r.optical_depth);
    w.end();
    return w.str() + "\n";
}

inline std::string to_csv(const MatchReport& r) {
    std::string out =
        "gamma1_required,gamma1_optimal,q_optimal,q_narrowband_at_required,"
        "sensitivity_curvature,optical_depth\n";
    out += format_number(r.gamma1_required) + "," + format_number(r.gamma1_optimal) + "," +
           format_number(r.q_optimal) + "," + format_number(r.q_narrowband_at_required) +
           "," + format_number(r.sensitivity_curvature) + "," +
           (r.optical_depth ? format_number(*r.optical_depth) : std::string()) + "\n";
    return out;
}

// --- Trajectory export -------------------------------------------------------

// Columnar text: time, Re/Im of the cavity amplitude and the traveling
// fields, and the total atomic excitation. One row per retained sample.
inline void write_trajectory(std::ostream& os, const Trajectory& t, int stride = 1) {
    os << "time re_a im_a re_b_in im_b_in re_b_out im_b_out excitation\n";
    const std::size_t step = stride > 0 ? static_cast<std::size_t>(stride) : 1;
    for (std::size_t i = 0; i < t.time.size(); i += step) {
        os << format_number(t.time[i]) << " " << format_number(t.cavity_amp[i].real())
           << " " << format_number(t.cavity_amp[i].imag()) << " "
           << format_number(t.input_amp[i].real()) << " "
           << format_number(t.input_amp[i].imag()) << " "
           << format_number(t.output_amp[i].real()) << " "
           << format_number(t.output_amp[i].imag()) << " "
           << format_number(t.excitation[i]) << "\n";
    }
}

}  // namespace echomem
