#include "curos/emit.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "curos/errors.hpp"

namespace curos::emit {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

// JSON has no nan / inf; those go out as strings.
nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    return number(v);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double to_double(const std::string& s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw IoError("metrics.csv: bad number '" + s + "'");
    return v;
}

} // namespace

const std::vector<std::string>& metric_columns() {
    static const std::vector<std::string> cols = {
        "method",    "label",     "step", "t",   "rank",      "err_rel_l2",       "err_frob_norm",
        "eta_bar_p", "eta_bar_s", "m_r",  "m_c", "eps_proxy", "entries_accessed", "diverged"};
    return cols;
}

std::string number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit(const std::vector<MetricRecord>& records, const std::string& format, const std::string& path) {
    if (format != "csv" && format != "jsonl") throw ArgumentError("emit: unknown format '" + format + "'");
    auto out = open_out(path);
    if (format == "csv") {
        const auto& cols = metric_columns();
        for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
        out << '\n';
        for (const auto& r : records) {
            out << csv_field(r.method) << ',' << csv_field(r.label) << ',' << r.step << ',' << number(r.t) << ','
                << r.rank << ',' << number(r.err_rel_l2) << ',' << number(r.err_frob_norm) << ','
                << number(r.eta_bar_p) << ',' << number(r.eta_bar_s) << ',' << r.m_r << ',' << r.m_c << ','
                << number(r.eps_proxy) << ',' << r.entries_accessed << ',' << (r.diverged ? 1 : 0) << '\n';
        }
    } else {
        for (const auto& r : records) {
            nlohmann::ordered_json j;
            j["method"] = r.method;
            j["label"] = r.label;
            j["step"] = r.step;
            j["t"] = json_number(r.t);
            j["rank"] = r.rank;
            j["err_rel_l2"] = json_number(r.err_rel_l2);
            j["err_frob_norm"] = json_number(r.err_frob_norm);
            j["eta_bar_p"] = json_number(r.eta_bar_p);
            j["eta_bar_s"] = json_number(r.eta_bar_s);
            j["m_r"] = r.m_r;
            j["m_c"] = r.m_c;
            j["eps_proxy"] = json_number(r.eps_proxy);
            j["entries_accessed"] = r.entries_accessed;
            j["diverged"] = r.diverged;
            auto sig = nlohmann::json::array();
            for (double v : r.sigma_leading) sig.push_back(json_number(v));
            j["sigma_leading"] = sig;
            out << j.dump() << '\n';
        }
    }
    finish(out, path);
}

std::vector<MetricRecord> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": missing header");
    const auto header = split_csv(line);
    if (header != metric_columns()) throw IoError(path + ": unexpected header");
    std::vector<MetricRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != header.size()) throw IoError(path + ": wrong field count");
        MetricRecord r;
        r.method = f[0];
        r.label = f[1];
        r.step = std::stol(f[2]);
        r.t = to_double(f[3]);
        r.rank = std::stol(f[4]);
        r.err_rel_l2 = to_double(f[5]);
        r.err_frob_norm = to_double(f[6]);
        r.eta_bar_p = to_double(f[7]);
        r.eta_bar_s = to_double(f[8]);
        r.m_r = std::stol(f[9]);
        r.m_c = std::stol(f[10]);
        r.eps_proxy = to_double(f[11]);
        r.entries_accessed = std::stoll(f[12]);
        r.diverged = f[13] == "1";
        out.push_back(std::move(r));
    }
    return out;
}

void write_table(const Table& table, const std::string& path) {
    auto out = open_out(path);
    for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << csv_field(table.header[c]);
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw ArgumentError("write_table: row width differs from header");
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_field(row[c]);
        out << '\n';
    }
    finish(out, path);
}

} // namespace curos::emit
