#pragma once

// CSV / JSON-lines emission with a fixed column order and 17 significant
// digits, so identical runs produce identical bytes.

#include <string>
#include <vector>

#include "curos/index_set.hpp"

namespace curos::emit {

struct MetricRecord {
    std::string method;
    std::string label;  // decay for toy runs, empty otherwise
    long step = 0;      // time step, or -1 for rank sweeps
    double t = 0.0;     // time, or the rank for rank sweeps
    Index rank = 0;
    double err_rel_l2 = 0.0;
    double err_frob_norm = 0.0;
    double eta_bar_p = 1.0;
    double eta_bar_s = 1.0;
    Index m_r = 0;
    Index m_c = 0;
    double eps_proxy = 0.0;
    long long entries_accessed = 0;
    bool diverged = false;
    std::vector<double> sigma_leading;
};

// Column order of metrics.csv.
const std::vector<std::string>& metric_columns();

// Number formatting shared by every writer: %.17g, with nan / inf / -inf.
std::string number(double v);

// Writes records as "csv" (metric_columns header, sigma_leading omitted) or
// "jsonl" (one object per line, sigma_leading included). Throws ArgumentError
// for other formats and IoError when the file cannot be written.
void emit(const std::vector<MetricRecord>& records, const std::string& format, const std::string& path);

// Parses a metrics.csv written by emit().
std::vector<MetricRecord> read_metrics_csv(const std::string& path);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

void write_table(const Table& table, const std::string& path);

} // namespace curos::emit
