#include "oc/store.hpp"

#include "oc/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace oc {

namespace {

std::string fmt(double v) {
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

double parse_double_field(const std::string& s) {
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ValidationError("records.csv: malformed number '" + s + "'");
    return out;
}

long parse_long_field(const std::string& s) {
    long out = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ValidationError("records.csv: malformed integer '" + s + "'");
    return out;
}

constexpr const char* kHeader =
    "run_id,E,L,N,log_abs_overlap,I,F,xi,hadamard_ok,degenerate_at_E,wall_ms";

void write_text_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + p.string());
    out << text;
}

} // namespace

std::string records_to_csv(const std::vector<SweepRecord>& records) {
    std::ostringstream os;
    os << kHeader << "\n";
    for (const auto& r : records) {
        if (!r.error.empty()) continue; // failures live in errors.log, not the table
        os << r.run_id << ',' << fmt(r.E) << ',' << fmt(r.L) << ',' << r.N << ','
           << fmt(r.log_abs_overlap) << ',' << fmt(r.I) << ',' << fmt(r.F) << ',' << r.xi
           << ',' << (r.hadamard_ok ? 1 : 0) << ',' << (r.degenerate_at_E ? 1 : 0) << ','
           << fmt(r.wall_ms) << "\n";
    }
    return os.str();
}

std::vector<SweepRecord> records_from_csv(const std::string& text) {
    std::vector<SweepRecord> out;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line != kHeader)
                throw ValidationError("records.csv: unexpected header '" + line + "'");
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 11)
            throw ValidationError("records.csv: wrong column count in '" + line + "'");
        SweepRecord r;
        r.run_id = cells[0];
        r.E = parse_double_field(cells[1]);
        r.L = parse_double_field(cells[2]);
        r.N = parse_long_field(cells[3]);
        r.log_abs_overlap = parse_double_field(cells[4]);
        r.I = parse_double_field(cells[5]);
        r.F = parse_double_field(cells[6]);
        r.xi = parse_long_field(cells[7]);
        r.hadamard_ok = parse_long_field(cells[8]) != 0;
        r.degenerate_at_E = parse_long_field(cells[9]) != 0;
        r.wall_ms = parse_double_field(cells[10]);
        out.push_back(std::move(r));
    }
    return out;
}

RunStore::RunStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

bool RunStore::has_records() const { return std::filesystem::exists(records_path()); }

std::vector<SweepRecord> RunStore::read_records() const {
    if (!has_records()) return {};
    std::ifstream in(records_path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return records_from_csv(ss.str());
}

void RunStore::write_records(const std::vector<SweepRecord>& records) const {
    write_text_file(records_path(), records_to_csv(records));
    std::ostringstream errs;
    for (const auto& r : records)
        if (!r.error.empty())
            errs << "E=" << fmt(r.E) << " L=" << fmt(r.L) << ": " << r.error << "\n";
    const std::string etext = errs.str();
    if (!etext.empty()) write_text_file(dir_ / "errors.log", etext);
}

void RunStore::write_config(const std::string& echo) const {
    write_text_file(config_path(), echo);
}

void RunStore::write_comparison(const std::string& json_text) const {
    write_text_file(comparison_path(), json_text);
}

void RunStore::write_plot_scripts(const ComparisonReport& report) const {
    for (const auto& row : report.rows) {
        {
            std::ostringstream os;
            os << "# gnuplot script: fixed-energy Anderson integral growth, E = "
               << fmt(row.E) << "\n";
            os << "set datafile separator ','\n";
            os << "set xlabel 'ln L'\n";
            os << "set ylabel 'F_L'\n";
            os << "set key left top\n";
            os << "plot 'records.csv' using (($2==" << fmt(row.E)
               << ") ? log($3) : 1/0):7 every ::1 with points pt 7 title 'F_L', \\\n";
            os << "     " << fmt(row.slope_F) << "*x + " << fmt(row.intercept_F)
               << " title 'fit slope " << fmt(row.slope_F) << "' dt 2, \\\n";
            os << "     " << fmt(row.gamma) << "*x + " << fmt(row.intercept_F)
               << " title 'gamma*lnL guide' dt 3\n";
            write_text_file(dir_ / ("plot_F_E" + fmt(row.E) + ".gp"), os.str());
        }
        {
            std::ostringstream os;
            os << "# gnuplot script: overlap decay, E = " << fmt(row.E) << "\n";
            os << "set datafile separator ','\n";
            os << "set xlabel 'ln L'\n";
            os << "set ylabel 'ln|S_L|'\n";
            os << "set key left bottom\n";
            os << "plot 'records.csv' using (($2==" << fmt(row.E)
               << ") ? log($3) : 1/0):5 every ::1 with points pt 5 title 'ln|S_L|', \\\n";
            os << "     " << fmt(-0.5 * row.gamma) << "*x + " << fmt(row.intercept_logS)
               << " title '-gamma/2 guide' dt 3\n";
            write_text_file(dir_ / ("plot_logS_E" + fmt(row.E) + ".gp"), os.str());
        }
    }
}

} // namespace oc
