#pragma once

#include "oc/scaling.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace oc {

// On-disk layout of one run: records.csv, comparison.json, config.ini and
// optional gnuplot scripts, all inside a single directory. The directory is
// self-describing: config + records + report reproduce the run.
class RunStore {
public:
    explicit RunStore(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path records_path() const { return dir_ / "records.csv"; }
    std::filesystem::path comparison_path() const { return dir_ / "comparison.json"; }
    std::filesystem::path config_path() const { return dir_ / "config.ini"; }

    bool has_records() const;
    std::vector<SweepRecord> read_records() const;
    void write_records(const std::vector<SweepRecord>& records) const;
    void write_config(const std::string& echo) const;
    void write_comparison(const std::string& json_text) const;
    void write_plot_scripts(const ComparisonReport& report) const;

private:
    std::filesystem::path dir_;
};

// Locale-independent record serialization (shared with tests).
std::string records_to_csv(const std::vector<SweepRecord>& records);
std::vector<SweepRecord> records_from_csv(const std::string& text);

} // namespace oc
