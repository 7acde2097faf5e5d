#include "ovfit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ovfit/error.hpp"
#include "ovfit/io.hpp"
#include "ovfit/rng.hpp"

namespace ovfit {

const std::string& target_name(Target t) {
    static const std::array<std::string, 4> names = {"luts", "ffs", "mem_bits", "max_fanout"};
    return names[static_cast<std::size_t>(t)];
}

std::optional<Target> parse_target(const std::string& name) {
    for (const Target t : kAllTargets)
        if (target_name(t) == name) return t;
    return std::nullopt;
}

double target_value(const Record& r, Target t) {
    switch (t) {
        case Target::luts: return static_cast<double>(r.luts);
        case Target::ffs: return static_cast<double>(r.ffs);
        case Target::mem_bits: return static_cast<double>(r.mem_bits);
        case Target::max_fanout: return static_cast<double>(r.max_fanout);
    }
    throw Error("invalid target");
}

std::array<double, 2> record_features(const Record& r) {
    return {static_cast<double>(r.num_ste), static_cast<double>(r.fanout_limit)};
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(pos));
            break;
        }
        cells.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return cells;
}

std::uint64_t parse_quantity(const std::string& cell, std::size_t lineno, const char* column) {
    const std::string loc = "records csv line " + std::to_string(lineno);
    std::int64_t sv = 0;
    const auto [sp, sec] = std::from_chars(cell.data(), cell.data() + cell.size(), sv);
    if (sec == std::errc() && sp == cell.data() + cell.size()) {
        if (sv < 0)
            throw Error(loc + ": negative value in column '" + std::string(column) + "'");
        return static_cast<std::uint64_t>(sv);
    }
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw Error(loc + ": non-numeric value '" + cell + "' in column '" + std::string(column) + "'");
    return v;
}

}  // namespace

std::vector<Record> parse_records_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    std::vector<Record> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != kRecordCsvHeader)
                throw Error("records csv line " + std::to_string(lineno) + ": header must be '" +
                            kRecordCsvHeader + "'");
            header_seen = true;
            continue;
        }
        const auto cells = split_commas(line);
        if (cells.size() != 7)
            throw Error("records csv line " + std::to_string(lineno) + ": expected 7 columns, got " +
                        std::to_string(cells.size()));
        Record r;
        r.num_ste = parse_quantity(cells[0], lineno, "num_ste");
        r.fanout_limit = parse_quantity(cells[1], lineno, "fanout_limit");
        r.luts = parse_quantity(cells[2], lineno, "luts");
        r.ffs = parse_quantity(cells[3], lineno, "ffs");
        r.mem_bits = parse_quantity(cells[4], lineno, "mem_bits");
        r.max_fanout = parse_quantity(cells[5], lineno, "max_fanout");
        r.source_tag = cells[6];
        if (r.num_ste == 0)
            throw Error("records csv line " + std::to_string(lineno) + ": num_ste must be >= 1");
        out.push_back(std::move(r));
    }
    if (!header_seen) throw Error("records csv: missing header row");
    return out;
}

std::vector<Record> load_records(const std::string& path) {
    try {
        return parse_records_csv(read_text_file(path));
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

std::string serialize_records_csv(const std::vector<Record>& records,
                                  const std::vector<std::string>& comments) {
    std::ostringstream out;
    for (const auto& c : comments) out << c << "\n";
    out << kRecordCsvHeader << "\n";
    for (const auto& r : records) {
        if (r.source_tag.find_first_of(",\r\n") != std::string::npos)
            throw Error("source_tag '" + r.source_tag + "' cannot contain commas or newlines");
        out << r.num_ste << ',' << r.fanout_limit << ',' << r.luts << ',' << r.ffs << ','
            << r.mem_bits << ',' << r.max_fanout << ',' << r.source_tag << "\n";
    }
    return out.str();
}

void save_records(const std::string& path, const std::vector<Record>& records,
                  const std::vector<std::string>& comments) {
    write_text_file(path, serialize_records_csv(records, comments));
}

TrainTestSplit split_train_test(const std::vector<Record>& records, double test_fraction,
                                std::uint64_t seed) {
    if (records.empty()) throw Error("split: records must be non-empty");
    if (!(test_fraction >= 0.0 && test_fraction < 1.0))
        throw Error("split: test_fraction must be in [0, 1)");
    const std::size_t n = records.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    SplitMix64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.next_below(i + 1));
        std::swap(idx[i], idx[j]);
    }
    const auto n_test = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(n)));
    TrainTestSplit split;
    split.test.reserve(n_test);
    split.train.reserve(n - n_test);
    for (std::size_t i = 0; i < n; ++i)
        (i < n_test ? split.test : split.train).push_back(records[idx[i]]);
    return split;
}

Metrics compute_metrics(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size()) throw Error("metrics: length mismatch");
    if (predicted.empty()) throw Error("metrics: need at least one pair");
    const std::size_t n = predicted.size();
    double abs_sum = 0.0, sq_sum = 0.0, ape_sum = 0.0;
    std::size_t excluded = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = predicted[i] - actual[i];
        abs_sum += std::fabs(d);
        sq_sum += d * d;
        if (actual[i] != 0.0)
            ape_sum += std::fabs(d) / std::fabs(actual[i]);
        else
            ++excluded;
    }
    Metrics m;
    m.n = n;
    m.mae = abs_sum / static_cast<double>(n);
    m.rmse = std::sqrt(sq_sum / static_cast<double>(n));
    m.mape_excluded = excluded;
    if (excluded < n) m.mape = 100.0 * ape_sum / static_cast<double>(n - excluded);
    return m;
}

}  // namespace ovfit
