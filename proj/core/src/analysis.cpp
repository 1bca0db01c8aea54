/*
 * Copyright 2026 The pdfn-rc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pdfn/analysis.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace pdfn {

namespace {

std::string num(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Seconds to nanoseconds without 6e-9 * 1e9 = 6.000000000000001 artefacts.
std::string ns(double seconds)
{
    return num(std::round(seconds * 1e18) / 1e9);
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& what)
{
    T value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::runtime_error("bad " + what + " '" + text + "'");
    }
    return value;
}

} // namespace

PulseProgram sequence_program(std::uint64_t id, std::size_t length)
{
    PulseProgram bits(length);
    for (std::size_t i = 0; i < length; ++i) {
        bits[i] = static_cast<std::uint8_t>((id >> (length - 1 - i)) & 1u);
    }
    return bits;
}

SeparabilityTable final_state_sweep(std::size_t length, std::span<const double> tau_grid,
                                    const DeviceParams& params, double v_write)
{
    if (length == 0 || length > 20) {
        throw std::invalid_argument("final_state_sweep: sequence length must be in 1..20");
    }
    if (tau_grid.empty()) {
        throw std::invalid_argument("final_state_sweep: empty tau grid");
    }
    SeparabilityTable table;
    table.seq_len = length;
    table.tau_grid.assign(tau_grid.begin(), tau_grid.end());
    table.states.resize(table.sequences() * tau_grid.size());
    NoCycleNoise quiet;
    for (std::size_t t = 0; t < tau_grid.size(); ++t) {
        DeviceParams p = params;
        p.tau = tau_grid[t];
        p.validate();
        for (std::size_t s = 0; s < table.sequences(); ++s) {
            MemristorState state = MemristorState::nominal(p);
            for (std::uint8_t bit : sequence_program(s, length)) {
                state = step(state, bit ? v_write : 0.0, p, quiet);
            }
            table.states[s * tau_grid.size() + t] = state.x;
        }
    }
    return table;
}

std::size_t unique_bins(std::span<const double> currents, const QuantizerConfig& q)
{
    std::map<std::uint32_t, std::size_t> counts;
    for (double c : currents) {
        ++counts[quantize_bin(c, q)];
    }
    return static_cast<std::size_t>(
        std::count_if(counts.begin(), counts.end(), [](const auto& kv) { return kv.second == 1; }));
}

std::vector<OccupancyCell> bin_occupancy(const SeparabilityTable& table, std::span<const int> bits_grid,
                                         const DeviceParams& params, double v_read, double v_write)
{
    std::vector<OccupancyCell> cells;
    const ReadLine line = read_line(v_read, params);
    for (std::size_t t = 0; t < table.tau_grid.size(); ++t) {
        DeviceParams p = params;
        p.tau = table.tau_grid[t];
        const auto [lo, hi] = reachable_range(p, v_read, v_write, table.seq_len);
        std::vector<double> currents(table.sequences());
        for (std::size_t s = 0; s < currents.size(); ++s) {
            currents[s] = line.current(table.at(s, t));
        }
        for (int bits : bits_grid) {
            const QuantizerConfig q{bits, lo, hi};
            q.validate();
            std::vector<std::uint32_t> bins(currents.size());
            std::transform(currents.begin(), currents.end(), bins.begin(),
                           [&](double c) { return quantize_bin(c, q); });
            std::sort(bins.begin(), bins.end());
            const auto occupied =
                static_cast<std::size_t>(std::unique(bins.begin(), bins.end()) - bins.begin());
            cells.push_back({p.tau, bits, unique_bins(currents, q), occupied});
        }
    }
    return cells;
}

std::vector<double> popcount_spread(const SeparabilityTable& table)
{
    std::vector<double> spread(table.tau_grid.size(), 0.0);
    for (std::size_t t = 0; t < table.tau_grid.size(); ++t) {
        std::vector<double> lo(table.seq_len + 1, 1e300);
        std::vector<double> hi(table.seq_len + 1, -1e300);
        for (std::size_t s = 0; s < table.sequences(); ++s) {
            const auto ones = static_cast<std::size_t>(std::popcount(s));
            lo[ones] = std::min(lo[ones], table.at(s, t));
            hi[ones] = std::max(hi[ones], table.at(s, t));
        }
        for (std::size_t g = 0; g <= table.seq_len; ++g) {
            spread[t] = std::max(spread[t], hi[g] - lo[g]);
        }
    }
    return spread;
}

std::string records_header()
{
    return "dimension,parity,sections,bits,tau_ns,variability_pct,seed,accuracy,runtime_s,"
           "config_hash,schema_version";
}

std::string format_record(const SweepRecord& r)
{
    std::string line;
    line += to_string(r.dimension);
    line += ',';
    line += r.parity ? "1" : "0";
    line += ',' + std::to_string(r.sections);
    line += ',' + std::to_string(r.bits);
    line += ',' + num(r.tau_ns);
    line += ',' + num(r.variability_pct);
    line += ',' + std::to_string(r.seed);
    line += ',' + num(r.accuracy);
    line += ',';
    if (r.runtime_s) {
        line += num(*r.runtime_s);
    }
    line += ',' + r.config_hash;
    line += ',' + std::to_string(r.schema_version);
    return line;
}

void write_records_csv(std::ostream& out, std::span<const SweepRecord> records)
{
    out << records_header() << '\n';
    for (const auto& r : records) {
        out << format_record(r) << '\n';
    }
}

std::vector<SweepRecord> read_records_csv(std::istream& in, const std::string& origin)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError(origin + ": empty records file");
    }
    if (line != records_header()) {
        throw SchemaError(origin + ": unexpected records header '" + line + "'");
    }
    std::vector<SweepRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const std::string where = origin + ":" + std::to_string(line_no);
        const auto f = split(line);
        if (f.size() != 11) {
            throw std::runtime_error(where + ": expected 11 fields, got " + std::to_string(f.size()));
        }
        SweepRecord r;
        r.schema_version = parse_number<int>(f[10], "schema_version");
        if (r.schema_version != kRecordSchemaVersion) {
            throw SchemaError(where + ": schema version " + f[10] + " is not " +
                              std::to_string(kRecordSchemaVersion));
        }
        try {
            r.dimension = parse_dimension(f[0]);
            if (f[1] != "0" && f[1] != "1") {
                throw std::runtime_error("bad parity '" + f[1] + "'");
            }
            r.parity = f[1] == "1";
            r.sections = parse_number<std::size_t>(f[2], "sections");
            r.bits = parse_number<int>(f[3], "bits");
            r.tau_ns = parse_number<double>(f[4], "tau_ns");
            r.variability_pct = parse_number<double>(f[5], "variability_pct");
            r.seed = parse_number<std::uint64_t>(f[6], "seed");
            r.accuracy = parse_number<double>(f[7], "accuracy");
            if (!f[8].empty()) {
                r.runtime_s = parse_number<double>(f[8], "runtime_s");
            }
        } catch (const std::exception& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
        r.config_hash = f[9];
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<FactorEffect> main_effects(std::span<const SweepRecord> records)
{
    if (records.empty()) {
        throw std::invalid_argument("main_effects: no records");
    }
    struct Factor {
        const char* name;
        std::function<double(const SweepRecord&)> key;
        std::function<std::string(const SweepRecord&)> label;
    };
    const std::vector<Factor> factors = {
        {"dimension", [](const SweepRecord& r) { return r.dimension == Dimension::OneD ? 1.0 : 2.0; },
         [](const SweepRecord& r) { return to_string(r.dimension); }},
        {"parity", [](const SweepRecord& r) { return r.parity ? 1.0 : 0.0; },
         [](const SweepRecord& r) { return std::string(r.parity ? "1" : "0"); }},
        {"sections", [](const SweepRecord& r) { return static_cast<double>(r.sections); },
         [](const SweepRecord& r) { return std::to_string(r.sections); }},
        {"bits", [](const SweepRecord& r) { return static_cast<double>(r.bits); },
         [](const SweepRecord& r) { return std::to_string(r.bits); }},
        {"tau_ns", [](const SweepRecord& r) { return r.tau_ns; },
         [](const SweepRecord& r) { return num(r.tau_ns); }},
        {"variability_pct", [](const SweepRecord& r) { return r.variability_pct; },
         [](const SweepRecord& r) { return num(r.variability_pct); }},
    };
    std::vector<FactorEffect> effects;
    for (const auto& f : factors) {
        std::map<double, std::pair<std::string, std::vector<double>>> groups;
        for (const auto& r : records) {
            auto& g = groups[f.key(r)];
            g.first = f.label(r);
            g.second.push_back(r.accuracy);
        }
        FactorEffect effect{f.name, {}, 0.0};
        double lo = 1e300;
        double hi = -1e300;
        for (const auto& [key, group] : groups) {
            double sum = 0.0;
            for (double a : group.second) {
                sum += a;
            }
            const double mean = sum / static_cast<double>(group.second.size());
            effect.levels.push_back({group.first, mean, group.second.size()});
            lo = std::min(lo, mean);
            hi = std::max(hi, mean);
        }
        effect.span = hi - lo;
        effects.push_back(std::move(effect));
    }
    std::stable_sort(effects.begin(), effects.end(),
                     [](const FactorEffect& a, const FactorEffect& b) { return a.span > b.span; });
    return effects;
}

void write_effects_csv(std::ostream& out, std::span<const FactorEffect> effects)
{
    out << "factor,rank,level,count,mean_accuracy,span\n";
    for (std::size_t i = 0; i < effects.size(); ++i) {
        for (const auto& level : effects[i].levels) {
            out << effects[i].factor << ',' << (i + 1) << ',' << level.level << ',' << level.count << ','
                << num(level.mean) << ',' << num(effects[i].span) << '\n';
        }
    }
}

void write_separability_csv(std::ostream& out, const SeparabilityTable& table)
{
    out << "tau_ns,sequence_id,sequence,final_x\n";
    for (std::size_t t = 0; t < table.tau_grid.size(); ++t) {
        for (std::size_t s = 0; s < table.sequences(); ++s) {
            std::string bits;
            for (std::uint8_t b : sequence_program(s, table.seq_len)) {
                bits += b ? '1' : '0';
            }
            out << ns(table.tau_grid[t]) << ',' << s << ',' << bits << ',' << num(table.at(s, t))
                << '\n';
        }
    }
}

void write_occupancy_csv(std::ostream& out, std::span<const OccupancyCell> cells)
{
    out << "tau_ns,bits,unique_states,occupied_bins\n";
    for (const auto& c : cells) {
        out << ns(c.tau) << ',' << c.bits << ',' << c.unique_states << ',' << c.occupied_bins
            << '\n';
    }
}

} // namespace pdfn
