#include "kiosk/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "kiosk/errors.hpp"

namespace kiosk {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t begin = 0;
    for (;;) {
        const std::size_t comma = line.find(',', begin);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(begin));
            return fields;
        }
        fields.push_back(line.substr(begin, comma - begin));
        begin = comma + 1;
    }
}

class RowParser {
public:
    RowParser(std::size_t line, const std::vector<std::string_view>& fields) : line_(line), fields_(fields) {}

    double number(std::size_t col) const {
        double v = 0.0;
        const auto f = fields_[col];
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) fail(col, "a finite number");
        return v;
    }

    std::optional<double> optional_number(std::size_t col) const {
        if (fields_[col].empty()) return std::nullopt;
        return number(col);
    }

    std::uint64_t count(std::size_t col) const {
        std::uint64_t v = 0;
        const auto f = fields_[col];
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) fail(col, "a non-negative integer");
        return v;
    }

    bool flag(std::size_t col) const {
        if (fields_[col] == "0") return false;
        if (fields_[col] == "1") return true;
        fail(col, "0 or 1");
    }

    [[noreturn]] void fail(std::size_t col, std::string_view expected) const {
        std::ostringstream msg;
        msg << "line " << line_ << ", column " << (col + 1) << " (" << kSweepColumns[col] << "): expected "
            << expected << ", got '" << fields_[col] << "'";
        throw DataError(msg.str());
    }

private:
    std::size_t line_;
    const std::vector<std::string_view>& fields_;
};

ordered_json optional_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json extremum_json(const std::optional<Extremum>& e) {
    if (!e) return nullptr;
    return ordered_json{{"value", e->value},
                        {"cell_index", e->cell_index},
                        {"u", e->cell.u},
                        {"pi", e->cell.pi},
                        {"d", e->cell.d},
                        {"m", e->cell.m}};
}

ordered_json extrema_json(const MetricExtrema& e) {
    return ordered_json{{"min", extremum_json(e.min)}, {"max", extremum_json(e.max)}};
}

}  // namespace

std::string format_number(double value) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(n));
}

void write_sweep_header(std::ostream& out) {
    for (std::size_t i = 0; i < kSweepColumns.size(); ++i) {
        if (i) out << ',';
        out << kSweepColumns[i];
    }
    out << '\n';
}

void write_sweep_row(std::ostream& out, const CellResult& r) {
    out << r.cell_index << ',' << format_number(r.cell.u) << ',' << format_number(r.cell.pi) << ','
        << format_number(r.cell.d) << ',' << format_number(r.cell.m) << ',' << r.customers << ','
        << r.display_users << ',' << r.buyers_baseline << ',' << r.buyers_display_scenario << ','
        << r.buyers_among_display_users << ',' << r.counterfactual_buyers_among_display_users << ','
        << format_number(r.margin_sum_baseline) << ',' << format_number(r.margin_sum_display_scenario) << ','
        << format_number(r.turnover_baseline) << ',' << format_number(r.turnover_display_scenario) << ','
        << format_optional(r.r_customers_mc) << ',' << format_optional(r.r_margin_mc) << ','
        << format_number(r.analytic.pii) << ',' << format_number(r.analytic.pi_eff) << ','
        << format_number(r.analytic.r_customers) << ',' << format_number(r.analytic.r_margin) << ','
        << (r.analytic.clamp_active ? '1' : '0') << ',' << r.seed << '\n';
}

void write_sweep_csv(std::ostream& out, std::span<const CellResult> results) {
    write_sweep_header(out);
    for (const auto& r : results) write_sweep_row(out, r);
}

std::vector<CellResult> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("line 1: empty input, expected a sweep CSV header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    for (std::size_t i = 0; i < kSweepColumns.size(); ++i) {
        if (i >= header.size() || header[i] != kSweepColumns[i]) {
            throw DataError("line 1, column " + std::to_string(i + 1) + ": expected header '" +
                            std::string(kSweepColumns[i]) + "'");
        }
    }
    if (header.size() != kSweepColumns.size()) {
        throw DataError("line 1: expected " + std::to_string(kSweepColumns.size()) + " columns, got " +
                        std::to_string(header.size()));
    }

    std::vector<CellResult> results;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != kSweepColumns.size()) {
            throw DataError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(kSweepColumns.size()) + " fields, got " + std::to_string(fields.size()));
        }
        const RowParser p(line_no, fields);
        CellResult r;
        r.cell_index = p.count(0);
        r.cell = {p.number(1), p.number(2), p.number(3), p.number(4)};
        r.customers = p.count(5);
        r.display_users = p.count(6);
        r.buyers_baseline = p.count(7);
        r.buyers_display_scenario = p.count(8);
        r.buyers_among_display_users = p.count(9);
        r.counterfactual_buyers_among_display_users = p.count(10);
        r.margin_sum_baseline = p.number(11);
        r.margin_sum_display_scenario = p.number(12);
        r.turnover_baseline = p.number(13);
        r.turnover_display_scenario = p.number(14);
        r.r_customers_mc = p.optional_number(15);
        r.r_margin_mc = p.optional_number(16);
        r.analytic.pii = p.number(17);
        r.analytic.pi_eff = p.number(18);
        r.analytic.r_customers = p.number(19);
        r.analytic.r_margin = p.number(20);
        r.analytic.clamp_active = p.flag(21);
        r.seed = p.count(22);
        try {
            r.cell.validate();
        } catch (const DomainError& e) {
            throw DataError("line " + std::to_string(line_no) + ": " + e.what());
        }
        results.push_back(r);
    }
    if (results.empty()) throw DataError("line 2: sweep CSV has a header but no data rows");
    return results;
}

std::string cell_result_to_json(const CellResult& r, int indent) {
    ordered_json j{
        {"cell_index", r.cell_index},
        {"u", r.cell.u},
        {"pi", r.cell.pi},
        {"d", r.cell.d},
        {"m", r.cell.m},
        {"seed", r.seed},
        {"customers", r.customers},
        {"display_users", r.display_users},
        {"buyers_baseline", r.buyers_baseline},
        {"buyers_display_scenario", r.buyers_display_scenario},
        {"buyers_among_display_users", r.buyers_among_display_users},
        {"counterfactual_buyers_among_display_users", r.counterfactual_buyers_among_display_users},
        {"margin_sum_baseline", r.margin_sum_baseline},
        {"margin_sum_display_scenario", r.margin_sum_display_scenario},
        {"turnover_baseline", r.turnover_baseline},
        {"turnover_display_scenario", r.turnover_display_scenario},
        {"display_margin_realized", r.display_margin_realized},
        {"display_margin_counterfactual", r.display_margin_counterfactual},
        {"r_customers", {{"mc", optional_json(r.r_customers_mc)},
                         {"mc_standard_error", optional_json(r.se_r_customers_mc)},
                         {"analytic", r.analytic.r_customers}}},
        {"r_margin", {{"mc", optional_json(r.r_margin_mc)},
                      {"mc_standard_error", optional_json(r.se_r_margin_mc)},
                      {"analytic", r.analytic.r_margin}}},
        {"pii", r.analytic.pii},
        {"pi_eff", r.analytic.pi_eff},
        {"clamp_active", r.analytic.clamp_active},
    };
    return j.dump(indent);
}

std::string summary_to_json(const RunSummary& s, int indent) {
    const auto& t = s.totals;
    ordered_json j{
        {"cells", s.cells},
        {"cells_missing_mc", s.cells_missing_mc},
        {"extrema",
         {{"r_customers_analytic", extrema_json(s.r_customers_analytic)},
          {"r_margin_analytic", extrema_json(s.r_margin_analytic)},
          {"r_customers_mc", extrema_json(s.r_customers_mc)},
          {"r_margin_mc", extrema_json(s.r_margin_mc)}}},
        {"totals",
         {{"customers", t.customers},
          {"display_users", t.display_users},
          {"baseline", {{"buyers", t.buyers_baseline}, {"margin", t.margin_baseline}, {"turnover", t.turnover_baseline}}},
          {"display_scenario",
           {{"buyers", t.buyers_display_scenario},
            {"margin", t.margin_display_scenario},
            {"turnover", t.turnover_display_scenario}}}}},
    };
    return j.dump(indent);
}

void write_aggregate_csv(std::ostream& out, const AggregateCurve& curve) {
    out << (curve.axis == Axis::ByDiscount ? "d" : "pi") << ',' << to_string(curve.metric) << "_mean\n";
    for (const auto& p : curve.points) {
        out << format_number(p.axis_value) << ',' << (std::isnan(p.mean) ? std::string() : format_number(p.mean))
            << '\n';
    }
}

std::string aggregate_file_name(const AggregateCurve& curve) {
    char margin[32];
    std::snprintf(margin, sizeof margin, "%g", curve.margin);
    std::string name = "aggregate_" + std::string(to_string(curve.metric));
    if (curve.source == MetricSource::MonteCarlo) name += "_mc";
    return name + "_" + std::string(to_string(curve.axis)) + "_m" + margin + ".csv";
}

void write_breakeven_csv(std::ostream& out, std::span<const BreakEvenCurve> curves) {
    out << "margin,pi,interval_lo,interval_hi\n";
    for (const auto& curve : curves) {
        for (const auto& point : curve.points) {
            const std::string prefix = format_number(curve.margin) + ',' + format_number(point.pi) + ',';
            if (point.intervals.empty()) {
                out << prefix << ",\n";
                continue;
            }
            for (const auto& iv : point.intervals) {
                out << prefix << format_number(iv.lo) << ',' << format_number(iv.hi) << '\n';
            }
        }
    }
}

std::string manifest_to_json(const RunManifest& m, int indent) {
    ordered_json outputs = ordered_json::array();
    for (const auto& f : m.outputs) {
        outputs.push_back({{"file", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    }
    ordered_json failures = ordered_json::array();
    for (const auto& f : m.failures) {
        failures.push_back({{"cell_index", f.cell_index}, {"error", f.message}});
    }
    ordered_json j{
        {"tool", "kiosk-sim"},
        {"tool_version", m.tool_version},
        {"command", m.command},
        {"config", ordered_json::parse(run_config_to_json(m.config, -1))},
        {"parallelism", m.parallelism},
        {"started_at", m.started_at},
        {"finished_at", m.finished_at},
        {"elapsed_seconds", m.elapsed_seconds},
        {"cells", m.cells},
        {"simulated_customers", m.simulated_customers},
        {"outputs", outputs},
        {"failed_cells", failures},
    };
    return j.dump(indent);
}

}  // namespace kiosk
