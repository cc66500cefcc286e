#include "core/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace cranhet {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

const char* sweep_variable_name(SweepVariable v) {
    return v == SweepVariable::NRrh ? "n_rrh" : "p_max_rrh";
}

SweepVariable sweep_variable_from_name(const std::string& name) {
    if (name == "n_rrh") return SweepVariable::NRrh;
    if (name == "p_max_rrh") return SweepVariable::PMaxRrh;
    throw ParseError("sweep: unknown variable '" + name + "' (expected n_rrh|p_max_rrh)");
}

void SweepSpec::validate() const {
    if (values.empty()) throw InvalidArgError("sweep: values must be nonempty");
    for (size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1]))
            throw InvalidArgError("sweep: values must be strictly increasing");
    if (n_realizations < 1) throw InvalidArgError("sweep: realizations must be >= 1");
    if (concepts.empty()) throw InvalidArgError("sweep: concepts must be nonempty");
    std::set<Concept> seen(concepts.begin(), concepts.end());
    if (seen.size() != concepts.size())
        throw InvalidArgError("sweep: duplicate concepts");
    scenario.validate();
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double parse_double_or_throw(const std::string& what, const std::string& text) {
    try {
        size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw ParseError("");
        return v;
    } catch (...) {
        throw ParseError("sweep: bad numeric value '" + text + "' for " + what);
    }
}

} // namespace

SweepSpec parse_sweep_spec(const std::string& text, const Scenario& base) {
    SweepSpec spec;
    spec.scenario = base;
    std::set<std::string> seen;
    std::istringstream iss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(iss, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("sweep: line " + std::to_string(lineno) + " has no '='");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second)
            throw ParseError("sweep: duplicate key '" + key + "'");

        if (key == "variable") {
            spec.variable = sweep_variable_from_name(value);
        } else if (key == "values") {
            spec.values.clear();
            for (const auto& tok : split_list(value))
                spec.values.push_back(parse_double_or_throw("values", tok));
        } else if (key == "realizations") {
            spec.n_realizations = static_cast<int>(parse_double_or_throw(key, value));
        } else if (key == "seed") {
            try {
                spec.base_seed = std::stoull(value);
            } catch (...) {
                throw ParseError("sweep: bad seed '" + value + "'");
            }
        } else if (key == "concepts") {
            spec.concepts.clear();
            for (const auto& tok : split_list(value))
                spec.concepts.push_back(concept_from_name(tok));
        } else if (key.rfind("scenario.", 0) == 0) {
            scenario_set(spec.scenario, key.substr(9), value);
        } else {
            throw ParseError("sweep: unknown key '" + key + "'");
        }
    }
    spec.validate();
    return spec;
}

SweepSpec load_sweep_spec(const std::string& path, const Scenario& base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sweep spec: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_sweep_spec(buf.str(), base);
}

std::uint64_t sweep_seed(std::uint64_t base, int value_index, int realization, int stream) {
    return derive_seed(base, static_cast<std::uint64_t>(value_index),
                       static_cast<std::uint64_t>(realization),
                       static_cast<std::uint64_t>(stream));
}

Scenario scenario_for_value(const SweepSpec& spec, int value_index) {
    Scenario s = spec.scenario;
    const double v = spec.values[value_index];
    if (spec.variable == SweepVariable::NRrh) {
        const double rounded = std::round(v);
        if (std::abs(v - rounded) > 0 || rounded < 1)
            throw InvalidArgError("sweep: n_rrh values must be positive integers");
        s.n_rrh = static_cast<int>(rounded);
    } else {
        if (!(v > 0)) throw InvalidArgError("sweep: p_max_rrh values must be > 0");
        s.p_max_rrh_w = v;
    }
    s.validate();
    return s;
}

SweepCell solve_cell(const SweepSpec& spec, int value_index, int realization, Concept scheme) {
    SweepCell cell;
    cell.value_index = value_index;
    cell.realization = realization;
    cell.scheme = scheme;

    const Scenario s = scenario_for_value(spec, value_index);
    const auto d = sample_deployment(s, sweep_seed(spec.base_seed, value_index, realization, 0));
    const auto c = sample_channels(d, s, sweep_seed(spec.base_seed, value_index, realization, 1));

    try {
        EquilibriumResult r;
        switch (scheme) {
            case Concept::EqualPower: r = solve_equal_power(s, d, c); break;
            case Concept::Ne: r = solve_ne(s, d, c, spec.eq_opts); break;
            case Concept::Che: r = solve_che(s, d, c, spec.eq_opts).result; break;
        }
        cell.ok = true;
        cell.converged = r.converged;
        cell.type_mean = r.type_mean;
        cell.type_count = r.type_count;
        cell.total = r.total_rate;
    } catch (const SolverError&) {
        cell.ok = false; // skipped and counted, never silently averaged
    }
    return cell;
}

namespace {

struct Welford {
    int n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    double sample_std() const { return n > 1 ? std::sqrt(m2 / (n - 1)) : 0.0; }
};

int kind_sort_key(RateKind k) {
    // alphabetical by name: CRAN, Femto, Macro, Pico, Total
    switch (k) {
        case RateKind::Cran: return 0;
        case RateKind::Femto: return 1;
        case RateKind::Macro: return 2;
        case RateKind::Pico: return 3;
        case RateKind::Total: return 4;
    }
    return 5;
}

int concept_sort_key(Concept c) {
    // alphabetical by name: che, equal, ne
    switch (c) {
        case Concept::Che: return 0;
        case Concept::EqualPower: return 1;
        case Concept::Ne: return 2;
    }
    return 3;
}

void sort_rows(std::vector<SweepRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.value != b.value) return a.value < b.value;
        if (a.scheme != b.scheme)
            return concept_sort_key(a.scheme) < concept_sort_key(b.scheme);
        return kind_sort_key(a.kind) < kind_sort_key(b.kind);
    });
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult out;
    out.variable = spec.variable;

    for (int vi = 0; vi < static_cast<int>(spec.values.size()); ++vi)
        for (int ri = 0; ri < spec.n_realizations; ++ri)
            for (Concept scheme : spec.concepts)
                out.cells.push_back(solve_cell(spec, vi, ri, scheme));

    for (int vi = 0; vi < static_cast<int>(spec.values.size()); ++vi) {
        for (Concept scheme : spec.concepts) {
            std::array<Welford, 4> per_kind;
            Welford total;
            for (const auto& cell : out.cells) {
                if (cell.value_index != vi || cell.scheme != scheme) continue;
                if (!cell.ok) {
                    ++out.n_failed;
                    continue;
                }
                for (int t = 0; t < 4; ++t)
                    if (cell.type_count[t] > 0) per_kind[t].add(cell.type_mean[t]);
                total.add(cell.total);
            }
            for (int t = 0; t < 4; ++t) {
                if (per_kind[t].n == 0) continue;
                SweepRow row;
                row.value = spec.values[vi];
                row.scheme = scheme;
                row.kind = static_cast<RateKind>(t);
                row.mean_rate = per_kind[t].mean;
                row.std_rate = per_kind[t].sample_std();
                row.n = per_kind[t].n;
                out.rows.push_back(row);
            }
            if (total.n > 0) {
                SweepRow row;
                row.value = spec.values[vi];
                row.scheme = scheme;
                row.kind = RateKind::Total;
                row.mean_rate = total.mean;
                row.std_rate = total.sample_std();
                row.n = total.n;
                out.rows.push_back(row);
            }
        }
    }
    sort_rows(out.rows);
    return out;
}

std::string emit_csv(const SweepResult& result) {
    std::string out = "variable,value,concept,kind,mean_rate_bps,std_rate_bps,n\n";
    for (const auto& row : result.rows) {
        out += sweep_variable_name(result.variable);
        out += ',';
        out += format_double(row.value);
        out += ',';
        out += concept_name(row.scheme);
        out += ',';
        out += rate_kind_name(row.kind);
        out += ',';
        out += format_double(row.mean_rate);
        out += ',';
        out += format_double(row.std_rate);
        out += ',';
        out += std::to_string(row.n);
        out += '\n';
    }
    return out;
}

void emit_csv_file(const SweepResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open CSV for writing: " + path);
    out << emit_csv(result);
    if (!out) throw IoError("write failed on CSV: " + path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_csv_double(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError("csv: bad number '" + s + "'");
    return v;
}

RateKind rate_kind_from_name(const std::string& name) {
    for (RateKind k : {RateKind::Cran, RateKind::Macro, RateKind::Pico, RateKind::Femto,
                       RateKind::Total})
        if (name == rate_kind_name(k)) return k;
    throw ParseError("csv: unknown kind '" + name + "'");
}

} // namespace

SweepResult parse_sweep_csv(const std::string& text) {
    std::istringstream iss(text);
    std::string line;
    if (!std::getline(iss, line) ||
        trim(line) != "variable,value,concept,kind,mean_rate_bps,std_rate_bps,n")
        throw ParseError("csv: missing or malformed header");
    SweepResult out;
    bool have_variable = false;
    while (std::getline(iss, line)) {
        if (trim(line).empty()) continue;
        const auto f = split_csv_line(trim(line));
        if (f.size() != 7) throw ParseError("csv: expected 7 fields, got row '" + line + "'");
        const SweepVariable var = sweep_variable_from_name(f[0]);
        if (!have_variable) {
            out.variable = var;
            have_variable = true;
        } else if (var != out.variable) {
            throw ParseError("csv: mixed sweep variables");
        }
        SweepRow row;
        row.value = parse_csv_double(f[1]);
        row.scheme = concept_from_name(f[2]);
        row.kind = rate_kind_from_name(f[3]);
        row.mean_rate = parse_csv_double(f[4]);
        row.std_rate = parse_csv_double(f[5]);
        row.n = static_cast<int>(parse_csv_double(f[6]));
        out.rows.push_back(row);
    }
    return out;
}

bool VerifyReport::pass() const {
    if (lines.empty()) return false;
    int converged = 0;
    for (const auto& l : lines) {
        if (l.che_improvement > tol) return false;
        if (!l.ne_converged) continue;
        ++converged;
        if (l.ne_improvement > tol) return false;
    }
    const double frac_nonconverged =
        static_cast<double>(lines.size() - converged) / lines.size();
    return frac_nonconverged <= 0.10;
}

std::string VerifyReport::text() const {
    std::string out;
    for (const auto& l : lines) {
        out += "seed=" + std::to_string(l.seed);
        out += l.ne_converged ? " ne_converged=1" : " ne_converged=0";
        out += " ne_improvement=" + format_double(l.ne_improvement);
        out += " che_improvement=" + format_double(l.che_improvement);
        out += '\n';
    }
    out += "nonconverged=" + std::to_string(ne_nonconverged);
    out += " tol=" + format_double(tol);
    out += pass() ? " result=PASS\n" : " result=FAIL\n";
    return out;
}

VerifyReport run_verify(const Scenario& s, std::uint64_t base_seed, int n_seeds, double tol,
                        const EquilibriumOptions& opts) {
    if (n_seeds < 1) throw InvalidArgError("verify: need at least one seed");
    VerifyReport report;
    report.tol = tol;
    for (int i = 0; i < n_seeds; ++i) {
        VerifyReport::Line line;
        line.seed = base_seed + static_cast<std::uint64_t>(i);
        const auto d = sample_deployment(s, derive_seed(line.seed, 0, 0, 0));
        const auto c = sample_channels(d, s, derive_seed(line.seed, 0, 0, 1));

        const auto ne = solve_ne(s, d, c, opts);
        line.ne_converged = ne.converged;
        line.ne_improvement = verify_ne(ne, s, d, c, opts);
        if (!ne.converged) ++report.ne_nonconverged;

        const auto che = solve_che(s, d, c, opts);
        line.che_improvement = verify_che(che.result, che.table, s, d, c, opts);

        report.lines.push_back(line);
    }
    return report;
}

} // namespace cranhet
