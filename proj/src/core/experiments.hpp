#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/equilibrium.hpp"
#include "core/scenario.hpp"

namespace cranhet {

// Shortest round-trip decimal encoding (std::to_chars).
std::string format_double(double v);

enum class SweepVariable { NRrh = 0, PMaxRrh = 1 };

const char* sweep_variable_name(SweepVariable v); // "n_rrh" / "p_max_rrh"
SweepVariable sweep_variable_from_name(const std::string& name);

// A Monte Carlo sweep over one scenario variable.
struct SweepSpec {
    SweepVariable variable = SweepVariable::NRrh;
    std::vector<double> values; // nonempty, strictly increasing
    int n_realizations = 1;
    std::uint64_t base_seed = 1;
    std::vector<Concept> concepts; // nonempty, no duplicates
    Scenario scenario;             // base scenario the sweep perturbs
    EquilibriumOptions eq_opts;

    void validate() const;
};

// Flat `key = value` format: variable, values, realizations, seed, concepts,
// plus `scenario.<field>` overrides applied to the base scenario.
SweepSpec parse_sweep_spec(const std::string& text, const Scenario& base);
SweepSpec load_sweep_spec(const std::string& path, const Scenario& base);

// One solved (value, realization, concept) cell.
struct SweepCell {
    int value_index = 0;
    int realization = 0;
    Concept scheme = Concept::EqualPower;
    bool ok = false; // false when the inner solver failed; excluded from stats
    bool converged = false;
    std::array<double, 4> type_mean{};
    std::array<int, 4> type_count{};
    double total = 0.0;
};

struct SweepRow {
    double value = 0.0;
    Concept scheme = Concept::EqualPower;
    RateKind kind = RateKind::Total;
    double mean_rate = 0.0;
    double std_rate = 0.0; // sample std over realizations
    int n = 0;

    bool operator==(const SweepRow& other) const = default;
};

struct SweepResult {
    SweepVariable variable = SweepVariable::NRrh;
    std::vector<SweepRow> rows;   // sorted by (value, concept name, kind name)
    std::vector<SweepCell> cells; // canonical (value, realization, concept) order
    int n_failed = 0;
};

// Derived deterministically from (base, value index, realization, stream);
// shuffling execution order cannot change any emitted number.
std::uint64_t sweep_seed(std::uint64_t base, int value_index, int realization, int stream);

// Scenario for one swept value (validates that n_rrh values are integral).
Scenario scenario_for_value(const SweepSpec& spec, int value_index);

SweepCell solve_cell(const SweepSpec& spec, int value_index, int realization, Concept scheme);

SweepResult run_sweep(const SweepSpec& spec);

// Header `variable,value,concept,kind,mean_rate_bps,std_rate_bps,n`; floats as
// shortest round-trip decimals.
std::string emit_csv(const SweepResult& result);
void emit_csv_file(const SweepResult& result, const std::string& path);

// Inverse of emit_csv for the aggregate rows (cells are not serialized).
SweepResult parse_sweep_csv(const std::string& text);

// Equilibrium certificates over a batch of seeds (the CLI `verify` command).
struct VerifyReport {
    struct Line {
        std::uint64_t seed = 0;
        bool ne_converged = false;
        double ne_improvement = 0.0;
        double che_improvement = 0.0;
    };
    std::vector<Line> lines;
    int ne_nonconverged = 0;
    double tol = 1e-6;

    bool pass() const;      // all converged runs within tol, <= 10% non-converged
    std::string text() const;
};

VerifyReport run_verify(const Scenario& s, std::uint64_t base_seed, int n_seeds, double tol,
                        const EquilibriumOptions& opts = {});

} // namespace cranhet
