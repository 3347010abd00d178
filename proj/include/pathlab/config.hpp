#pragma once

// Experiment description for the command-line front end: a JSON document with
// nested sections, validated into an ExperimentSpec with defaults applied.
//
//   {
//     "command": "equivalence",
//     "params":  {"a": 1, "b": 2, "hbar": 1},
//     "lattice": {"T": 1, "N": 32},
//     "sampler": {"n_samples": 100000, "seed": 42, "x0": 0, ...},
//     "branch": "PLUS",
//     "observables": ["MIDPOINT_SQ", "MEAN_SQ", "ENDPOINT"],
//     "hbar_list": [0.5, 0.2, 0.1, 0.05],
//     "kink": {"alpha": 0},
//     "threads": 0,
//     "output_path": "equivalence.csv",
//     "format": "CSV"
//   }

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pathlab/analysis.hpp"
#include "pathlab/core.hpp"
#include "pathlab/sampler.hpp"

namespace pathlab::cli {

enum class Command { Equivalence, ClassicalLimit, Bvp, Kink, ItoCheck, JacobianCheck };
enum class Format { Csv, Json };

[[nodiscard]] std::string_view to_string(Command c) noexcept;
[[nodiscard]] std::string_view to_string(Format f) noexcept;

struct ExperimentSpec {
    Command command = Command::Equivalence;
    double a = 1.0;
    double b = 2.0;
    double hbar = 1.0;
    double T = 1.0;
    std::size_t N = 32;
    SamplerConfig sampler;
    bool proposal_width_set = false;  // tuned on pilot chains when absent
    Branch branch = Branch::Plus;
    std::vector<ObservableId> observables{ObservableId::MidpointSq, ObservableId::MeanSq,
                                          ObservableId::Endpoint};
    std::optional<std::vector<double>> hbar_list;
    double kink_alpha = 0.0;
    std::string output_path;  // empty: "<command>.<ext>"
    Format format = Format::Csv;

    [[nodiscard]] ModelParams params() const { return make_params(a, b, hbar); }
    [[nodiscard]] Lattice lattice() const { return make_lattice(T, N); }

    friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

/// Malformed document; line and column are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column);
    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Well-formed document that violates a constraint; field is the dotted key.
class ValidationError : public std::runtime_error {
public:
    ValidationError(const std::string& field, const std::string& message);
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

[[nodiscard]] nlohmann::json parse_document(std::string_view text);

/// Applies "dotted.key=value". The value is read as JSON when it parses,
/// otherwise as a plain string.
void apply_override(nlohmann::json& document, std::string_view assignment);

[[nodiscard]] ExperimentSpec validate(const nlohmann::json& document);

[[nodiscard]] ExperimentSpec parse_config(std::string_view text);

/// Full document with every field explicit; parse_config(serialize(s)) == s.
[[nodiscard]] nlohmann::json serialize(const ExperimentSpec& spec);

}  // namespace pathlab::cli
