#include "pathlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pathlab::cli {

using nlohmann::json;

std::string_view to_string(Command c) noexcept {
    switch (c) {
        case Command::Equivalence: return "equivalence";
        case Command::ClassicalLimit: return "classical-limit";
        case Command::Bvp: return "bvp";
        case Command::Kink: return "kink";
        case Command::ItoCheck: return "ito-check";
        case Command::JacobianCheck: return "jacobian-check";
    }
    return "unknown";
}

std::string_view to_string(Format f) noexcept { return f == Format::Csv ? "CSV" : "JSON"; }

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error("config parse error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

ValidationError::ValidationError(const std::string& field, const std::string& message)
    : std::runtime_error("invalid config field '" + field + "': " + message), field_(field) {}

json parse_document(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points just past the offending character
        const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i < offset; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError(e.what(), line, column);
    }
}

void apply_override(json& document, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ValidationError(std::string(assignment), "override must look like key=value");
    const std::string key(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }

    if (!document.is_object()) document = json::object();
    json* node = &document;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
        if (part.empty()) throw ValidationError(key, "empty path component in override");
        if (dot == std::string::npos) {
            (*node)[part] = std::move(value);
            return;
        }
        json& child = (*node)[part];
        if (child.is_null()) child = json::object();
        if (!child.is_object()) throw ValidationError(key, "'" + part + "' is not a section");
        node = &child;
        start = dot + 1;
    }
}

namespace {

void reject_unknown(const json& obj, const std::string& prefix, std::set<std::string> known) {
    for (const auto& [k, _] : obj.items())
        if (!known.contains(k)) throw ValidationError(prefix + k, "unknown key");
}

const json* section(const json& doc, const char* name) {
    if (!doc.contains(name)) return nullptr;
    const json& s = doc.at(name);
    if (!s.is_object()) throw ValidationError(name, "must be an object");
    return &s;
}

double number(const json& obj, const std::string& field, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ValidationError(field, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(field, "must be finite");
    return d;
}

std::uint64_t integer(const json& obj, const std::string& field, const char* key,
                      std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        if (v.get<std::int64_t>() < 0) throw ValidationError(field, "must be non-negative");
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ValidationError(field, "must be a non-negative integer");
}

std::string text(const json& obj, const std::string& field, const char* key,
                 const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ValidationError(field, "must be a string");
    return v.get<std::string>();
}

Command parse_command(const std::string& s) {
    for (auto c : {Command::Equivalence, Command::ClassicalLimit, Command::Bvp, Command::Kink,
                   Command::ItoCheck, Command::JacobianCheck})
        if (s == to_string(c)) return c;
    throw ValidationError("command", "unknown command '" + s + "'");
}

}  // namespace

ExperimentSpec validate(const json& doc) {
    if (!doc.is_object()) throw ValidationError("<root>", "config must be a JSON object");
    reject_unknown(doc, "",
                   {"command", "params", "lattice", "sampler", "branch", "observables",
                    "hbar_list", "kink", "threads", "output_path", "format"});

    ExperimentSpec spec;
    if (!doc.contains("command")) throw ValidationError("command", "is required");
    spec.command = parse_command(text(doc, "command", "command", ""));

    static const json empty = json::object();
    const json& params = section(doc, "params") ? *section(doc, "params") : empty;
    reject_unknown(params, "params.", {"a", "b", "hbar"});
    spec.a = number(params, "params.a", "a", spec.a);
    spec.b = number(params, "params.b", "b", spec.b);
    spec.hbar = number(params, "params.hbar", "hbar", spec.hbar);
    if (!(spec.a > 0.0)) throw ValidationError("params.a", "must be positive");
    if (!(spec.b >= 0.0)) throw ValidationError("params.b", "must be non-negative");
    if (!(spec.hbar > 0.0)) throw ValidationError("params.hbar", "must be positive");

    const json& lattice = section(doc, "lattice") ? *section(doc, "lattice") : empty;
    reject_unknown(lattice, "lattice.", {"T", "N"});
    spec.T = number(lattice, "lattice.T", "T", spec.T);
    spec.N = integer(lattice, "lattice.N", "N", spec.N);
    if (!(spec.T > 0.0)) throw ValidationError("lattice.T", "must be positive");
    if (spec.N < 2) throw ValidationError("lattice.N", "must be at least 2");

    const json& sampler = section(doc, "sampler") ? *section(doc, "sampler") : empty;
    reject_unknown(sampler, "sampler.",
                   {"n_samples", "n_burnin", "n_thin", "proposal_width", "seed", "x0",
                    "blowup_threshold", "max_blowup_fraction", "n_chains"});
    auto& sc = spec.sampler;
    sc.n_samples = integer(sampler, "sampler.n_samples", "n_samples", sc.n_samples);
    sc.n_burnin = integer(sampler, "sampler.n_burnin", "n_burnin", sc.n_burnin);
    sc.n_thin = integer(sampler, "sampler.n_thin", "n_thin", sc.n_thin);
    sc.seed = integer(sampler, "sampler.seed", "seed", sc.seed);
    sc.x0 = number(sampler, "sampler.x0", "x0", sc.x0);
    sc.blowup_threshold =
        number(sampler, "sampler.blowup_threshold", "blowup_threshold", sc.blowup_threshold);
    sc.max_blowup_fraction = number(sampler, "sampler.max_blowup_fraction",
                                    "max_blowup_fraction", sc.max_blowup_fraction);
    sc.n_chains = integer(sampler, "sampler.n_chains", "n_chains", sc.n_chains);
    if (sampler.contains("proposal_width")) {
        spec.proposal_width_set = true;
        sc.proposal_width = number(sampler, "sampler.proposal_width", "proposal_width", 0.0);
    }
    if (sc.n_samples < 1) throw ValidationError("sampler.n_samples", "must be at least 1");
    if (sc.n_thin < 1) throw ValidationError("sampler.n_thin", "must be at least 1");
    if (sc.n_chains < 1) throw ValidationError("sampler.n_chains", "must be at least 1");
    if (!(sc.proposal_width > 0.0))
        throw ValidationError("sampler.proposal_width", "must be positive");
    if (!(sc.blowup_threshold > 0.0))
        throw ValidationError("sampler.blowup_threshold", "must be positive");
    if (!(sc.max_blowup_fraction >= 0.0 && sc.max_blowup_fraction <= 1.0))
        throw ValidationError("sampler.max_blowup_fraction", "must lie in [0, 1]");
    sc.threads = integer(doc, "threads", "threads", 0);

    try {
        spec.branch = parse_branch(text(doc, "branch", "branch", "PLUS"));
    } catch (const std::invalid_argument& e) {
        throw ValidationError("branch", e.what());
    }

    if (doc.contains("observables")) {
        const json& obs = doc.at("observables");
        if (!obs.is_array() || obs.empty())
            throw ValidationError("observables", "must be a non-empty array of names");
        spec.observables.clear();
        for (const auto& o : obs) {
            if (!o.is_string()) throw ValidationError("observables", "entries must be strings");
            try {
                spec.observables.push_back(parse_observable(o.get<std::string>()));
            } catch (const std::invalid_argument& e) {
                throw ValidationError("observables", e.what());
            }
        }
    }
    const bool wants_midpoint = std::find(spec.observables.begin(), spec.observables.end(),
                                          ObservableId::MidpointSq) != spec.observables.end();
    if (spec.command == Command::Equivalence && wants_midpoint && spec.N % 2 != 0)
        throw ValidationError("lattice.N", "MIDPOINT_SQ needs an even N");

    if (doc.contains("hbar_list") && !doc.at("hbar_list").is_null()) {
        const json& hl = doc.at("hbar_list");
        if (!hl.is_array() || hl.empty())
            throw ValidationError("hbar_list", "must be a non-empty array of numbers");
        std::vector<double> list;
        for (const auto& h : hl) {
            if (!h.is_number()) throw ValidationError("hbar_list", "entries must be numbers");
            list.push_back(h.get<double>());
        }
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (!(list[i] > 0.0)) throw ValidationError("hbar_list", "entries must be positive");
            if (i > 0 && !(list[i] < list[i - 1]))
                throw ValidationError("hbar_list", "must be strictly decreasing");
        }
        spec.hbar_list = std::move(list);
    }

    const json& kink = section(doc, "kink") ? *section(doc, "kink") : empty;
    reject_unknown(kink, "kink.", {"alpha"});
    spec.kink_alpha = number(kink, "kink.alpha", "alpha", spec.kink_alpha);

    spec.output_path = text(doc, "output_path", "output_path", "");
    const std::string fmt = text(doc, "format", "format", "CSV");
    if (fmt == "CSV" || fmt == "csv") {
        spec.format = Format::Csv;
    } else if (fmt == "JSON" || fmt == "json") {
        spec.format = Format::Json;
    } else {
        throw ValidationError("format", "must be CSV or JSON");
    }
    return spec;
}

ExperimentSpec parse_config(std::string_view text) { return validate(parse_document(text)); }

json serialize(const ExperimentSpec& spec) {
    const auto& sc = spec.sampler;
    json sampler = {
        {"n_samples", sc.n_samples},
        {"n_burnin", sc.n_burnin},
        {"n_thin", sc.n_thin},
        {"seed", sc.seed},
        {"x0", sc.x0},
        {"blowup_threshold", sc.blowup_threshold},
        {"max_blowup_fraction", sc.max_blowup_fraction},
        {"n_chains", sc.n_chains},
    };
    if (spec.proposal_width_set) sampler["proposal_width"] = sc.proposal_width;

    json observables = json::array();
    for (auto o : spec.observables) observables.push_back(std::string(to_string(o)));

    json doc = {
        {"command", std::string(to_string(spec.command))},
        {"params", {{"a", spec.a}, {"b", spec.b}, {"hbar", spec.hbar}}},
        {"lattice", {{"T", spec.T}, {"N", spec.N}}},
        {"sampler", sampler},
        {"branch", std::string(to_string(spec.branch))},
        {"observables", observables},
        {"kink", {{"alpha", spec.kink_alpha}}},
        {"threads", sc.threads},
        {"output_path", spec.output_path},
        {"format", std::string(to_string(spec.format))},
    };
    if (spec.hbar_list) doc["hbar_list"] = *spec.hbar_list;
    return doc;
}

}  // namespace pathlab::cli
