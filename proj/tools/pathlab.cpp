// pathlab run [config.json] [--set key=value ...] [--output-dir DIR]

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "pathlab/config.hpp"
#include "pathlab/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lattice path-integral experiments for the quartic double well"};
    app.require_subcommand(1);

    std::string config_file;
    std::vector<std::string> overrides;
    std::string output_dir;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "Run the experiment described by a config document");
    run->add_option("config", config_file, "JSON config file (omit to start from defaults)")
        ->check(CLI::ExistingFile);
    run->add_option("--set", overrides, "Override a field, e.g. --set lattice.N=64")
        ->allow_extra_args(false);
    run->add_option("-o,--output-dir", output_dir,
                    std::string("Output directory (default: $") + pathlab::cli::kOutputDirEnv +
                        " or the working directory)");
    run->add_flag("-q,--quiet", quiet, "Suppress the summary line");

    CLI11_PARSE(app, argc, argv);

    using namespace pathlab::cli;
    ExperimentSpec spec;
    try {
        nlohmann::json doc = config_file.empty() ? nlohmann::json::object()
                                                 : parse_document(read_file(config_file));
        for (const auto& o : overrides) apply_override(doc, o);
        spec = validate(doc);
    } catch (const ParseError& e) {
        std::cerr << "parse error at line " << e.line() << ", column " << e.column() << ": "
                  << e.what() << "\n";
        return kExitOperational;
    } catch (const ValidationError& e) {
        std::cerr << "invalid field '" << e.field() << "': " << e.what() << "\n";
        return kExitOperational;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOperational;
    }

    const auto result = execute(spec, output_dir);
    if (result.exit_status == kExitOperational) {
        std::cerr << result.summary << "\n";
    } else if (!quiet) {
        std::cout << result.summary << "\n"
                  << "results:  " << result.results_file.string() << "\n"
                  << "metadata: " << result.metadata_file.string() << "\n";
    }
    return result.exit_status;
}
