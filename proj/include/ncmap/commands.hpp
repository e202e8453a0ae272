#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ncmap/config.hpp"
#include "ncmap/errors.hpp"

namespace ncmap {

struct CommandOptions {
    std::optional<std::string> config_path;
    std::optional<std::string> preset;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> sigma;  // shortcut for sigma_free
    std::vector<std::string> overrides;
};

std::vector<std::string> preset_ids();
// text of the shipped presets/sim<id>.cfg
const std::string& preset_text(const std::string& id);
RunConfig preset_config(const std::string& id);

// preset, then config file, then --seed/--out/--sigma, then key=value overrides
RunConfig resolve_config(const CommandOptions& opts);

int cmd_construct(const RunConfig& cfg, std::ostream& out);
int cmd_run(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const std::string& suite, const RunConfig& cfg, int m_max, std::ostream& out);

// catches library errors, prints them on err and returns the mapped exit code
template <class F>
int guarded(F&& f, std::ostream& err) {
    try {
        return f();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace ncmap
