#include <pressflow/pressflow.h>

#include <exception>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/log.hpp"
#include "core/pipeline.hpp"

struct pf_options {
    pressflow::Options options;
};

namespace {

thread_local std::string t_last_error;

pf_status fail(pf_status status, std::string message) {
    t_last_error = std::move(message);
    return status;
}

// Every entry point funnels through here so exceptions never cross the ABI.
template <typename Fn>
pf_status guarded(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return PF_OK;
    } catch (const pressflow::UsageError& e) {
        return fail(PF_USAGE_ERROR, e.what());
    } catch (const pressflow::IoError& e) {
        return fail(PF_IO_ERROR, e.what());
    } catch (const pressflow::DataError& e) {
        return fail(PF_DATA_ERROR, e.what());
    } catch (const std::exception& e) {
        return fail(PF_DATA_ERROR, e.what());
    } catch (...) {
        return fail(PF_DATA_ERROR, "unknown error");
    }
}

} // namespace

extern "C" {

pf_options* pf_options_new(void) {
    try {
        return new pf_options();
    } catch (...) {
        return nullptr;
    }
}

void pf_options_free(pf_options* options) { delete options; }

pf_status pf_options_set(pf_options* options, const char* key, const char* value) {
    if (options == nullptr || key == nullptr || value == nullptr) {
        return fail(PF_USAGE_ERROR, "pf_options_set: NULL argument");
    }
    return guarded([&] { options->options.set(key, value); });
}

pf_status pf_options_load_file(pf_options* options, const char* path) {
    if (options == nullptr || path == nullptr) {
        return fail(PF_USAGE_ERROR, "pf_options_load_file: NULL argument");
    }
    return guarded([&] {
        const pressflow::Options loaded = pressflow::parse_config_file(path);
        for (const auto& entry : loaded.entries()) {
            options->options.set(entry.first, entry.second);
        }
    });
}

pf_status pf_run(const char* stage, const pf_options* options) {
    if (stage == nullptr || options == nullptr) {
        return fail(PF_USAGE_ERROR, "pf_run: NULL argument");
    }
    return guarded([&] { pressflow::run_stage(stage, options->options); });
}

const char* pf_last_error(void) { return t_last_error.c_str(); }

void pf_set_log_handler(pf_log_handler handler, void* user) {
    pressflow::set_log_handler(handler, user);
}

void pf_set_verbose(int on) { pressflow::set_verbose(on != 0); }

const char* const* pf_stage_names(void) {
    static const std::vector<const char*> names = [] {
        std::vector<const char*> out;
        for (const auto& name : pressflow::stage_names()) out.push_back(name.c_str());
        out.push_back(nullptr);
        return out;
    }();
    return names.data();
}

} // extern "C"
