/*
   Copyright 2026 The insarstack Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// External inpainting backends run as subprocesses:
//
//   <command> --input <in.dstk> --output <out.dstk> --config <cfg>
//
// Exit status 0 means <out.dstk> holds a dense stack with the input's
// dimensions, georeferencing and time grid. Anything written to stderr is
// relayed in the error on failure.

#include <atomic>
#include <cerrno>
#include <cstring>
#include <filesystem>

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "io.hpp"

extern char** environ;

namespace insarstack {

struct BackendSpec {
    std::filesystem::path command;
    std::filesystem::path config;
};

namespace detail {

/// Temporary directory removed on scope exit.
class ScratchDir {
public:
    ScratchDir()
    {
        static std::atomic<unsigned> counter{0};
        const auto base = std::filesystem::temp_directory_path();
        for (int attempt = 0; attempt < 100; ++attempt) {
            auto candidate = base / ("insarstack-" + std::to_string(::getpid()) + "-"
                                     + std::to_string(counter.fetch_add(1)));
            if (std::filesystem::create_directory(candidate)) {
                path_ = candidate;
                return;
            }
        }
        throw BackendError("cannot create a scratch directory under " + base.string());
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;
    ~ScratchDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

struct ProcessResult {
    int exit_code = -1;
    std::string stderr_text;
};

inline ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& stderr_path)
{
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, stderr_path.c_str(),
                                     O_WRONLY | O_CREAT | O_TRUNC, 0644);

    std::vector<char*> args;
    for (const auto& a : argv)
        args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    pid_t pid = 0;
    const int rc = ::posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0)
        throw BackendError("cannot launch backend '" + argv[0] + "': " + std::strerror(rc));

    int status = 0;
    while (::waitpid(pid, &status, 0) < 0) {
        if (errno != EINTR)
            throw BackendError("waitpid failed for backend '" + argv[0] + "'");
    }

    ProcessResult res;
    if (WIFEXITED(status))
        res.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        res.exit_code = 128 + WTERMSIG(status);
    std::error_code ec;
    if (std::filesystem::exists(stderr_path, ec))
        res.stderr_text = slurp(stderr_path);
    return res;
}

}  // namespace detail

/// Runs an external backend on `stack` and returns its validated dense output.
inline Stack inpaint_external(const Stack& stack, const BackendSpec& backend)
{
    stack.validate();
    if (backend.command.empty())
        throw BackendError("no backend command given");
    if (backend.command.has_parent_path()) {
        std::error_code ec;
        if (!std::filesystem::exists(backend.command, ec) || ::access(backend.command.c_str(), X_OK) != 0)
            throw BackendError("backend command '" + backend.command.string() + "' is not executable");
    }

    detail::ScratchDir scratch;
    const auto in = scratch.path() / "input.dstk";
    const auto out = scratch.path() / "output.dstk";
    const auto err = scratch.path() / "stderr.txt";
    write_stack(stack, in);

    auto res = detail::run_process({backend.command.string(), "--input", in.string(), "--output",
                                    out.string(), "--config", backend.config.string()},
                                   err);
    if (res.exit_code != 0)
        throw BackendError("backend exited with code " + std::to_string(res.exit_code)
                               + (res.stderr_text.empty() ? "" : ": " + res.stderr_text),
                           res.exit_code, res.stderr_text);

    Stack result;
    try {
        result = read_stack(out);
    } catch (const DataError& e) {
        throw BackendError(std::string("backend output unreadable: ") + e.what(), 0, res.stderr_text);
    }
    if (!result.same_layout(stack))
        throw BackendError("shape mismatch: backend output dims, geo or time grid differ from input", 0,
                           res.stderr_text);
    if (!result.dense())
        throw BackendError("backend output contains NaN", 0, res.stderr_text);
    return result;
}

}  // namespace insarstack
