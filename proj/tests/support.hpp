#pragma once

#include <islm/cli.hpp>

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

namespace support {

inline std::filesystem::path source_dir() { return ISLM_SOURCE_DIR; }
inline std::filesystem::path config_path(const std::string& rel) { return source_dir() / "configs" / rel; }

inline islm::config::RunConfig load(const std::string& rel) { return islm::config::parse_config(config_path(rel)); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("islm_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

private:
    std::filesystem::path path_;
};

/// Runs the command-line front end in process.
inline int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "islm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return islm::cli::run_command(static_cast<int>(argv.size()), argv.data());
}

/// A CLI session writing into `dir`, as the command-line front end builds it.
inline islm::cli::detail::Session session(islm::config::RunConfig cfg, const std::filesystem::path& dir,
                                          const std::string& command) {
    cfg.output.dir = dir.string();
    islm::cli::Overrides ov;
    ov.quiet = true;
    return islm::cli::detail::Session(std::move(cfg), ov, command);
}

}  // namespace support
