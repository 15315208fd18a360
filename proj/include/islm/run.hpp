#pragma once

// Output-directory lock and the provenance record written beside every run.

#include <islm/export.hpp>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <string>
#include <system_error>
#include <vector>

namespace islm {

inline constexpr const char* kToolName = "islm";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kLockName = ".islm.lock";

/// Exclusive advisory lock on an output directory for the lifetime of the object.
class DirectoryLock {
public:
    explicit DirectoryLock(const std::filesystem::path& dir) : path_(dir / kLockName) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError(dir, "cannot create output directory: " + ec.message());
        fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
        if (fd_ < 0) throw IoError(path_, "cannot open lock file");
        if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd_);
            fd_ = -1;
            throw IoError(path_, "output directory is locked by another run; use a distinct --out");
        }
        const auto pid = std::to_string(::getpid()) + "\n";
        if (::ftruncate(fd_, 0) == 0) (void)!::write(fd_, pid.data(), pid.size());
    }

    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

    ~DirectoryLock() {
        if (fd_ < 0) return;
        // The file stays: unlinking it would let a waiter lock a stale inode.
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }

    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    int fd_ = -1;
};

struct Provenance {
    std::string command;
    std::string config_path;
    std::string config_echo;  ///< the effective configuration, defaults filled
    std::vector<std::string> outputs;
    std::string timestamp;
};

[[nodiscard]] inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

[[nodiscard]] inline std::string provenance_json(const Provenance& p) {
    const json j = {{"schema_version", kSchemaVersion},
                    {"tool", kToolName},
                    {"version", kToolVersion},
                    {"command", p.command},
                    {"config_path", p.config_path},
                    {"config", p.config_echo},
                    {"seeds", nullptr},
                    {"outputs", p.outputs},
                    {"timestamp", p.timestamp}};
    return j.dump(2) + "\n";
}

}  // namespace islm
