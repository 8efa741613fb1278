#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "nli/fock_core.hpp"

namespace nli {

using Spectral = SpectralDecomposition<double>;
using WarningSink = std::function<void(const std::string&)>;

/// Prints "warning: <msg>" to stderr.
void stderr_warning(const std::string& msg);

/// On-disk store of decompositions, one binary file per sector:
///   magic "NLISPEC\0" | u32 version | u32 n_total | f64 eigenvalues[dim]
///   | f64 eigenvectors[dim*dim] (column-major) | u64 FNV-1a of the preceding bytes
/// Doubles are written bit-for-bit, so a hit reproduces the computed values exactly.
class SpectralStore {
public:
    static constexpr std::uint32_t kFormatVersion = 1;

    explicit SpectralStore(std::filesystem::path dir, WarningSink warn = stderr_warning);

    [[nodiscard]] const std::filesystem::path& directory() const noexcept { return dir_; }
    [[nodiscard]] std::filesystem::path path_for(int n_total) const;

    /// nullopt when absent; corrupt files produce a warning and nullopt.
    [[nodiscard]] std::optional<Spectral> load(int n_total) const;
    /// false (with a warning) if the file could not be written.
    bool save(const Spectral& spectral) const;

private:
    std::filesystem::path dir_;
    WarningSink warn_;
};

/// Thread-safe memo of decompositions keyed by n_total: shared reads,
/// exclusive inserts. Optionally backed by a SpectralStore.
class SpectralCache {
public:
    struct Stats {
        std::uint64_t memory_hits = 0;
        std::uint64_t disk_hits = 0;
        std::uint64_t computed = 0;
    };

    SpectralCache() = default;
    /// Falls back to memory-only (with a warning) if `dir` cannot be created.
    explicit SpectralCache(const std::filesystem::path& dir, WarningSink warn = stderr_warning);

    SpectralCache(const SpectralCache&) = delete;
    SpectralCache& operator=(const SpectralCache&) = delete;

    [[nodiscard]] std::shared_ptr<const Spectral> get(int n_total);
    [[nodiscard]] bool has_disk_store() const noexcept { return store_.has_value(); }
    [[nodiscard]] Stats stats() const;
    [[nodiscard]] std::size_t size() const;

private:
    mutable std::shared_mutex mutex_;
    std::unordered_map<int, std::shared_ptr<const Spectral>> entries_;
    std::optional<SpectralStore> store_;
    std::atomic<std::uint64_t> memory_hits_{0}, disk_hits_{0}, computed_{0};
};

/// Process-wide memory-only cache used when callers do not supply one.
SpectralCache& default_cache();

} // namespace nli
